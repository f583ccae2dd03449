"""The three audit phases as structured dialogues.

Protocol per selection phase (metrics, shifts):

1. The phase system prompt is appended and the backend is queried as the
   mediator. Replies that end in '?' are clarifying questions, answered by
   the driver. A reply carrying the phase tag short-circuits straight to
   validation (scripted transcripts do this); the READY marker hands over
   to the proposer/critic debate.
2. Debate: the proposer nominates (tag in message), the critic objects or
   concedes; mediation closes at the consensus phrase or, after max rounds,
   adopts the proposer's last nomination flagged as forced.
3. The last well-formed tag across the phase is parsed and validated, with
   exactly one automated repair round quoting the error before PhaseFailure.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from ..audit import AuditResults, results_json_payload, results_markdown
from ..errors import (
    BackendError,
    DriftAuditError,
    PhaseFailure,
)
from ..metrics import (
    ALL_METRICS,
    ErrorPreference,
    MetricSpec,
    ProblemFingerprint,
    validate_metric_set,
)
from ..shifts import parse_shift_plan, serialize_shift_plan
from .backends import (
    CONSENSUS_PHRASE,
    READY_MARKER,
    RESULTS_FENCE,
    ChatBackend,
    collect_answers,
    load_prompt,
)
from .drivers import DialogueDriver, fingerprint_from_answers
from .tags import find_tagged_block
from .transcript import DebateTranscript

MAX_QUESTION_ROUNDS = 12
MAX_DEBATE_ROUNDS = 6
DEFAULT_EXCHANGE_THRESHOLD = 0.5

_METRIC_BY_SQUASH = {re.sub(r"[^a-z0-9]", "", m.lower()): m for m in ALL_METRICS}


@dataclass(frozen=True)
class DeploymentProfile:
    equipment_variability: str = "unknown"
    compression_practices: str = "unknown"
    illumination_variability: str = "unknown"
    demographic_variability: str = "unknown"
    notes: str = ""

    @classmethod
    def from_answers(cls, answers: dict[str, str]) -> "DeploymentProfile":
        def norm(key):
            return answers.get(key, "unknown").strip().lower() or "unknown"

        return cls(
            equipment_variability=norm("equipment_variability"),
            compression_practices=norm("compression_practices"),
            illumination_variability=norm("illumination_variability"),
            demographic_variability=norm("demographic_variability"),
            notes=answers.get("notes", "").strip(),
        )

    def to_dict(self) -> dict[str, str]:
        return {
            "equipment_variability": self.equipment_variability,
            "compression_practices": self.compression_practices,
            "illumination_variability": self.illumination_variability,
            "demographic_variability": self.demographic_variability,
            "notes": self.notes,
        }


def _call(backend: ChatBackend, transcript: DebateTranscript, persona: str,
          phase: str, tag_name: str | None = None) -> str:
    reply = backend.complete(transcript.messages, persona, phase)
    transcript.count_call([m.text for m in transcript.messages], reply)
    tags = {}
    if tag_name:
        payload = find_tagged_block(reply, tag_name)
        if payload is not None:
            tags[tag_name] = payload
    transcript.append(persona, phase, reply, tags)
    return reply


def debate(topic: str, proposer, critic, mediator, max_rounds: int = MAX_DEBATE_ROUNDS):
    """Proposer/critic exchange mediated to consensus.

    Callables produce (and record) one message each. Returns
    (consensus_text, forced, rounds); forced means max_rounds elapsed and the
    proposer's last nomination was adopted without the critic conceding.
    """
    if max_rounds < 1:
        raise ValueError("max_rounds must be >= 1")
    last_proposal = proposer()
    rounds = 0
    forced = True
    for i in range(max_rounds):
        rounds += 1
        critic_text = critic()
        if CONSENSUS_PHRASE in critic_text.lower():
            forced = False
            break
        if i < max_rounds - 1:
            last_proposal = proposer()
    consensus = mediator(forced, last_proposal)
    return consensus, forced, rounds


def _run_selection_phase(
    backend: ChatBackend,
    driver: DialogueDriver,
    transcript: DebateTranscript,
    *,
    prompt_file: str,
    elicit_phase: str,
    debate_phase: str,
    tag_name: str,
    topic: str,
    max_question_rounds: int,
    max_debate_rounds: int,
) -> str:
    """Shared elicitation + debate skeleton; returns the winning tag payload."""
    transcript.append("system", elicit_phase, load_prompt(prompt_file))
    candidate = None
    try:
        for _ in range(max_question_rounds):
            reply = _call(backend, transcript, "mediator", elicit_phase, tag_name)
            payload = find_tagged_block(reply, tag_name)
            if payload is not None:
                candidate = payload
                break
            if reply.strip() == READY_MARKER:
                break
            answer = driver.answer(reply.strip(), elicit_phase)
            transcript.append("user", elicit_phase, answer)
        else:
            raise PhaseFailure(
                f"no <{tag_name}> tag after {max_question_rounds} rounds", transcript
            )
    except BackendError as exc:
        raise PhaseFailure(
            f"backend failed before producing a <{tag_name}> tag: {exc}", transcript
        ) from exc

    if candidate is None:
        def proposer():
            return _call(backend, transcript, "proposer", debate_phase, tag_name)

        def critic():
            return _call(backend, transcript, "critic", debate_phase, tag_name)

        def mediator(forced, last_proposal):
            if forced:
                text = (
                    "forced: adopting the proposer's last nomination after "
                    f"{max_debate_rounds} rounds without consensus.\n{last_proposal}"
                )
                transcript.append("mediator", debate_phase, text,
                                  {tag_name: find_tagged_block(text, tag_name) or ""})
                return text
            return _call(backend, transcript, "mediator", debate_phase, tag_name)

        debate(topic, proposer, critic, mediator, max_debate_rounds)
        for msg in reversed(transcript.messages):
            if msg.phase in (elicit_phase, debate_phase) and msg.tags.get(tag_name):
                candidate = msg.tags[tag_name]
                break
        if candidate is None:
            raise PhaseFailure(f"debate produced no <{tag_name}> tag", transcript)
    return candidate


def metric_specs_from_payload(payload: str, fp: ProblemFingerprint):
    """Metric names (one per line, no hyperparameters) to parameterized specs."""
    names = []
    for line in payload.replace(",", "\n").splitlines():
        name = line.strip().strip("-*").strip()
        if name:
            names.append(name)
    specs, unknown = [], []
    for name in names:
        canonical = _METRIC_BY_SQUASH.get(re.sub(r"[^a-z0-9]", "", name.lower()))
        if canonical is None:
            unknown.append(name)
            continue
        params = {}
        if canonical == "FBetaScore":
            if fp.error_preference == ErrorPreference.MINIMIZE_FALSE_NEGATIVES:
                params["beta"] = 2.0
            elif fp.error_preference == ErrorPreference.MINIMIZE_FALSE_POSITIVES:
                params["beta"] = 0.5
            else:
                params["beta"] = 1.0
        elif canonical == "NetBenefit":
            params["exchange_threshold"] = DEFAULT_EXCHANGE_THRESHOLD
        specs.append(MetricSpec(canonical, params))
    deduped, seen = [], set()
    for spec in specs:
        if spec.key() not in seen:
            seen.add(spec.key())
            deduped.append(spec)
    return deduped, unknown


def run_metric_phase(
    backend: ChatBackend,
    driver: DialogueDriver,
    transcript: DebateTranscript | None = None,
    max_question_rounds: int = MAX_QUESTION_ROUNDS,
    max_debate_rounds: int = MAX_DEBATE_ROUNDS,
):
    """Fingerprint elicitation plus the metric-selection debate."""
    transcript = transcript or DebateTranscript(backend.identity)
    payload = _run_selection_phase(
        backend, driver, transcript,
        prompt_file="metrics_prompt.txt",
        elicit_phase="fingerprint",
        debate_phase="metrics",
        tag_name="metric",
        topic="metric selection",
        max_question_rounds=max_question_rounds,
        max_debate_rounds=max_debate_rounds,
    )
    answers = collect_answers(transcript.messages, ("fingerprint", "metrics"))
    fingerprint = fingerprint_from_answers(answers)

    def resolve(pl):
        specs, unknown = metric_specs_from_payload(pl, fingerprint)
        problems = [f"unknown metric: {n}" for n in unknown]
        problems.extend(validate_metric_set(specs, fingerprint).violations)
        return specs, problems

    specs, problems = resolve(payload)
    if problems:
        transcript.append(
            "user", "metrics",
            "The metric selection is invalid: " + "; ".join(problems)
            + ". Reply with a corrected <metric> block.",
        )
        try:
            reply = _call(backend, transcript, "mediator", "metrics", "metric")
        except BackendError as exc:
            raise PhaseFailure(f"repair round failed: {exc}", transcript) from exc
        payload = find_tagged_block(reply, "metric")
        if payload is None:
            raise PhaseFailure("repair round produced no <metric> tag", transcript)
        specs, problems = resolve(payload)
        if problems:
            raise PhaseFailure(
                "metric set still invalid after repair: " + "; ".join(problems),
                transcript,
            )
    transcript.record_outcome("fingerprint", json.dumps(fingerprint.to_dict(), sort_keys=True))
    transcript.record_outcome("metrics", "\n".join(s.id for s in specs))
    return specs, fingerprint, transcript


def run_shift_phase(
    backend: ChatBackend,
    driver: DialogueDriver,
    fingerprint: ProblemFingerprint,
    transcript: DebateTranscript | None = None,
    max_question_rounds: int = MAX_QUESTION_ROUNDS,
    max_debate_rounds: int = MAX_DEBATE_ROUNDS,
):
    """Deployment questionnaire plus the shift-selection debate."""
    transcript = transcript or DebateTranscript(backend.identity)
    payload = _run_selection_phase(
        backend, driver, transcript,
        prompt_file="shifts_prompt.txt",
        elicit_phase="shifts",
        debate_phase="shifts",
        tag_name="shift",
        topic="shift selection",
        max_question_rounds=max_question_rounds,
        max_debate_rounds=max_debate_rounds,
    )

    def resolve(pl):
        try:
            return parse_shift_plan(pl), None
        except DriftAuditError as exc:
            return None, f"{type(exc).__name__}: {exc}"

    plan, problem = resolve(payload)
    if problem:
        transcript.append(
            "user", "shifts",
            f"The shift plan is invalid ({problem}). Reply with a corrected "
            "<shift> block using only catalogue shifts.",
        )
        try:
            reply = _call(backend, transcript, "mediator", "shifts", "shift")
        except BackendError as exc:
            raise PhaseFailure(f"repair round failed: {exc}", transcript) from exc
        payload = find_tagged_block(reply, "shift")
        if payload is None:
            raise PhaseFailure("repair round produced no <shift> tag", transcript)
        plan, problem = resolve(payload)
        if problem:
            raise PhaseFailure(
                f"shift plan still invalid after repair: {problem}", transcript
            )
    profile = DeploymentProfile.from_answers(
        collect_answers(transcript.messages, ("shifts",))
    )
    transcript.record_outcome("shifts", serialize_shift_plan(plan))
    transcript.record_outcome("profile", json.dumps(profile.to_dict(), sort_keys=True))
    return plan, profile, transcript


_SECTION_RE = re.compile(r"(?m)^\s*(?:#+\s*)?([1-4])[.)]\s+")


def split_sections(draft: str) -> dict[int, str] | None:
    """Positions of the four ordered numbered sections, or None if malformed."""
    matches = list(_SECTION_RE.finditer(draft))
    numbers = [int(m.group(1)) for m in matches]
    if numbers != [1, 2, 3, 4]:
        return None
    sections = {}
    for i, match in enumerate(matches):
        start = match.end()
        end = matches[i + 1].start() if i + 1 < len(matches) else len(draft)
        sections[int(match.group(1))] = draft[start:end].strip()
    return sections


def run_analysis_phase(
    backend: ChatBackend,
    results: AuditResults,
    transcript: DebateTranscript | None = None,
) -> tuple[str, DebateTranscript]:
    """Produce the four-section analysis draft for the rendered report."""
    transcript = transcript or DebateTranscript(backend.identity)
    if not results.rows:
        raise PhaseFailure("nothing to analyze: results are empty", transcript)
    transcript.append("system", "analysis", load_prompt("analysis_prompt.txt"))
    transcript.append(
        "user", "analysis",
        "Here are the shift audit results.\n\n"
        + results_markdown(results)
        + f"\n\n{RESULTS_FENCE}\n{results_json_payload(results)}\n```",
    )
    try:
        draft = _call(backend, transcript, "mediator", "analysis")
    except BackendError as exc:
        raise PhaseFailure(f"analysis backend failed: {exc}", transcript) from exc
    if split_sections(draft) is None:
        transcript.append(
            "user", "analysis",
            "The analysis must contain the four numbered sections 1-4 in order. "
            "Reply with a corrected draft.",
        )
        try:
            draft = _call(backend, transcript, "mediator", "analysis")
        except BackendError as exc:
            raise PhaseFailure(f"repair round failed: {exc}", transcript) from exc
        if split_sections(draft) is None:
            raise PhaseFailure("analysis draft malformed after repair", transcript)
    transcript.record_outcome("analysis", draft)
    return draft, transcript


def answer_question(backend: ChatBackend, transcript: DebateTranscript, question: str) -> str:
    """Post-audit Q&A over the same dialogue thread."""
    transcript.append("user", "qa", question)
    return _call(backend, transcript, "mediator", "qa")
