"""Chat backends: remote HTTP, scripted replay, and the deterministic rubric.

The rubric backend is a no-network stand-in for the full agent: it asks the
fixed clarifying questions, nominates the rubric's metric set, maps the
deployment profile to shift kinds through an explicit table, and fills the
analysis template from the degradation summary. It is both the CI backend
and the oracle that remote-backend output is validated against.
"""

from __future__ import annotations

import json
import os
import time
from importlib import resources

from ..errors import BackendError
from ..metrics import recommend_metrics
from ..report.mitigation import mitigation_line
from .drivers import (
    FINGERPRINT_KEYS,
    PROFILE_KEYS,
    fingerprint_from_answers,
    question_key,
)
from .transcript import BACKEND_ROLES, AgentMessage

CONSENSUS_PHRASE = "no further objections"
READY_MARKER = "READY FOR DEBATE"
CREDENTIAL_ENV_VAR = "DRIFTAUDIT_API_KEY"
RESULTS_FENCE = "```json-results"

FINGERPRINT_QUESTIONS = {
    "task_kind": "Is your task binary, multi-class, or multi-label classification?",
    "classes_imbalanced": "Are the classes in your classification task imbalanced?",
    "imbalance_compensation_requested": "Should the metrics compensate for that class imbalance?",
    "confusion_costs_unequal": "Do different class confusions carry unequal severity or costs?",
    "error_preference": "Do you prefer minimizing false positives, minimizing false negatives, a cost-benefit trade-off, or neither?",
    "calibration_requested": "Is a calibration assessment requested?",
    "calibration_comparison": "Do you need to compare calibration methods against each other?",
    "overall_probabilistic_score": "Do you want an overall probabilistic performance score?",
    "high_imbalance_for_thresholding": "Are the classes so highly imbalanced that ranking metrics should account for it?",
}

PROFILE_QUESTIONS = {
    "equipment_variability": "How much does imaging equipment or vendor hardware vary across deployment sites (none, low, high)?",
    "compression_practices": "Are images stored or transmitted with lossy compression such as JPEG (none, jpeg)?",
    "illumination_variability": "How variable is illumination or lighting across capture settings (none, low, high)?",
    "demographic_variability": "How much do patient demographics vary relative to the training data (none, low, high)?",
    "notes": "Anything else about the deployment environment worth simulating?",
}


def load_prompt(name: str) -> str:
    return resources.files("driftaudit").joinpath("prompts", name).read_text(encoding="utf-8")


def load_shift_rubric() -> dict:
    raw = resources.files("driftaudit").joinpath("config", "shift_rubric.json").read_text(
        encoding="utf-8"
    )
    return json.loads(raw)


class ChatBackend:
    """Ordered messages in, one completion out. Stateless between calls."""

    identity: str = "backend"
    temperature: float = 0.5

    def complete(self, messages: list[AgentMessage], persona: str, phase: str) -> str:
        raise NotImplementedError


class ScriptedBackend(ChatBackend):
    """Replays canned completions in order; no network."""

    def __init__(self, replies: list[str], identity: str = "scripted"):
        self._replies = list(replies)
        self._cursor = 0
        self.identity = identity

    def complete(self, messages, persona, phase):
        if self._cursor >= len(self._replies):
            raise BackendError("scripted backend exhausted its replies")
        reply = self._replies[self._cursor]
        self._cursor += 1
        return reply


def collect_answers(messages: list[AgentMessage], phases: tuple[str, ...]) -> dict[str, str]:
    """Pair each backend question with the following user answer, keyed by
    the question's fingerprint/profile field."""
    answers: dict[str, str] = {}
    previous_question_key = None
    for msg in messages:
        if msg.phase not in phases:
            previous_question_key = None
            continue
        if msg.role in BACKEND_ROLES and msg.text.rstrip().endswith("?"):
            previous_question_key = question_key(msg.text)
        elif msg.role == "user" and previous_question_key:
            answers[previous_question_key] = msg.text
            previous_question_key = None
    return answers


class RubricBackend(ChatBackend):
    """Deterministic agent: fixed questions, rubric nominations, table-driven
    shift selection, template-filled analysis."""

    identity = "rubric"

    def __init__(self):
        self._shift_rubric = load_shift_rubric()

    def complete(self, messages, persona, phase):
        if phase in ("fingerprint", "metrics"):
            return self._metric_reply(messages, persona)
        if phase == "shifts":
            return self._shift_reply(messages, persona)
        if phase == "analysis":
            return self._analysis_reply(messages)
        if phase == "qa":
            return self._qa_reply(messages)
        raise BackendError(f"rubric backend has no behavior for phase {phase}")

    # Metric phase -------------------------------------------------------

    def _metric_tag(self, messages) -> str:
        answers = collect_answers(messages, ("fingerprint", "metrics"))
        fingerprint = fingerprint_from_answers(answers)
        names = "\n".join(spec.id for spec in recommend_metrics(fingerprint))
        return f"<metric>\n{names}\n</metric>"

    def _metric_reply(self, messages, persona) -> str:
        answers = collect_answers(messages, ("fingerprint", "metrics"))
        if persona == "proposer":
            return (
                "Given the task fingerprint I nominate this metric set:\n"
                + self._metric_tag(messages)
            )
        if persona == "critic":
            return "The nomination matches the decision logic. No further objections."
        missing = [k for k in FINGERPRINT_KEYS if k not in answers]
        if missing:
            return FINGERPRINT_QUESTIONS[missing[0]]
        if any(m.role == "proposer" and m.phase == "metrics" for m in messages):
            return "Consensus reached.\n" + self._metric_tag(messages)
        return READY_MARKER

    # Shift phase --------------------------------------------------------

    def _shift_tag(self, messages) -> str:
        answers = collect_answers(messages, ("shifts",))
        merged: dict[str, list] = {}

        def add(line: str):
            name, _, rest = line.partition("(")
            name = name.strip()
            params = []
            if rest:
                params = [
                    float(tok) if "." in tok else int(tok)
                    for tok in rest.strip("()[] ").split(",")
                    if tok.strip()
                ]
            bucket = merged.setdefault(name, [])
            for p in params:
                if p not in bucket:
                    bucket.append(p)

        fired = False
        for field_name, table in self._shift_rubric["fields"].items():
            answer = answers.get(field_name, "").strip().lower()
            if answer in table:
                fired = True
                for line in table[answer]:
                    add(line)
        if not fired:
            for line in self._shift_rubric["default"]:
                add(line)
        lines = []
        for name, params in merged.items():
            if params:
                body = ", ".join(
                    str(p) if isinstance(p, int) else repr(float(p)) for p in params
                )
                lines.append(f"{name}([{body}])")
            else:
                lines.append(name)
        return "<shift>\n" + "\n".join(lines) + "\n</shift>"

    def _shift_reply(self, messages, persona) -> str:
        answers = collect_answers(messages, ("shifts",))
        if persona == "proposer":
            return (
                "Based on the deployment profile I nominate these shifts:\n"
                + self._shift_tag(messages)
            )
        if persona == "critic":
            return "The selected shifts cover the reported deployment variability. No further objections."
        missing = [k for k in PROFILE_KEYS if k not in answers]
        if missing:
            return PROFILE_QUESTIONS[missing[0]]
        if any(m.role == "proposer" and m.phase == "shifts" for m in messages):
            return "Consensus reached.\n" + self._shift_tag(messages)
        return READY_MARKER

    # Analysis phase -----------------------------------------------------

    @staticmethod
    def _find_payload(messages) -> dict | None:
        for msg in reversed(messages):
            if RESULTS_FENCE in msg.text:
                fenced = msg.text.split(RESULTS_FENCE, 1)[1]
                body = fenced.split("```", 1)[0]
                return json.loads(body)
        return None

    def _analysis_reply(self, messages) -> str:
        payload = self._find_payload(messages)
        if payload is None:
            raise BackendError("analysis request carried no results payload")
        return render_analysis_template(payload)

    def _qa_reply(self, messages) -> str:
        payload = self._find_payload(messages)
        if payload is None:
            return "I have no audit results in context to ground an answer."
        worst = _worst_cells(payload, limit=1)
        if not worst:
            return "No shifted condition degraded any selected metric in this audit."
        cell = worst[0]
        return (
            f"The largest observed degradation was {cell['metric']} at "
            f"{cell['value']:.4f} under {cell['row']} "
            f"(baseline {cell['baseline']:.4f}, delta {cell['delta']:+.4f}); "
            "the full table is in the results appendix."
        )


def _worst_cells(payload: dict, limit: int = 3) -> list[dict]:
    cells = [
        c for c in payload.get("cells", [])
        if c["row"] != "BASELINE" and c["delta"] < 0
    ]
    cells.sort(key=lambda c: (c["delta"], c["row"], c["metric"]))
    return cells[:limit]


def render_analysis_template(payload: dict) -> str:
    """Deterministic four-section analysis draft from the degradation table."""
    worst = _worst_cells(payload)
    stable = [c for c in payload.get("cells", []) if c["row"] != "BASELINE"]
    stable.sort(key=lambda c: (-c["delta"], c["row"], c["metric"]))

    lines = ["1. Failure cases and strengths"]
    if worst:
        for cell in worst:
            lines.append(
                f"- {cell['metric']} degraded to {cell['value']:.4f} under {cell['row']} "
                f"(baseline {cell['baseline']:.4f}, delta {cell['delta']:+.4f})."
            )
    else:
        lines.append("- No shifted condition degraded any selected metric.")
    if stable:
        best = stable[0]
        lines.append(
            f"- Most stable cell: {best['metric']} stayed at {best['value']:.4f} "
            f"under {best['row']} (delta {best['delta']:+.4f})."
        )

    lines.append("")
    lines.append("2. Deployment impact")
    if worst:
        seen_kinds = []
        for cell in worst:
            if cell["kind"] and cell["kind"] not in seen_kinds:
                seen_kinds.append(cell["kind"])
                lines.append(
                    f"- Deployment conditions resembling {cell['kind']} could cost up to "
                    f"{abs(cell['delta']):.4f} of {cell['metric']} relative to the clean baseline."
                )
    else:
        lines.append("- Observed behavior was stable across the simulated conditions.")

    lines.append("")
    lines.append("3. Mitigation transformations")
    kinds_with_params: dict[str, list] = {}
    source = worst if worst else [c for c in payload.get("cells", []) if c["kind"]]
    for cell in source:
        if cell["kind"]:
            kinds_with_params.setdefault(cell["kind"], [])
    for row in payload.get("rows", []):
        if row.get("kind") in kinds_with_params and row.get("param") is not None:
            kinds_with_params[row["kind"]].append(row["param"])
    if kinds_with_params:
        for kind, params in kinds_with_params.items():
            lines.append(f"- {mitigation_line(kind, params)}")
    else:
        lines.append("- v2.RandomHorizontalFlip(p=0.5)")

    lines.append("")
    lines.append("4. Other notes")
    meta = payload.get("metadata", {})
    lines.append(
        f"- Audit ran on {meta.get('sample_size', 'n/a')} stratified samples with seed "
        f"{meta.get('seed', 'n/a')}; rerun after retraining to confirm the mitigation closed the gap."
    )
    return "\n".join(lines)


class RemoteBackend(ChatBackend):
    """Stateless chat-completion HTTP endpoint.

    Contract: POST {"messages": [{"role", "content"}...], "temperature": t}
    returning {"content": "..."}; bearer credential from the environment.
    """

    def __init__(self, endpoint: str, temperature: float = 0.5,
                 timeout: float = 60.0, retries: int = 2):
        self.endpoint = endpoint
        self.temperature = temperature
        self.timeout = timeout
        self.retries = retries
        self.identity = f"remote:{endpoint}"

    def complete(self, messages, persona, phase):
        import requests

        wire = []
        for msg in messages:
            if msg.role == "system":
                role = "system"
            elif msg.role == "user":
                role = "user"
            else:
                role = "assistant"
            wire.append({"role": role, "content": msg.text})
        wire.append(
            {
                "role": "system",
                "content": f"You are the {persona} in the {phase} phase. Reply as that participant.",
            }
        )
        headers = {}
        credential = os.environ.get(CREDENTIAL_ENV_VAR)
        if credential:
            headers["Authorization"] = f"Bearer {credential}"
        last_error = None
        for attempt in range(self.retries + 1):
            try:
                resp = requests.post(
                    self.endpoint,
                    json={"messages": wire, "temperature": self.temperature},
                    headers=headers,
                    timeout=self.timeout,
                )
                resp.raise_for_status()
                body = resp.json()
                if "content" not in body:
                    raise BackendError("remote backend reply missing 'content'")
                return str(body["content"])
            except BackendError:
                raise
            except Exception as exc:
                last_error = exc
                if attempt < self.retries:
                    time.sleep(0.5 * 2**attempt)
        raise BackendError(f"remote backend failed after {self.retries + 1} attempts: {last_error}")


def make_backend(kind: str, endpoint: str | None = None,
                 script: list[str] | None = None) -> ChatBackend:
    if kind == "rubric":
        return RubricBackend()
    if kind == "scripted":
        return ScriptedBackend(script or [])
    if kind == "remote":
        if not endpoint:
            raise BackendError("remote backend requires an endpoint")
        return RemoteBackend(endpoint)
    raise BackendError(f"unknown backend kind: {kind}")
