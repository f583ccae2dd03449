"""Dialogue transcripts: ordered, immutable messages plus phase outcomes.

Persisted as a line-delimited record file (one JSON object per line) with a
header record carrying the audit configuration, so `replay` can rebuild the
whole session from the file alone.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

TRANSCRIPT_VERSION = 1

ROLES = ("user", "mediator", "proposer", "critic", "system")
PHASES = ("fingerprint", "metrics", "shifts", "analysis", "qa")

BACKEND_ROLES = ("mediator", "proposer", "critic")


def approx_tokens(text: str) -> int:
    """Whitespace token count; a deliberately simple usage counter."""
    return len(text.split())


@dataclass(frozen=True)
class AgentMessage:
    role: str
    phase: str
    text: str
    tags: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"unknown role: {self.role}")
        if self.phase not in PHASES:
            raise ValueError(f"unknown phase: {self.phase}")


@dataclass
class DebateTranscript:
    backend_identity: str
    messages: list[AgentMessage] = field(default_factory=list)
    outcomes: dict[str, str] = field(default_factory=dict)
    input_tokens: int = 0
    output_tokens: int = 0

    def append(self, role: str, phase: str, text: str, tags: dict | None = None) -> AgentMessage:
        msg = AgentMessage(role=role, phase=phase, text=text, tags=dict(tags or {}))
        self.messages.append(msg)
        return msg

    def record_outcome(self, phase: str, payload: str) -> None:
        self.outcomes[phase] = payload

    def count_call(self, sent_texts: list[str], reply: str) -> None:
        self.input_tokens += sum(approx_tokens(t) for t in sent_texts)
        self.output_tokens += approx_tokens(reply)

    def backend_replies(self) -> list[str]:
        """Backend-generated messages in order; feeds scripted replay."""
        return [m.text for m in self.messages if m.role in BACKEND_ROLES]

    def user_answers(self) -> list[str]:
        return [m.text for m in self.messages if m.role == "user"]


def save_transcript(path: str | Path, transcript: DebateTranscript,
                    config: dict | None = None) -> None:
    lines = [
        json.dumps(
            {
                "type": "header",
                "version": TRANSCRIPT_VERSION,
                "backend": transcript.backend_identity,
                "input_tokens": transcript.input_tokens,
                "output_tokens": transcript.output_tokens,
                "config": config or {},
            },
            sort_keys=True,
        )
    ]
    for msg in transcript.messages:
        lines.append(
            json.dumps(
                {
                    "type": "message",
                    "role": msg.role,
                    "phase": msg.phase,
                    "text": msg.text,
                    "tags": msg.tags,
                },
                sort_keys=True,
            )
        )
    for phase, payload in transcript.outcomes.items():
        lines.append(
            json.dumps(
                {"type": "outcome", "phase": phase, "payload": payload}, sort_keys=True
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_transcript(path: str | Path) -> tuple[DebateTranscript, dict]:
    from ..errors import ParseError, VersionError

    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise ParseError("empty transcript file")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise ParseError(f"corrupt transcript header: {exc}") from exc
    if header.get("type") != "header":
        raise ParseError("transcript must start with a header record")
    if header.get("version") != TRANSCRIPT_VERSION:
        raise VersionError(
            f"transcript version {header.get('version')} unsupported (expected {TRANSCRIPT_VERSION})"
        )
    transcript = DebateTranscript(backend_identity=header.get("backend", "unknown"))
    config = header.get("config", {})
    for line in lines[1:]:
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"corrupt transcript record: {exc}") from exc
        if record.get("type") == "message":
            transcript.append(
                record["role"], record["phase"], record["text"], record.get("tags")
            )
        elif record.get("type") == "outcome":
            transcript.record_outcome(record["phase"], record["payload"])
    transcript.input_tokens = int(header.get("input_tokens", 0))
    transcript.output_tokens = int(header.get("output_tokens", 0))
    return transcript, config
