"""Dialogue drivers: where the user's side of the conversation comes from.

Questions are matched to fingerprint/profile fields by keyword, so canned
answer files keyed by field name work with any backend whose questions use
the standard vocabulary (the rubric backend's do by construction).
"""

from __future__ import annotations

import json
import re
from pathlib import Path

from ..errors import ParseError
from ..metrics import ErrorPreference, ProblemFingerprint, TaskKind

FINGERPRINT_KEYS = (
    "task_kind",
    "classes_imbalanced",
    "imbalance_compensation_requested",
    "confusion_costs_unequal",
    "error_preference",
    "calibration_requested",
    "calibration_comparison",
    "overall_probabilistic_score",
    "high_imbalance_for_thresholding",
)

PROFILE_KEYS = (
    "equipment_variability",
    "compression_practices",
    "illumination_variability",
    "demographic_variability",
    "notes",
)

# Ordered: more specific patterns first.
_QUESTION_PATTERNS = [
    ("task_kind", r"binary, multi-class, or multi-label|what kind of classification"),
    ("imbalance_compensation_requested", r"compensat"),
    ("high_imbalance_for_thresholding", r"highly imbalanced"),
    ("classes_imbalanced", r"imbalanced"),
    ("confusion_costs_unequal", r"unequal|severity|confusion cost"),
    ("error_preference", r"false positives|false negatives|error preference"),
    ("calibration_comparison", r"compare calibration|calibration methods"),
    ("calibration_requested", r"calibration"),
    ("overall_probabilistic_score", r"probabilistic"),
    ("equipment_variability", r"equipment|vendor|scanner"),
    ("compression_practices", r"compression"),
    ("illumination_variability", r"illumination|lighting"),
    ("demographic_variability", r"demographic"),
    ("notes", r"anything else|additional context"),
]


def question_key(question: str) -> str | None:
    lowered = question.lower()
    for key, pattern in _QUESTION_PATTERNS:
        if re.search(pattern, lowered):
            return key
    return None


def parse_bool(answer: str) -> bool:
    return answer.strip().lower() in ("yes", "y", "true", "1")


def parse_task_kind(answer: str) -> TaskKind:
    lowered = answer.strip().lower()
    if "label" in lowered:
        return TaskKind.MULTILABEL
    if "multi" in lowered:
        return TaskKind.MULTICLASS
    return TaskKind.BINARY


def parse_error_preference(answer: str) -> ErrorPreference:
    lowered = answer.strip().lower()
    if "negative" in lowered:
        return ErrorPreference.MINIMIZE_FALSE_NEGATIVES
    if "positive" in lowered:
        return ErrorPreference.MINIMIZE_FALSE_POSITIVES
    if "cost" in lowered or "benefit" in lowered:
        return ErrorPreference.COST_BENEFIT
    return ErrorPreference.NONE


def fingerprint_from_answers(answers: dict[str, str]) -> ProblemFingerprint:
    """Build a fingerprint from keyed answer strings, defaulting the rest."""
    return ProblemFingerprint(
        task_kind=parse_task_kind(answers.get("task_kind", "binary")),
        classes_imbalanced=parse_bool(answers.get("classes_imbalanced", "no")),
        imbalance_compensation_requested=parse_bool(
            answers.get("imbalance_compensation_requested", "no")
        ),
        confusion_costs_unequal=parse_bool(answers.get("confusion_costs_unequal", "no")),
        error_preference=parse_error_preference(answers.get("error_preference", "none")),
        calibration_requested=parse_bool(answers.get("calibration_requested", "no")),
        calibration_comparison=parse_bool(answers.get("calibration_comparison", "no")),
        overall_probabilistic_score=parse_bool(
            answers.get("overall_probabilistic_score", "no")
        ),
        high_imbalance_for_thresholding=parse_bool(
            answers.get("high_imbalance_for_thresholding", "no")
        ),
    )


class DialogueDriver:
    """Supplies user answers to agent questions."""

    def answer(self, question: str, phase: str) -> str:
        raise NotImplementedError


class CannedDriver(DialogueDriver):
    """Answers from a key -> value map; unmatched questions get 'unknown'."""

    def __init__(self, answers: dict[str, str]):
        self.answers = {k: str(v) for k, v in answers.items()}

    def answer(self, question: str, phase: str) -> str:
        key = question_key(question)
        if key and key in self.answers:
            return self.answers[key]
        return "unknown"


class ReplayDriver(DialogueDriver):
    """Feeds back the user messages of a recorded transcript, in order."""

    def __init__(self, answers: list[str]):
        self._answers = list(answers)
        self._cursor = 0

    def answer(self, question: str, phase: str) -> str:
        if self._cursor >= len(self._answers):
            raise ParseError("transcript replay ran out of recorded answers")
        text = self._answers[self._cursor]
        self._cursor += 1
        return text


class InteractiveDriver(DialogueDriver):
    """Prompts on stdin; used by the CLI without --answers."""

    def answer(self, question: str, phase: str) -> str:
        return input(f"{question}\n> ")


def load_answers_file(path: str | Path) -> dict[str, str]:
    """Answer files are JSON objects or simple 'key: value' lines."""
    text = Path(path).read_text(encoding="utf-8").strip()
    if text.startswith("{"):
        data = json.loads(text)
        return {str(k): str(v) for k, v in data.items()}
    answers = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if ":" not in line:
            raise ParseError(f"answers file line {line_no} is not 'key: value': {line!r}")
        key, _, value = line.partition(":")
        answers[key.strip()] = value.strip()
    return answers
