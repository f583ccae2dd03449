"""Deterministic metric-recommendation rubric.

Maps a problem fingerprint to an ordered metric set by firing the decision
branches in four fixed categories (counting, per-class, multi-threshold,
calibration) and taking their union. Multilabel tasks draw exclusively from
the multilabel metric family.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .types import (
    BINARY_ONLY_METRICS,
    MULTILABEL_METRICS,
    ErrorPreference,
    MetricSpec,
    ProblemFingerprint,
    TaskKind,
)

DEFAULT_EXCHANGE_THRESHOLD = 0.5


def recommend_metrics(fp: ProblemFingerprint) -> list[MetricSpec]:
    """Pure function from fingerprint to an ordered, de-duplicated metric set."""
    if fp.task_kind == TaskKind.MULTILABEL:
        return _recommend_multilabel(fp)
    return _recommend_single_label(fp)


def _recommend_single_label(fp: ProblemFingerprint) -> list[MetricSpec]:
    out: list[MetricSpec] = []

    # Counting metrics.
    if not fp.classes_imbalanced:
        out.append(MetricSpec("Accuracy"))
    elif fp.imbalance_compensation_requested:
        out.append(MetricSpec("BalancedAccuracy"))
        out.append(MetricSpec("MatthewsCorrelationCoefficient"))
    if fp.confusion_costs_unequal:
        out.append(MetricSpec("ExpectedCost"))

    # Per-class counting metrics.
    if fp.task_kind == TaskKind.BINARY:
        out.append(MetricSpec("Sensitivity"))
        out.append(MetricSpec("Specificity"))
    if fp.error_preference == ErrorPreference.MINIMIZE_FALSE_POSITIVES:
        out.append(MetricSpec("FBetaScore", {"beta": 0.5}))
    elif fp.error_preference == ErrorPreference.MINIMIZE_FALSE_NEGATIVES:
        out.append(MetricSpec("FBetaScore", {"beta": 2.0}))
    elif fp.error_preference == ErrorPreference.COST_BENEFIT and fp.task_kind == TaskKind.BINARY:
        out.append(MetricSpec("NetBenefit", {"exchange_threshold": DEFAULT_EXCHANGE_THRESHOLD}))

    # Multi-threshold metrics.
    if fp.high_imbalance_for_thresholding:
        out.append(MetricSpec("AveragePrecision"))
    else:
        out.append(MetricSpec("AUROC"))

    # Calibration metrics.
    if fp.calibration_requested:
        out.append(MetricSpec("ExpectedCalibrationError"))
        out.append(MetricSpec("RootBrierScore"))
    if fp.calibration_comparison:
        out.append(MetricSpec("KernelCalibrationError"))
    if fp.overall_probabilistic_score:
        out.append(MetricSpec("NegativeLogLikelihood"))
        out.append(MetricSpec("BrierScore"))

    return _dedupe(out)


def _recommend_multilabel(fp: ProblemFingerprint) -> list[MetricSpec]:
    out = [MetricSpec("MultiLabelSubsetAccuracy"), MetricSpec("MultiLabelHammingLoss")]
    if fp.classes_imbalanced and fp.imbalance_compensation_requested:
        out.append(MetricSpec("MultiLabelF1Score"))
        out.append(MetricSpec("MultiLabelJaccardScore"))
    if fp.error_preference == ErrorPreference.MINIMIZE_FALSE_POSITIVES:
        out.append(MetricSpec("MultiLabelPrecision"))
    elif fp.error_preference == ErrorPreference.MINIMIZE_FALSE_NEGATIVES:
        out.append(MetricSpec("MultiLabelRecall"))
    elif fp.error_preference == ErrorPreference.COST_BENEFIT:
        out.append(MetricSpec("MultiLabelF1Score"))
    out.append(MetricSpec("MultiLabelAUROC"))
    return _dedupe(out)


def _dedupe(specs: list[MetricSpec]) -> list[MetricSpec]:
    seen = set()
    out = []
    for spec in specs:
        if spec.key() not in seen:
            seen.add(spec.key())
            out.append(spec)
    return out


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_metric_set(specs: list[MetricSpec], fp: ProblemFingerprint) -> ValidationReport:
    """Check a metric set (possibly produced by an LLM) against a fingerprint.

    Violations are returned as data, never raised: callers decide whether to
    trigger a repair round.
    """
    report = ValidationReport()
    if not specs:
        report.violations.append("empty metric set")
        return report
    multilabel_task = fp.task_kind == TaskKind.MULTILABEL
    for spec in specs:
        is_ml = spec.id in MULTILABEL_METRICS
        if multilabel_task and not is_ml:
            report.violations.append(
                f"{spec.id} is a single-label metric; multilabel tasks allow only the MultiLabel family"
            )
        elif not multilabel_task and is_ml:
            report.violations.append(f"{spec.id} applies to multilabel tasks only")
        elif spec.id in BINARY_ONLY_METRICS and fp.task_kind != TaskKind.BINARY:
            report.violations.append(f"{spec.id} requires a binary task")
    return report
