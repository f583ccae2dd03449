"""Metric catalogue, computation kernels, and the recommendation rubric."""

from .compute import (
    DEFAULT_NUM_BINS,
    DEFAULT_THRESHOLD,
    compute_metric,
    confusion_counts,
    silverman_bandwidth,
)
from .rubric import ValidationReport, recommend_metrics, validate_metric_set
from .types import (
    ALL_METRICS,
    BINARY_ONLY_METRICS,
    LOWER_IS_BETTER,
    MULTILABEL_METRICS,
    SINGLE_LABEL_METRICS,
    ConfusionCounts,
    ErrorPreference,
    MetricResult,
    MetricSpec,
    PredictionSet,
    ProblemFingerprint,
    TaskKind,
    make_prediction_set,
)

__all__ = [
    "ALL_METRICS",
    "BINARY_ONLY_METRICS",
    "DEFAULT_NUM_BINS",
    "DEFAULT_THRESHOLD",
    "LOWER_IS_BETTER",
    "MULTILABEL_METRICS",
    "SINGLE_LABEL_METRICS",
    "ConfusionCounts",
    "ErrorPreference",
    "MetricResult",
    "MetricSpec",
    "PredictionSet",
    "ProblemFingerprint",
    "TaskKind",
    "ValidationReport",
    "compute_metric",
    "confusion_counts",
    "make_prediction_set",
    "recommend_metrics",
    "silverman_bandwidth",
    "validate_metric_set",
]
