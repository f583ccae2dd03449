"""Core data types consumed and produced by the metrics engine."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Sequence

import numpy as np

from ..errors import EmptyInput, InvalidParam, UnknownMetric

PROB_TOL = 1e-6


class TaskKind(str, Enum):
    BINARY = "binary"
    MULTICLASS = "multiclass"
    MULTILABEL = "multilabel"


# The full metric catalogue. Order is the canonical listing order.
SINGLE_LABEL_METRICS = (
    "Sensitivity",
    "Specificity",
    "PositivePredictiveValue",
    "NegativePredictiveValue",
    "PositiveLikelihoodRatio",
    "DiceSimilarityCoefficient",
    "FBetaScore",
    "NetBenefit",
    "Accuracy",
    "BalancedAccuracy",
    "MatthewsCorrelationCoefficient",
    "WeightedCohensKappa",
    "ExpectedCost",
    "AUROC",
    "AveragePrecision",
    "BrierScore",
    "RootBrierScore",
    "ExpectedCalibrationError",
    "ClassWiseECE",
    "ECEKernelDensity",
    "KernelCalibrationError",
    "NegativeLogLikelihood",
)

MULTILABEL_METRICS = (
    "MultiLabelSubsetAccuracy",
    "MultiLabelHammingLoss",
    "MultiLabelPrecision",
    "MultiLabelRecall",
    "MultiLabelF1Score",
    "MultiLabelJaccardScore",
    "MultiLabelAUROC",
)

ALL_METRICS = SINGLE_LABEL_METRICS + MULTILABEL_METRICS

# Metrics that only make sense with a designated positive class.
BINARY_ONLY_METRICS = frozenset({"PositiveLikelihoodRatio", "NetBenefit"})

# Loss-like metrics: lower is better. Everything else is higher-is-better.
LOWER_IS_BETTER = frozenset(
    {
        "ExpectedCost",
        "BrierScore",
        "RootBrierScore",
        "ExpectedCalibrationError",
        "ClassWiseECE",
        "ECEKernelDensity",
        "KernelCalibrationError",
        "NegativeLogLikelihood",
        "MultiLabelHammingLoss",
    }
)


class ErrorPreference(str, Enum):
    NONE = "none"
    MINIMIZE_FALSE_POSITIVES = "minimize_false_positives"
    MINIMIZE_FALSE_NEGATIVES = "minimize_false_negatives"
    COST_BENEFIT = "cost_benefit"


@dataclass(frozen=True)
class PredictionSet:
    """Per-sample class-probability vectors plus ground truth.

    probs has shape (n, num_classes). For binary/multiclass each row sums to
    one; for multilabel each entry is an independent probability. labels is
    an int vector of class indices for binary/multiclass, and an (n,
    num_classes) 0/1 matrix for multilabel. Class 1 is the positive class
    for binary tasks.
    """

    task_kind: TaskKind
    num_classes: int
    probs: np.ndarray
    labels: np.ndarray
    sample_ids: tuple[str, ...] = ()

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        labels = np.asarray(self.labels)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "labels", labels)
        if probs.ndim != 2:
            raise ValueError("probs must be a 2-d matrix")
        n, c = probs.shape
        if c != self.num_classes:
            raise ValueError(f"probs has {c} columns, expected {self.num_classes}")
        if n == 0:
            raise EmptyInput("prediction set has no samples")
        if np.any(probs < -PROB_TOL) or np.any(probs > 1 + PROB_TOL):
            raise ValueError("probabilities outside [0, 1]")
        if self.task_kind == TaskKind.MULTILABEL:
            if labels.shape != (n, c):
                raise ValueError("multilabel labels must match probs shape")
            if not np.isin(labels, (0, 1)).all():
                raise ValueError("multilabel labels must be 0/1")
        else:
            sums = probs.sum(axis=1)
            if np.any(np.abs(sums - 1.0) > PROB_TOL):
                raise ValueError("probability rows must sum to 1")
            if labels.shape != (n,):
                raise ValueError("labels length must equal sample count")
            if labels.min() < 0 or labels.max() >= c:
                raise ValueError("class index out of range")
            if self.task_kind == TaskKind.BINARY and c != 2:
                raise ValueError("binary tasks require exactly 2 classes")
        if self.sample_ids and len(self.sample_ids) != n:
            raise ValueError("sample_ids length must equal sample count")

    @property
    def n_samples(self) -> int:
        return self.probs.shape[0]


@dataclass(frozen=True)
class ConfusionCounts:
    """num_classes x num_classes counts; rows are truth, columns prediction."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.int64)
        object.__setattr__(self, "matrix", m)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("confusion matrix must be square")
        if (m < 0).any():
            raise ValueError("confusion counts must be non-negative")

    @property
    def num_classes(self) -> int:
        return self.matrix.shape[0]

    @property
    def total(self) -> int:
        return int(self.matrix.sum())

    def tp(self, c: int) -> int:
        return int(self.matrix[c, c])

    def fn(self, c: int) -> int:
        return int(self.matrix[c].sum() - self.matrix[c, c])

    def fp(self, c: int) -> int:
        return int(self.matrix[:, c].sum() - self.matrix[c, c])

    def tn(self, c: int) -> int:
        return self.total - self.tp(c) - self.fn(c) - self.fp(c)


@dataclass(frozen=True)
class MetricSpec:
    """A catalogue metric id plus the parameters it is evaluated with.

    Recognized params: beta (FBetaScore), exchange_threshold (NetBenefit),
    cost_matrix (ExpectedCost), weight_matrix (WeightedCohensKappa),
    threshold (decision threshold, default 0.5), num_bins (ECE variants,
    default 10), bandwidth (kernel calibration metrics, default Silverman).
    """

    id: str
    params: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.id not in ALL_METRICS:
            raise UnknownMetric(f"unknown metric: {self.id}")
        p = dict(self.params)
        object.__setattr__(self, "params", p)
        if "beta" in p and not p["beta"] > 0:
            raise InvalidParam("beta must be > 0")
        if "threshold" in p and not 0 < p["threshold"] < 1:
            raise InvalidParam("threshold must lie in (0, 1)")
        if "exchange_threshold" in p and not 0 < p["exchange_threshold"] < 1:
            raise InvalidParam("exchange_threshold must lie in (0, 1)")
        if "num_bins" in p and p["num_bins"] < 1:
            raise InvalidParam("num_bins must be >= 1")
        for key in ("cost_matrix", "weight_matrix"):
            if key in p:
                m = np.asarray(p[key], dtype=float)
                if m.ndim != 2 or m.shape[0] != m.shape[1]:
                    raise InvalidParam(f"{key} must be square")
                p[key] = m

    @property
    def multilabel(self) -> bool:
        return self.id in MULTILABEL_METRICS

    def label(self) -> str:
        """Human-readable column label, stable across runs."""
        if self.id == "FBetaScore":
            beta = self.params.get("beta", 1.0)
            return f"FBetaScore(beta={beta:g})"
        return self.id

    def key(self) -> tuple:
        """Hashable identity used for de-duplication in metric sets."""
        items = []
        for k in sorted(self.params):
            v = self.params[k]
            if isinstance(v, np.ndarray):
                v = tuple(v.ravel().tolist())
            items.append((k, v))
        return (self.id, tuple(items))


@dataclass(frozen=True)
class MetricResult:
    """Outcome of evaluating one MetricSpec on one PredictionSet.

    per_class carries the class-wise vector for macro-averaged metrics.
    degenerate marks values where an undefined ratio (empty denominator) was
    replaced by 0 so downstream tables never contain NaN.
    """

    spec: MetricSpec
    value: float
    sample_count: int
    per_class: tuple[float, ...] | None = None
    degenerate: bool = False

    def __post_init__(self):
        if not np.isfinite(self.value):
            raise ValueError("metric value must be finite; degenerate cases flag instead")


@dataclass(frozen=True)
class ProblemFingerprint:
    """Structured answers about a classification task; drives metric choice."""

    task_kind: TaskKind
    classes_imbalanced: bool = False
    imbalance_compensation_requested: bool = False
    confusion_costs_unequal: bool = False
    error_preference: ErrorPreference = ErrorPreference.NONE
    calibration_requested: bool = False
    calibration_comparison: bool = False
    overall_probabilistic_score: bool = False
    high_imbalance_for_thresholding: bool = False

    def to_dict(self) -> dict[str, Any]:
        return {
            "task_kind": self.task_kind.value,
            "classes_imbalanced": self.classes_imbalanced,
            "imbalance_compensation_requested": self.imbalance_compensation_requested,
            "confusion_costs_unequal": self.confusion_costs_unequal,
            "error_preference": self.error_preference.value,
            "calibration_requested": self.calibration_requested,
            "calibration_comparison": self.calibration_comparison,
            "overall_probabilistic_score": self.overall_probabilistic_score,
            "high_imbalance_for_thresholding": self.high_imbalance_for_thresholding,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "ProblemFingerprint":
        return cls(
            task_kind=TaskKind(d["task_kind"]),
            classes_imbalanced=bool(d.get("classes_imbalanced", False)),
            imbalance_compensation_requested=bool(
                d.get("imbalance_compensation_requested", False)
            ),
            confusion_costs_unequal=bool(d.get("confusion_costs_unequal", False)),
            error_preference=ErrorPreference(d.get("error_preference", "none")),
            calibration_requested=bool(d.get("calibration_requested", False)),
            calibration_comparison=bool(d.get("calibration_comparison", False)),
            overall_probabilistic_score=bool(d.get("overall_probabilistic_score", False)),
            high_imbalance_for_thresholding=bool(
                d.get("high_imbalance_for_thresholding", False)
            ),
        )


def make_prediction_set(
    task_kind: TaskKind | str,
    probs: Sequence,
    labels: Sequence,
    sample_ids: Sequence[str] | None = None,
) -> PredictionSet:
    """Convenience constructor that infers num_classes from the matrix."""
    probs = np.asarray(probs, dtype=float)
    if probs.ndim != 2:
        raise ValueError("probs must be 2-d")
    return PredictionSet(
        task_kind=TaskKind(task_kind),
        num_classes=probs.shape[1],
        probs=probs,
        labels=np.asarray(labels),
        sample_ids=tuple(sample_ids) if sample_ids else (),
    )
