"""Metric implementations for the full 29-entry catalogue.

Conventions (pinned so audits reproduce bit-for-bit across runs):

- Binary decisions: predicted positive iff P(class 1) >= threshold.
- Multiclass decisions: argmax (first index wins ties).
- Multilabel decisions: per-label probability >= threshold.
- Macro averages run over all classes/labels; any undefined ratio (empty
  denominator) contributes 0.0 and sets the result's ``degenerate`` flag,
  so small shifted samples never abort an audit with NaNs.
- ECE variants bin the top-class confidence into equal-width bins over
  [0, 1] (value 1.0 falls into the last bin).
- Kernel-based calibration metrics use a Gaussian kernel with Silverman's
  rule on the top-class confidences (floored at 1e-3) unless a bandwidth
  param is supplied.
- NegativeLogLikelihood clamps probabilities to [1e-12, 1] before log.
- BrierScore is the mean squared error of the probability vector against
  the one-hot truth, divided by num_classes so it lands in [0, 1].
"""

from __future__ import annotations

import numpy as np
from scipy.stats import rankdata

from ..errors import EmptyInput, MissingParam, WrongTaskKind
from .types import (
    BINARY_ONLY_METRICS,
    MULTILABEL_METRICS,
    ConfusionCounts,
    MetricResult,
    MetricSpec,
    PredictionSet,
    TaskKind,
)

DEFAULT_THRESHOLD = 0.5
DEFAULT_NUM_BINS = 10
PROB_CLAMP = 1e-12
MIN_BANDWIDTH = 1e-3


def _ratio(num: float, den: float) -> tuple[float, bool]:
    """num/den with the degenerate-denominator policy: 0.0 plus a flag."""
    if den == 0:
        return 0.0, True
    return num / den, False


def confusion_counts(preds: PredictionSet, threshold: float = DEFAULT_THRESHOLD) -> ConfusionCounts:
    """Tally the truth-by-prediction count matrix for single-label tasks."""
    if preds.task_kind == TaskKind.MULTILABEL:
        raise WrongTaskKind("confusion counts are defined for single-label tasks only")
    if preds.n_samples == 0:
        raise EmptyInput("no samples")
    if preds.task_kind == TaskKind.BINARY:
        predicted = (preds.probs[:, 1] >= threshold).astype(int)
    else:
        predicted = np.argmax(preds.probs, axis=1)
    c = preds.num_classes
    matrix = np.zeros((c, c), dtype=np.int64)
    np.add.at(matrix, (preds.labels.astype(int), predicted), 1)
    return ConfusionCounts(matrix)


def _predicted_labels(preds: PredictionSet, threshold: float) -> np.ndarray:
    if preds.task_kind == TaskKind.BINARY:
        return (preds.probs[:, 1] >= threshold).astype(int)
    return np.argmax(preds.probs, axis=1)


def _macro_over_classes(counts: ConfusionCounts, per_class_fn) -> tuple[float, tuple[float, ...], bool]:
    values = []
    degenerate = False
    for c in range(counts.num_classes):
        v, d = per_class_fn(counts.tp(c), counts.fn(c), counts.fp(c), counts.tn(c))
        values.append(v)
        degenerate |= d
    return float(np.mean(values)), tuple(values), degenerate


def _positive_or_macro(preds: PredictionSet, counts: ConfusionCounts, per_class_fn):
    """Binary metrics read the positive class; multiclass macro-averages."""
    if preds.task_kind == TaskKind.BINARY:
        v, d = per_class_fn(counts.tp(1), counts.fn(1), counts.fp(1), counts.tn(1))
        return v, None, d
    return _macro_over_classes(counts, per_class_fn)


def _sensitivity(tp, fn, fp, tn):
    return _ratio(tp, tp + fn)


def _specificity(tp, fn, fp, tn):
    return _ratio(tn, tn + fp)


def _ppv(tp, fn, fp, tn):
    return _ratio(tp, tp + fp)


def _npv(tp, fn, fp, tn):
    return _ratio(tn, tn + fn)


def _dice(tp, fn, fp, tn):
    return _ratio(2 * tp, 2 * tp + fp + fn)


def _fbeta(tp, fn, fp, tn, beta):
    ppv, d1 = _ppv(tp, fn, fp, tn)
    sens, d2 = _sensitivity(tp, fn, fp, tn)
    value, d3 = _ratio((1 + beta**2) * ppv * sens, beta**2 * ppv + sens)
    return value, d1 or d2 or d3


def _mcc(counts: ConfusionCounts) -> tuple[float, bool]:
    """Multiclass correlation from the full matrix; reduces to the familiar
    TP/TN/FP/FN form for two classes."""
    m = counts.matrix.astype(float)
    s = m.sum()
    correct = np.trace(m)
    truth = m.sum(axis=1)
    pred = m.sum(axis=0)
    num = correct * s - float(truth @ pred)
    den_sq = (s**2 - float(pred @ pred)) * (s**2 - float(truth @ truth))
    if den_sq <= 0:
        return 0.0, True
    return num / np.sqrt(den_sq), False


def _auroc_binary(scores: np.ndarray, positives: np.ndarray) -> tuple[float, bool]:
    """Average-rank (Mann-Whitney) AUROC; ties count half."""
    n_pos = int(positives.sum())
    n_neg = len(positives) - n_pos
    if n_pos == 0 or n_neg == 0:
        return 0.0, True
    ranks = rankdata(scores)
    u = ranks[positives].sum() - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg), False


def _average_precision_binary(scores: np.ndarray, positives: np.ndarray) -> tuple[float, bool]:
    """Step-wise AP over the unique-score threshold sweep."""
    n_pos = int(positives.sum())
    if n_pos == 0:
        return 0.0, True
    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    sorted_pos = positives[order].astype(float)
    tp_cum = np.cumsum(sorted_pos)
    fp_cum = np.cumsum(1.0 - sorted_pos)
    # Collapse tied scores: evaluate at the last index of each tie group.
    distinct = np.nonzero(np.diff(sorted_scores))[0]
    cut = np.r_[distinct, len(sorted_scores) - 1]
    tp = tp_cum[cut]
    fp = fp_cum[cut]
    precision = tp / (tp + fp)
    recall = tp / n_pos
    prev_recall = np.r_[0.0, recall[:-1]]
    return float(np.sum((recall - prev_recall) * precision)), False


def _ovr_macro(preds: PredictionSet, per_label_fn) -> tuple[float, tuple[float, ...], bool]:
    values = []
    degenerate = False
    for c in range(preds.num_classes):
        v, d = per_label_fn(preds.probs[:, c], preds.labels == c)
        values.append(v)
        degenerate |= d
    return float(np.mean(values)), tuple(values), degenerate


def _top_confidence(preds: PredictionSet) -> tuple[np.ndarray, np.ndarray]:
    conf = preds.probs.max(axis=1)
    correct = (np.argmax(preds.probs, axis=1) == preds.labels).astype(float)
    return conf, correct


def _bin_index(conf: np.ndarray, num_bins: int) -> np.ndarray:
    return np.minimum((conf * num_bins).astype(int), num_bins - 1)


def _ece(preds: PredictionSet, num_bins: int) -> float:
    conf, correct = _top_confidence(preds)
    idx = _bin_index(conf, num_bins)
    n = len(conf)
    total = 0.0
    for b in range(num_bins):
        mask = idx == b
        nb = int(mask.sum())
        if nb == 0:
            continue
        total += (nb / n) * abs(correct[mask].mean() - conf[mask].mean())
    return total


def _classwise_ece(preds: PredictionSet, num_bins: int) -> tuple[float, tuple[float, ...]]:
    n = preds.n_samples
    per_class = []
    for c in range(preds.num_classes):
        p = preds.probs[:, c]
        hit = (preds.labels == c).astype(float)
        idx = _bin_index(p, num_bins)
        total = 0.0
        for b in range(num_bins):
            mask = idx == b
            nb = int(mask.sum())
            if nb == 0:
                continue
            total += (nb / n) * abs(hit[mask].mean() - p[mask].mean())
        per_class.append(total)
    return float(np.mean(per_class)), tuple(per_class)


def silverman_bandwidth(values: np.ndarray) -> float:
    """0.9 * min(std, IQR/1.34) * n^(-1/5), floored to keep kernels finite."""
    n = len(values)
    std = float(np.std(values, ddof=1)) if n > 1 else 0.0
    q75, q25 = np.percentile(values, [75, 25])
    spread = min(std, (q75 - q25) / 1.34)
    return max(0.9 * spread * n ** (-0.2), MIN_BANDWIDTH)


def _ece_kernel_density(preds: PredictionSet, bandwidth: float | None) -> float:
    """Kernel-smoothed reliability curve evaluated at each sample's confidence."""
    conf, correct = _top_confidence(preds)
    h = bandwidth if bandwidth is not None else silverman_bandwidth(conf)
    diff = conf[:, None] - conf[None, :]
    w = np.exp(-0.5 * (diff / h) ** 2)
    smoothed = (w * correct[None, :]).sum(axis=1) / w.sum(axis=1)
    return float(np.mean(np.abs(smoothed - conf)))


def _kernel_calibration_error(preds: PredictionSet, bandwidth: float | None) -> float:
    """Square root of the V-statistic kernel calibration score on probability
    vectors (Gaussian kernel times the identity)."""
    conf = preds.probs.max(axis=1)
    h = bandwidth if bandwidth is not None else silverman_bandwidth(conf)
    onehot = np.zeros_like(preds.probs)
    onehot[np.arange(preds.n_samples), preds.labels.astype(int)] = 1.0
    resid = onehot - preds.probs
    sq_dist = ((preds.probs[:, None, :] - preds.probs[None, :, :]) ** 2).sum(axis=2)
    gram = np.exp(-sq_dist / (2 * h**2))
    inner = resid @ resid.T
    v_stat = float((gram * inner).sum()) / preds.n_samples**2
    return float(np.sqrt(max(v_stat, 0.0)))


def _brier(preds: PredictionSet) -> float:
    onehot = np.zeros_like(preds.probs)
    onehot[np.arange(preds.n_samples), preds.labels.astype(int)] = 1.0
    return float(np.mean(((preds.probs - onehot) ** 2).sum(axis=1))) / preds.num_classes


def _nll(preds: PredictionSet) -> float:
    p_true = preds.probs[np.arange(preds.n_samples), preds.labels.astype(int)]
    return float(np.mean(-np.log(np.clip(p_true, PROB_CLAMP, 1.0))))


def _multilabel_counts(preds: PredictionSet, threshold: float, label: int):
    pred = preds.probs[:, label] >= threshold
    truth = preds.labels[:, label].astype(bool)
    tp = int(np.sum(pred & truth))
    fp = int(np.sum(pred & ~truth))
    fn = int(np.sum(~pred & truth))
    tn = int(np.sum(~pred & ~truth))
    return tp, fn, fp, tn


def _multilabel_macro(preds: PredictionSet, threshold: float, per_label_fn):
    values = []
    degenerate = False
    for lbl in range(preds.num_classes):
        tp, fn, fp, tn = _multilabel_counts(preds, threshold, lbl)
        v, d = per_label_fn(tp, fn, fp, tn)
        values.append(v)
        degenerate |= d
    return float(np.mean(values)), tuple(values), degenerate


def _jaccard(tp, fn, fp, tn):
    return _ratio(tp, tp + fp + fn)


def _f1(tp, fn, fp, tn):
    return _fbeta(tp, fn, fp, tn, 1.0)


def compute_metric(spec: MetricSpec, preds: PredictionSet) -> MetricResult:
    """Evaluate one catalogue metric on a prediction set.

    Raises WrongTaskKind on a task/metric mismatch and MissingParam when a
    required parameter (NetBenefit's exchange threshold) is absent.
    Degenerate denominators yield flagged zeros, never exceptions.
    """
    if preds.n_samples == 0:
        raise EmptyInput("no samples")
    is_ml_metric = spec.id in MULTILABEL_METRICS
    if is_ml_metric != (preds.task_kind == TaskKind.MULTILABEL):
        raise WrongTaskKind(f"{spec.id} is not applicable to {preds.task_kind.value} tasks")
    if spec.id in BINARY_ONLY_METRICS and preds.task_kind != TaskKind.BINARY:
        raise WrongTaskKind(f"{spec.id} requires a binary task")

    threshold = spec.params.get("threshold", DEFAULT_THRESHOLD)
    num_bins = spec.params.get("num_bins", DEFAULT_NUM_BINS)
    bandwidth = spec.params.get("bandwidth")
    n = preds.n_samples

    def result(value, per_class=None, degenerate=False):
        return MetricResult(
            spec=spec,
            value=float(value),
            sample_count=n,
            per_class=per_class,
            degenerate=degenerate,
        )

    if is_ml_metric:
        return _compute_multilabel(spec, preds, threshold, result)

    counts = confusion_counts(preds, threshold)

    if spec.id == "Sensitivity":
        v, pc, d = _positive_or_macro(preds, counts, _sensitivity)
        return result(v, pc, d)
    if spec.id == "Specificity":
        v, pc, d = _positive_or_macro(preds, counts, _specificity)
        return result(v, pc, d)
    if spec.id == "PositivePredictiveValue":
        v, pc, d = _positive_or_macro(preds, counts, _ppv)
        return result(v, pc, d)
    if spec.id == "NegativePredictiveValue":
        v, pc, d = _positive_or_macro(preds, counts, _npv)
        return result(v, pc, d)
    if spec.id == "PositiveLikelihoodRatio":
        sens, d1 = _sensitivity(counts.tp(1), counts.fn(1), counts.fp(1), counts.tn(1))
        fpr, d2 = _ratio(counts.fp(1), counts.fp(1) + counts.tn(1))
        v, d3 = _ratio(sens, fpr)
        return result(v, None, d1 or d2 or d3)
    if spec.id == "DiceSimilarityCoefficient":
        v, pc, d = _positive_or_macro(preds, counts, _dice)
        return result(v, pc, d)
    if spec.id == "FBetaScore":
        beta = spec.params.get("beta", 1.0)
        v, pc, d = _positive_or_macro(preds, counts, lambda *a: _fbeta(*a, beta))
        return result(v, pc, d)
    if spec.id == "NetBenefit":
        if "exchange_threshold" not in spec.params:
            raise MissingParam("NetBenefit requires an exchange_threshold param")
        t = spec.params["exchange_threshold"]
        at_t = confusion_counts(preds, t)
        value = at_t.tp(1) / n - (at_t.fp(1) / n) * t / (1 - t)
        return result(value)
    if spec.id == "Accuracy":
        predicted = _predicted_labels(preds, threshold)
        return result(float(np.mean(predicted == preds.labels)))
    if spec.id == "BalancedAccuracy":
        v, pc, d = _macro_over_classes(counts, _sensitivity)
        return result(v, pc, d)
    if spec.id == "MatthewsCorrelationCoefficient":
        v, d = _mcc(counts)
        return result(v, None, d)
    if spec.id == "WeightedCohensKappa":
        weights = spec.params.get("weight_matrix")
        c = preds.num_classes
        if weights is None:
            idx = np.arange(c, dtype=float)
            weights = np.abs(idx[:, None] - idx[None, :])
        observed = counts.matrix / counts.total
        truth = observed.sum(axis=1)
        pred = observed.sum(axis=0)
        expected = np.outer(truth, pred)
        disagreement_e = float((weights * expected).sum())
        if disagreement_e == 0:
            return result(0.0, None, True)
        disagreement_o = float((weights * observed).sum())
        return result(1.0 - disagreement_o / disagreement_e)
    if spec.id == "ExpectedCost":
        cost = spec.params.get("cost_matrix")
        c = preds.num_classes
        if cost is None:
            cost = 1.0 - np.eye(c)
        # With empirical class priors this reduces to the mean joint cost.
        return result(float((cost * counts.matrix).sum()) / n)
    if spec.id == "AUROC":
        if preds.task_kind == TaskKind.BINARY:
            v, d = _auroc_binary(preds.probs[:, 1], preds.labels == 1)
            return result(v, None, d)
        v, pc, d = _ovr_macro(preds, _auroc_binary)
        return result(v, pc, d)
    if spec.id == "AveragePrecision":
        if preds.task_kind == TaskKind.BINARY:
            v, d = _average_precision_binary(preds.probs[:, 1], preds.labels == 1)
            return result(v, None, d)
        v, pc, d = _ovr_macro(preds, _average_precision_binary)
        return result(v, pc, d)
    if spec.id == "BrierScore":
        return result(_brier(preds))
    if spec.id == "RootBrierScore":
        return result(float(np.sqrt(_brier(preds))))
    if spec.id == "ExpectedCalibrationError":
        return result(_ece(preds, num_bins))
    if spec.id == "ClassWiseECE":
        v, pc = _classwise_ece(preds, num_bins)
        return result(v, pc)
    if spec.id == "ECEKernelDensity":
        return result(_ece_kernel_density(preds, bandwidth))
    if spec.id == "KernelCalibrationError":
        return result(_kernel_calibration_error(preds, bandwidth))
    if spec.id == "NegativeLogLikelihood":
        return result(_nll(preds))
    raise AssertionError(f"unhandled metric {spec.id}")


def _compute_multilabel(spec, preds, threshold, result):
    if spec.id == "MultiLabelSubsetAccuracy":
        pred = preds.probs >= threshold
        truth = preds.labels.astype(bool)
        return result(float(np.mean(np.all(pred == truth, axis=1))))
    if spec.id == "MultiLabelHammingLoss":
        pred = preds.probs >= threshold
        truth = preds.labels.astype(bool)
        return result(float(np.mean(pred != truth)))
    if spec.id == "MultiLabelPrecision":
        v, pc, d = _multilabel_macro(preds, threshold, _ppv)
        return result(v, pc, d)
    if spec.id == "MultiLabelRecall":
        v, pc, d = _multilabel_macro(preds, threshold, _sensitivity)
        return result(v, pc, d)
    if spec.id == "MultiLabelF1Score":
        v, pc, d = _multilabel_macro(preds, threshold, _f1)
        return result(v, pc, d)
    if spec.id == "MultiLabelJaccardScore":
        v, pc, d = _multilabel_macro(preds, threshold, _jaccard)
        return result(v, pc, d)
    if spec.id == "MultiLabelAUROC":
        values = []
        degenerate = False
        for lbl in range(preds.num_classes):
            v, d = _auroc_binary(preds.probs[:, lbl], preds.labels[:, lbl].astype(bool))
            values.append(v)
            degenerate |= d
        return result(float(np.mean(values)), tuple(values), degenerate)
    raise AssertionError(f"unhandled metric {spec.id}")
