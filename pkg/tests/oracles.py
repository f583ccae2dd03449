"""Brute-force, from-definition metric oracles.

Everything here is written as plain loops over samples, classes, and pairs,
independently of the vectorized implementations under src/. The conventions
(thresholding, binning, degenerate-denominator handling) intentionally mirror
the documented ones so both paths compute the same mathematical object.

Each oracle returns (value, degenerate_flag).
"""

from __future__ import annotations

import math

import numpy as np


def safe_div(num, den):
    if den == 0:
        return 0.0, True
    return num / den, False


def predicted_single(probs, task_kind, threshold):
    if task_kind == "binary":
        return [(1 if p[1] >= threshold else 0) for p in probs]
    out = []
    for p in probs:
        best, best_v = 0, p[0]
        for c in range(1, len(p)):
            if p[c] > best_v:
                best, best_v = c, p[c]
        out.append(best)
    return out


def confusion(labels, predicted, num_classes):
    m = [[0] * num_classes for _ in range(num_classes)]
    for y, yhat in zip(labels, predicted):
        m[int(y)][int(yhat)] += 1
    return m


def class_counts(m, c):
    num_classes = len(m)
    tp = m[c][c]
    fn = sum(m[c]) - tp
    fp = sum(m[r][c] for r in range(num_classes)) - tp
    total = sum(sum(row) for row in m)
    tn = total - tp - fn - fp
    return tp, fn, fp, tn


def sensitivity_counts(tp, fn, fp, tn):
    return safe_div(tp, tp + fn)


def specificity_counts(tp, fn, fp, tn):
    return safe_div(tn, tn + fp)


def ppv_counts(tp, fn, fp, tn):
    return safe_div(tp, tp + fp)


def npv_counts(tp, fn, fp, tn):
    return safe_div(tn, tn + fn)


def dice_counts(tp, fn, fp, tn):
    return safe_div(2 * tp, 2 * tp + fp + fn)


def fbeta_counts(tp, fn, fp, tn, beta):
    p, d1 = ppv_counts(tp, fn, fp, tn)
    s, d2 = sensitivity_counts(tp, fn, fp, tn)
    v, d3 = safe_div((1 + beta * beta) * p * s, beta * beta * p + s)
    return v, d1 or d2 or d3


def macro(per_class_fn, m):
    values, flag = [], False
    for c in range(len(m)):
        v, d = per_class_fn(*class_counts(m, c))
        values.append(v)
        flag |= d
    return sum(values) / len(values), flag


def positive_or_macro(per_class_fn, m, task_kind):
    if task_kind == "binary":
        return per_class_fn(*class_counts(m, 1))
    return macro(per_class_fn, m)


def plr(m):
    tp, fn, fp, tn = class_counts(m, 1)
    sens, d1 = sensitivity_counts(tp, fn, fp, tn)
    fpr, d2 = safe_div(fp, fp + tn)
    v, d3 = safe_div(sens, fpr)
    return v, d1 or d2 or d3


def net_benefit(probs, labels, t):
    n = len(labels)
    tp = sum(1 for p, y in zip(probs, labels) if p[1] >= t and y == 1)
    fp = sum(1 for p, y in zip(probs, labels) if p[1] >= t and y == 0)
    return tp / n - (fp / n) * t / (1 - t), False


def accuracy(probs, labels, task_kind, threshold):
    pred = predicted_single(probs, task_kind, threshold)
    return sum(1 for y, yh in zip(labels, pred) if y == yh) / len(labels), False


def balanced_accuracy(m):
    return macro(sensitivity_counts, m)


def mcc_binary(m):
    tp, fn, fp, tn = class_counts(m, 1)
    den = math.sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn))
    if den == 0:
        return 0.0, True
    return (tp * tn - fp * fn) / den, False


def mcc_multiclass(m):
    k = len(m)
    s = sum(sum(row) for row in m)
    c = sum(m[i][i] for i in range(k))
    t = [sum(m[i]) for i in range(k)]
    p = [sum(m[r][j] for r in range(k)) for j in range(k)]
    num = c * s - sum(t[i] * p[i] for i in range(k))
    den_sq = (s * s - sum(x * x for x in p)) * (s * s - sum(x * x for x in t))
    if den_sq <= 0:
        return 0.0, True
    return num / math.sqrt(den_sq), False


def weighted_kappa(m, weights=None):
    k = len(m)
    n = sum(sum(row) for row in m)
    if weights is None:
        weights = [[abs(i - j) for j in range(k)] for i in range(k)]
    obs = [[m[i][j] / n for j in range(k)] for i in range(k)]
    truth = [sum(obs[i]) for i in range(k)]
    pred = [sum(obs[r][j] for r in range(k)) for j in range(k)]
    d_o = sum(weights[i][j] * obs[i][j] for i in range(k) for j in range(k))
    d_e = sum(weights[i][j] * truth[i] * pred[j] for i in range(k) for j in range(k))
    if d_e == 0:
        return 0.0, True
    return 1.0 - d_o / d_e, False


def expected_cost(probs, labels, task_kind, threshold, cost=None):
    k = len(probs[0])
    pred = predicted_single(probs, task_kind, threshold)
    if cost is None:
        cost = [[0.0 if i == j else 1.0 for j in range(k)] for i in range(k)]
    total = sum(cost[int(y)][int(yh)] for y, yh in zip(labels, pred))
    return total / len(labels), False


def auroc_pairs(scores, positives):
    """Pair-counting Mann-Whitney probability; ties count one half."""
    pos = [s for s, is_pos in zip(scores, positives) if is_pos]
    neg = [s for s, is_pos in zip(scores, positives) if not is_pos]
    if not pos or not neg:
        return 0.0, True
    wins = 0.0
    for sp in pos:
        for sn in neg:
            if sp > sn:
                wins += 1.0
            elif sp == sn:
                wins += 0.5
    return wins / (len(pos) * len(neg)), False


def average_precision(scores, positives):
    """Threshold sweep over unique scores, counting from scratch each time."""
    n_pos = sum(1 for x in positives if x)
    if n_pos == 0:
        return 0.0, True
    thresholds = sorted(set(scores), reverse=True)
    ap = 0.0
    prev_recall = 0.0
    for t in thresholds:
        tp = sum(1 for s, y in zip(scores, positives) if s >= t and y)
        fp = sum(1 for s, y in zip(scores, positives) if s >= t and not y)
        precision = tp / (tp + fp)
        recall = tp / n_pos
        ap += (recall - prev_recall) * precision
        prev_recall = recall
    return ap, False


def ovr_macro(per_label_fn, probs, labels, num_classes):
    values, flag = [], False
    for c in range(num_classes):
        scores = [p[c] for p in probs]
        pos = [y == c for y in labels]
        v, d = per_label_fn(scores, pos)
        values.append(v)
        flag |= d
    return sum(values) / len(values), flag


def brier(probs, labels):
    k = len(probs[0])
    total = 0.0
    for p, y in zip(probs, labels):
        for c in range(k):
            target = 1.0 if c == int(y) else 0.0
            total += (p[c] - target) ** 2
    return total / (len(labels) * k), False


def nll(probs, labels, clamp=1e-12):
    total = 0.0
    for p, y in zip(probs, labels):
        total += -math.log(min(max(p[int(y)], clamp), 1.0))
    return total / len(labels), False


def top_confidence(probs, labels):
    conf, correct = [], []
    for p, y in zip(probs, labels):
        best, best_v = 0, p[0]
        for c in range(1, len(p)):
            if p[c] > best_v:
                best, best_v = c, p[c]
        conf.append(best_v)
        correct.append(1.0 if best == int(y) else 0.0)
    return conf, correct


def ece(probs, labels, num_bins=10):
    conf, correct = top_confidence(probs, labels)
    n = len(conf)
    total = 0.0
    for b in range(num_bins):
        members = [i for i, c in enumerate(conf) if min(int(c * num_bins), num_bins - 1) == b]
        if not members:
            continue
        acc = sum(correct[i] for i in members) / len(members)
        avg_conf = sum(conf[i] for i in members) / len(members)
        total += (len(members) / n) * abs(acc - avg_conf)
    return total, False


def classwise_ece(probs, labels, num_bins=10):
    n = len(labels)
    k = len(probs[0])
    per_class = []
    for c in range(k):
        total = 0.0
        for b in range(num_bins):
            members = [
                i
                for i in range(n)
                if min(int(probs[i][c] * num_bins), num_bins - 1) == b
            ]
            if not members:
                continue
            freq = sum(1.0 for i in members if int(labels[i]) == c) / len(members)
            avg_p = sum(probs[i][c] for i in members) / len(members)
            total += (len(members) / n) * abs(freq - avg_p)
        per_class.append(total)
    return sum(per_class) / k, False


def silverman(values):
    n = len(values)
    std = float(np.std(values, ddof=1)) if n > 1 else 0.0
    q75, q25 = np.percentile(values, [75, 25])
    return max(0.9 * min(std, (q75 - q25) / 1.34) * n ** (-0.2), 1e-3)


def ece_kernel_density(probs, labels, bandwidth=None):
    conf, correct = top_confidence(probs, labels)
    h = bandwidth if bandwidth is not None else silverman(conf)
    n = len(conf)
    total = 0.0
    for i in range(n):
        wsum, acc = 0.0, 0.0
        for j in range(n):
            w = math.exp(-0.5 * ((conf[j] - conf[i]) / h) ** 2)
            wsum += w
            acc += w * correct[j]
        total += abs(acc / wsum - conf[i])
    return total / n, False


def kernel_calibration_error(probs, labels, bandwidth=None):
    conf, _ = top_confidence(probs, labels)
    h = bandwidth if bandwidth is not None else silverman(conf)
    n = len(labels)
    k = len(probs[0])
    resid = []
    for p, y in zip(probs, labels):
        resid.append([(1.0 if c == int(y) else 0.0) - p[c] for c in range(k)])
    total = 0.0
    for i in range(n):
        for j in range(n):
            sq = sum((probs[i][c] - probs[j][c]) ** 2 for c in range(k))
            kern = math.exp(-sq / (2 * h * h))
            inner = sum(resid[i][c] * resid[j][c] for c in range(k))
            total += kern * inner
    return math.sqrt(max(total / (n * n), 0.0)), False


# Multilabel oracles: probs and labels are (n, L) lists.


def ml_counts(probs, labels, threshold, lbl):
    tp = fp = fn = tn = 0
    for p, y in zip(probs, labels):
        pred = p[lbl] >= threshold
        truth = bool(y[lbl])
        if pred and truth:
            tp += 1
        elif pred and not truth:
            fp += 1
        elif not pred and truth:
            fn += 1
        else:
            tn += 1
    return tp, fn, fp, tn


def ml_macro(per_label_fn, probs, labels, threshold):
    num_labels = len(probs[0])
    values, flag = [], False
    for lbl in range(num_labels):
        v, d = per_label_fn(*ml_counts(probs, labels, threshold, lbl))
        values.append(v)
        flag |= d
    return sum(values) / len(values), flag


def ml_subset_accuracy(probs, labels, threshold):
    hits = 0
    for p, y in zip(probs, labels):
        if all((p[l] >= threshold) == bool(y[l]) for l in range(len(p))):
            hits += 1
    return hits / len(labels), False


def ml_hamming_loss(probs, labels, threshold):
    wrong = 0
    slots = 0
    for p, y in zip(probs, labels):
        for l in range(len(p)):
            slots += 1
            if (p[l] >= threshold) != bool(y[l]):
                wrong += 1
    return wrong / slots, False


def ml_auroc(probs, labels):
    num_labels = len(probs[0])
    values, flag = [], False
    for lbl in range(num_labels):
        scores = [p[lbl] for p in probs]
        pos = [bool(y[lbl]) for y in labels]
        v, d = auroc_pairs(scores, pos)
        values.append(v)
        flag |= d
    return sum(values) / len(values), flag


def f1_counts(tp, fn, fp, tn):
    return fbeta_counts(tp, fn, fp, tn, 1.0)


def jaccard_counts(tp, fn, fp, tn):
    return safe_div(tp, tp + fp + fn)
