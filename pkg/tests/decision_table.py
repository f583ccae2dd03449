"""Hand-transcribed metric-selection decision table.

Encoded as declarative (condition -> metrics) rules, deliberately in a
different shape from the rubric implementation, so the two can be compared
over the full fingerprint space. Conditions are exact-match requirements on
fingerprint fields; rules fire independently and their outputs are unioned
in listed order.
"""

SINGLE_LABEL_RULES = [
    # Counting metrics.
    ({"classes_imbalanced": False}, ["Accuracy"]),
    (
        {"classes_imbalanced": True, "imbalance_compensation_requested": True},
        ["BalancedAccuracy", "MatthewsCorrelationCoefficient"],
    ),
    ({"confusion_costs_unequal": True}, ["ExpectedCost"]),
    # Per-class counting metrics.
    ({"task_kind": "binary"}, ["Sensitivity", "Specificity"]),
    ({"error_preference": "minimize_false_positives"}, ["FBetaScore(beta=0.5)"]),
    ({"error_preference": "minimize_false_negatives"}, ["FBetaScore(beta=2)"]),
    ({"error_preference": "cost_benefit", "task_kind": "binary"}, ["NetBenefit"]),
    # Multi-threshold metrics.
    ({"high_imbalance_for_thresholding": True}, ["AveragePrecision"]),
    ({"high_imbalance_for_thresholding": False}, ["AUROC"]),
    # Calibration metrics.
    ({"calibration_requested": True}, ["ExpectedCalibrationError", "RootBrierScore"]),
    ({"calibration_comparison": True}, ["KernelCalibrationError"]),
    ({"overall_probabilistic_score": True}, ["NegativeLogLikelihood", "BrierScore"]),
]

MULTILABEL_RULES = [
    ({}, ["MultiLabelSubsetAccuracy", "MultiLabelHammingLoss"]),
    (
        {"classes_imbalanced": True, "imbalance_compensation_requested": True},
        ["MultiLabelF1Score", "MultiLabelJaccardScore"],
    ),
    ({"error_preference": "minimize_false_positives"}, ["MultiLabelPrecision"]),
    ({"error_preference": "minimize_false_negatives"}, ["MultiLabelRecall"]),
    ({"error_preference": "cost_benefit"}, ["MultiLabelF1Score"]),
    ({}, ["MultiLabelAUROC"]),
]


def expected_metrics(fingerprint_dict: dict) -> list[str]:
    """Apply the transcription to a fingerprint given as a plain dict."""
    rules = (
        MULTILABEL_RULES
        if fingerprint_dict["task_kind"] == "multilabel"
        else SINGLE_LABEL_RULES
    )
    out: list[str] = []
    for condition, metrics in rules:
        if all(fingerprint_dict[key] == value for key, value in condition.items()):
            for name in metrics:
                if name not in out:
                    out.append(name)
    return out


def all_fingerprint_dicts():
    """Every combination of fingerprint fields."""
    for task_kind in ("binary", "multiclass", "multilabel"):
        for imbalanced in (False, True):
            for compensation in (False, True):
                for costs in (False, True):
                    for pref in (
                        "none",
                        "minimize_false_positives",
                        "minimize_false_negatives",
                        "cost_benefit",
                    ):
                        for cal in (False, True):
                            for cal_cmp in (False, True):
                                for overall in (False, True):
                                    for high_imb in (False, True):
                                        yield {
                                            "task_kind": task_kind,
                                            "classes_imbalanced": imbalanced,
                                            "imbalance_compensation_requested": compensation,
                                            "confusion_costs_unequal": costs,
                                            "error_preference": pref,
                                            "calibration_requested": cal,
                                            "calibration_comparison": cal_cmp,
                                            "overall_probabilistic_score": overall,
                                            "high_imbalance_for_thresholding": high_imb,
                                        }
