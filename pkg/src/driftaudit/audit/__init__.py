"""The perturbation-evaluation loop and its result tables."""

from .results import (
    BASELINE_LABEL,
    AuditResults,
    AuditRow,
    DegradationCell,
    degradation_table,
    results_json_payload,
    results_markdown,
    worst_cell,
    write_results_csv,
)
from .run import AuditPlan, run_audit

__all__ = [
    "BASELINE_LABEL",
    "AuditPlan",
    "AuditResults",
    "AuditRow",
    "DegradationCell",
    "degradation_table",
    "results_json_payload",
    "results_markdown",
    "run_audit",
    "worst_cell",
    "write_results_csv",
]
