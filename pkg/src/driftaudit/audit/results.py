"""Audit result tables: one row per shift instance plus a clean baseline.

The CSV rendering contains only deterministic content (metadata like
timestamps lives on the results object, not in the file) so identical audits
produce byte-identical files regardless of parallelism or wall clock.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..metrics import LOWER_IS_BETTER, MetricSpec

BASELINE_LABEL = "BASELINE"


@dataclass
class AuditRow:
    label: str
    kind: str | None  # None for the baseline row
    param: float | int | None
    seed: int | None
    values: dict[str, float] = field(default_factory=dict)
    degenerate: dict[str, bool] = field(default_factory=dict)
    error: str | None = None

    @property
    def is_baseline(self) -> bool:
        return self.kind is None


@dataclass
class AuditResults:
    columns: list[str]
    specs: list[MetricSpec]
    rows: list[AuditRow]
    metadata: dict = field(default_factory=dict)

    def baseline(self) -> AuditRow:
        for row in self.rows:
            if row.is_baseline:
                return row
        raise ValueError("results are missing the baseline row")

    def to_dataframe(self):
        import pandas as pd

        records = []
        for row in self.rows:
            rec = {"row": row.label, "kind": row.kind or "", "param": row.param,
                   "error": row.error or ""}
            rec.update(row.values)
            records.append(rec)
        return pd.DataFrame.from_records(records)


def _format_param(param) -> str:
    if param is None:
        return ""
    if isinstance(param, int):
        return str(param)
    return repr(float(param))


def write_results_csv(results: AuditResults, path: str | Path) -> None:
    lines = [",".join(["row", "kind", "param", "seed", "error"] + results.columns)]
    for row in results.rows:
        cells = [
            row.label,
            row.kind or "",
            _format_param(row.param),
            "" if row.seed is None else str(row.seed),
            row.error or "",
        ]
        for col in results.columns:
            value = row.values.get(col)
            cells.append("" if value is None else repr(value))
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def results_markdown(results: AuditResults) -> str:
    """Markdown summary table: baseline first, metrics in plan order, 4dp."""
    header = "| shift | " + " | ".join(results.columns) + " |"
    divider = "|" + "---|" * (len(results.columns) + 1)
    lines = [header, divider]
    ordered = [r for r in results.rows if r.is_baseline] + [
        r for r in results.rows if not r.is_baseline
    ]
    for row in ordered:
        if row.error:
            cells = ["error: " + row.error] * len(results.columns)
        else:
            cells = [
                f"{row.values[col]:.4f}" if col in row.values else ""
                for col in results.columns
            ]
        lines.append("| " + row.label + " | " + " | ".join(cells) + " |")
    return "\n".join(lines)


@dataclass(frozen=True)
class DegradationCell:
    row_label: str
    kind: str | None
    param: float | int | None
    metric: str
    value: float
    baseline: float
    delta: float  # sign-adjusted: negative always means degradation


def degradation_table(results: AuditResults) -> list[DegradationCell]:
    base = results.baseline()
    orientation = {
        spec.label(): (-1.0 if spec.id in LOWER_IS_BETTER else 1.0)
        for spec in results.specs
    }
    cells = []
    for row in results.rows:
        if row.error:
            continue
        for col in results.columns:
            if col not in row.values or col not in base.values:
                continue
            raw = row.values[col] - base.values[col]
            cells.append(
                DegradationCell(
                    row_label=row.label,
                    kind=row.kind,
                    param=row.param,
                    metric=col,
                    value=row.values[col],
                    baseline=base.values[col],
                    delta=raw * orientation[col],
                )
            )
    return cells


def worst_cell(results: AuditResults) -> DegradationCell:
    """The most degraded non-baseline cell (ties resolved by table order)."""
    candidates = [c for c in degradation_table(results) if c.row_label != BASELINE_LABEL]
    if not candidates:
        raise ValueError("no shifted rows to rank")
    return min(candidates, key=lambda c: c.delta)


def results_json_payload(results: AuditResults) -> str:
    """Machine-readable summary embedded in analysis-phase messages."""
    base = results.baseline()
    payload = {
        "columns": results.columns,
        "baseline": {col: base.values.get(col) for col in results.columns},
        "rows": [
            {
                "label": row.label,
                "kind": row.kind,
                "param": row.param,
                "error": row.error,
                "values": {col: row.values.get(col) for col in results.columns},
            }
            for row in results.rows
        ],
        "cells": [
            {
                "row": cell.row_label,
                "kind": cell.kind,
                "param": cell.param,
                "metric": cell.metric,
                "value": cell.value,
                "baseline": cell.baseline,
                "delta": cell.delta,
            }
            for cell in degradation_table(results)
        ],
        "metadata": {
            k: v
            for k, v in results.metadata.items()
            if k in ("seed", "sample_size", "adapter", "threshold")
        },
    }
    return json.dumps(payload, sort_keys=True)
