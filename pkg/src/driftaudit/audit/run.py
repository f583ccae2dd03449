"""The perturbation-evaluation loop."""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from ..errors import AdapterError, InvalidParam
from ..io import Dataset, ModelAdapter, load_images, predict_batch, stratified_sample
from ..metrics import MetricSpec, PredictionSet, compute_metric
from ..shifts import ShiftInstance, ShiftPlan, apply_shift, derive_seed, expand_grid
from .results import BASELINE_LABEL, AuditResults, AuditRow


@dataclass
class AuditPlan:
    metric_specs: list[MetricSpec]
    shift_plan: ShiftPlan
    sample_frac: float = 0.1
    base_seed: int = 0
    threshold: float = 0.5
    parallelism: int = 1

    def __post_init__(self):
        if not self.metric_specs:
            raise InvalidParam("audit plan needs a non-empty metric set")
        if not 0 < self.sample_frac <= 1:
            raise InvalidParam("sample fraction must lie in (0, 1]")
        if self.parallelism < 1:
            raise InvalidParam("parallelism must be >= 1")


def _with_threshold(spec: MetricSpec, threshold: float) -> MetricSpec:
    if "threshold" in spec.params:
        return spec
    return MetricSpec(spec.id, {**spec.params, "threshold": threshold})


def run_audit(plan: AuditPlan, dataset: Dataset, adapter: ModelAdapter,
              progress=None) -> AuditResults:
    """Evaluate every shift instance (plus the clean baseline) on one fixed
    stratified sample.

    Deterministic for deterministic adapters regardless of parallelism:
    per-image draws are keyed by hash(instance seed, image id), and rows are
    reduced in instance order. An adapter failure marks that row and the
    audit continues.
    """
    if len(dataset) == 0:
        raise InvalidParam("dataset is empty")
    if adapter.num_classes != dataset.num_classes:
        raise AdapterError(
            f"adapter produces {adapter.num_classes} classes but the dataset "
            f"declares {dataset.num_classes}"
        )
    started = time.time()

    sample = stratified_sample(dataset, plan.sample_frac, plan.base_seed)
    images = load_images(sample)
    ids = [rec.sample_id for rec in sample.records]
    labels = sample.labels_array()
    specs = [_with_threshold(s, plan.threshold) for s in plan.metric_specs]
    columns = [s.label() for s in plan.metric_specs]

    def evaluate(batch) -> tuple[dict, dict]:
        probs = predict_batch(adapter, batch)
        pset = PredictionSet(
            task_kind=sample.task_kind,
            num_classes=sample.num_classes,
            probs=probs,
            labels=labels,
            sample_ids=tuple(ids),
        )
        values, flags = {}, {}
        for col, spec in zip(columns, specs):
            result = compute_metric(spec, pset)
            values[col] = result.value
            flags[col] = result.degenerate
        return values, flags

    instances = expand_grid(plan.shift_plan, plan.base_seed)
    total_rows = len(instances) + 1

    baseline = AuditRow(label=BASELINE_LABEL, kind=None, param=None, seed=None)
    try:
        baseline.values, baseline.degenerate = evaluate(images)
    except AdapterError as exc:
        baseline.error = str(exc)
    if progress:
        progress(1, total_rows)

    def run_instance(inst: ShiftInstance) -> AuditRow:
        row = AuditRow(label=inst.label(), kind=inst.kind, param=inst.param, seed=inst.seed)
        try:
            shifted = [
                apply_shift(
                    img,
                    ShiftInstance(inst.kind, inst.param, derive_seed(inst.seed, image_id)),
                )
                for img, image_id in zip(images, ids)
            ]
            row.values, row.degenerate = evaluate(shifted)
        except AdapterError as exc:
            row.error = str(exc)
        return row

    rows: list[AuditRow] = [baseline]
    if plan.parallelism == 1 or len(instances) <= 1:
        for done, inst in enumerate(instances, start=2):
            rows.append(run_instance(inst))
            if progress:
                progress(done, total_rows)
    else:
        with ThreadPoolExecutor(max_workers=plan.parallelism) as pool:
            futures = [pool.submit(run_instance, inst) for inst in instances]
            for done, future in enumerate(futures, start=2):
                rows.append(future.result())
                if progress:
                    progress(done, total_rows)

    metadata = {
        "seed": plan.base_seed,
        "sample_frac": plan.sample_frac,
        "sample_size": len(sample),
        "threshold": plan.threshold,
        "parallelism": plan.parallelism,
        "adapter": adapter.identity,
        "started_at": started,
        "finished_at": time.time(),
    }
    return AuditResults(columns=columns, specs=list(plan.metric_specs), rows=rows,
                        metadata=metadata)
