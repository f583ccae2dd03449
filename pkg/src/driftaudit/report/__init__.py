"""Report rendering and augmentation-pipeline specs."""

from .mitigation import (
    DEFAULT_APPLY_PROBABILITY,
    PIPELINE_VERSION,
    TRANSFORM_VOCABULARY,
    AugmentationPipelineSpec,
    PipelineOp,
    build_augmentation_spec,
    lookup_op,
    mitigation_line,
    parse_pipeline,
    serialize_pipeline,
)
from .render import Report, render_report

__all__ = [
    "DEFAULT_APPLY_PROBABILITY",
    "PIPELINE_VERSION",
    "TRANSFORM_VOCABULARY",
    "AugmentationPipelineSpec",
    "PipelineOp",
    "Report",
    "build_augmentation_spec",
    "lookup_op",
    "mitigation_line",
    "parse_pipeline",
    "render_report",
    "serialize_pipeline",
]
