"""Perturbation catalogue, kernels, and the shift-plan text format."""

from .catalogue import STOCHASTIC_KINDS, ShiftKind, catalogue, get_kind
from .kernels import jpeg_encoded_size, luma
from .plan import (
    ShiftInstance,
    ShiftPlan,
    ShiftSpec,
    apply_shift,
    derive_seed,
    expand_grid,
    parse_shift_plan,
    serialize_shift_plan,
    validate_image,
)

__all__ = [
    "STOCHASTIC_KINDS",
    "ShiftInstance",
    "ShiftKind",
    "ShiftPlan",
    "ShiftSpec",
    "apply_shift",
    "catalogue",
    "derive_seed",
    "expand_grid",
    "get_kind",
    "jpeg_encoded_size",
    "luma",
    "parse_shift_plan",
    "serialize_shift_plan",
    "validate_image",
]
