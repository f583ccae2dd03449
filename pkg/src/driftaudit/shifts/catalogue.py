"""The 22-kind perturbation catalogue.

Images are channel-major float arrays (3, H, W) with values in [0, 1]; every
shift preserves shape and clamps back into range. Parameter domains are
validated here so plans fail fast, before any pixel work.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from ..errors import InvalidParam, UnknownShift


@dataclass(frozen=True)
class ShiftKind:
    """One catalogue entry: the shift's name, parameter semantics, and flags."""

    name: str
    param_name: str | None  # None for parameterless kinds
    gloss: str
    validate: Callable[[float], bool] | None = None
    domain: str = ""
    identity_param: float | int | None = None
    stochastic: bool = False

    @property
    def parameterless(self) -> bool:
        return self.param_name is None

    def check_param(self, value) -> None:
        if self.parameterless:
            raise InvalidParam(f"{self.name} takes no parameters")
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise InvalidParam(f"{self.name} parameter must be numeric, got {value!r}")
        if not self.validate(value):
            raise InvalidParam(
                f"{self.name} parameter {value!r} outside domain {self.domain}"
            )


def _odd_kernel(v) -> bool:
    return isinstance(v, int) and v >= 1 and v % 2 == 1


_KINDS = [
    ShiftKind(
        "GaussianNoise", "factor", "adds seeded Gaussian noise scaled by the factor",
        validate=lambda v: 0 <= v, domain="factor >= 0",
        identity_param=0, stochastic=True,
    ),
    ShiftKind(
        "BrightnessShift", "factor", "multiplies intensities (>1 brightens, <1 darkens)",
        validate=lambda v: v >= 0, domain="factor >= 0", identity_param=1,
    ),
    ShiftKind(
        "Rotation", "degrees", "rotates about the center with reflect padding",
        validate=lambda v: -360 <= v <= 360, domain="degrees in [-360, 360]",
        identity_param=0,
    ),
    ShiftKind("HorizontalFlip", None, "mirrors left-right"),
    ShiftKind("VerticalFlip", None, "mirrors top-bottom"),
    ShiftKind(
        "ContrastShift", "factor", "scales deviation from the luma mean (>1 increases)",
        validate=lambda v: v >= 0, domain="factor >= 0", identity_param=1,
    ),
    ShiftKind(
        "SaturationShift", "factor", "scales HSV saturation (>1 increases)",
        validate=lambda v: v >= 0, domain="factor >= 0", identity_param=1,
    ),
    ShiftKind(
        "HueShift", "factor", "rotates hue by factor*360 degrees",
        validate=lambda v: -0.5 <= v <= 0.5, domain="factor in [-0.5, 0.5]",
        identity_param=0,
    ),
    ShiftKind(
        "GaussianBlur", "kernel_size", "Gaussian blur; kernel sizes are odd integers",
        validate=_odd_kernel, domain="odd integer >= 1", identity_param=1,
    ),
    ShiftKind(
        "JPEGCompression", "quality", "baseline JPEG encode/decode (lower = stronger)",
        validate=lambda v: isinstance(v, int) and 1 <= v <= 100,
        domain="integer in [1, 100]",
    ),
    ShiftKind(
        "Pixelation", "scale", "nearest-neighbor downscale then upscale (lower = blockier)",
        validate=lambda v: 0 < v <= 1, domain="scale in (0, 1]", identity_param=1,
    ),
    ShiftKind(
        "PerspectiveTransform", "distortion", "random corner displacement within distortion*min(H,W)",
        validate=lambda v: 0 <= v <= 0.4, domain="distortion in [0, 0.4]",
        identity_param=0, stochastic=True,
    ),
    ShiftKind(
        "ZoomIn", "scale", "center-crop to the scale fraction then resize up (lower = more zoom)",
        validate=lambda v: 0 < v <= 1, domain="scale in (0, 1]", identity_param=1,
    ),
    ShiftKind(
        "ZoomOut", "scale", "shrink to the scale fraction and reflect-pad back (lower = more zoom out)",
        validate=lambda v: 0 < v <= 1, domain="scale in (0, 1]", identity_param=1,
    ),
    ShiftKind(
        "RandomErasing", "area", "blanks one gray rectangle of the given area fraction",
        validate=lambda v: 0 <= v < 1, domain="area in [0, 1)",
        identity_param=0, stochastic=True,
    ),
    ShiftKind(
        "Grayscale", "intensity", "blends toward luma (1.0 = full grayscale)",
        validate=lambda v: 0 <= v <= 1, domain="intensity in [0, 1]", identity_param=0,
    ),
    ShiftKind(
        "Sharpness", "factor", "unsharp-mask blend (>1 sharpens, <1 smooths)",
        validate=lambda v: v >= 0, domain="factor >= 0", identity_param=1,
    ),
    ShiftKind(
        "ColorJitter", "magnitude", "random brightness/contrast/saturation/hue within the magnitude",
        validate=lambda v: 0 <= v <= 0.5, domain="magnitude in [0, 0.5]",
        identity_param=0, stochastic=True,
    ),
    ShiftKind(
        "ElasticTransform", "alpha", "smoothed random displacement field scaled by alpha",
        validate=lambda v: 0 <= v <= 100, domain="alpha in [0, 100]",
        identity_param=0, stochastic=True,
    ),
    ShiftKind(
        "Solarize", "threshold", "inverts values above the threshold (lower = stronger)",
        validate=lambda v: 0 <= v <= 1, domain="threshold in [0, 1]", identity_param=1,
    ),
    ShiftKind(
        "Posterize", "bits", "quantizes each channel to 2^bits levels (lower = stronger)",
        validate=lambda v: isinstance(v, int) and 1 <= v <= 8, domain="integer in [1, 8]",
    ),
    ShiftKind(
        "MotionBlur", "kernel_size", "horizontal box blur; kernel sizes are odd integers",
        validate=_odd_kernel, domain="odd integer >= 1", identity_param=1,
    ),
]

_BY_NAME = {k.name: k for k in _KINDS}

STOCHASTIC_KINDS = frozenset(k.name for k in _KINDS if k.stochastic)


def catalogue() -> list[ShiftKind]:
    """All 22 kinds in stable listing order."""
    return list(_KINDS)


def get_kind(name: str) -> ShiftKind:
    try:
        return _BY_NAME[name]
    except KeyError:
        raise UnknownShift(f"unknown shift: {name}") from None
