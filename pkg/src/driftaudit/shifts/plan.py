"""Shift plans: the parameterized perturbation selections of an audit.

The text format is one spec per line, either a bare kind name or
``Kind([v1, v2, ...])``. Parsing and serialization round-trip losslessly
modulo whitespace.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidParam, ParseError
from . import kernels
from .catalogue import get_kind

_SPEC_RE = re.compile(r"^\s*([A-Za-z][A-Za-z0-9_]*)\s*(?:\(\s*\[(.*?)\]\s*\))?\s*$")


@dataclass(frozen=True)
class ShiftSpec:
    """One catalogue kind plus the ordered parameter grid to sweep."""

    kind: str
    params: tuple = ()

    def __post_init__(self):
        kind = get_kind(self.kind)
        object.__setattr__(self, "params", tuple(self.params))
        if kind.parameterless:
            if self.params:
                raise InvalidParam(f"{self.kind} takes no parameters")
        else:
            if not self.params:
                raise InvalidParam(f"{self.kind} requires a parameter list")
            for p in self.params:
                kind.check_param(p)


@dataclass(frozen=True)
class ShiftInstance:
    """A single (kind, parameter, seed) cell of the audit grid."""

    kind: str
    param: float | int | None
    seed: int = 0

    def __post_init__(self):
        kind = get_kind(self.kind)
        if kind.parameterless:
            if self.param is not None:
                raise InvalidParam(f"{self.kind} takes no parameters")
        else:
            kind.check_param(self.param)

    def label(self) -> str:
        if self.param is None:
            return self.kind
        return f"{self.kind}({_format_number(self.param)})"


@dataclass(frozen=True)
class ShiftPlan:
    specs: tuple[ShiftSpec, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "specs", tuple(self.specs))

    def __len__(self) -> int:
        return len(self.specs)


def _parse_number(token: str):
    token = token.strip()
    if not token:
        raise ParseError("empty parameter")
    try:
        if re.fullmatch(r"[+-]?\d+", token):
            return int(token)
        return float(token)
    except ValueError:
        raise ParseError(f"malformed parameter: {token!r}") from None


def _format_number(value) -> str:
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def parse_shift_plan(text: str) -> ShiftPlan:
    """Parse the payload of a shift tag (one spec per line)."""
    specs = []
    for raw_line in text.splitlines():
        line = raw_line.strip()
        if not line:
            continue
        match = _SPEC_RE.match(line)
        if not match:
            raise ParseError(f"malformed shift line: {line!r}")
        name, param_text = match.group(1), match.group(2)
        kind = get_kind(name)  # raises UnknownShift for names off the catalogue
        if param_text is None:
            if not kind.parameterless:
                raise ParseError(f"{name} requires a parameter list")
            specs.append(ShiftSpec(name))
        else:
            params = tuple(_parse_number(tok) for tok in param_text.split(","))
            specs.append(ShiftSpec(name, params))
    return ShiftPlan(tuple(specs))


def serialize_shift_plan(plan: ShiftPlan) -> str:
    lines = []
    for spec in plan.specs:
        if spec.params:
            body = ", ".join(_format_number(p) for p in spec.params)
            lines.append(f"{spec.kind}([{body}])")
        else:
            lines.append(spec.kind)
    return "\n".join(lines)


def derive_seed(*parts) -> int:
    """Stable 64-bit seed from arbitrary labels; independent of dict/order state."""
    text = "|".join(str(p) for p in parts)
    digest = hashlib.blake2b(text.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def expand_grid(plan: ShiftPlan, base_seed: int) -> list[ShiftInstance]:
    """One instance per (spec, param); parameterless specs yield one instance.

    Seeds hash (base_seed, kind, param) so results never depend on grid order
    or on which worker evaluates an instance.
    """
    instances = []
    for spec in plan.specs:
        if spec.params:
            for param in spec.params:
                instances.append(
                    ShiftInstance(spec.kind, param, derive_seed(base_seed, spec.kind, param))
                )
        else:
            instances.append(
                ShiftInstance(spec.kind, None, derive_seed(base_seed, spec.kind, ""))
            )
    return instances


_KERNELS = {
    "GaussianNoise": kernels.gaussian_noise,
    "BrightnessShift": kernels.brightness_shift,
    "Rotation": kernels.rotation,
    "HorizontalFlip": kernels.horizontal_flip,
    "VerticalFlip": kernels.vertical_flip,
    "ContrastShift": kernels.contrast_shift,
    "SaturationShift": kernels.saturation_shift,
    "HueShift": kernels.hue_shift,
    "GaussianBlur": kernels.gaussian_blur,
    "JPEGCompression": kernels.jpeg_compression,
    "Pixelation": kernels.pixelation,
    "PerspectiveTransform": kernels.perspective_transform,
    "ZoomIn": kernels.zoom_in,
    "ZoomOut": kernels.zoom_out,
    "RandomErasing": kernels.random_erasing,
    "Grayscale": kernels.grayscale,
    "Sharpness": kernels.sharpness,
    "ColorJitter": kernels.color_jitter,
    "ElasticTransform": kernels.elastic_transform,
    "Solarize": kernels.solarize,
    "Posterize": kernels.posterize,
    "MotionBlur": kernels.motion_blur,
}


def validate_image(img: np.ndarray) -> np.ndarray:
    arr = np.asarray(img, dtype=np.float32)
    if arr.ndim != 3 or arr.shape[0] != 3:
        raise InvalidParam(f"expected a (3, H, W) image, got shape {arr.shape}")
    return arr


def apply_shift(img: np.ndarray, inst: ShiftInstance) -> np.ndarray:
    """Apply one shift instance; pure in (image, kind, param, seed)."""
    arr = validate_image(img)
    kind = get_kind(inst.kind)
    fn = _KERNELS[inst.kind]
    if kind.parameterless:
        return fn(arr)
    if kind.stochastic:
        rng = np.random.default_rng(inst.seed)
        return fn(arr, inst.param, rng)
    return fn(arr, inst.param)
