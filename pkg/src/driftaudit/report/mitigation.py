"""Augmentation-pipeline specs: mapping recommendations to training-time
transforms and serializing the result for downstream training stacks.

The transform vocabulary is the torchvision-v2-style catalogue from the
analysis prompt. Recommendations wrapped in random application without an
explicit probability default to p=0.3. Operations with no vocabulary
equivalent are preserved verbatim as flagged custom stubs.
"""

from __future__ import annotations

import ast
import json
import re
from dataclasses import dataclass, field

from ..errors import EmptyPipeline, InvalidParam, ParseError, VersionError

PIPELINE_VERSION = 1
DEFAULT_APPLY_PROBABILITY = 0.3

TRANSFORM_VOCABULARY = (
    "Resize", "ScaleJitter", "RandomResize", "RandomShortestSize", "RandomCrop",
    "RandomResizedCrop", "RandomIoUCrop", "CenterCrop", "FiveCrop", "TenCrop",
    "RandomHorizontalFlip", "RandomVerticalFlip", "Pad", "RandomZoomOut",
    "RandomRotation", "RandomAffine", "RandomPerspective", "ElasticTransform",
    "ColorJitter", "RandomChannelPermutation", "RandomPhotometricDistort",
    "Grayscale", "RGB", "RandomGrayscale", "GaussianBlur", "GaussianNoise",
    "RandomInvert", "RandomPosterize", "RandomSolarize", "RandomAdjustSharpness",
    "RandomAutocontrast", "RandomEqualize", "Compose", "RandomApply",
    "RandomChoice", "RandomOrder", "Normalize", "RandomErasing", "Lambda",
    "SanitizeBoundingBoxes", "ClampBoundingBoxes", "UniformTemporalSubsample",
    "JPEG",
)

_WRAPPERS = {"Compose", "RandomApply", "RandomChoice", "RandomOrder"}

# Ops that carry their own probability argument and need no RandomApply wrap.
SELF_RANDOMIZING = {
    "RandomHorizontalFlip", "RandomVerticalFlip", "RandomGrayscale",
    "RandomInvert", "RandomAutocontrast", "RandomEqualize",
}


def _squash(name: str) -> str:
    return re.sub(r"[^a-z0-9]", "", name.lower())


_VOCAB_BY_SQUASH = {_squash(name): name for name in TRANSFORM_VOCABULARY}


def lookup_op(name: str) -> str | None:
    return _VOCAB_BY_SQUASH.get(_squash(name.removeprefix("v2.")))


@dataclass
class PipelineOp:
    name: str
    params: dict = field(default_factory=dict)
    p: float = 1.0
    custom: str | None = None  # original text for unmapped operations

    def __post_init__(self):
        if not 0 < self.p <= 1:
            raise InvalidParam(f"apply probability must lie in (0, 1], got {self.p}")
        if self.custom is None and self.name not in TRANSFORM_VOCABULARY:
            raise InvalidParam(f"{self.name} is not in the transform vocabulary")


@dataclass
class AugmentationPipelineSpec:
    ops: list[PipelineOp] = field(default_factory=list)
    version: int = PIPELINE_VERSION


# --- Parsing recommendations -------------------------------------------------

_PARAM_WORDS = (
    "quality", "sigma", "kernel_size", "bits", "threshold", "degrees", "alpha",
    "brightness", "contrast", "saturation", "hue", "scale", "size", "mean",
    "std", "distortion_scale", "sharpness_factor",
)


def _literal(node):
    try:
        return ast.literal_eval(node)
    except (ValueError, SyntaxError):
        return None


def _entry_from_call(node: ast.Call, p: float | None = None) -> list[PipelineOp]:
    func = node.func
    name = None
    if isinstance(func, ast.Attribute):
        name = func.attr
    elif isinstance(func, ast.Name):
        name = func.id
    if name is None:
        return []
    canonical = lookup_op(name)
    if canonical in _WRAPPERS:
        # RandomApply([ops...], p) / Compose([ops...]) recurse into children.
        wrapped_p = p
        if canonical == "RandomApply":
            wrapped_p = DEFAULT_APPLY_PROBABILITY
            if len(node.args) > 1:
                value = _literal(node.args[1])
                if isinstance(value, (int, float)):
                    wrapped_p = float(value)
            for kw in node.keywords:
                if kw.arg == "p":
                    value = _literal(kw.value)
                    if isinstance(value, (int, float)):
                        wrapped_p = float(value)
        entries = []
        for arg in node.args:
            if isinstance(arg, (ast.List, ast.Tuple)):
                for item in arg.elts:
                    if isinstance(item, ast.Call):
                        entries.extend(_entry_from_call(item, wrapped_p))
        return entries
    if canonical is None:
        return [PipelineOp(name=name, p=p or 1.0, custom=ast.unparse(node))]
    params = {}
    for idx, arg in enumerate(node.args):
        value = _literal(arg)
        if value is not None or isinstance(arg, ast.Constant):
            params[f"arg{idx}"] = value
    for kw in node.keywords:
        if kw.arg:
            params[kw.arg] = _literal(kw.value)
    return [PipelineOp(name=canonical, params=params, p=p or 1.0)]


def _parse_call_text(text: str) -> list[PipelineOp]:
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError:
        return []
    if not isinstance(tree.body, ast.Call):
        return []
    return _entry_from_call(tree.body)


def _parse_loose_text(text: str) -> list[PipelineOp]:
    """Best-effort scan of free-text recommendations like
    'random-apply JPEG quality 80 at p=0.3'."""
    tokens = re.findall(r"[A-Za-z_][A-Za-z0-9_.-]*|\d+\.?\d*", text)
    random_apply = any(_squash(t) in ("randomapply", "randomlyapply") for t in tokens)
    if re.search(r"random[- ]?apply|randomly applying", text, re.IGNORECASE):
        random_apply = True
    op_name = None
    for tok in tokens:
        canonical = lookup_op(tok)
        if canonical and canonical not in _WRAPPERS:
            op_name = canonical
            break
    probability = None
    p_match = re.search(r"\bp\s*=?\s*(\d*\.?\d+)", text)
    if p_match:
        probability = float(p_match.group(1))
    if op_name is None:
        mention = text.strip().strip("-* ").strip()
        if not mention:
            return []
        return [PipelineOp(name=mention, p=probability or 1.0, custom=mention)]
    params = {}
    lowered_tokens = [t.lower() for t in tokens]
    for word in _PARAM_WORDS:
        if word in lowered_tokens:
            idx = lowered_tokens.index(word)
            for following in tokens[idx + 1 : idx + 3]:
                if re.fullmatch(r"\d+\.?\d*", following):
                    value = float(following)
                    params[word] = int(value) if value.is_integer() else value
                    break
    if probability is None and random_apply:
        probability = DEFAULT_APPLY_PROBABILITY
    return [PipelineOp(name=op_name, params=params, p=probability or 1.0)]


def build_augmentation_spec(recommendation) -> AugmentationPipelineSpec:
    """Convert a recommendation (text or structured list) into a pipeline spec."""
    ops: list[PipelineOp] = []
    if isinstance(recommendation, (list, tuple)):
        for item in recommendation:
            if isinstance(item, PipelineOp):
                ops.append(item)
            elif isinstance(item, dict):
                ops.append(
                    PipelineOp(
                        name=item["name"],
                        params=dict(item.get("params", {})),
                        p=float(item.get("p", 1.0)),
                        custom=item.get("custom"),
                    )
                )
            else:
                ops.extend(_parse_item_text(str(item)))
    else:
        text = str(recommendation)
        lines = [ln for ln in text.splitlines() if ln.strip()]
        for line in lines:
            stripped = line.strip().lstrip("-*").strip()
            parsed = _parse_call_text(stripped)
            if parsed:
                ops.extend(parsed)
                continue
            if "v2." in stripped or re.search(r"random[- ]?apply", stripped, re.I):
                ops.extend(_parse_loose_text(stripped))
            elif line.strip().startswith(("-", "*")):
                ops.extend(_parse_loose_text(stripped))
            elif len(lines) == 1 and len(stripped.split()) <= 8 and "." not in stripped.rstrip("."):
                ops.extend(_parse_item_text(stripped))
    if not ops:
        raise EmptyPipeline("no recognizable operation in the recommendation")
    return AugmentationPipelineSpec(ops=ops)


def _parse_item_text(text: str) -> list[PipelineOp]:
    parsed = _parse_call_text(text)
    if parsed:
        return parsed
    return _parse_loose_text(text)


# --- Serialization -----------------------------------------------------------

def serialize_pipeline(spec: AugmentationPipelineSpec) -> str:
    doc = {
        "version": spec.version,
        "ops": [
            {"name": op.name, "params": op.params, "p": op.p, "custom": op.custom}
            for op in spec.ops
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def parse_pipeline(text: str) -> AugmentationPipelineSpec:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"unparseable pipeline spec: {exc}") from exc
    if doc.get("version") != PIPELINE_VERSION:
        raise VersionError(
            f"pipeline spec version {doc.get('version')} unsupported (expected {PIPELINE_VERSION})"
        )
    ops = [
        PipelineOp(
            name=entry["name"],
            params=dict(entry.get("params", {})),
            p=float(entry.get("p", 1.0)),
            custom=entry.get("custom"),
        )
        for entry in doc.get("ops", [])
    ]
    return AugmentationPipelineSpec(ops=ops, version=doc["version"])


# --- Shift kind -> mitigation transform --------------------------------------

def _fmt(value) -> str:
    if isinstance(value, int):
        return str(value)
    return f"{float(value):g}"


def mitigation_line(kind: str, params: list) -> str:
    """The training-time transform countering one observed shift kind,
    rendered in the vocabulary's call style."""
    values = [p for p in params if p is not None]
    hi = max(values) if values else None
    lo = min(values) if values else None

    def wrap(call: str, p: float = DEFAULT_APPLY_PROBABILITY) -> str:
        return f"v2.RandomApply([{call}], {p:g})"

    if kind == "GaussianNoise":
        return wrap(f"v2.GaussianNoise(sigma={_fmt(hi)})")
    if kind == "BrightnessShift":
        dev = max(abs(v - 1) for v in values)
        return wrap(f"v2.ColorJitter(brightness={_fmt(dev)})")
    if kind == "ContrastShift":
        dev = max(abs(v - 1) for v in values)
        return wrap(f"v2.ColorJitter(contrast={_fmt(dev)})")
    if kind == "SaturationShift":
        dev = max(abs(v - 1) for v in values)
        return wrap(f"v2.ColorJitter(saturation={_fmt(dev)})")
    if kind == "HueShift":
        return wrap(f"v2.ColorJitter(hue={_fmt(max(abs(v) for v in values))})")
    if kind == "Rotation":
        return f"v2.RandomRotation(degrees={_fmt(max(abs(v) for v in values))})"
    if kind == "HorizontalFlip":
        return "v2.RandomHorizontalFlip(p=0.5)"
    if kind == "VerticalFlip":
        return "v2.RandomVerticalFlip(p=0.5)"
    if kind == "GaussianBlur":
        return wrap(f"v2.GaussianBlur(kernel_size={_fmt(hi)})")
    if kind == "JPEGCompression":
        return wrap(f"v2.JPEG(quality={_fmt(lo)})")
    if kind == "Pixelation":
        return wrap(f"v2.ScaleJitter(scale_range=({_fmt(lo)}, 1.0))")
    if kind == "PerspectiveTransform":
        return wrap(f"v2.RandomPerspective(distortion_scale={_fmt(hi)})")
    if kind == "ZoomIn":
        return wrap(f"v2.RandomResizedCrop(scale=({_fmt(lo)}, 1.0))")
    if kind == "ZoomOut":
        return wrap(f"v2.RandomZoomOut(side_range=(1.0, {_fmt(round(1.0 / lo, 2))}))")
    if kind == "RandomErasing":
        return wrap(f"v2.RandomErasing(scale=({_fmt(lo)}, {_fmt(hi)}))")
    if kind == "Grayscale":
        return "v2.RandomGrayscale(p=0.3)"
    if kind == "Sharpness":
        return wrap(f"v2.RandomAdjustSharpness(sharpness_factor={_fmt(hi)})")
    if kind == "ColorJitter":
        m = hi
        return wrap(
            f"v2.ColorJitter(brightness={_fmt(m)}, contrast={_fmt(m)}, "
            f"saturation={_fmt(m)}, hue={_fmt(m / 4)})"
        )
    if kind == "ElasticTransform":
        return wrap(f"v2.ElasticTransform(alpha={_fmt(hi)})")
    if kind == "Solarize":
        return wrap(f"v2.RandomSolarize(threshold={_fmt(lo)})")
    if kind == "Posterize":
        return wrap(f"v2.RandomPosterize(bits={_fmt(lo)})")
    if kind == "MotionBlur":
        return wrap(f"v2.GaussianBlur(kernel_size={_fmt(hi)})")
    raise InvalidParam(f"no mitigation mapping for shift kind {kind}")
