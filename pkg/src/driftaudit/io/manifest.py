"""Dataset manifests and stratified sampling.

A manifest is a single header-bearing CSV. Two layouts:

    path,label            one class name per row (binary/multiclass)
    path,<c1>,...,<cN>    one 0/1 column per class (multilabel, N >= 2)

Single-label class names are the sorted unique labels; with exactly two
classes the task is binary and the second sorted name is the positive class.
Image paths are resolved relative to the manifest's directory and must exist
at load time.
"""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from ..errors import InvalidParam, SchemaError
from ..metrics import TaskKind


@dataclass(frozen=True)
class Record:
    sample_id: str
    image_path: Path
    label: int | tuple[int, ...]


@dataclass(frozen=True)
class Dataset:
    task_kind: TaskKind
    class_names: tuple[str, ...]
    records: tuple[Record, ...]

    def __len__(self) -> int:
        return len(self.records)

    @property
    def num_classes(self) -> int:
        return len(self.class_names)

    def class_histogram(self) -> dict[str, int]:
        if self.task_kind == TaskKind.MULTILABEL:
            counts = {name: 0 for name in self.class_names}
            for rec in self.records:
                for name, bit in zip(self.class_names, rec.label):
                    counts[name] += int(bit)
            return counts
        counter = Counter(self.class_names[rec.label] for rec in self.records)
        return {name: counter.get(name, 0) for name in self.class_names}

    def labels_array(self) -> np.ndarray:
        return np.asarray([rec.label for rec in self.records])


def load_dataset(manifest_path: str | Path, class_names: list[str] | None = None) -> Dataset:
    """Parse a manifest and verify every referenced image resolves."""
    manifest_path = Path(manifest_path)
    if not manifest_path.exists():
        raise FileNotFoundError(f"manifest not found: {manifest_path}")
    with open(manifest_path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError("manifest is empty") from None
        rows = [row for row in reader if row]

    header = [h.strip() for h in header]
    if len(header) < 2 or header[0] != "path":
        raise SchemaError("manifest header must start with 'path'")
    if not rows:
        raise SchemaError("manifest has no data rows")
    base_dir = manifest_path.parent

    if len(header) == 2 and header[1] == "label":
        return _load_single_label(rows, base_dir, class_names)
    return _load_multilabel(rows, header[1:], base_dir)


def _resolve(base_dir: Path, raw: str) -> Path:
    path = Path(raw)
    if not path.is_absolute():
        path = base_dir / path
    if not path.exists():
        raise FileNotFoundError(f"image not found: {path}")
    return path


def _load_single_label(rows, base_dir, class_names):
    labels = []
    for row in rows:
        if len(row) != 2:
            raise SchemaError(f"expected 2 columns, got {len(row)}: {row!r}")
        labels.append(row[1].strip())
    names = tuple(class_names) if class_names else tuple(sorted(set(labels)))
    index = {name: i for i, name in enumerate(names)}
    records = []
    for row, label in zip(rows, labels):
        if label not in index:
            raise SchemaError(f"label {label!r} not in class names {list(names)}")
        path = _resolve(base_dir, row[0].strip())
        records.append(Record(sample_id=row[0].strip(), image_path=path, label=index[label]))
    kind = TaskKind.BINARY if len(names) == 2 else TaskKind.MULTICLASS
    if len(names) < 2:
        raise SchemaError("need at least 2 classes")
    return Dataset(task_kind=kind, class_names=names, records=tuple(records))


def _load_multilabel(rows, names, base_dir):
    names = tuple(names)
    records = []
    for row in rows:
        if len(row) != len(names) + 1:
            raise SchemaError(
                f"label vector length {len(row) - 1} != class count {len(names)}: {row!r}"
            )
        bits = []
        for cell in row[1:]:
            cell = cell.strip()
            if cell not in ("0", "1"):
                raise SchemaError(f"multilabel cells must be 0/1, got {cell!r}")
            bits.append(int(cell))
        path = _resolve(base_dir, row[0].strip())
        records.append(Record(sample_id=row[0].strip(), image_path=path, label=tuple(bits)))
    return Dataset(task_kind=TaskKind.MULTILABEL, class_names=names, records=tuple(records))


def stratified_sample(ds: Dataset, frac: float, seed: int) -> Dataset:
    """Class-proportional subset: round-half-up per stratum, at least one per
    non-empty stratum, original record order preserved."""
    if not 0 < frac <= 1:
        raise InvalidParam(f"sample fraction must lie in (0, 1], got {frac}")
    if frac == 1.0:
        return ds

    strata: dict = {}
    for idx, rec in enumerate(ds.records):
        strata.setdefault(rec.label, []).append(idx)

    rng = np.random.default_rng(seed)
    chosen: list[int] = []
    for key in sorted(strata, key=str):
        members = strata[key]
        want = int(np.floor(frac * len(members) + 0.5))
        want = min(len(members), max(1, want))
        picks = rng.permutation(len(members))[:want]
        chosen.extend(members[i] for i in picks)
    chosen.sort()
    return Dataset(
        task_kind=ds.task_kind,
        class_names=ds.class_names,
        records=tuple(ds.records[i] for i in chosen),
    )


def load_image(path: str | Path) -> np.ndarray:
    """Read an image file into the channel-major float layout."""
    with Image.open(path) as im:
        arr = np.asarray(im.convert("RGB"), dtype=np.float32) / 255.0
    return np.ascontiguousarray(np.moveaxis(arr, 2, 0))


def load_images(ds: Dataset) -> list[np.ndarray]:
    return [load_image(rec.image_path) for rec in ds.records]
