"""Synthetic toy datasets whose labels follow the builtin toy models' own
features, so audit outcomes are analytically predictable in tests."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image


def _save_png(arr: np.ndarray, path: Path) -> np.ndarray:
    """Write a channel-major float image as 8-bit PNG; return what a reader
    will actually see after quantization."""
    hwc8 = (np.clip(np.moveaxis(arr, 0, 2), 0, 1) * 255.0 + 0.5).astype(np.uint8)
    Image.fromarray(hwc8).save(path)
    return np.moveaxis(hwc8.astype(np.float32) / 255.0, 2, 0)


def make_brightness_dataset(out_dir: str | Path, n: int = 200, seed: int = 0,
                            size: int = 24, margin: float = 0.15,
                            texture: float = 0.08) -> Path:
    """Binary dataset for the brightness-linear toy model.

    Each image is a flat gray level in [0.5 - margin, 0.5 + margin] plus
    uniform texture noise; the label is whether the stored image's mean
    brightness exceeds 0.5. Labels are "dark"/"light" so the sorted class
    order makes "light" the positive class, matching the toy model's score.
    Returns the manifest path.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    rows = []
    for i in range(n):
        base = 0.5 + rng.uniform(-margin, margin)
        img = base + texture * rng.uniform(-1, 1, size=(3, size, size))
        stored = _save_png(np.clip(img, 0, 1).astype(np.float32), out_dir / f"img_{i:04d}.png")
        label = "light" if stored.mean() > 0.5 else "dark"
        rows.append((f"img_{i:04d}.png", label))
    manifest = out_dir / "manifest.csv"
    with open(manifest, "w", encoding="utf-8") as fh:
        fh.write("path,label\n")
        for path, label in rows:
            fh.write(f"{path},{label}\n")
    return manifest


def make_color_dataset(out_dir: str | Path, n: int = 150, seed: int = 0,
                       size: int = 24) -> Path:
    """3-class dataset for the color-mean toy model: one dominant channel."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    names = ("red", "green", "blue")
    rows = []
    for i in range(n):
        cls = int(rng.integers(0, 3))
        img = np.full((3, size, size), 0.3, dtype=np.float32)
        img[cls] += rng.uniform(0.15, 0.35)
        img += 0.05 * rng.uniform(-1, 1, size=img.shape).astype(np.float32)
        _save_png(np.clip(img, 0, 1), out_dir / f"img_{i:04d}.png")
        rows.append((f"img_{i:04d}.png", names[cls]))
    manifest = out_dir / "manifest.csv"
    with open(manifest, "w", encoding="utf-8") as fh:
        fh.write("path,label\n")
        for path, label in rows:
            fh.write(f"{path},{label}\n")
    return manifest


def make_multilabel_dataset(out_dir: str | Path, n: int = 60, seed: int = 0,
                            size: int = 24) -> Path:
    """Small multilabel fixture: three channel-intensity flags per image."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    names = ("red_on", "green_on", "blue_on")
    rows = []
    for i in range(n):
        bits = rng.integers(0, 2, size=3)
        img = np.full((3, size, size), 0.2, dtype=np.float32)
        for c, bit in enumerate(bits):
            if bit:
                img[c] += 0.5
        img += 0.05 * rng.uniform(-1, 1, size=img.shape).astype(np.float32)
        _save_png(np.clip(img, 0, 1), out_dir / f"img_{i:04d}.png")
        rows.append((f"img_{i:04d}.png", bits))
    manifest = out_dir / "manifest.csv"
    with open(manifest, "w", encoding="utf-8") as fh:
        fh.write("path," + ",".join(names) + "\n")
        for path, bits in rows:
            fh.write(f"{path},{','.join(str(int(b)) for b in bits)}\n")
    return manifest
