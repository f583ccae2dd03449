"""Pixel-level implementations of the 22 shifts.

All functions take and return channel-major (3, H, W) float32 arrays in
[0, 1]. Identity parameters short-circuit to an exact copy so the no-op
rows of an audit match the baseline bit for bit. Stochastic kinds take a
numpy Generator; everything else is a pure function of (image, param).
"""

from __future__ import annotations

import io

import cv2
import numpy as np
from PIL import Image
from scipy.ndimage import gaussian_filter, map_coordinates

LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114], dtype=np.float32)

# PIL-style smoothing kernel used by the sharpness blend.
SMOOTH_KERNEL = np.array([[1, 1, 1], [1, 5, 1], [1, 1, 1]], dtype=np.float32) / 13.0


def _clamp(img: np.ndarray) -> np.ndarray:
    return np.clip(img, 0.0, 1.0)


def _to_hwc(img: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(np.moveaxis(img, 0, 2))


def _from_hwc(hwc: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(np.moveaxis(hwc, 2, 0)).astype(np.float32)


def luma(img: np.ndarray) -> np.ndarray:
    """(H, W) luma plane of a channel-major image."""
    return np.tensordot(LUMA_WEIGHTS, img, axes=(0, 0))


def rgb_to_hsv(hwc: np.ndarray) -> np.ndarray:
    r, g, b = hwc[..., 0], hwc[..., 1], hwc[..., 2]
    v = hwc.max(axis=-1)
    low = hwc.min(axis=-1)
    delta = v - low
    s = np.where(v > 0, delta / np.where(v > 0, v, 1.0), 0.0)
    h = np.zeros_like(v)
    nonzero = delta > 0
    safe = np.where(nonzero, delta, 1.0)
    r_max = nonzero & (v == r)
    g_max = nonzero & ~r_max & (v == g)
    b_max = nonzero & ~r_max & ~g_max
    h = np.where(r_max, ((g - b) / safe) % 6.0, h)
    h = np.where(g_max, (b - r) / safe + 2.0, h)
    h = np.where(b_max, (r - g) / safe + 4.0, h)
    return np.stack([h / 6.0, s, v], axis=-1)


def hsv_to_rgb(hsv: np.ndarray) -> np.ndarray:
    h, s, v = hsv[..., 0] * 6.0, hsv[..., 1], hsv[..., 2]
    i = np.floor(h).astype(int) % 6
    f = h - np.floor(h)
    p = v * (1.0 - s)
    q = v * (1.0 - s * f)
    t = v * (1.0 - s * (1.0 - f))
    r = np.choose(i, [v, q, p, p, t, v])
    g = np.choose(i, [t, v, v, q, p, p])
    b = np.choose(i, [p, p, t, v, v, q])
    return np.stack([r, g, b], axis=-1)


def gaussian_noise(img, factor, rng):
    if factor == 0:
        return img.copy()
    noise = rng.standard_normal(img.shape).astype(np.float32)
    return _clamp(img + np.float32(factor) * noise)


def brightness_shift(img, factor):
    if factor == 1:
        return img.copy()
    return _clamp(np.float32(factor) * img)


def contrast_shift(img, factor):
    if factor == 1:
        return img.copy()
    mean = np.float32(luma(img).mean())
    return _clamp(mean + np.float32(factor) * (img - mean))


def saturation_shift(img, factor):
    if factor == 1:
        return img.copy()
    hsv = rgb_to_hsv(_to_hwc(img))
    hsv[..., 1] = np.clip(hsv[..., 1] * factor, 0.0, 1.0)
    return _clamp(_from_hwc(hsv_to_rgb(hsv)))


def hue_shift(img, factor):
    if factor == 0:
        return img.copy()
    hsv = rgb_to_hsv(_to_hwc(img))
    hsv[..., 0] = (hsv[..., 0] + factor) % 1.0
    return _clamp(_from_hwc(hsv_to_rgb(hsv)))


def rotation(img, degrees):
    if degrees % 360 == 0:
        return img.copy()
    hwc = _to_hwc(img)
    h, w = hwc.shape[:2]
    center = ((w - 1) / 2.0, (h - 1) / 2.0)
    matrix = cv2.getRotationMatrix2D(center, float(degrees), 1.0)
    out = cv2.warpAffine(
        hwc, matrix, (w, h), flags=cv2.INTER_LINEAR, borderMode=cv2.BORDER_REFLECT
    )
    return _clamp(_from_hwc(out))


def horizontal_flip(img):
    return img[:, :, ::-1].copy()


def vertical_flip(img):
    return img[:, ::-1, :].copy()


def gaussian_blur(img, kernel_size):
    if kernel_size == 1:
        return img.copy()
    sigma = 0.3 * ((kernel_size - 1) / 2.0 - 1.0) + 0.8
    out = cv2.GaussianBlur(
        _to_hwc(img), (kernel_size, kernel_size), sigmaX=sigma, sigmaY=sigma,
        borderType=cv2.BORDER_REFLECT,
    )
    return _clamp(_from_hwc(out))


def jpeg_compression(img, quality):
    hwc8 = (np.clip(_to_hwc(img), 0, 1) * 255.0 + 0.5).astype(np.uint8)
    buf = io.BytesIO()
    Image.fromarray(hwc8).save(buf, format="JPEG", quality=int(quality), subsampling=2)
    buf.seek(0)
    decoded = np.asarray(Image.open(buf).convert("RGB"), dtype=np.float32) / 255.0
    return _from_hwc(decoded)


def jpeg_encoded_size(img, quality) -> int:
    """Encoded byte count; used by the compression-monotonicity checks."""
    hwc8 = (np.clip(_to_hwc(img), 0, 1) * 255.0 + 0.5).astype(np.uint8)
    buf = io.BytesIO()
    Image.fromarray(hwc8).save(buf, format="JPEG", quality=int(quality), subsampling=2)
    return buf.getbuffer().nbytes


def pixelation(img, scale):
    if scale == 1:
        return img.copy()
    hwc = _to_hwc(img)
    h, w = hwc.shape[:2]
    small_h = max(1, int(round(h * scale)))
    small_w = max(1, int(round(w * scale)))
    small = cv2.resize(hwc, (small_w, small_h), interpolation=cv2.INTER_NEAREST)
    out = cv2.resize(small, (w, h), interpolation=cv2.INTER_NEAREST)
    return _clamp(_from_hwc(out))


def perspective_transform(img, distortion, rng):
    if distortion == 0:
        return img.copy()
    hwc = _to_hwc(img)
    h, w = hwc.shape[:2]
    limit = distortion * min(h, w)
    src = np.array([[0, 0], [w - 1, 0], [w - 1, h - 1], [0, h - 1]], dtype=np.float32)
    offsets = rng.uniform(-limit, limit, size=(4, 2)).astype(np.float32)
    matrix = cv2.getPerspectiveTransform(src, src + offsets)
    out = cv2.warpPerspective(
        hwc, matrix, (w, h), flags=cv2.INTER_LINEAR, borderMode=cv2.BORDER_REFLECT
    )
    return _clamp(_from_hwc(out))


def zoom_in(img, scale):
    if scale == 1:
        return img.copy()
    hwc = _to_hwc(img)
    h, w = hwc.shape[:2]
    crop_h = max(1, int(round(h * scale)))
    crop_w = max(1, int(round(w * scale)))
    top = (h - crop_h) // 2
    left = (w - crop_w) // 2
    crop = hwc[top : top + crop_h, left : left + crop_w]
    out = cv2.resize(crop, (w, h), interpolation=cv2.INTER_LINEAR)
    return _clamp(_from_hwc(out))


def zoom_out(img, scale):
    if scale == 1:
        return img.copy()
    hwc = _to_hwc(img)
    h, w = hwc.shape[:2]
    small_h = max(1, int(round(h * scale)))
    small_w = max(1, int(round(w * scale)))
    small = cv2.resize(hwc, (small_w, small_h), interpolation=cv2.INTER_LINEAR)
    top = (h - small_h) // 2
    left = (w - small_w) // 2
    out = np.pad(
        small,
        ((top, h - small_h - top), (left, w - small_w - left), (0, 0)),
        mode="symmetric",
    )
    return _clamp(_from_hwc(out))


def random_erasing(img, area, rng):
    if area == 0:
        return img.copy()
    _, h, w = img.shape
    rect_h = min(h, max(1, int(round(h * np.sqrt(area)))))
    rect_w = min(w, max(1, int(round(w * np.sqrt(area)))))
    top = int(rng.integers(0, h - rect_h + 1))
    left = int(rng.integers(0, w - rect_w + 1))
    out = img.copy()
    out[:, top : top + rect_h, left : left + rect_w] = 0.5
    return out


def grayscale(img, intensity):
    if intensity == 0:
        return img.copy()
    gray = luma(img)[None, :, :]
    return _clamp(np.float32(intensity) * gray + np.float32(1 - intensity) * img)


def sharpness(img, factor):
    if factor == 1:
        return img.copy()
    smooth = cv2.filter2D(_to_hwc(img), -1, SMOOTH_KERNEL, borderType=cv2.BORDER_REFLECT)
    smooth = _from_hwc(smooth)
    return _clamp(smooth + np.float32(factor) * (img - smooth))


def color_jitter(img, magnitude, rng):
    if magnitude == 0:
        return img.copy()
    b, c, s = rng.uniform(1 - magnitude, 1 + magnitude, size=3)
    h = rng.uniform(-magnitude / 4.0, magnitude / 4.0)
    out = brightness_shift(img, b)
    out = contrast_shift(out, c)
    out = saturation_shift(out, s)
    return hue_shift(out, h)


def elastic_transform(img, alpha, rng):
    if alpha == 0:
        return img.copy()
    _, h, w = img.shape
    dx = gaussian_filter(rng.uniform(-1, 1, size=(h, w)), sigma=8.0) * alpha
    dy = gaussian_filter(rng.uniform(-1, 1, size=(h, w)), sigma=8.0) * alpha
    ys, xs = np.meshgrid(np.arange(h), np.arange(w), indexing="ij")
    coords = [ys + dy, xs + dx]
    out = np.stack(
        [map_coordinates(ch, coords, order=1, mode="reflect") for ch in img]
    )
    return _clamp(out.astype(np.float32))


def solarize(img, threshold):
    return np.where(img > threshold, 1.0 - img, img).astype(np.float32)


def posterize(img, bits):
    levels = 2**bits - 1
    return (np.round(img * levels) / levels).astype(np.float32)


def motion_blur(img, kernel_size):
    if kernel_size == 1:
        return img.copy()
    kernel = np.full((1, kernel_size), 1.0 / kernel_size, dtype=np.float32)
    out = cv2.filter2D(_to_hwc(img), -1, kernel, borderType=cv2.BORDER_REFLECT)
    return _clamp(_from_hwc(out))
