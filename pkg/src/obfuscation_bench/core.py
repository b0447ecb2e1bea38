"""Pixel buffer primitives, color math and deterministic RNG derivation.

Images are represented throughout as float64 numpy arrays of shape
(H, W, 3) with all values in [0, 1]. Conversion to 8-bit happens only at
file I/O boundaries (see image_io).
"""

from __future__ import annotations

import hashlib

import numpy as np

# Rec.601 luma weights.
LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])

CANONICAL_SIDE = 224


class ImageShapeError(ValueError):
    """Raised when an array does not look like an (H, W, 3) unit-interval image."""


def validate_image(img: np.ndarray) -> np.ndarray:
    """Check shape and value range, returning the array as float64."""
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[2] != 3 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ImageShapeError(f"expected (H, W, 3) image, got shape {arr.shape}")
    if arr.min() < 0.0 or arr.max() > 1.0:
        bad = tuple(
            int(i) for i in np.unravel_index(int(np.argmax(np.abs(arr - 0.5))), arr.shape)
        )
        raise ImageShapeError(
            f"channel values outside [0, 1]; offending index {bad}, value {arr[bad]}"
        )
    return arr


def clip01(img: np.ndarray) -> np.ndarray:
    return np.clip(img, 0.0, 1.0)


def sample_bilinear(
    img: np.ndarray,
    xs: np.ndarray,
    ys: np.ndarray,
    fill: np.ndarray | tuple | None = None,
) -> np.ndarray:
    """Bilinear sampling at fractional (x, y) source coordinates.

    With ``fill=None`` coordinates are clamped to the image (resize
    semantics); otherwise samples whose footprint lies fully outside the
    source read as ``fill`` (warp semantics, black by default in callers).
    """
    h, w = img.shape[:2]
    if fill is None:
        xs = np.clip(xs, 0.0, w - 1.0)
        ys = np.clip(ys, 0.0, h - 1.0)
    x0 = np.floor(xs).astype(np.int64)
    y0 = np.floor(ys).astype(np.int64)
    fx = (xs - x0)[..., None]
    fy = (ys - y0)[..., None]
    x1 = x0 + 1
    y1 = y0 + 1

    def tap(yy, xx):
        inside = (yy >= 0) & (yy < h) & (xx >= 0) & (xx < w)
        yc = np.clip(yy, 0, h - 1)
        xc = np.clip(xx, 0, w - 1)
        vals = img[yc, xc]
        if fill is not None:
            vals = np.where(inside[..., None], vals, np.asarray(fill, dtype=np.float64))
        return vals

    top = tap(y0, x0) * (1 - fx) + tap(y0, x1) * fx
    bot = tap(y1, x0) * (1 - fx) + tap(y1, x1) * fx
    return top * (1 - fy[..., 0][..., None]) + bot * fy[..., 0][..., None]


def bilinear_resize(img: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Resize with bilinear interpolation, pixel centers aligned."""
    h, w = img.shape[:2]
    if (out_h, out_w) == (h, w):
        return img.copy()
    ys = (np.arange(out_h) + 0.5) * (h / out_h) - 0.5
    xs = (np.arange(out_w) + 0.5) * (w / out_w) - 0.5
    gx, gy = np.meshgrid(xs, ys)
    return sample_bilinear(img, gx, gy, fill=None)


def central_crop_resize(img: np.ndarray, side: int) -> np.ndarray:
    """Largest centered square crop followed by bilinear resample to side x side."""
    if side < 1:
        raise ValueError("side must be >= 1")
    h, w = img.shape[:2]
    s = min(h, w)
    y0 = (h - s) // 2
    x0 = (w - s) // 2
    cropped = img[y0 : y0 + s, x0 : x0 + s]
    return bilinear_resize(cropped, side, side)


def alpha_blend(
    base: np.ndarray,
    top: np.ndarray,
    alpha: float,
    mask: np.ndarray | None = None,
) -> np.ndarray:
    """(1-alpha)*base + alpha*top where mask is true (everywhere if mask is None)."""
    if base.shape != top.shape:
        raise ValueError(f"dimension mismatch: base {base.shape} vs top {top.shape}")
    blended = (1.0 - alpha) * base + alpha * top
    if mask is None:
        return blended
    if mask.shape != base.shape[:2]:
        raise ValueError(f"mask shape {mask.shape} does not match image {base.shape[:2]}")
    return np.where(mask[..., None], blended, base)


def adjust_contrast(img: np.ndarray, factor: float) -> np.ndarray:
    """Scale deviation from mid-gray by factor, clamped to [0, 1]."""
    if factor < 0:
        raise ValueError("contrast factor must be >= 0")
    return clip01(0.5 + factor * (img - 0.5))


def to_grayscale(img: np.ndarray) -> np.ndarray:
    luma = img @ LUMA_WEIGHTS
    return np.repeat(luma[..., None], 3, axis=2)


def rgb_to_hsv(img: np.ndarray) -> np.ndarray:
    """Vectorized RGB -> HSV, hue in [0, 1)."""
    r, g, b = img[..., 0], img[..., 1], img[..., 2]
    maxc = img.max(axis=-1)
    minc = img.min(axis=-1)
    v = maxc
    delta = maxc - minc
    s = np.where(maxc > 0, delta / np.where(maxc > 0, maxc, 1.0), 0.0)
    # Avoid division by zero where delta == 0 (hue irrelevant there).
    safe = np.where(delta > 0, delta, 1.0)
    rc = (maxc - r) / safe
    gc = (maxc - g) / safe
    bc = (maxc - b) / safe
    h = np.where(maxc == r, bc - gc, np.where(maxc == g, 2.0 + rc - bc, 4.0 + gc - rc))
    h = np.where(delta > 0, (h / 6.0) % 1.0, 0.0)
    return np.stack([h, s, v], axis=-1)


def hsv_to_rgb(hsv: np.ndarray) -> np.ndarray:
    h, s, v = hsv[..., 0], hsv[..., 1], hsv[..., 2]
    i = np.floor(h * 6.0)
    f = h * 6.0 - i
    p = v * (1.0 - s)
    q = v * (1.0 - s * f)
    t = v * (1.0 - s * (1.0 - f))
    i = i.astype(np.int64) % 6
    r = np.choose(i, [v, q, p, p, t, v])
    g = np.choose(i, [t, v, v, q, p, p])
    b = np.choose(i, [p, p, t, v, v, q])
    return np.stack([r, g, b], axis=-1)


def hue_rotate(img: np.ndarray, degrees: float) -> np.ndarray:
    """Rotate hue by the given angle, keeping saturation and value."""
    hsv = rgb_to_hsv(img)
    hsv[..., 0] = (hsv[..., 0] + degrees / 360.0) % 1.0
    return clip01(hsv_to_rgb(hsv))


def seed_from_triple(global_seed: int, image_id: str, obfuscation_name: str) -> int:
    """Stable 64-bit seed mixed from the (seed, image id, obfuscation) triple."""
    material = f"{global_seed}\x1f{image_id}\x1f{obfuscation_name}".encode("utf-8")
    digest = hashlib.blake2b(material, digest_size=8).digest()
    return int.from_bytes(digest, "big")


def derive_rng(global_seed: int, image_id: str, obfuscation_name: str) -> np.random.Generator:
    """Deterministic per-(image, obfuscation) random stream.

    Philox is counter-based with a published algorithm, so identical seeds
    give identical draw sequences on every platform.
    """
    seed = seed_from_triple(global_seed, image_id, obfuscation_name)
    return np.random.Generator(np.random.Philox(seed))
