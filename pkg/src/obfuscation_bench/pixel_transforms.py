"""Obfuscations operating on pixel grids, stripes and blocks (no resampling)."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import adjust_contrast


@dataclass(frozen=True)
class StripeSpec:
    horizontal: bool
    width: int

    def __post_init__(self):
        if self.width < 1:
            raise ValueError("stripe width must be >= 1")


class HalftoneTechnique(Enum):
    CIRCLES = "Circles"
    SQUARES = "Squares"
    ZIGZAG = "Zigzag"
    RANDOM_PIXELS = "RandomPixels"


@dataclass(frozen=True)
class TrianglePartition:
    """Two lines from the top edge meeting at a point on the bottom edge.

    The central triangle has top width ``scale`` times the image width,
    centered on the meeting-point abscissa ``apex_frac`` (fraction of the
    width, drawn in the middle third by the sampler).
    """

    scale: float
    apex_frac: float = 0.5

    def region_map(self, h: int, w: int) -> np.ndarray:
        """Per-pixel region index in {0: left, 1: center, 2: right}."""
        apex_x = self.apex_frac * (w - 1)
        half = 0.5 * self.scale * w
        ys = np.arange(h)[:, None]
        xs = np.arange(w)[None, :]
        # Lines interpolate from the top-edge anchor points to the apex.
        t = ys / max(h - 1, 1)
        left_x = (1 - t) * (apex_x - half) + t * apex_x
        right_x = (1 - t) * (apex_x + half) + t * apex_x
        region = np.ones((h, w), dtype=np.int64)
        region[np.broadcast_to(xs < left_x, (h, w))] = 0
        region[np.broadcast_to(xs >= right_x, (h, w))] = 2
        return region


def block_grid(h: int, w: int, block_size: int):
    """Row-major block spans; ragged edge blocks come out smaller, never skipped."""
    for y0 in range(0, h, block_size):
        for x0 in range(0, w, block_size):
            yield y0, min(y0 + block_size, h), x0, min(x0 + block_size, w)


def color_noise_blocks(img: np.ndarray, block_size: int, rng: np.random.Generator) -> np.ndarray:
    """Per block: add one uniform draw to one random channel, wrapping above 1."""
    h, w = img.shape[:2]
    if not 1 <= block_size <= max(h, w):
        raise ValueError("block_size must be in [1, side]")
    out = img.copy()
    for y0, y1, x0, x1 in block_grid(h, w, block_size):
        channel = int(rng.integers(3))
        v = float(rng.uniform(0.0, 1.0))
        plane = out[y0:y1, x0:x1, channel] + v
        plane[plane > 1.0] -= 1.0
        out[y0:y1, x0:x1, channel] = plane
    return out


def _render_zigzag(block: np.ndarray, mean: float, max_periods: int) -> None:
    """Draw a full-height zigzag line whose period count tracks the mean."""
    bh, bw = block.shape
    periods = int(round(mean * max_periods))
    if periods <= 0:
        return
    cols = np.arange(bw + 1)
    t = periods * cols / bw
    y_norm = 1.0 - np.abs(2.0 * (t % 1.0) - 1.0)
    ys = np.round(y_norm * (bh - 1)).astype(np.int64)
    for x in range(bw):
        lo = min(ys[x], ys[x + 1])
        hi = max(ys[x], ys[x + 1])
        block[lo : hi + 1, x] = 1.0


def _render_random_pixels(block: np.ndarray, mean: float, rng: np.random.Generator) -> None:
    bh, bw = block.shape
    area = bh * bw
    n = int(round(mean * area))
    chosen = rng.permutation(area)[:n]
    flat = block.reshape(-1)
    flat[chosen] = 1.0


def halftone(
    img: np.ndarray,
    block_size: int,
    technique: HalftoneTechnique,
    rng: np.random.Generator,
) -> np.ndarray:
    """Replace each block, per channel, by a bright mark on dark background.

    The mark's controlled property (area, period count or set-pixel count)
    is proportional to the block's mean channel intensity.
    """
    if block_size < 2:
        raise ValueError("block_size must be >= 2")
    h, w = img.shape[:2]
    out = np.zeros_like(img)
    max_periods = block_size // 2
    for c in range(3):
        channel = img[..., c]
        target = out[..., c]
        for y0, y1, x0, x1 in block_grid(h, w, block_size):
            mean = float(channel[y0:y1, x0:x1].mean())
            block = target[y0:y1, x0:x1]
            bh, bw = block.shape
            if technique is HalftoneTechnique.CIRCLES:
                radius = np.sqrt(mean * bh * bw / np.pi)
                yy = np.arange(bh)[:, None] - (bh - 1) / 2.0
                xx = np.arange(bw)[None, :] - (bw - 1) / 2.0
                block[yy * yy + xx * xx <= radius * radius] = 1.0
            elif technique is HalftoneTechnique.SQUARES:
                # Whole-pixel side lengths keep the rendered area close to
                # mean * block area despite the k^2 discretization.
                kh = int(round(np.sqrt(mean) * bh))
                kw = int(round(np.sqrt(mean) * bw))
                ys = (bh - kh) // 2
                xs = (bw - kw) // 2
                block[ys : ys + kh, xs : xs + kw] = 1.0
            elif technique is HalftoneTechnique.ZIGZAG:
                _render_zigzag(block, mean, max_periods)
            elif technique is HalftoneTechnique.RANDOM_PIXELS:
                _render_random_pixels(block, mean, rng)
            else:  # pragma: no cover
                raise ValueError(f"unknown technique {technique}")
    return out


def _stripe_index(h: int, w: int, stripes: StripeSpec) -> np.ndarray:
    """Stripe index per pixel; index 0 starts at the top/left edge."""
    if stripes.horizontal:
        idx = np.arange(h) // stripes.width
        return np.broadcast_to(idx[:, None], (h, w))
    idx = np.arange(w) // stripes.width
    return np.broadcast_to(idx[None, :], (h, w))


def stripe_parity_mask(h: int, w: int, stripes: StripeSpec) -> np.ndarray:
    """Boolean mask of odd-indexed stripes (the modified ones)."""
    return _stripe_index(h, w, stripes) % 2 == 1


def invert_lines(img: np.ndarray, stripes: StripeSpec) -> np.ndarray:
    """Invert every odd-indexed stripe; even-indexed stripes are unchanged."""
    h, w = img.shape[:2]
    odd = stripe_parity_mask(h, w, stripes)
    return np.where(odd[..., None], 1.0 - img, img)


def line_shift(img: np.ndarray, stripes: StripeSpec, shift: int) -> np.ndarray:
    """Shift even stripes by -shift and odd stripes by +shift, with wraparound."""
    h, w = img.shape[:2]
    if abs(shift) >= max(h, w):
        raise ValueError("|shift| must be smaller than the image side")
    out = img.copy()
    axis = 1 if stripes.horizontal else 0
    extent = h if stripes.horizontal else w
    for i0 in range(0, extent, stripes.width):
        i1 = min(i0 + stripes.width, extent)
        sign = -1 if (i0 // stripes.width) % 2 == 0 else 1
        if stripes.horizontal:
            out[i0:i1] = np.roll(img[i0:i1], sign * shift, axis=axis)
        else:
            out[:, i0:i1] = np.roll(img[:, i0:i1], sign * shift, axis=0)
    return out


def rotate_blocks(img: np.ndarray, block_size: int, rotations: int) -> np.ndarray:
    """Cycle the four quadrant positions of each block clockwise.

    Sub-block contents move but are not themselves rotated. Ragged blocks
    use floor-half quadrants, leaving at most a one-pixel cross untouched.
    """
    if block_size < 2 or block_size % 2 != 0:
        raise ValueError("block_size must be even and >= 2")
    if rotations < 0:
        raise ValueError("rotations must be non-negative")
    h, w = img.shape[:2]
    out = img.copy()
    r = rotations % 4
    if r == 0:
        return out
    for y0, y1, x0, x1 in block_grid(h, w, block_size):
        bh, bw = y1 - y0, x1 - x0
        h2, w2 = bh // 2, bw // 2
        if h2 == 0 or w2 == 0:
            continue
        tl = (slice(y0, y0 + h2), slice(x0, x0 + w2))
        tr = (slice(y0, y0 + h2), slice(x1 - w2, x1))
        br = (slice(y1 - h2, y1), slice(x1 - w2, x1))
        bl = (slice(y1 - h2, y1), slice(x0, x0 + w2))
        order = [tl, tr, br, bl]
        contents = [img[s].copy() for s in order]
        for i, s in enumerate(order):
            # Clockwise cycle: content at position i came from position (i - r).
            out[s] = contents[(i - r) % 4]
    return out


def low_contrast_triangles(
    img: np.ndarray,
    partition: TrianglePartition,
    factors: tuple[float, float, float],
) -> np.ndarray:
    """Reduce contrast by a different factor in each of the three regions."""
    if len(factors) != 3:
        raise ValueError("exactly three contrast factors required")
    h, w = img.shape[:2]
    region = partition.region_map(h, w)
    out = np.empty_like(img)
    for r, factor in enumerate(factors):
        mask = region == r
        out[mask] = adjust_contrast(img[mask], factor)
    return out
