"""Resampling warps: perspective, rotation, swirl and wavy displacement.

All warps use inverse mapping with bilinear sampling; source samples that
fall outside the image read as black unless noted otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import clip01, hue_rotate, sample_bilinear

BLACK = (0.0, 0.0, 0.0)


class DegenerateQuadError(ValueError):
    """Raised when 4-point correspondences do not determine a homography."""


@dataclass(frozen=True)
class Homography:
    m: np.ndarray  # 3x3, m[2][2] == 1 when nonzero

    def __post_init__(self):
        m = np.asarray(self.m, dtype=np.float64)
        if m.shape != (3, 3):
            raise ValueError("homography matrix must be 3x3")
        if abs(np.linalg.det(m)) <= 1e-12:
            raise DegenerateQuadError("homography matrix is singular")
        if m[2, 2] != 0:
            m = m / m[2, 2]
        object.__setattr__(self, "m", m)

    def inverse(self) -> "Homography":
        return Homography(np.linalg.inv(self.m))

    def apply(self, pts: np.ndarray) -> np.ndarray:
        """Project (N, 2) points through the homography."""
        pts = np.asarray(pts, dtype=np.float64)
        homog = np.concatenate([pts, np.ones((len(pts), 1))], axis=1)
        mapped = homog @ self.m.T
        return mapped[:, :2] / mapped[:, 2:3]


@dataclass(frozen=True)
class QuadCorrespondence:
    src: np.ndarray  # 4 ordered (x, y) points
    dst: np.ndarray

    def __post_init__(self):
        for label, pts in (("src", self.src), ("dst", self.dst)):
            arr = np.asarray(pts, dtype=np.float64)
            if arr.shape != (4, 2):
                raise ValueError(f"{label} must be 4 (x, y) points")
            if _has_collinear_triple(arr):
                raise DegenerateQuadError(f"three {label} points are collinear")
            object.__setattr__(self, label, arr)


def _has_collinear_triple(pts: np.ndarray, tol: float = 1e-9) -> bool:
    for i in range(4):
        for j in range(i + 1, 4):
            for k in range(j + 1, 4):
                a, b, c = pts[i], pts[j], pts[k]
                cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
                if abs(cross) <= tol:
                    return True
    return False


def solve_homography(q: QuadCorrespondence) -> Homography:
    """Solve the standard 8-unknown linear system from 4 correspondences."""
    a = np.zeros((8, 8))
    b = np.zeros(8)
    for i in range(4):
        x, y = q.src[i]
        u, v = q.dst[i]
        a[2 * i] = [x, y, 1, 0, 0, 0, -u * x, -u * y]
        a[2 * i + 1] = [0, 0, 0, x, y, 1, -v * x, -v * y]
        b[2 * i] = u
        b[2 * i + 1] = v
    try:
        h = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise DegenerateQuadError(f"singular correspondence system: {exc}") from exc
    m = np.append(h, 1.0).reshape(3, 3)
    return Homography(m)


def _output_grid(h: int, w: int):
    gy, gx = np.mgrid[0:h, 0:w]
    return gx.astype(np.float64), gy.astype(np.float64)


def warp_perspective(
    img: np.ndarray, h: Homography, fill: tuple = BLACK
) -> np.ndarray:
    """Inverse-map warp: output pixel p samples the source at h^-1(p)."""
    out_h, out_w = img.shape[:2]
    hinv = h.inverse().m
    gx, gy = _output_grid(out_h, out_w)
    denom = hinv[2, 0] * gx + hinv[2, 1] * gy + hinv[2, 2]
    sx = (hinv[0, 0] * gx + hinv[0, 1] * gy + hinv[0, 2]) / denom
    sy = (hinv[1, 0] * gx + hinv[1, 1] * gy + hinv[1, 2]) / denom
    return sample_bilinear(img, sx, sy, fill=fill)


def warp_perspective_onto(img: np.ndarray, h: Homography, canvas: np.ndarray) -> np.ndarray:
    """Warp img by h over an existing canvas; uncovered pixels keep the canvas."""
    out_h, out_w = canvas.shape[:2]
    src_h, src_w = img.shape[:2]
    hinv = h.inverse().m
    gx, gy = _output_grid(out_h, out_w)
    denom = hinv[2, 0] * gx + hinv[2, 1] * gy + hinv[2, 2]
    sx = (hinv[0, 0] * gx + hinv[0, 1] * gy + hinv[0, 2]) / denom
    sy = (hinv[1, 0] * gx + hinv[1, 1] * gy + hinv[1, 2]) / denom
    covered = (sx >= 0) & (sx <= src_w - 1) & (sy >= 0) & (sy <= src_h - 1)
    warped = sample_bilinear(img, sx, sy, fill=BLACK)
    return np.where(covered[..., None], warped, canvas)


def image_corners(h: int, w: int) -> np.ndarray:
    """Corner pixel centers, ordered TL, TR, BR, BL."""
    return np.array(
        [[0.0, 0.0], [w - 1.0, 0.0], [w - 1.0, h - 1.0], [0.0, h - 1.0]]
    )


def quadrant_centers(h: int, w: int) -> np.ndarray:
    """Centers of the four image quadrants, ordered TL, TR, BR, BL."""
    return np.array(
        [
            [(w - 1) * 0.25, (h - 1) * 0.25],
            [(w - 1) * 0.75, (h - 1) * 0.25],
            [(w - 1) * 0.75, (h - 1) * 0.75],
            [(w - 1) * 0.25, (h - 1) * 0.75],
        ]
    )


def perspective_transform_obfuscation(
    img: np.ndarray, rng: np.random.Generator, jitter_radius: float
) -> np.ndarray:
    """Map the image corners near the quadrant centers; fill with black.

    Destination corners are drawn uniformly in a square of half-side
    ``jitter_radius`` around each quadrant center. Degenerate draws are
    redrawn, at most 16 times.
    """
    h, w = img.shape[:2]
    if not 0 < jitter_radius < min(h, w) / 4:
        raise ValueError("jitter_radius must be in (0, side/4)")
    centers = quadrant_centers(h, w)
    corners = image_corners(h, w)
    for _ in range(16):
        offsets = rng.uniform(-jitter_radius, jitter_radius, size=(4, 2))
        dst = centers + offsets
        try:
            q = QuadCorrespondence(src=corners, dst=dst)
            hom = solve_homography(q)
        except DegenerateQuadError:
            continue
        return warp_perspective(img, hom, fill=BLACK)
    raise DegenerateQuadError("no non-degenerate corner draw in 16 attempts")


def rotate_image(img: np.ndarray, degrees: float) -> np.ndarray:
    """Rotate about the image center; corners crop, empty space reads black."""
    h, w = img.shape[:2]
    cx, cy = (w - 1) / 2.0, (h - 1) / 2.0
    theta = np.deg2rad(degrees)
    cos, sin = np.cos(theta), np.sin(theta)
    gx, gy = _output_grid(h, w)
    u, v = gx - cx, gy - cy
    sx = cos * u + sin * v + cx
    sy = -sin * u + cos * v + cy
    return sample_bilinear(img, sx, sy, fill=BLACK)


@dataclass(frozen=True)
class SwirlParams:
    strength: float
    radius: float
    center: tuple[float, float]

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("swirl radius must be positive")


def swirl_warp(img: np.ndarray, p: SwirlParams) -> np.ndarray:
    """Swirl with exponentially decaying twist angle strength * exp(-rho/radius)."""
    h, w = img.shape[:2]
    cx, cy = p.center
    gx, gy = _output_grid(h, w)
    dx, dy = gx - cx, gy - cy
    rho = np.hypot(dx, dy)
    phi = np.arctan2(dy, dx)
    theta = p.strength * np.exp(-rho / p.radius)
    sx = cx + rho * np.cos(phi + theta)
    sy = cy + rho * np.sin(phi + theta)
    return sample_bilinear(img, sx, sy, fill=BLACK)


@dataclass(frozen=True)
class WaveParams:
    wavelength: float
    amplitude: float
    hue_shift: float

    def __post_init__(self):
        if self.wavelength <= 0:
            raise ValueError("wavelength must be positive")
        if self.amplitude < 0:
            raise ValueError("amplitude must be non-negative")


def wavy_color_warp(img: np.ndarray, p: WaveParams) -> np.ndarray:
    """Sine-displace rows horizontally (wraparound), then rotate hue."""
    h, w = img.shape[:2]
    ys = np.arange(h, dtype=np.float64)
    dx = p.amplitude * np.sin(2.0 * np.pi * ys / p.wavelength)
    xs = np.arange(w, dtype=np.float64)[None, :] - dx[:, None]
    x0 = np.floor(xs).astype(np.int64)
    frac = (xs - x0)[..., None]
    x0 %= w
    x1 = (x0 + 1) % w
    rows = np.arange(h)[:, None]
    displaced = img[rows, x0] * (1 - frac) + img[rows, x1] * frac
    if p.hue_shift:
        displaced = hue_rotate(clip01(displaced), p.hue_shift)
    return clip01(displaced)
