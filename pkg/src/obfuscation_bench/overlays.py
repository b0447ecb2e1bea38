"""Asset-dependent obfuscations: compositions, overlays, borders and patches."""

from __future__ import annotations

import numpy as np
from scipy.ndimage import correlate1d

from .assets import GLYPH_H, GLYPH_W, AssetPack
from .core import adjust_contrast, alpha_blend, bilinear_resize, clip01, to_grayscale
from .geometric import QuadCorrespondence, image_corners, solve_homography, warp_perspective_onto
from .pixel_transforms import StripeSpec, stripe_parity_mask


def gaussian_kernel(sigma: float) -> np.ndarray:
    """Normalized 1-D Gaussian taps with radius ceil(3 sigma)."""
    radius = int(np.ceil(3.0 * sigma))
    xs = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-0.5 * (xs / sigma) ** 2)
    return k / k.sum()


def gaussian_blur(img: np.ndarray, sigma: float) -> np.ndarray:
    """Separable Gaussian blur with edge-clamped taps; sigma 0 is the identity."""
    if sigma <= 0:
        return img.copy()
    k = gaussian_kernel(sigma)
    out = correlate1d(img, k, axis=0, mode="nearest")
    out = correlate1d(out, k, axis=1, mode="nearest")
    return clip01(out)


def background_blur_composition(
    img: np.ndarray, wf: float, hf: float, blur_sigma: float
) -> np.ndarray:
    """Shrunk copy of the image centered over a blurred copy of itself."""
    h, w = img.shape[:2]
    background = gaussian_blur(img, blur_sigma)
    fh = max(1, int(round(hf * h)))
    fw = max(1, int(round(wf * w)))
    foreground = bilinear_resize(img, fh, fw)
    y0 = (h - fh) // 2
    x0 = (w - fw) // 2
    out = background
    out[y0 : y0 + fh, x0 : x0 + fw] = foreground
    return out


def high_contrast_border(
    img: np.ndarray, contrast: float, border: int, rng: np.random.Generator
) -> np.ndarray:
    """Contrast-reduced image inside a border of i.i.d. uniform pixels."""
    h, w = img.shape[:2]
    if 2 * border >= min(h, w):
        raise ValueError("border too large for the image")
    if border == 0:
        return adjust_contrast(img, contrast)
    out = rng.uniform(0.0, 1.0, size=(h, w, 3))
    inner = bilinear_resize(adjust_contrast(img, contrast), h - 2 * border, w - 2 * border)
    out[border : h - border, border : w - border] = inner
    return out


def photo_composition(
    img: np.ndarray,
    pack: AssetPack,
    photo_index: int,
    shrink: float,
    position: tuple[int, int] | None = None,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Shrink the image and paste it opaquely onto a photo.

    If ``position`` is None a random in-bounds position is drawn from rng.
    """
    photo = pack.photos[photo_index]
    ph, pw = photo.shape[:2]
    sh = max(1, int(round(shrink * img.shape[0])))
    sw = max(1, int(round(shrink * img.shape[1])))
    if sh > ph or sw > pw:
        raise ValueError("shrunk image does not fit the photo")
    if position is None:
        if rng is None:
            raise ValueError("either position or rng must be given")
        position = (int(rng.integers(0, pw - sw + 1)), int(rng.integers(0, ph - sh + 1)))
    x, y = position
    if x < 0 or y < 0 or x + sw > pw or y + sh > ph:
        raise ValueError(f"placement ({x}, {y}) out of bounds for {sw}x{sh} paste")
    out = photo.copy()
    out[y : y + sh, x : x + sw] = bilinear_resize(img, sh, sw)
    return out


def perspective_composition(img: np.ndarray, pack: AssetPack, scene_index: int) -> np.ndarray:
    """Warp the image into the scene's placement quad; occluded pixels keep the scene."""
    scene = pack.scenes[scene_index]
    h, w = img.shape[:2]
    q = QuadCorrespondence(src=image_corners(h, w), dst=scene.placement_quad)
    hom = solve_homography(q)
    out = warp_perspective_onto(img, hom, scene.photo)
    return np.where(scene.occlusion_mask[..., None], scene.photo, out)


def tile_pattern(pattern: np.ndarray, h: int, w: int) -> np.ndarray:
    reps = (h // pattern.shape[0] + 1, w // pattern.shape[1] + 1)
    return np.tile(pattern, reps)[:h, :w]


def color_pattern_overlay(
    img: np.ndarray, pack: AssetPack, pattern_index: int, color_index: int, alpha: float
) -> np.ndarray:
    """Grayscale the image, then blend a colored tiled pattern over it."""
    h, w = img.shape[:2]
    base = to_grayscale(img)
    on = tile_pattern(pack.patterns[pattern_index], h, w) > 0.5
    color = np.asarray(pack.colors[color_index], dtype=np.float64)
    top = np.broadcast_to(color, (h, w, 3))
    return alpha_blend(base, top, alpha, mask=on)


def icon_overlay(
    img: np.ndarray, pack: AssetPack, icon_index: int, count: int, alpha: float
) -> np.ndarray:
    """Blend a count x count grid of one icon over the image."""
    h, w = img.shape[:2]
    cell_h = h // count
    cell_w = w // count
    if cell_h < 1 or cell_w < 1:
        raise ValueError("too many icons for the image size")
    icon = pack.icons[icon_index]
    scaled = bilinear_resize(icon, cell_h, cell_w)
    out = img.copy()
    for i in range(count):
        for j in range(count):
            y0 = int(round(i * h / count))
            x0 = int(round(j * w / count))
            y1 = min(y0 + cell_h, h)
            x1 = min(x0 + cell_w, w)
            tile = scaled[: y1 - y0, : x1 - x0]
            eff = alpha * tile[..., 3:4]
            region = out[y0:y1, x0:x1]
            out[y0:y1, x0:x1] = (1.0 - eff) * region + eff * tile[..., :3]
    return clip01(out)


def image_overlay(img: np.ndarray, pack: AssetPack, photo_index: int, alpha: float) -> np.ndarray:
    h, w = img.shape[:2]
    photo = bilinear_resize(pack.photos[photo_index], h, w)
    return alpha_blend(img, photo, alpha)


def interleave(
    img: np.ndarray, pack: AssetPack, photo_index: int, stripes: StripeSpec, alpha: float
) -> np.ndarray:
    """Blend a photo into the odd-indexed stripes (same indexing as invert_lines)."""
    h, w = img.shape[:2]
    photo = bilinear_resize(pack.photos[photo_index], h, w)
    odd = stripe_parity_mask(h, w, stripes)
    return alpha_blend(img, photo, alpha, mask=odd)


def render_text_line(pack: AssetPack, text: str, size: int) -> np.ndarray:
    """Rasterize one string as a boolean raster, glyphs scaled nearest-neighbor."""
    if size < 6:
        raise ValueError("glyph height must be at least 6 px")
    glyph_h = size
    glyph_w = max(1, int(round(GLYPH_W * size / GLYPH_H)))
    rows = np.floor(np.arange(glyph_h) * GLYPH_H / glyph_h).astype(np.int64)
    cols = np.floor(np.arange(glyph_w) * GLYPH_W / glyph_w).astype(np.int64)
    advance = glyph_w + max(1, glyph_w // 5)
    line = np.zeros((glyph_h, advance * len(text)), dtype=bool)
    for i, ch in enumerate(text):
        bm = pack.glyph(ch)
        scaled = bm[np.ix_(rows, cols)]
        line[:, i * advance : i * advance + glyph_w] = scaled
    return line


def text_overlay(
    img: np.ndarray,
    pack: AssetPack,
    text_index: int,
    color_index: int,
    size: int,
    alpha: float,
) -> np.ndarray:
    """Tile the string over the image, half-width staggered on alternate rows."""
    h, w = img.shape[:2]
    text = pack.texts[text_index] + " "
    line = render_text_line(pack, text, size)
    lh, lw = line.shape
    color = np.asarray(pack.colors[color_index], dtype=np.float64)
    coverage = np.zeros((h, w), dtype=bool)
    row = 0
    y = 0
    while y < h:
        x_start = -(lw // 2) if row % 2 == 1 else 0
        x = x_start
        while x < w:
            xs0 = max(x, 0)
            src_x0 = xs0 - x
            xs1 = min(x + lw, w)
            ys1 = min(y + lh, h)
            coverage[y:ys1, xs0:xs1] |= line[: ys1 - y, src_x0 : src_x0 + (xs1 - xs0)]
            x += lw
        y += lh
        row += 1
    top = np.broadcast_to(color, (h, w, 3))
    return alpha_blend(img, top, alpha, mask=coverage)


def adversarial_patches(
    img: np.ndarray,
    pack: AssetPack,
    patch_index: int,
    shrink: float,
    corners: frozenset[str] | set[str],
) -> np.ndarray:
    """Shrink onto a black canvas and alpha-composite a patch into chosen corners.

    Corner names: "tl", "tr", "bl", "br".
    """
    h, w = img.shape[:2]
    if not 0 < shrink <= 1:
        raise ValueError("shrink must be in (0, 1]")
    bad = set(corners) - {"tl", "tr", "bl", "br"}
    if bad:
        raise ValueError(f"unknown corner names: {sorted(bad)}")
    if shrink == 1 and not corners:
        return img.copy()
    sh = max(1, int(round(shrink * h)))
    sw = max(1, int(round(shrink * w)))
    out = np.zeros_like(img)
    y0 = (h - sh) // 2
    x0 = (w - sw) // 2
    out[y0 : y0 + sh, x0 : x0 + sw] = bilinear_resize(img, sh, sw)
    patch = pack.patches[patch_index]
    ph, pw = patch.shape[:2]
    anchors = {
        "tl": (0, 0),
        "tr": (0, w - pw),
        "bl": (h - ph, 0),
        "br": (h - ph, w - pw),
    }
    for corner in sorted(corners):
        ay, ax = anchors[corner]
        region = out[ay : ay + ph, ax : ax + pw]
        a = patch[..., 3:4]
        out[ay : ay + ph, ax : ax + pw] = (1.0 - a) * region + a * patch[..., :3]
    return clip01(out)
