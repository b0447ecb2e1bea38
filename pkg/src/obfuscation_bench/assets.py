"""Asset pack: overlay photos, scenes, icons, patterns, patches, font, texts.

A pack is a directory with ``manifest.json`` plus PNG assets. The loader
validates counts and SHA-256 checksums bit-exactly. The repository does not
ship binary assets; ``build_default_pack`` procedurally generates an
original, deterministic pack (abstract color fields and geometric patterns,
so no depictable objects from the evaluated super-classes appear).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import image_io

PHOTO_COUNT = 10
SCENE_COUNT = 14
ICON_COUNT = 10
PATTERN_COUNT = 9
COLOR_COUNT = 9
TEXT_COUNT = 13
PATCH_COUNT = 3

PACK_VERSION = 1

# Classic 5x7 column-major bitmap font (public domain); bit r of byte c is
# row r of column c.
FONT_COLUMNS: dict[str, tuple[int, int, int, int, int]] = {
    " ": (0x00, 0x00, 0x00, 0x00, 0x00),
    "!": (0x00, 0x00, 0x5F, 0x00, 0x00),
    "+": (0x08, 0x08, 0x3E, 0x08, 0x08),
    "-": (0x08, 0x08, 0x08, 0x08, 0x08),
    ".": (0x00, 0x60, 0x60, 0x00, 0x00),
    "0": (0x3E, 0x51, 0x49, 0x45, 0x3E),
    "1": (0x00, 0x42, 0x7F, 0x40, 0x00),
    "2": (0x42, 0x61, 0x51, 0x49, 0x46),
    "3": (0x21, 0x41, 0x45, 0x4B, 0x31),
    "4": (0x18, 0x14, 0x12, 0x7F, 0x10),
    "5": (0x27, 0x45, 0x45, 0x45, 0x39),
    "6": (0x3C, 0x4A, 0x49, 0x49, 0x30),
    "7": (0x01, 0x71, 0x09, 0x05, 0x03),
    "8": (0x36, 0x49, 0x49, 0x49, 0x36),
    "9": (0x06, 0x49, 0x49, 0x29, 0x1E),
    "?": (0x02, 0x01, 0x51, 0x09, 0x06),
    "A": (0x7E, 0x11, 0x11, 0x11, 0x7E),
    "B": (0x7F, 0x49, 0x49, 0x49, 0x36),
    "C": (0x3E, 0x41, 0x41, 0x41, 0x22),
    "D": (0x7F, 0x41, 0x41, 0x22, 0x1C),
    "E": (0x7F, 0x49, 0x49, 0x49, 0x41),
    "F": (0x7F, 0x09, 0x09, 0x09, 0x01),
    "G": (0x3E, 0x41, 0x49, 0x49, 0x7A),
    "H": (0x7F, 0x08, 0x08, 0x08, 0x7F),
    "I": (0x00, 0x41, 0x7F, 0x41, 0x00),
    "J": (0x20, 0x40, 0x41, 0x3F, 0x01),
    "K": (0x7F, 0x08, 0x14, 0x22, 0x41),
    "L": (0x7F, 0x40, 0x40, 0x40, 0x40),
    "M": (0x7F, 0x02, 0x0C, 0x02, 0x7F),
    "N": (0x7F, 0x04, 0x08, 0x10, 0x7F),
    "O": (0x3E, 0x41, 0x41, 0x41, 0x3E),
    "P": (0x7F, 0x09, 0x09, 0x09, 0x06),
    "Q": (0x3E, 0x41, 0x51, 0x21, 0x5E),
    "R": (0x7F, 0x09, 0x19, 0x29, 0x46),
    "S": (0x46, 0x49, 0x49, 0x49, 0x31),
    "T": (0x01, 0x01, 0x7F, 0x01, 0x01),
    "U": (0x3F, 0x40, 0x40, 0x40, 0x3F),
    "V": (0x1F, 0x20, 0x40, 0x20, 0x1F),
    "W": (0x3F, 0x40, 0x38, 0x40, 0x3F),
    "X": (0x63, 0x14, 0x08, 0x14, 0x63),
    "Y": (0x07, 0x08, 0x70, 0x08, 0x07),
    "Z": (0x61, 0x51, 0x49, 0x45, 0x43),
}
GLYPH_W, GLYPH_H = 5, 7
FONT_CHARSET = "".join(sorted(FONT_COLUMNS))

DEFAULT_COLORS = [
    (0.9, 0.1, 0.1),
    (0.1, 0.8, 0.1),
    (0.1, 0.2, 0.9),
    (0.95, 0.85, 0.1),
    (0.9, 0.1, 0.9),
    (0.1, 0.85, 0.85),
    (0.95, 0.55, 0.1),
    (0.5, 0.1, 0.8),
    (1.0, 1.0, 1.0),
]

DEFAULT_TEXTS = [
    "LOREM IPSUM",
    "HELLO WORLD",
    "SAMPLE TEXT",
    "ABC 123",
    "QWERTY UIOP",
    "FOO BAR BAZ",
    "TEST STRING",
    "PLACEHOLDER",
    "XYZZY PLUGH",
    "RANDOM WORDS",
    "NO CONTENT",
    "12345 67890",
    "WHY SO BLUE?",
]


class AssetPackError(ValueError):
    """Raised when a pack fails count, checksum or geometry validation."""

    def __init__(self, problems: list[str]):
        super().__init__("asset pack invalid:\n  " + "\n  ".join(problems))
        self.problems = problems


def glyph_bitmap(char: str) -> np.ndarray:
    """(7, 5) boolean bitmap for a charset glyph; unknown chars render blank."""
    cols = FONT_COLUMNS.get(char.upper())
    if cols is None:
        return np.zeros((GLYPH_H, GLYPH_W), dtype=bool)
    bits = np.zeros((GLYPH_H, GLYPH_W), dtype=bool)
    for c, byte in enumerate(cols):
        for r in range(GLYPH_H):
            bits[r, c] = bool((byte >> r) & 1)
    return bits


def font_atlas() -> np.ndarray:
    """All glyphs side by side in charset order, one-pixel gaps, as 0/1 floats."""
    atlas = np.zeros((GLYPH_H, len(FONT_CHARSET) * (GLYPH_W + 1)), dtype=np.float64)
    for i, ch in enumerate(FONT_CHARSET):
        x = i * (GLYPH_W + 1)
        atlas[:, x : x + GLYPH_W] = glyph_bitmap(ch)
    return atlas


@dataclass(frozen=True)
class Scene:
    photo: np.ndarray
    placement_quad: np.ndarray  # 4 ordered (x, y) points, TL TR BR BL
    occlusion_mask: np.ndarray  # boolean raster, True where the scene wins


@dataclass
class AssetPack:
    photos: list[np.ndarray]
    scenes: list[Scene]
    icons: list[np.ndarray]  # (h, w, 4) RGBA
    patterns: list[np.ndarray]  # (h, w) tileable 0/1 masks
    colors: list[tuple[float, float, float]]
    texts: list[str]
    patches: list[np.ndarray]  # (h, w, 4) RGBA
    font: dict[str, np.ndarray] = field(default_factory=dict)
    manifest: dict = field(default_factory=dict)

    def glyph(self, char: str) -> np.ndarray:
        bm = self.font.get(char.upper())
        if bm is None:
            return np.zeros((GLYPH_H, GLYPH_W), dtype=bool)
        return bm


def sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with path.open("rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


# ---------------------------------------------------------------------------
# Procedural default pack
# ---------------------------------------------------------------------------


def _color_field(rng: np.random.Generator, side: int = 224, waves: int = 4) -> np.ndarray:
    """Smooth abstract color field from a handful of random sinusoids."""
    ys, xs = np.mgrid[0:side, 0:side] / side
    img = np.zeros((side, side, 3))
    for c in range(3):
        acc = np.zeros((side, side))
        for _ in range(waves):
            fx, fy = rng.uniform(0.5, 4.0, size=2)
            phase = rng.uniform(0, 2 * np.pi)
            acc += rng.uniform(0.3, 1.0) * np.sin(2 * np.pi * (fx * xs + fy * ys) + phase)
        acc = (acc - acc.min()) / max(acc.max() - acc.min(), 1e-9)
        img[..., c] = acc
    return img


def _make_pattern(index: int, size: int = 32) -> np.ndarray:
    ys, xs = np.mgrid[0:size, 0:size]
    if index == 0:
        return ((ys // 4) % 2 == 0).astype(float)
    if index == 1:
        return ((xs // 4) % 2 == 0).astype(float)
    if index == 2:
        return (((ys // 4) + (xs // 4)) % 2 == 0).astype(float)
    if index == 3:
        return ((((ys % 8) - 4) ** 2 + ((xs % 8) - 4) ** 2) <= 6).astype(float)
    if index == 4:
        return (((xs + ys) // 4) % 2 == 0).astype(float)
    if index == 5:
        return (((ys % 8) < 2) | ((xs % 8) < 2)).astype(float)
    if index == 6:
        tri = np.abs((xs % 8) - 4)
        return ((ys % 8) < tri).astype(float)
    if index == 7:
        return ((ys + 3 * np.sin(2 * np.pi * xs / 16)) % 8 < 3).astype(float)
    if index == 8:
        return ((((xs - ys) // 4) % 2 == 0) & (((xs + ys) // 4) % 2 == 0)).astype(float)
    raise ValueError(f"no pattern with index {index}")


def _make_icon(index: int, rng: np.random.Generator, size: int = 32) -> np.ndarray:
    ys, xs = np.mgrid[0:size, 0:size]
    cy = cx = (size - 1) / 2
    r = np.hypot(ys - cy, xs - cx)
    shapes = [
        r <= size * 0.4,
        (r <= size * 0.42) & (r >= size * 0.26),
        (np.abs(ys - cy) <= size * 0.35) & (np.abs(xs - cx) <= size * 0.35),
        np.abs(ys - cy) + np.abs(xs - cx) <= size * 0.45,
        (np.abs(ys - cy) <= size * 0.12) | (np.abs(xs - cx) <= size * 0.12),
        np.abs((ys - cy) - (xs - cx)) + np.abs((ys - cy) + (xs - cx)) <= size * 0.9,
        (np.abs((ys - cy) - (xs - cx)) <= size * 0.15)
        | (np.abs((ys - cy) + (xs - cx)) <= size * 0.15),
        (r <= size * 0.45) & ((np.floor(np.arctan2(ys - cy, xs - cx) / np.pi * 4) % 2) == 0),
        (ys % 8) < 4,
        ((ys // 4) + (xs // 4)) % 2 == 0,
    ]
    mask = shapes[index % len(shapes)]
    color = rng.uniform(0.2, 1.0, size=3)
    icon = np.zeros((size, size, 4))
    icon[..., :3] = color
    icon[..., 3] = mask.astype(float)
    return icon


def _make_patch(rng: np.random.Generator, size: int = 48) -> np.ndarray:
    ys, xs = np.mgrid[0:size, 0:size]
    r = np.hypot(ys - (size - 1) / 2, xs - (size - 1) / 2)
    noise = rng.random((size, size, 3))
    # Blocky high-frequency structure, loosely patch-like.
    blocks = rng.random((size // 4, size // 4, 3)).repeat(4, axis=0).repeat(4, axis=1)
    rgb = 0.5 * noise + 0.5 * blocks
    patch = np.zeros((size, size, 4))
    patch[..., :3] = rgb
    patch[..., 3] = (r <= size / 2 - 1).astype(float)
    return patch


def _make_scene(index: int, rng: np.random.Generator, side: int = 224):
    photo = 0.6 * _color_field(rng, side, waves=3) + 0.1
    # Convex placement quad: inset rectangle corners with inward jitter.
    margin = side * 0.18
    jitter = side * 0.08
    base = np.array(
        [
            [margin, margin],
            [side - 1 - margin, margin],
            [side - 1 - margin, side - 1 - margin],
            [margin, side - 1 - margin],
        ]
    )
    signs = np.array([[1, 1], [-1, 1], [-1, -1], [1, -1]], dtype=float)
    quad = base + signs * rng.uniform(0, jitter, size=(4, 2))
    # Darken a frame around the quad so the placement looks intentional.
    ys, xs = np.mgrid[0:side, 0:side]
    x0, y0 = quad[:, 0].min(), quad[:, 1].min()
    x1, y1 = quad[:, 0].max(), quad[:, 1].max()
    frame = (
        (xs >= x0 - 6) & (xs <= x1 + 6) & (ys >= y0 - 6) & (ys <= y1 + 6)
        & ~((xs >= x0) & (xs <= x1) & (ys >= y0) & (ys <= y1))
    )
    photo[frame] *= 0.4
    # Occlusion: a thin bar crossing the placement area.
    bar_y = rng.uniform(y0 + 10, y1 - 10)
    mask = (np.abs(ys - bar_y) <= 3) & (xs >= x0) & (xs <= x1)
    return photo, quad, mask


def build_default_pack(directory: str | Path, seed: int = 20240001) -> Path:
    """Generate the default deterministic asset pack into a directory."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    rng = np.random.Generator(np.random.Philox(seed))

    manifest: dict = {
        "version": PACK_VERSION,
        "license": "CC0-1.0 (procedurally generated, original)",
        "colors": [list(c) for c in DEFAULT_COLORS],
        "texts": list(DEFAULT_TEXTS),
        "photos": [],
        "scenes": [],
        "icons": [],
        "patterns": [],
        "patches": [],
    }

    def write(name: str, arr: np.ndarray) -> str:
        image_io.save_png(directory / name, arr)
        return sha256_file(directory / name)

    for i in range(PHOTO_COUNT):
        name = f"photo_{i:02d}.png"
        manifest["photos"].append({"name": name, "sha256": write(name, _color_field(rng))})

    for i in range(SCENE_COUNT):
        photo, quad, mask = _make_scene(i, rng)
        name = f"scene_{i:02d}.png"
        mask_name = f"scene_{i:02d}_mask.png"
        manifest["scenes"].append(
            {
                "name": name,
                "sha256": write(name, photo),
                "mask": mask_name,
                "mask_sha256": write(mask_name, mask.astype(float)),
                "quad": [[round(float(x), 3), round(float(y), 3)] for x, y in quad],
            }
        )

    for i in range(ICON_COUNT):
        name = f"icon_{i:02d}.png"
        manifest["icons"].append({"name": name, "sha256": write(name, _make_icon(i, rng))})

    for i in range(PATTERN_COUNT):
        name = f"pattern_{i:02d}.png"
        manifest["patterns"].append({"name": name, "sha256": write(name, _make_pattern(i))})

    for i in range(PATCH_COUNT):
        name = f"patch_{i:02d}.png"
        manifest["patches"].append({"name": name, "sha256": write(name, _make_patch(rng))})

    manifest["font"] = {
        "name": "font.png",
        "charset": FONT_CHARSET,
        "glyph_width": GLYPH_W,
        "glyph_height": GLYPH_H,
        "sha256": write("font.png", font_atlas()),
    }

    manifest_path = directory / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n")
    return directory


# ---------------------------------------------------------------------------
# Loading and verification
# ---------------------------------------------------------------------------


def verify_pack(directory: str | Path) -> list[str]:
    """Return an itemized list of problems; empty means the pack is valid."""
    directory = Path(directory)
    problems: list[str] = []
    manifest_path = directory / "manifest.json"
    if not manifest_path.exists():
        return [f"missing manifest.json in {directory}"]
    try:
        manifest = json.loads(manifest_path.read_text())
    except json.JSONDecodeError as exc:
        return [f"manifest.json unparseable: {exc}"]

    expected_counts = {
        "photos": PHOTO_COUNT,
        "scenes": SCENE_COUNT,
        "icons": ICON_COUNT,
        "patterns": PATTERN_COUNT,
        "patches": PATCH_COUNT,
    }
    for key, count in expected_counts.items():
        got = len(manifest.get(key, []))
        if got != count:
            problems.append(f"{key}: expected {count} entries, found {got}")
    if len(manifest.get("colors", [])) != COLOR_COUNT:
        problems.append(f"colors: expected {COLOR_COUNT}, found {len(manifest.get('colors', []))}")
    if len(manifest.get("texts", [])) != TEXT_COUNT:
        problems.append(f"texts: expected {TEXT_COUNT}, found {len(manifest.get('texts', []))}")

    def check_file(name: str, expected_sha: str):
        path = directory / name
        if not path.exists():
            problems.append(f"missing file {name}")
            return
        actual = sha256_file(path)
        if actual != expected_sha:
            problems.append(f"checksum mismatch for {name}: expected {expected_sha}, got {actual}")

    for key in ("photos", "icons", "patterns", "patches"):
        for entry in manifest.get(key, []):
            check_file(entry["name"], entry["sha256"])
    for entry in manifest.get("scenes", []):
        check_file(entry["name"], entry["sha256"])
        check_file(entry["mask"], entry["mask_sha256"])
        quad = np.asarray(entry.get("quad", []), dtype=float)
        if quad.shape != (4, 2):
            problems.append(f"scene {entry['name']}: quad must be 4 (x, y) points")
        else:
            from .geometric import _has_collinear_triple

            if _has_collinear_triple(quad, tol=1e-6):
                problems.append(f"scene {entry['name']}: placement quad is degenerate")
    font = manifest.get("font")
    if not font:
        problems.append("missing font entry")
    else:
        check_file(font["name"], font["sha256"])

    # Scene photos must not reuse overlay photos.
    overlay_shas = {e["sha256"] for e in manifest.get("photos", [])}
    for entry in manifest.get("scenes", []):
        if entry["sha256"] in overlay_shas:
            problems.append(f"scene {entry['name']} reuses an overlay photo")
    return problems


def load_pack(directory: str | Path, verify: bool = True) -> AssetPack:
    """Load a pack; with ``verify`` (default) checksum mismatches are fatal."""
    directory = Path(directory)
    if verify:
        problems = verify_pack(directory)
        if problems:
            raise AssetPackError(problems)
    manifest = json.loads((directory / "manifest.json").read_text())

    photos = [image_io.load_png(directory / e["name"]) for e in manifest["photos"]]
    scenes = []
    for e in manifest["scenes"]:
        photo = image_io.load_png(directory / e["name"])
        mask = image_io.load_png(directory / e["mask"])[..., 0] > 0.5
        scenes.append(
            Scene(photo=photo, placement_quad=np.asarray(e["quad"], dtype=float), occlusion_mask=mask)
        )
    icons = [image_io.load_png_rgba(directory / e["name"]) for e in manifest["icons"]]
    patterns = [image_io.load_png(directory / e["name"])[..., 0] for e in manifest["patterns"]]
    patches = [image_io.load_png_rgba(directory / e["name"]) for e in manifest["patches"]]

    font_entry = manifest["font"]
    atlas = image_io.load_png(directory / font_entry["name"])[..., 0] > 0.5
    gw, gh = font_entry["glyph_width"], font_entry["glyph_height"]
    font = {}
    for i, ch in enumerate(font_entry["charset"]):
        x = i * (gw + 1)
        font[ch] = atlas[:gh, x : x + gw]

    return AssetPack(
        photos=photos,
        scenes=scenes,
        icons=icons,
        patterns=patterns,
        colors=[tuple(c) for c in manifest["colors"]],
        texts=list(manifest["texts"]),
        patches=patches,
        font=font,
        manifest=manifest,
    )
