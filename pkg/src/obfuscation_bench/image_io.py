"""PNG I/O. 8-bit quantization (round-half-up) happens only here."""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np
from PIL import Image


def to_uint8(arr: np.ndarray) -> np.ndarray:
    return np.floor(np.clip(arr, 0.0, 1.0) * 255.0 + 0.5).astype(np.uint8)


def from_uint8(arr: np.ndarray) -> np.ndarray:
    return arr.astype(np.float64) / 255.0


def load_png(path: str | Path) -> np.ndarray:
    """Load an RGB image as an (H, W, 3) float array in [0, 1]."""
    with Image.open(path) as im:
        return from_uint8(np.asarray(im.convert("RGB")))


def load_png_rgba(path: str | Path) -> np.ndarray:
    """Load an RGBA image as an (H, W, 4) float array in [0, 1]."""
    with Image.open(path) as im:
        return from_uint8(np.asarray(im.convert("RGBA")))


def save_png(path: str | Path, arr: np.ndarray) -> None:
    """Write an 8-bit PNG atomically (temp name + rename), no extra chunks."""
    path = Path(path)
    data = to_uint8(arr)
    mode = "RGBA" if data.ndim == 3 and data.shape[2] == 4 else "RGB"
    if data.ndim == 2:
        mode = "L"
    im = Image.fromarray(data, mode=mode)
    tmp = path.with_name(path.name + ".tmp")
    im.save(tmp, format="PNG")
    os.replace(tmp, path)
