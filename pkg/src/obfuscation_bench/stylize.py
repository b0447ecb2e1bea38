"""Pluggable backends for the two model-backed obfuscations.

No neural network ships in this repository; the benchmark semantics
(style index choice, resize, determinism) live here, the model does not.
"""

from __future__ import annotations

import subprocess
import tempfile
import threading
from pathlib import Path

import numpy as np

from . import image_io
from .core import bilinear_resize, clip01

STYLE_COUNT = 7
TEXTURE_COUNT = 10


class BackendUnavailableError(RuntimeError):
    """Raised when a stylization run is requested with no usable backend."""


class StylizationCacheMissError(KeyError):
    def __init__(self, image_id: str, obfuscation: str, style_id: int):
        super().__init__(
            f"no cached stylization for image_id={image_id!r}, "
            f"obfuscation={obfuscation!r}, style_id={style_id}"
        )
        self.key = (image_id, obfuscation, style_id)


class StylizationBackend:
    """Interface: deterministic image -> stylized image given a style id."""

    def stylize(
        self, img: np.ndarray, obfuscation: str, style_id: int, image_id: str
    ) -> np.ndarray:
        raise NotImplementedError


class NullBackend(StylizationBackend):
    """Always errors; never a silent pass-through."""

    def stylize(self, img, obfuscation, style_id, image_id):
        raise BackendUnavailableError(
            f"no stylization backend configured (needed for {obfuscation})"
        )


class FileCacheBackend(StylizationBackend):
    """Looks up precomputed outputs under <root>/<image_id>/<obfuscation>/<style_id>.png."""

    def __init__(self, root: str | Path):
        self.root = Path(root)

    def stylize(self, img, obfuscation, style_id, image_id):
        path = self.root / image_id / obfuscation / f"{style_id}.png"
        if not path.exists():
            raise StylizationCacheMissError(image_id, obfuscation, style_id)
        return image_io.load_png(path)


class ExternalCommandBackend(StylizationBackend):
    """Invokes an external program as argv (in_path, style_path, out_path), exit 0 on success."""

    def __init__(self, argv_prefix: list[str], style_dir: str | Path, parallelism: int = 1):
        self.argv_prefix = list(argv_prefix)
        self.style_dir = Path(style_dir)
        self._sem = threading.Semaphore(parallelism)

    def stylize(self, img, obfuscation, style_id, image_id):
        style_path = self.style_dir / f"{obfuscation.lower()}_{style_id}.png"
        if not style_path.exists():
            raise BackendUnavailableError(f"style asset {style_path} not found")
        with self._sem, tempfile.TemporaryDirectory(prefix="stylize_") as tmp:
            in_path = Path(tmp) / "in.png"
            out_path = Path(tmp) / "out.png"
            image_io.save_png(in_path, img)
            argv = self.argv_prefix + [str(in_path), str(style_path), str(out_path)]
            result = subprocess.run(argv, capture_output=True)
            if result.returncode != 0:
                raise BackendUnavailableError(
                    f"stylize command failed (exit {result.returncode}): "
                    f"{result.stderr.decode(errors='replace').strip()}"
                )
            return image_io.load_png(out_path)


def _stylize(
    img: np.ndarray,
    obfuscation: str,
    style_index: int,
    style_count: int,
    resize_factor: float,
    backend: StylizationBackend,
    image_id: str,
) -> np.ndarray:
    if not 0 <= style_index < style_count:
        raise ValueError(f"style index {style_index} out of range 0..{style_count - 1}")
    if resize_factor <= 1:
        raise ValueError("resize_factor must be > 1")
    h, w = img.shape[:2]
    up = bilinear_resize(img, int(round(h * resize_factor)), int(round(w * resize_factor)))
    styled = backend.stylize(up, obfuscation, style_index, image_id)
    return clip01(bilinear_resize(styled, h, w))


def style_transfer(
    img: np.ndarray,
    style_index: int,
    resize_factor: float,
    backend: StylizationBackend,
    image_id: str = "",
) -> np.ndarray:
    """Upscale, delegate to one of 7 painting styles, resize back."""
    return _stylize(img, "StyleTransfer", style_index, STYLE_COUNT, resize_factor, backend, image_id)


def texturize(
    img: np.ndarray,
    texture_index: int,
    resize_factor: float,
    backend: StylizationBackend,
    image_id: str = "",
) -> np.ndarray:
    """Upscale, delegate to one of 10 texture styles, resize back."""
    return _stylize(img, "Texturize", texture_index, TEXTURE_COUNT, resize_factor, backend, image_id)
