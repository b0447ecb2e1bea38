"""Registry of the 22 obfuscations: canonical names, categories and split."""

from __future__ import annotations

import enum
from dataclasses import dataclass


class Kind(enum.Enum):
    COLOR_CHANGE = "ColorChange"
    TRANSFORMATION = "Transformation"
    COMPOSITION = "Composition"
    OVERLAY = "Overlay"
    ML_BASED = "MLBased"


class Split(enum.Enum):
    TRAINING = "Training"
    HOLD_OUT = "HoldOut"


@dataclass(frozen=True)
class ObfuscationId:
    name: str
    kind: Kind
    split: Split


_REGISTRY = [
    ObfuscationId("ColorNoiseBlocks", Kind.COLOR_CHANGE, Split.TRAINING),
    ObfuscationId("Halftoning", Kind.COLOR_CHANGE, Split.TRAINING),
    ObfuscationId("InvertLines", Kind.COLOR_CHANGE, Split.TRAINING),
    ObfuscationId("LowContrastTriangles", Kind.COLOR_CHANGE, Split.HOLD_OUT),
    ObfuscationId("LineShift", Kind.TRANSFORMATION, Split.TRAINING),
    ObfuscationId("PerspectiveTransform", Kind.TRANSFORMATION, Split.TRAINING),
    ObfuscationId("RotateBlocks", Kind.TRANSFORMATION, Split.TRAINING),
    ObfuscationId("RotateImage", Kind.TRANSFORMATION, Split.TRAINING),
    ObfuscationId("SwirlWarp", Kind.TRANSFORMATION, Split.TRAINING),
    ObfuscationId("WavyColorWarp", Kind.TRANSFORMATION, Split.TRAINING),
    ObfuscationId("BackgroundBlurComposition", Kind.COMPOSITION, Split.TRAINING),
    ObfuscationId("HighContrastBorder", Kind.COMPOSITION, Split.TRAINING),
    ObfuscationId("PerspectiveComposition", Kind.COMPOSITION, Split.HOLD_OUT),
    ObfuscationId("PhotoComposition", Kind.COMPOSITION, Split.TRAINING),
    ObfuscationId("ColorPatternOverlay", Kind.OVERLAY, Split.HOLD_OUT),
    ObfuscationId("IconOverlay", Kind.OVERLAY, Split.TRAINING),
    ObfuscationId("ImageOverlay", Kind.OVERLAY, Split.TRAINING),
    ObfuscationId("Interleave", Kind.OVERLAY, Split.TRAINING),
    ObfuscationId("TextOverlay", Kind.OVERLAY, Split.TRAINING),
    ObfuscationId("AdversarialPatches", Kind.ML_BASED, Split.TRAINING),
    ObfuscationId("StyleTransfer", Kind.ML_BASED, Split.TRAINING),
    ObfuscationId("Texturize", Kind.ML_BASED, Split.TRAINING),
]

ALL_OBFUSCATIONS: tuple[ObfuscationId, ...] = tuple(_REGISTRY)
ALL_NAMES: tuple[str, ...] = tuple(o.name for o in _REGISTRY)
TRAINING_NAMES: tuple[str, ...] = tuple(o.name for o in _REGISTRY if o.split is Split.TRAINING)
HOLDOUT_NAMES: tuple[str, ...] = tuple(o.name for o in _REGISTRY if o.split is Split.HOLD_OUT)
# Obfuscations that do not require a stylization model backend.
MODEL_FREE_NAMES: tuple[str, ...] = tuple(
    o.name for o in _REGISTRY if o.name not in ("StyleTransfer", "Texturize")
)

_BY_NAME = {o.name: o for o in _REGISTRY}


class UnknownObfuscationError(ValueError):
    def __init__(self, name: str):
        super().__init__(
            f"unknown obfuscation {name!r}; valid names: {', '.join(ALL_NAMES)}"
        )
        self.name = name


def by_name(name: str) -> ObfuscationId:
    try:
        return _BY_NAME[name]
    except KeyError:
        raise UnknownObfuscationError(name) from None
