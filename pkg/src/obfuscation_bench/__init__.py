"""Deterministic image obfuscation pipeline and super-class benchmark harness."""

__version__ = "0.1.0"

from .core import (  # noqa: F401
    CANONICAL_SIDE,
    alpha_blend,
    adjust_contrast,
    central_crop_resize,
    derive_rng,
    hue_rotate,
    to_grayscale,
)
from .obfuscations import (  # noqa: F401
    ALL_NAMES,
    HOLDOUT_NAMES,
    MODEL_FREE_NAMES,
    TRAINING_NAMES,
    by_name,
)
from .superclasses import DEFAULT_TABLE, SuperClassTable  # noqa: F401
