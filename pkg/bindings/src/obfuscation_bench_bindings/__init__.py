"""Thin scripting facade over the obfuscation pipeline and evaluator.

Everything here delegates to the benchmark package; no math is
duplicated. Images are exchanged as (H, W, 3) float arrays in [0, 1] and
reports come back as plain nested mappings, so results drop directly into
ML training and evaluation loops.
"""

from __future__ import annotations

import numpy as np

from obfuscation_bench.core import validate_image
from obfuscation_bench.evaluation import (
    PredictionSet,
    topk_accuracy,
    unweighted_accuracy,
    weighted_accuracy,
    worst_case_accuracy,
)
from obfuscation_bench.obfuscations import ALL_OBFUSCATIONS
from obfuscation_bench.pipeline import apply_obfuscation
from obfuscation_bench.ranges import load_default_ranges
from obfuscation_bench.superclasses import DEFAULT_TABLE

__version__ = "0.1.0"

__all__ = ["obfuscate", "evaluate", "list_obfuscations", "superclass_table"]

_DEFAULT_RANGES = load_default_ranges()


def obfuscate(
    image: np.ndarray,
    obfuscation: str,
    seed: int,
    overrides: dict | None = None,
    image_id: str = "",
    ranges=None,
    pack=None,
    backend=None,
) -> np.ndarray:
    """Apply one obfuscation; identical pixels to the pipeline's canonical path.

    The result is a pure function of (seed, image_id, obfuscation) plus the
    image, so the same triple reproduces the same output bit for bit.
    """
    img = validate_image(image)
    out, _ = apply_obfuscation(
        img,
        image_id,
        obfuscation,
        seed,
        ranges if ranges is not None else _DEFAULT_RANGES,
        pack=pack,
        backend=backend,
        overrides=overrides,
    )
    return out


def evaluate(
    predictions: dict[str, dict[str, np.ndarray]],
    labels: dict[str, int],
    options: dict | None = None,
) -> dict:
    """Score predictions; returns a plain nested mapping.

    ``predictions`` maps obfuscation name -> image id -> probability
    vector (1000-class, or 16-class super-class scores). Options:
    ``weighted`` (default True) and ``k`` (list of top-k cutoffs).
    """
    options = options or {}
    weighted = bool(options.get("weighted", True))
    ks = list(options.get("k", []))

    sets = []
    for name in sorted(predictions):
        entries = predictions[name]
        ids = sorted(entries)
        probs = np.asarray([entries[i] for i in ids], dtype=np.float64)
        aggregated = probs.shape[1] == 16
        sets.append(PredictionSet(name, ids, probs, aggregated=aggregated))

    report: dict = {
        "per_obfuscation_weighted": {},
        "per_obfuscation_unweighted": {},
        "topk": {},
        "worst_case": None,
    }
    for ps in sets:
        report["per_obfuscation_weighted"][ps.obfuscation] = weighted_accuracy(
            ps, labels, DEFAULT_TABLE
        )
        report["per_obfuscation_unweighted"][ps.obfuscation] = unweighted_accuracy(
            ps, labels, DEFAULT_TABLE
        )
    for k in ks:
        report["topk"][str(k)] = {
            ps.obfuscation: topk_accuracy(ps, labels, DEFAULT_TABLE, int(k)) for ps in sets
        }
    report["worst_case"] = worst_case_accuracy(sets, labels, DEFAULT_TABLE, weighted=weighted)
    return report


def list_obfuscations() -> list[dict]:
    """All obfuscations with kind and train/hold-out split, as plain mappings."""
    return [
        {"name": o.name, "kind": o.kind.value, "split": o.split.value}
        for o in ALL_OBFUSCATIONS
    ]


def superclass_table() -> dict:
    """The 16 super-classes and their member class ids, as a plain mapping."""
    return {
        "version": DEFAULT_TABLE.version,
        "superclasses": [
            {"name": e.name, "members": list(e.members)} for e in DEFAULT_TABLE.entries
        ],
    }
