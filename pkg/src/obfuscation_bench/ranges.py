"""Hyperparameter range configuration and per-image sampling.

The ranges ship as a versioned JSON config mirroring every published
parameter; exact tuned ranges were never released, so this config is the
single source of truth and its checksum goes into the corpus manifest.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .obfuscations import ALL_NAMES, by_name


class MissingRangeError(KeyError):
    pass


@dataclass(frozen=True)
class SampledParams:
    obfuscation: str
    values: dict
    seed_triple: tuple[int, str, str]


class ParamRanges:
    """Per-obfuscation map of parameter name -> range spec.

    Range specs: {"type": "real", "lo", "hi"} (half-open draw),
    {"type": "int", "lo", "hi"} (inclusive), {"type": "choice", "values"}.
    """

    def __init__(self, doc: dict):
        self.version = doc.get("version", 0)
        self.ranges: dict[str, dict] = doc["ranges"]
        for name, params in self.ranges.items():
            by_name(name)  # raises on unknown obfuscation names
            for pname, spec in params.items():
                kind = spec.get("type")
                if kind in ("real", "int"):
                    if spec["lo"] > spec["hi"]:
                        raise ValueError(f"{name}.{pname}: lo > hi")
                elif kind == "choice":
                    if not spec["values"]:
                        raise ValueError(f"{name}.{pname}: empty categorical set")
                else:
                    raise ValueError(f"{name}.{pname}: unknown range type {kind!r}")

    def canonical_json(self) -> str:
        doc = {"version": self.version, "ranges": self.ranges}
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))

    def checksum(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()

    def params_for(self, obfuscation: str) -> dict:
        try:
            return self.ranges[obfuscation]
        except KeyError:
            raise MissingRangeError(f"no ranges configured for {obfuscation!r}") from None

    @classmethod
    def from_file(cls, path: str | Path) -> "ParamRanges":
        return cls(json.loads(Path(path).read_text()))


def load_default_ranges() -> ParamRanges:
    text = resources.files("obfuscation_bench.data").joinpath("default_ranges.json").read_text()
    return ParamRanges(json.loads(text))


def sample_params(
    ranges: ParamRanges,
    obfuscation: str,
    rng: np.random.Generator,
    seed_triple: tuple[int, str, str] = (0, "", ""),
    overrides: dict | None = None,
) -> SampledParams:
    """Draw one concrete value per parameter, in sorted parameter-name order."""
    if obfuscation not in ALL_NAMES:
        by_name(obfuscation)  # raises with the valid-name listing
    specs = ranges.params_for(obfuscation)
    values = {}
    for pname in sorted(specs):
        spec = specs[pname]
        if spec["type"] == "real":
            values[pname] = float(rng.uniform(spec["lo"], spec["hi"]))
        elif spec["type"] == "int":
            values[pname] = int(rng.integers(spec["lo"], spec["hi"] + 1))
        else:
            values[pname] = spec["values"][int(rng.integers(len(spec["values"])))]
    if overrides:
        unknown = set(overrides) - set(specs)
        if unknown:
            raise MissingRangeError(f"override for unknown parameters: {sorted(unknown)}")
        values.update(overrides)
    return SampledParams(obfuscation=obfuscation, values=values, seed_triple=seed_triple)
