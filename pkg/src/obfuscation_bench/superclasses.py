"""The 16 super-classes and their ImageNet member classes.

The table ships as an embedded, versioned JSON document and is the single
source of truth for class aggregation in the evaluator.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

NUM_SUPERCLASSES = 16
NUM_MEMBER_CLASSES = 207


@dataclass(frozen=True)
class SuperClass:
    name: str
    members: tuple[int, ...]


class SuperClassTable:
    """Ordered list of 16 super-classes with disjoint member-class id sets."""

    def __init__(self, entries: list[SuperClass], version: int = 1):
        if len(entries) != NUM_SUPERCLASSES:
            raise ValueError(f"expected {NUM_SUPERCLASSES} super-classes, got {len(entries)}")
        self.entries = list(entries)
        self.version = version
        self._class_to_super: dict[int, int] = {}
        for idx, entry in enumerate(entries):
            if list(entry.members) != sorted(entry.members):
                raise ValueError(f"member ids for {entry.name} are not sorted")
            for cid in entry.members:
                if not 0 <= cid <= 999:
                    raise ValueError(f"class id {cid} out of range 0..999")
                if cid in self._class_to_super:
                    raise ValueError(f"class id {cid} appears in two super-classes")
                self._class_to_super[cid] = idx
        if len(self._class_to_super) != NUM_MEMBER_CLASSES:
            raise ValueError(
                f"expected {NUM_MEMBER_CLASSES} member classes, got {len(self._class_to_super)}"
            )

    @property
    def names(self) -> list[str]:
        return [e.name for e in self.entries]

    @property
    def member_counts(self) -> list[int]:
        return [len(e.members) for e in self.entries]

    def superclass_of(self, class_id: int) -> int | None:
        """Super-class index for an ImageNet class id, None if not a member."""
        return self._class_to_super.get(class_id)

    def to_json(self) -> str:
        doc = {
            "version": self.version,
            "superclasses": [{"name": e.name, "members": list(e.members)} for e in self.entries],
        }
        return json.dumps(doc, indent=1, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, doc: dict) -> "SuperClassTable":
        entries = [
            SuperClass(name=e["name"], members=tuple(e["members"])) for e in doc["superclasses"]
        ]
        return cls(entries, version=doc.get("version", 1))


def load_default_table() -> SuperClassTable:
    text = resources.files("obfuscation_bench.data").joinpath("superclasses.json").read_text()
    return SuperClassTable.from_dict(json.loads(text))


DEFAULT_TABLE = load_default_table()
