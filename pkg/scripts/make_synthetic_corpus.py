#!/usr/bin/env python3
"""Generate a small synthetic labeled corpus of 224x224 images.

Images are random smooth color fields; labels cycle through the 207
member classes so every super-class is populated.
"""

import argparse
import csv
from pathlib import Path

import numpy as np

from obfuscation_bench.core import CANONICAL_SIDE
from obfuscation_bench.image_io import save_png
from obfuscation_bench.superclasses import DEFAULT_TABLE


def smooth_field(rng: np.random.Generator, side: int) -> np.ndarray:
    img = np.zeros((side, side, 3))
    ys, xs = np.mgrid[0:side, 0:side] / side
    for _ in range(4):
        fy, fx = rng.uniform(0.5, 4, size=2)
        phase = rng.uniform(0, 2 * np.pi, size=3)
        amp = rng.uniform(0.1, 0.4)
        for c in range(3):
            img[:, :, c] += amp * np.sin(2 * np.pi * (fy * ys + fx * xs) + phase[c])
    lo, hi = img.min(), img.max()
    return (img - lo) / (hi - lo)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("out", help="output directory (images + labels.csv)")
    parser.add_argument("--count", type=int, default=16)
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    member_ids = sorted(
        cid for entry in DEFAULT_TABLE.entries for cid in entry.members
    )
    rng = np.random.default_rng(args.seed)
    with (out / "labels.csv").open("w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["image_id", "class_id"])
        for i in range(args.count):
            image_id = f"synth_{i:04d}"
            save_png(out / f"{image_id}.png", smooth_field(rng, CANONICAL_SIDE))
            writer.writerow([image_id, member_ids[i % len(member_ids)]])
    print(f"wrote {args.count} images and labels.csv to {out}")


if __name__ == "__main__":
    main()
