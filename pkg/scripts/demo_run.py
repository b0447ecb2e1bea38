#!/usr/bin/env python3
"""End-to-end demo: synthetic corpus -> obfuscated outputs -> evaluation.

Builds everything under a scratch directory, obfuscates a handful of
images with a few training obfuscations, fabricates prediction files for
a perfect classifier, and scores them.
"""

import argparse
import csv
import subprocess
import sys
from pathlib import Path

from obfuscation_bench.pipeline import read_labels
from obfuscation_bench.superclasses import DEFAULT_TABLE


def write_perfect_predictions(labels_file: Path, out_csv: Path) -> None:
    labels = read_labels(labels_file)
    header = ["image_id"] + [f"p{i}" for i in range(1000)]
    with out_csv.open("w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        for image_id, cid in sorted(labels.items()):
            row = [image_id] + ["0"] * 1000
            row[1 + cid] = "1"
            writer.writerow(row)


def run(argv):
    print("+", " ".join(str(a) for a in argv), file=sys.stderr)
    subprocess.run([sys.executable, "-m"] + argv, check=True)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("scratch", help="scratch directory")
    args = parser.parse_args()
    scratch = Path(args.scratch)

    here = Path(__file__).parent
    subprocess.run(
        [sys.executable, here / "make_asset_pack.py", scratch / "pack"], check=True
    )
    subprocess.run(
        [sys.executable, here / "make_synthetic_corpus.py", scratch / "corpus", "--count", "6"],
        check=True,
    )
    run(
        [
            "obfuscation_bench.cli", "obfuscate",
            "--corpus", scratch / "corpus",
            "--labels", scratch / "corpus" / "labels.csv",
            "--assets", scratch / "pack",
            "--seed", "7",
            "--obfuscations", "InvertLines", "RotateImage", "IconOverlay",
            "--out", scratch / "outputs",
        ]
    )
    preds_dir = scratch / "predictions"
    preds_dir.mkdir(exist_ok=True)
    for name in ("InvertLines", "RotateImage", "IconOverlay"):
        write_perfect_predictions(scratch / "corpus" / "labels.csv", preds_dir / f"{name}.csv")
    run(
        [
            "obfuscation_bench.cli", "evaluate",
            "--labels", scratch / "corpus" / "labels.csv",
            "--predictions", *sorted(preds_dir.glob("*.csv")),
            "--model", "perfect",
            "--formats", "json", "csv", "svg-heatmap",
            "--out", scratch / "reports",
        ]
    )
    print(f"demo artifacts under {scratch}")


if __name__ == "__main__":
    main()
