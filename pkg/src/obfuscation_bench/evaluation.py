"""Benchmark metric and analyses over prediction files.

Accuracy is aggregated over 16 super-classes: an image's super-class
probability is the mean probability of the member classes, and the
weighted accuracy averages per-super-class accuracies so every class
contributes equally regardless of image count. The worst-case metric
counts an image as correct only if it is correct under every evaluated
obfuscation.
"""

from __future__ import annotations

import csv
import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .superclasses import NUM_SUPERCLASSES, SuperClassTable


class CoverageError(ValueError):
    """Raised when prediction sets do not cover the same image ids."""

    def __init__(self, missing: dict[str, list[str]]):
        parts = [f"{name}: missing {sorted(ids)[:10]}" for name, ids in missing.items()]
        super().__init__("prediction sets cover different image ids; " + "; ".join(parts))
        self.missing = missing


@dataclass
class PredictionSet:
    """Per-obfuscation predictions: image ids with probability vectors."""

    obfuscation: str
    ids: list[str]
    probs: np.ndarray  # (N, 1000) or (N, 16) when aggregated
    aggregated: bool = False

    def __post_init__(self):
        self.probs = np.asarray(self.probs, dtype=np.float64)
        expected = NUM_SUPERCLASSES if self.aggregated else 1000
        if self.probs.shape != (len(self.ids), expected):
            raise ValueError(
                f"{self.obfuscation}: probs shape {self.probs.shape} does not match "
                f"{len(self.ids)} ids x {expected} classes"
            )
        if self.probs.min() < 0:
            raise ValueError(f"{self.obfuscation}: negative probability entries")
        if not self.aggregated:
            sums = self.probs.sum(axis=1)
            bad = np.abs(sums - 1.0) > 1e-4
            if bad.any():
                idx = int(np.argmax(bad))
                raise ValueError(
                    f"{self.obfuscation}: probability vector for {self.ids[idx]!r} "
                    f"sums to {sums[idx]:.6f}, not 1"
                )

    @property
    def index(self) -> dict[str, int]:
        return {image_id: i for i, image_id in enumerate(self.ids)}


def load_prediction_csv(path: str | Path, obfuscation: str | None = None) -> PredictionSet:
    """Load a prediction CSV: image_id,p0..p999 or image_id,s0..s15."""
    path = Path(path)
    ids: list[str] = []
    rows: list[list[float]] = []
    with path.open(newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        ncols = len(header) - 1
        if ncols not in (1000, NUM_SUPERCLASSES):
            raise ValueError(f"{path}: expected 1000 or 16 probability columns, got {ncols}")
        for row in reader:
            ids.append(row[0])
            rows.append([float(x) for x in row[1:]])
    return PredictionSet(
        obfuscation=obfuscation or path.stem,
        ids=ids,
        probs=np.array(rows),
        aggregated=(ncols == NUM_SUPERCLASSES),
    )


def superclass_probabilities(v: np.ndarray, table: SuperClassTable) -> np.ndarray:
    """Aggregate 1000-class probabilities to 16 super-class means.

    Accepts a single vector or an (N, 1000) batch.
    """
    v = np.asarray(v, dtype=np.float64)
    single = v.ndim == 1
    batch = v[None, :] if single else v
    out = np.empty((batch.shape[0], NUM_SUPERCLASSES))
    for s, entry in enumerate(table.entries):
        out[:, s] = batch[:, list(entry.members)].mean(axis=1)
    return out[0] if single else out


def _aggregate(preds: PredictionSet, table: SuperClassTable) -> np.ndarray:
    if preds.aggregated:
        return preds.probs
    return superclass_probabilities(preds.probs, table)


def _true_superclasses(
    ids: list[str], labels: dict[str, int], table: SuperClassTable
) -> tuple[np.ndarray, np.ndarray, int]:
    """(valid mask, true super-class index per image, excluded count)."""
    true = np.full(len(ids), -1, dtype=np.int64)
    excluded = 0
    for i, image_id in enumerate(ids):
        sc = table.superclass_of(labels[image_id])
        if sc is None:
            excluded += 1
        else:
            true[i] = sc
    return true >= 0, true, excluded


def _correct_mask(
    preds: PredictionSet, labels: dict[str, int], table: SuperClassTable
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(valid, correct, true super-class) arrays over the set's image order.

    Argmax ties break toward the lowest super-class index.
    """
    agg = _aggregate(preds, table)
    predicted = np.argmax(agg, axis=1)  # np.argmax returns the first (lowest) max index
    valid, true, _ = _true_superclasses(preds.ids, labels, table)
    return valid, (predicted == true) & valid, true


def _class_mean_accuracy(correct: np.ndarray, true: np.ndarray, valid: np.ndarray) -> float:
    """Mean of per-super-class accuracies (inverse-occurrence weighting)."""
    accs = []
    for s in range(NUM_SUPERCLASSES):
        members = valid & (true == s)
        n = int(members.sum())
        if n:
            accs.append(correct[members].sum() / n)
    return float(np.mean(accs)) if accs else 0.0


def weighted_accuracy(
    preds: PredictionSet, labels: dict[str, int], table: SuperClassTable
) -> float:
    valid, correct, true = _correct_mask(preds, labels, table)
    return _class_mean_accuracy(correct, true, valid)


def unweighted_accuracy(
    preds: PredictionSet, labels: dict[str, int], table: SuperClassTable
) -> float:
    valid, correct, _ = _correct_mask(preds, labels, table)
    n = int(valid.sum())
    return float(correct.sum() / n) if n else 0.0


def topk_accuracy(
    preds: PredictionSet,
    labels: dict[str, int],
    table: SuperClassTable,
    k: int,
    weighted: bool = True,
) -> float:
    """Correct iff the true super-class is among the k highest probabilities."""
    if not 1 <= k <= NUM_SUPERCLASSES:
        raise ValueError("k must be in 1..16")
    agg = _aggregate(preds, table)
    # Stable sort on negated values: ties resolve toward lower class index.
    order = np.argsort(-agg, axis=1, kind="stable")[:, :k]
    valid, true, _ = _true_superclasses(preds.ids, labels, table)
    correct = (order == true[:, None]).any(axis=1) & valid
    if weighted:
        return _class_mean_accuracy(correct, true, valid)
    n = int(valid.sum())
    return float(correct.sum() / n) if n else 0.0


def _check_coverage(pred_sets: list[PredictionSet]) -> list[str]:
    all_ids = set()
    for ps in pred_sets:
        all_ids.update(ps.ids)
    missing = {}
    for ps in pred_sets:
        gap = all_ids - set(ps.ids)
        if gap:
            missing[ps.obfuscation] = sorted(gap)
    if missing:
        raise CoverageError(missing)
    return sorted(all_ids)


def worst_case_accuracy(
    pred_sets: list[PredictionSet],
    labels: dict[str, int],
    table: SuperClassTable,
    weighted: bool = True,
) -> float:
    """Image counts as correct only if correct in every provided set."""
    ids = _check_coverage(pred_sets)
    conj = np.ones(len(ids), dtype=bool)
    valid_all = np.ones(len(ids), dtype=bool)
    true_ref = np.full(len(ids), -1, dtype=np.int64)
    for ps in pred_sets:
        valid, correct, true = _correct_mask(ps, labels, table)
        idx = ps.index
        order = [idx[i] for i in ids]
        conj &= correct[order]
        valid_all &= valid[order]
        true_ref = true[order]
    conj &= valid_all
    if weighted:
        return _class_mean_accuracy(conj, true_ref, valid_all)
    n = int(valid_all.sum())
    return float(conj.sum() / n) if n else 0.0


def oracle_combination(
    models: dict[str, list[PredictionSet]],
    labels: dict[str, int],
    table: SuperClassTable,
    mode: str = "per-obfuscation",
) -> float:
    """Best-case fusion of several models over the same obfuscation sets.

    "per-obfuscation": pick the model with the best weighted accuracy for
    each obfuscation, then take the worst case over the winners.
    "per-image": an image is correct under an obfuscation if any model is
    correct, then worst case.
    """
    if mode not in ("per-obfuscation", "per-image"):
        raise ValueError("mode must be 'per-obfuscation' or 'per-image'")
    names = sorted(models)
    obfuscations = [ps.obfuscation for ps in models[names[0]]]
    for name in names:
        if [ps.obfuscation for ps in models[name]] != obfuscations:
            raise CoverageError({name: ["<obfuscation sets differ>"]})

    if mode == "per-obfuscation":
        winners = []
        for i, _ in enumerate(obfuscations):
            best = max(names, key=lambda n: (weighted_accuracy(models[n][i], labels, table), n))
            winners.append(models[best][i])
        return worst_case_accuracy(winners, labels, table, weighted=True)

    ids = _check_coverage([ps for sets in models.values() for ps in sets])
    conj = np.ones(len(ids), dtype=bool)
    valid_all = np.ones(len(ids), dtype=bool)
    true_ref = np.full(len(ids), -1, dtype=np.int64)
    for i, _ in enumerate(obfuscations):
        union = np.zeros(len(ids), dtype=bool)
        for name in names:
            ps = models[name][i]
            valid, correct, true = _correct_mask(ps, labels, table)
            idx = ps.index
            order = [idx[x] for x in ids]
            union |= correct[order]
            valid_all &= valid[order]
            true_ref = true[order]
        conj &= union
    conj &= valid_all
    return _class_mean_accuracy(conj, true_ref, valid_all)


def holdout_choice_histogram(
    pred_sets: list[PredictionSet],
    labels: dict[str, int],
    table: SuperClassTable,
    weighted: bool = True,
) -> dict[tuple[str, ...], float]:
    """Worst-case accuracy for every 3-subset of the provided sets."""
    if len(pred_sets) < 3:
        raise ValueError("need at least 3 prediction sets")
    ids = _check_coverage(pred_sets)
    per_set = {}
    valid_all = np.ones(len(ids), dtype=bool)
    true_ref = np.full(len(ids), -1, dtype=np.int64)
    for ps in pred_sets:
        valid, correct, true = _correct_mask(ps, labels, table)
        idx = ps.index
        order = [idx[i] for i in ids]
        per_set[ps.obfuscation] = correct[order]
        valid_all &= valid[order]
        true_ref = true[order]
    out = {}
    for combo in itertools.combinations(sorted(per_set), 3):
        conj = per_set[combo[0]] & per_set[combo[1]] & per_set[combo[2]] & valid_all
        if weighted:
            out[combo] = _class_mean_accuracy(conj, true_ref, valid_all)
        else:
            n = int(valid_all.sum())
            out[combo] = float(conj.sum() / n) if n else 0.0
    return out


@dataclass
class ConfusionMatrix:
    matrix: np.ndarray  # 16x16, rows true, columns predicted, row-normalized to %
    empty_rows: list[int] = field(default_factory=list)


def confusion_matrix(
    preds: PredictionSet, labels: dict[str, int], table: SuperClassTable
) -> ConfusionMatrix:
    """Percentage of images of each true class classified as each predicted class."""
    agg = _aggregate(preds, table)
    predicted = np.argmax(agg, axis=1)
    valid, true, _ = _true_superclasses(preds.ids, labels, table)
    counts = np.zeros((NUM_SUPERCLASSES, NUM_SUPERCLASSES))
    for t, p in zip(true[valid], predicted[valid]):
        counts[t, p] += 1
    row_sums = counts.sum(axis=1)
    empty = [s for s in range(NUM_SUPERCLASSES) if row_sums[s] == 0]
    matrix = np.zeros_like(counts)
    nonzero = row_sums > 0
    matrix[nonzero] = 100.0 * counts[nonzero] / row_sums[nonzero, None]
    return ConfusionMatrix(matrix=matrix, empty_rows=empty)


@dataclass
class EvalReport:
    model: str
    per_obfuscation_weighted: dict[str, float]
    worst_case_holdout: float | None = None
    per_obfuscation_unweighted: dict[str, float] = field(default_factory=dict)
    topk: dict[str, dict[str, float]] = field(default_factory=dict)  # "k" -> obf -> acc
    oracle: dict[str, float] = field(default_factory=dict)
    confusion: dict[str, list[list[float]]] = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "per_obfuscation_weighted": self.per_obfuscation_weighted,
            "worst_case_holdout": self.worst_case_holdout,
            "per_obfuscation_unweighted": self.per_obfuscation_unweighted,
            "topk": self.topk,
            "oracle": self.oracle,
            "confusion": self.confusion,
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "EvalReport":
        return cls(**doc)


def emit_report(report: EvalReport, fmt: str, path: str | Path) -> None:
    """Write a report as canonical json, per-metric csv rows, or an svg heatmap."""
    path = Path(path)
    if fmt == "json":
        path.write_text(json.dumps(report.to_dict(), sort_keys=True, indent=1) + "\n")
    elif fmt == "csv":
        with path.open("w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["model", "obfuscation", "metric", "value"])
            for obf, acc in sorted(report.per_obfuscation_weighted.items()):
                writer.writerow([report.model, obf, "weighted_top1", f"{acc:.4f}"])
            for obf, acc in sorted(report.per_obfuscation_unweighted.items()):
                writer.writerow([report.model, obf, "unweighted_top1", f"{acc:.4f}"])
            for k, table in sorted(report.topk.items()):
                for obf, acc in sorted(table.items()):
                    writer.writerow([report.model, obf, f"weighted_top{k}", f"{acc:.4f}"])
            if report.worst_case_holdout is not None:
                writer.writerow(
                    [report.model, "holdout", "worst_case", f"{report.worst_case_holdout:.4f}"]
                )
            for mode, acc in sorted(report.oracle.items()):
                writer.writerow([report.model, "holdout", f"oracle_{mode}", f"{acc:.4f}"])
    elif fmt == "svg-heatmap":
        path.write_text(_svg_heatmap(report))
    else:
        raise ValueError(f"unknown report format {fmt!r}")


def _svg_heatmap(report: EvalReport) -> str:
    """One labeled cell per (model, obfuscation) weighted accuracy."""
    cells = sorted(report.per_obfuscation_weighted.items())
    cell_w, cell_h, label_w = 80, 28, 120
    width = label_w + cell_w * max(len(cells), 1)
    height = cell_h * 2
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<text x="4" y="{cell_h + 18}" font-size="12">{report.model}</text>',
    ]
    for i, (obf, acc) in enumerate(cells):
        x = label_w + i * cell_w
        shade = int(255 * (1.0 - acc))
        color = f"rgb({shade},{255 - shade // 2},{shade})"
        parts.append(
            f'<text x="{x + 2}" y="18" font-size="9" transform="">{obf[:12]}</text>'
        )
        parts.append(
            f'<g class="cell" data-model="{report.model}" data-obfuscation="{obf}">'
            f'<rect x="{x}" y="{cell_h}" width="{cell_w - 2}" height="{cell_h - 2}" '
            f'fill="{color}"/>'
            f'<text x="{x + 6}" y="{cell_h + 18}" font-size="11">{acc:.4f}</text></g>'
        )
    parts.append("</svg>")
    return "\n".join(parts)
