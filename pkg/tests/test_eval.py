import csv
import json
import re

import numpy as np
import pytest

from obfuscation_bench.evaluation import (
    CoverageError,
    EvalReport,
    PredictionSet,
    confusion_matrix,
    emit_report,
    holdout_choice_histogram,
    load_prediction_csv,
    oracle_combination,
    superclass_probabilities,
    topk_accuracy,
    unweighted_accuracy,
    weighted_accuracy,
    worst_case_accuracy,
)
from obfuscation_bench.superclasses import DEFAULT_TABLE, NUM_SUPERCLASSES

TABLE = DEFAULT_TABLE
MEMBER_IDS = sorted(cid for e in TABLE.entries for cid in e.members)


def make_labels(n, rng=None, per_class=None):
    """n synthetic image ids labeled with member class ids."""
    labels = {}
    if per_class is not None:
        i = 0
        for entry in TABLE.entries:
            for _ in range(per_class):
                labels[f"im_{i:05d}"] = entry.members[i % len(entry.members)]
                i += 1
        return labels
    for i in range(n):
        cid = MEMBER_IDS[i % len(MEMBER_IDS)] if rng is None else int(rng.choice(MEMBER_IDS))
        labels[f"im_{i:05d}"] = cid
    return labels


def predictions_for(labels, correct_mask, obfuscation="Obf", rng=None):
    """Prediction set correct exactly on the images flagged in correct_mask."""
    rng = rng or np.random.default_rng(0)
    ids = sorted(labels)
    probs = np.zeros((len(ids), 1000))
    for i, image_id in enumerate(ids):
        true_sc = TABLE.superclass_of(labels[image_id])
        if correct_mask[i]:
            target_sc = true_sc
        else:
            target_sc = (true_sc + 1 + int(rng.integers(NUM_SUPERCLASSES - 1))) % NUM_SUPERCLASSES
        cid = TABLE.entries[target_sc].members[0]
        probs[i, cid] = 1.0
    return PredictionSet(obfuscation=obfuscation, ids=ids, probs=probs)


def brute_weighted(preds, labels):
    """Oracle: per-super-class accuracy loop, then plain mean."""
    per_class = {s: [0, 0] for s in range(NUM_SUPERCLASSES)}
    for i, image_id in enumerate(preds.ids):
        true_sc = TABLE.superclass_of(labels[image_id])
        if true_sc is None:
            continue
        agg = [
            sum(preds.probs[i, cid] for cid in e.members) / len(e.members)
            for e in TABLE.entries
        ]
        predicted = agg.index(max(agg))
        per_class[true_sc][1] += 1
        per_class[true_sc][0] += int(predicted == true_sc)
    accs = [c / n for c, n in per_class.values() if n]
    return sum(accs) / len(accs)


class TestSuperclassProbabilities:
    def test_uniform_vector(self):
        v = np.full(1000, 1e-3)
        out = superclass_probabilities(v, TABLE)
        assert np.allclose(out, 1e-3, atol=1e-15)
        assert abs(out.sum() - 16 / 1000) < 1e-12

    def test_single_class_mass(self):
        v = np.zeros(1000)
        v[404] = 1.0
        out = superclass_probabilities(v, TABLE)
        airplane = TABLE.names.index("Airplane")
        assert out[airplane] == 1.0
        assert out.sum() == 1.0

    def test_matches_loop_oracle(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            v = rng.random(1000)
            out = superclass_probabilities(v, TABLE)
            expected = [
                sum(v[cid] for cid in e.members) / len(e.members) for e in TABLE.entries
            ]
            assert np.abs(out - expected).max() < 1e-12

    def test_batch_matches_single(self):
        rng = np.random.default_rng(4)
        batch = rng.random((5, 1000))
        out = superclass_probabilities(batch, TABLE)
        # Reduction blocking differs between 2-D and 1-D means, so allow
        # last-ulp differences.
        for i in range(5):
            assert np.allclose(out[i], superclass_probabilities(batch[i], TABLE), atol=1e-14)


class TestAccuracies:
    def test_all_correct_is_one(self):
        labels = make_labels(0, per_class=4)
        preds = predictions_for(labels, np.ones(len(labels), dtype=bool))
        assert weighted_accuracy(preds, labels, TABLE) == 1.0
        assert unweighted_accuracy(preds, labels, TABLE) == 1.0

    def test_all_wrong_is_zero(self):
        labels = make_labels(0, per_class=3)
        preds = predictions_for(labels, np.zeros(len(labels), dtype=bool))
        assert weighted_accuracy(preds, labels, TABLE) == 0.0
        assert unweighted_accuracy(preds, labels, TABLE) == 0.0

    def test_matches_brute_force(self):
        rng = np.random.default_rng(9)
        labels = make_labels(300, rng=rng)
        correct = rng.random(len(labels)) < 0.6
        preds = predictions_for(labels, correct, rng=rng)
        assert abs(weighted_accuracy(preds, labels, TABLE) - brute_weighted(preds, labels)) < 1e-12

    def test_label_outside_membership_excluded(self):
        labels = {"a": 404, "b": 0}  # class 0 belongs to no super-class
        probs = np.zeros((2, 1000))
        probs[0, 404] = 1.0
        probs[1, 404] = 1.0
        preds = PredictionSet("Obf", ["a", "b"], probs)
        assert unweighted_accuracy(preds, labels, TABLE) == 1.0

    def test_argmax_tie_lowest_index(self):
        # Exactly tied super-class scores resolve to index 0, so only
        # Airplane-labeled images score.
        labels = {"a": 404, "b": 152}
        agg = np.full((2, 16), 0.5)
        preds = PredictionSet("Obf", ["a", "b"], agg, aggregated=True)
        assert unweighted_accuracy(preds, labels, TABLE) == 0.5

    def test_rescaling_invariance(self):
        # Per-image positive rescaling does not move the argmax. Rescaled
        # vectors break the 1000-class normalization invariant, so this
        # property is exercised on pre-aggregated 16-class sets.
        rng = np.random.default_rng(2)
        labels = make_labels(100, rng=rng)
        ids = sorted(labels)
        agg = rng.random((len(ids), 16))
        preds = PredictionSet("Obf", ids, agg, aggregated=True)
        scaled = PredictionSet(
            "Obf", ids, agg * rng.uniform(0.5, 2.0, size=(len(ids), 1)), aggregated=True
        )
        assert weighted_accuracy(preds, labels, TABLE) == weighted_accuracy(
            scaled, labels, TABLE
        )


class TestPredictionSetValidation:
    def test_shape_checked(self):
        with pytest.raises(ValueError, match="shape"):
            PredictionSet("O", ["a"], np.zeros((2, 1000)))

    def test_negative_rejected(self):
        probs = np.full((1, 1000), 1e-3)
        probs[0, 0] = -0.5
        with pytest.raises(ValueError, match="negative"):
            PredictionSet("O", ["a"], probs)

    def test_sum_checked(self):
        with pytest.raises(ValueError, match="sums to"):
            PredictionSet("O", ["a"], np.full((1, 1000), 2e-3))

    def test_aggregated_sixteen_wide(self):
        ps = PredictionSet("O", ["a"], np.full((1, 16), 0.5), aggregated=True)
        assert ps.aggregated


class TestTopK:
    def test_k1_equals_top1(self):
        rng = np.random.default_rng(5)
        labels = make_labels(120, rng=rng)
        correct = rng.random(len(labels)) < 0.4
        preds = predictions_for(labels, correct, rng=rng)
        assert topk_accuracy(preds, labels, TABLE, 1) == weighted_accuracy(preds, labels, TABLE)
        assert topk_accuracy(preds, labels, TABLE, 1, weighted=False) == unweighted_accuracy(
            preds, labels, TABLE
        )

    def test_k16_is_one(self):
        rng = np.random.default_rng(6)
        labels = make_labels(50, rng=rng)
        preds = predictions_for(labels, np.zeros(len(labels), dtype=bool), rng=rng)
        assert topk_accuracy(preds, labels, TABLE, 16) == 1.0

    def test_monotone_in_k(self):
        rng = np.random.default_rng(7)
        labels = make_labels(80, rng=rng)
        ids = sorted(labels)
        probs = rng.random((len(ids), 1000))
        probs /= probs.sum(axis=1, keepdims=True)
        preds = PredictionSet("O", ids, probs)
        values = [topk_accuracy(preds, labels, TABLE, k) for k in range(1, 17)]
        assert all(a <= b + 1e-12 for a, b in zip(values, values[1:]))

    def test_hand_placed_ranks(self):
        # True super-class ranked exactly 3rd: correct for k >= 3 only.
        labels = {"a": 404}
        agg = np.zeros((1, 16))
        airplane = TABLE.names.index("Airplane")
        agg[0, (airplane + 1) % 16] = 0.5
        agg[0, (airplane + 2) % 16] = 0.4
        agg[0, airplane] = 0.3
        preds = PredictionSet("O", ["a"], agg, aggregated=True)
        assert topk_accuracy(preds, labels, TABLE, 2) == 0.0
        assert topk_accuracy(preds, labels, TABLE, 3) == 1.0

    def test_k_validated(self):
        labels = {"a": 404}
        preds = PredictionSet("O", ["a"], np.full((1, 16), 0.1), aggregated=True)
        with pytest.raises(ValueError):
            topk_accuracy(preds, labels, TABLE, 0)
        with pytest.raises(ValueError):
            topk_accuracy(preds, labels, TABLE, 17)


class TestWorstCase:
    def test_single_set_equals_accuracy(self):
        rng = np.random.default_rng(8)
        labels = make_labels(90, rng=rng)
        correct = rng.random(len(labels)) < 0.7
        preds = predictions_for(labels, correct, rng=rng)
        assert worst_case_accuracy([preds], labels, TABLE) == weighted_accuracy(
            preds, labels, TABLE
        )

    def test_conjunction_semantics(self):
        labels = make_labels(0, per_class=2)
        n = len(labels)
        m1 = np.ones(n, dtype=bool)
        m2 = np.ones(n, dtype=bool)
        m2[0] = False  # correct in 1 of 2 sets -> counts as wrong
        s1 = predictions_for(labels, m1, "A")
        s2 = predictions_for(labels, m2, "B")
        got = worst_case_accuracy([s1, s2], labels, TABLE, weighted=False)
        assert got == (n - 1) / n

    def test_matches_and_oracle(self):
        rng = np.random.default_rng(10)
        labels = make_labels(150, rng=rng)
        n = len(labels)
        masks = [rng.random(n) < 0.5 for _ in range(3)]
        sets = [predictions_for(labels, m, f"S{i}", rng=rng) for i, m in enumerate(masks)]
        conj = masks[0] & masks[1] & masks[2]
        oracle = predictions_for(labels, conj, "conj", rng=rng)
        got = worst_case_accuracy(sets, labels, TABLE, weighted=False)
        assert abs(got - unweighted_accuracy(oracle, labels, TABLE)) < 1e-12

    def test_bounded_by_min_single(self):
        rng = np.random.default_rng(11)
        labels = make_labels(100, rng=rng)
        sets = [
            predictions_for(labels, rng.random(len(labels)) < 0.6, f"S{i}", rng=rng)
            for i in range(3)
        ]
        worst = worst_case_accuracy(sets, labels, TABLE)
        assert worst <= min(weighted_accuracy(s, labels, TABLE) for s in sets) + 1e-12

    def test_coverage_mismatch_lists_missing(self):
        labels = make_labels(0, per_class=1)
        full = predictions_for(labels, np.ones(len(labels), dtype=bool), "A")
        partial = PredictionSet("B", full.ids[:-1], full.probs[:-1])
        with pytest.raises(CoverageError) as exc:
            worst_case_accuracy([full, partial], labels, TABLE)
        assert full.ids[-1] in str(exc.value)


class TestOracleCombination:
    def setup_method(self):
        self.rng = np.random.default_rng(12)
        self.labels = make_labels(120, rng=self.rng)
        self.n = len(self.labels)

    def make_models(self, n_models=3, n_obfs=3, p=0.5):
        models = {}
        self.masks = {}
        for m in range(n_models):
            sets = []
            self.masks[f"m{m}"] = []
            for o in range(n_obfs):
                mask = self.rng.random(self.n) < p
                self.masks[f"m{m}"].append(mask)
                sets.append(predictions_for(self.labels, mask, f"O{o}", rng=self.rng))
            models[f"m{m}"] = sets
        return models

    def test_single_model_equals_worst_case(self):
        models = self.make_models(n_models=1)
        expected = worst_case_accuracy(models["m0"], self.labels, TABLE)
        for mode in ("per-obfuscation", "per-image"):
            assert oracle_combination(models, self.labels, TABLE, mode) == expected

    def test_per_image_disjoint_halves_full_score(self):
        labels = make_labels(0, per_class=2)
        n = len(labels)
        half = np.zeros(n, dtype=bool)
        half[: n // 2] = True
        models = {
            "a": [predictions_for(labels, half, f"O{o}") for o in range(3)],
            "b": [predictions_for(labels, ~half, f"O{o}") for o in range(3)],
        }
        assert oracle_combination(models, labels, TABLE, "per-image") == 1.0

    def test_per_image_matches_union_oracle(self):
        models = self.make_models()
        unions = [
            self.masks["m0"][o] | self.masks["m1"][o] | self.masks["m2"][o] for o in range(3)
        ]
        conj = unions[0] & unions[1] & unions[2]
        oracle = predictions_for(self.labels, conj, "conj", rng=self.rng)
        got = oracle_combination(models, self.labels, TABLE, "per-image")
        # Weighted aggregation of the brute-force conjunction.
        expected = weighted_accuracy(oracle, self.labels, TABLE)
        assert abs(got - expected) < 1e-12

    def test_per_obfuscation_matches_exhaustive_winner_search(self):
        models = self.make_models()
        best = []
        for o in range(3):
            accs = {
                name: weighted_accuracy(models[name][o], self.labels, TABLE)
                for name in models
            }
            winner = max(sorted(accs), key=lambda n: (accs[n], n))
            best.append(models[winner][o])
        expected = worst_case_accuracy(best, self.labels, TABLE)
        got = oracle_combination(models, self.labels, TABLE, "per-obfuscation")
        assert abs(got - expected) < 1e-12

    def test_ordering_invariant(self):
        models = self.make_models()
        per_image = oracle_combination(models, self.labels, TABLE, "per-image")
        per_obf = oracle_combination(models, self.labels, TABLE, "per-obfuscation")
        best_single = max(
            worst_case_accuracy(sets, self.labels, TABLE) for sets in models.values()
        )
        assert per_image + 1e-12 >= per_obf >= best_single - 1e-12

    def test_mode_validated(self):
        models = self.make_models(n_models=1)
        with pytest.raises(ValueError):
            oracle_combination(models, self.labels, TABLE, "majority")


class TestHoldoutHistogram:
    def test_four_sets_give_four_entries(self):
        rng = np.random.default_rng(13)
        labels = make_labels(64, rng=rng)
        sets = [
            predictions_for(labels, rng.random(len(labels)) < 0.5, f"S{i}", rng=rng)
            for i in range(4)
        ]
        hist = holdout_choice_histogram(sets, labels, TABLE)
        assert len(hist) == 4

    def test_entries_match_direct_recomputation(self):
        rng = np.random.default_rng(14)
        labels = make_labels(64, rng=rng)
        sets = [
            predictions_for(labels, rng.random(len(labels)) < 0.6, f"S{i}", rng=rng)
            for i in range(5)
        ]
        by_name = {s.obfuscation: s for s in sets}
        hist = holdout_choice_histogram(sets, labels, TABLE)
        assert len(hist) == 10
        for combo, acc in hist.items():
            direct = worst_case_accuracy([by_name[n] for n in combo], labels, TABLE)
            assert abs(acc - direct) < 1e-12

    def test_too_few_sets(self):
        labels = {"a": 404}
        preds = PredictionSet("O", ["a"], np.full((1, 16), 0.1), aggregated=True)
        with pytest.raises(ValueError):
            holdout_choice_histogram([preds], labels, TABLE)


class TestConfusionMatrix:
    def test_perfect_is_identity(self):
        labels = make_labels(0, per_class=2)
        preds = predictions_for(labels, np.ones(len(labels), dtype=bool))
        cm = confusion_matrix(preds, labels, TABLE)
        assert np.allclose(cm.matrix, 100.0 * np.eye(16))
        assert cm.empty_rows == []

    def test_rows_sum_to_hundred(self):
        rng = np.random.default_rng(15)
        labels = make_labels(160, rng=rng)
        preds = predictions_for(labels, rng.random(len(labels)) < 0.5, rng=rng)
        cm = confusion_matrix(preds, labels, TABLE)
        sums = cm.matrix.sum(axis=1)
        for s in range(16):
            if s in cm.empty_rows:
                assert sums[s] == 0.0
            else:
                assert abs(sums[s] - 100.0) < 1e-9

    def test_hand_tabulated_fixture(self):
        airplane = TABLE.names.index("Airplane")
        dog = TABLE.names.index("Dog")
        # 3 Airplane images: 2 predicted Airplane, 1 predicted Dog.
        labels = {"a": 404, "b": 404, "c": 404}
        probs = np.zeros((3, 1000))
        probs[0, 404] = 1.0
        probs[1, 404] = 1.0
        probs[2, TABLE.entries[dog].members[0]] = 1.0
        preds = PredictionSet("O", ["a", "b", "c"], probs)
        cm = confusion_matrix(preds, labels, TABLE)
        assert abs(cm.matrix[airplane, airplane] - 200 / 3) < 1e-9
        assert abs(cm.matrix[airplane, dog] - 100 / 3) < 1e-9
        assert len(cm.empty_rows) == 15


class TestIO:
    def write_csv(self, path, ids, probs):
        with path.open("w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["image_id"] + [f"p{i}" for i in range(probs.shape[1])])
            for i, image_id in enumerate(ids):
                writer.writerow([image_id] + [repr(float(x)) for x in probs[i]])

    def test_load_1000_column_csv(self, tmp_path):
        rng = np.random.default_rng(16)
        probs = rng.random((4, 1000))
        probs /= probs.sum(axis=1, keepdims=True)
        self.write_csv(tmp_path / "Obf.csv", ["a", "b", "c", "d"], probs)
        ps = load_prediction_csv(tmp_path / "Obf.csv")
        assert ps.obfuscation == "Obf"
        assert not ps.aggregated
        assert np.allclose(ps.probs, probs)

    def test_load_16_column_csv_flagged(self, tmp_path):
        probs = np.full((2, 16), 0.25)
        self.write_csv(tmp_path / "agg.csv", ["a", "b"], probs)
        ps = load_prediction_csv(tmp_path / "agg.csv", obfuscation="X")
        assert ps.aggregated
        assert ps.obfuscation == "X"

    def test_wrong_width_rejected(self, tmp_path):
        self.write_csv(tmp_path / "bad.csv", ["a"], np.zeros((1, 10)))
        with pytest.raises(ValueError, match="1000 or 16"):
            load_prediction_csv(tmp_path / "bad.csv")


class TestReports:
    def make_report(self):
        return EvalReport(
            model="m",
            per_obfuscation_weighted={"A": 0.5, "B": 0.75},
            per_obfuscation_unweighted={"A": 0.6, "B": 0.8},
            worst_case_holdout=0.4,
            topk={"3": {"A": 0.7, "B": 0.9}},
            oracle={"per-image": 0.95},
        )

    def test_json_round_trip(self, tmp_path):
        report = self.make_report()
        emit_report(report, "json", tmp_path / "r.json")
        loaded = EvalReport.from_dict(json.loads((tmp_path / "r.json").read_text()))
        assert loaded == report

    def test_csv_row_count(self, tmp_path):
        report = self.make_report()
        emit_report(report, "csv", tmp_path / "r.csv")
        with (tmp_path / "r.csv").open() as f:
            rows = list(csv.reader(f))
        # header + 2 weighted + 2 unweighted + 2 topk + worst case + oracle
        assert len(rows) == 1 + 2 + 2 + 2 + 1 + 1
        assert rows[0] == ["model", "obfuscation", "metric", "value"]

    def test_svg_cell_count(self, tmp_path):
        report = self.make_report()
        emit_report(report, "svg-heatmap", tmp_path / "r.svg")
        svg = (tmp_path / "r.svg").read_text()
        cells = re.findall(r'class="cell"', svg)
        assert len(cells) == len(report.per_obfuscation_weighted)
        assert "0.5000" in svg and "0.7500" in svg

    def test_unknown_format(self, tmp_path):
        with pytest.raises(ValueError):
            emit_report(self.make_report(), "yaml", tmp_path / "r.yaml")
