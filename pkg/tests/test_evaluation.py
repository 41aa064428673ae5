import numpy as np
import pytest

from ecgalarm.ensemble import fit_adaboost
from ecgalarm.evaluation import (
    SCENARIO_DIMS,
    FeatureTable,
    combine_tables,
    confusion_metrics,
    render_markdown,
    roc_auc,
    run_cell,
    run_matrix,
    stratified_folds,
)
from ecgalarm.exceptions import (
    ConfigError,
    EmptyInput,
    MissingInput,
    UndefinedAuc,
)
from ecgalarm.record_io import ALARM_TYPES, FALSE_ALARM, TRUE_ALARM


class TestStratifiedFolds:
    def test_one_record_per_stratum(self):
        records = [(a, lab) for a in ALARM_TYPES for lab in (TRUE_ALARM, FALSE_ALARM)]
        folds = stratified_folds(records, 5, seed=1)
        counts = np.bincount(folds, minlength=5)
        assert np.all(counts == 2)

    def test_challenge_shaped_counts(self):
        # Per-type (false, true) counts as in the challenge training set.
        plan = {
            "ASY": (94, 22), "EBR": (41, 45), "VFB": (51, 6),
            "ETC": (8, 123), "VTA": (245, 86),
        }
        records = []
        for alarm, (n_false, n_true) in plan.items():
            records += [(alarm, FALSE_ALARM)] * n_false + [(alarm, TRUE_ALARM)] * n_true
        assert len(records) == 721
        folds = stratified_folds(records, 5, seed=0)
        vfb_true = [i for i, r in enumerate(records) if r == ("VFB", TRUE_ALARM)]
        per_fold = np.bincount(folds[vfb_true], minlength=5)
        assert np.all(per_fold >= 1)
        # per-stratum fold sizes differ by at most one
        for alarm, (n_false, n_true) in plan.items():
            for label, expect in ((FALSE_ALARM, n_false), (TRUE_ALARM, n_true)):
                idx = [i for i, r in enumerate(records) if r == (alarm, label)]
                sizes = np.bincount(folds[idx], minlength=5)
                assert sizes.max() - sizes.min() <= 1

    def test_seed_determinism(self):
        records = [("ASY", TRUE_ALARM)] * 10 + [("VTA", FALSE_ALARM)] * 15
        a = stratified_folds(records, 5, seed=3)
        b = stratified_folds(records, 5, seed=3)
        c = stratified_folds(records, 5, seed=4)
        np.testing.assert_array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_partition_properties(self):
        records = [("ETC", TRUE_ALARM)] * 13 + [("EBR", FALSE_ALARM)] * 8
        folds = stratified_folds(records, 4, seed=9)
        assert len(folds) == 21
        assert set(folds.tolist()) == {0, 1, 2, 3}

    def test_too_many_folds(self):
        with pytest.raises(ConfigError):
            stratified_folds([("ASY", TRUE_ALARM)] * 3, 5, seed=0)


class TestConfusionMetrics:
    def test_perfect(self):
        y = np.array([1, 1, -1, -1])
        m = confusion_metrics(y, y)
        assert (m.accuracy, m.sensitivity, m.specificity) == (1.0, 1.0, 1.0)

    def test_mixed_confusion_counts(self):
        y_true = np.array([1] * 100 + [-1] * 100)
        y_pred = np.array([1] * 81 + [-1] * 19 + [-1] * 83 + [1] * 17)
        m = confusion_metrics(y_true, y_pred)
        assert m.tp == 81 and m.fn == 19 and m.tn == 83 and m.fp == 17
        assert m.sensitivity == pytest.approx(0.81)
        assert m.specificity == pytest.approx(0.83)
        assert m.accuracy == pytest.approx(0.82)

    def test_all_negative_predictions(self):
        y_true = np.array([1, -1, 1, -1])
        y_pred = np.full(4, -1)
        assert confusion_metrics(y_true, y_pred).sensitivity == 0.0

    def test_empty_raises(self):
        with pytest.raises(EmptyInput):
            confusion_metrics(np.array([]), np.array([]))


class TestRocAuc:
    def test_perfect_ordering(self):
        y = np.array([1, 1, -1, -1])
        auc, points = roc_auc(y, np.array([0.9, 0.8, 0.2, 0.1]))
        assert auc == 1.0
        assert points[0] == (0.0, 0.0, float("inf"))
        assert points[-1][:2] == (1.0, 1.0)

    def test_all_tied_scores(self):
        y = np.array([1, -1, 1, -1])
        auc, points = roc_auc(y, np.zeros(4))
        assert auc == 0.5
        assert len(points) == 2  # one tied group

    def test_four_point_example(self):
        # Oracle: 4 positive-negative pairs, 3 ordered correctly -> 0.75.
        y = np.array([1, -1, 1, -1])
        auc, _ = roc_auc(y, np.array([0.9, 0.8, 0.3, 0.1]))
        assert auc == pytest.approx(0.75, abs=1e-12)

    def test_single_class_raises(self):
        with pytest.raises(UndefinedAuc):
            roc_auc(np.array([1, 1]), np.array([0.5, 0.2]))

    def test_trapezoid_equals_mann_whitney_100_random(self):
        # The implementation asserts the equivalence internally; this drives
        # it across 100 random score vectors with heavy ties.
        rng = np.random.default_rng(0)
        for i in range(100):
            n = int(rng.integers(10, 60))
            y = np.where(rng.random(n) > 0.5, 1, -1)
            if len(np.unique(y)) < 2:
                continue
            scores = np.round(rng.normal(size=n), 1)  # rounding forces ties
            auc, _ = roc_auc(y, scores)
            assert 0.0 <= auc <= 1.0


def _toy_tables(n=40, seed=0, dim_a=6, dim_b=4):
    rng = np.random.default_rng(seed)
    y = np.where(rng.random(n) > 0.45, TRUE_ALARM, FALSE_ALARM)
    if len(np.unique(y)) < 2:
        y[0] = TRUE_ALARM
        y[1] = FALSE_ALARM
    X_a = rng.normal(size=(n, dim_a)) + 0.8 * y[:, None]
    X_b = rng.normal(size=(n, dim_b))
    records = [f"r{i:03d}" for i in range(n)]
    alarms = {r: ALARM_TYPES[i % 5] for i, r in enumerate(records)}
    return (
        {"A": FeatureTable(records, y, X_a), "B": FeatureTable(records, y, X_b)},
        alarms,
    )


class TestRunCell:
    def test_pooled_counts_cover_dataset(self):
        tables, alarms = _toy_tables()
        table = tables["A"]
        meta = [(alarms[r], int(l)) for r, l in zip(table.records, table.y)]
        folds = stratified_folds(meta, 4, seed=1)
        cell = run_cell(table, folds, "A", "BoostedTrees", seed=1, rounds=5)
        c = cell.confusion
        assert c.tp + c.fn + c.tn + c.fp == len(table.records)
        assert len(cell.per_fold) == 4

    def test_fold_scores_reproducible_from_train_only(self):
        # No leakage: the fold-0 scores equal those of a model fitted on the
        # training rows alone, and perturbing the held-out rows does not
        # change that model's behaviour on other inputs.
        tables, alarms = _toy_tables(seed=3)
        table = tables["A"]
        meta = [(alarms[r], int(l)) for r, l in zip(table.records, table.y)]
        folds = stratified_folds(meta, 4, seed=2)
        cell = run_cell(table, folds, "A", "BoostedTrees", seed=2, rounds=5)

        test = np.flatnonzero(folds == 0)
        train = np.flatnonzero(folds != 0)
        model = fit_adaboost(table.X[train], table.y[train], rounds=5)
        pred = np.where(model.score_batch(table.X[test]) >= 0, 1, -1)
        fold0 = next(f for f in cell.per_fold if f["fold"] == 0)
        assert fold0["accuracy"] == confusion_metrics(table.y[test], pred).accuracy
        # normalization comes from training rows only
        np.testing.assert_array_equal(model.col_min, table.X[train].min(axis=0))
        np.testing.assert_array_equal(model.col_max, table.X[train].max(axis=0))
        perturbed = table.X.copy()
        perturbed[test] *= 100.0
        model2 = fit_adaboost(perturbed[train], table.y[train], rounds=5)
        np.testing.assert_array_equal(model.col_min, model2.col_min)
        np.testing.assert_array_equal(model.col_max, model2.col_max)


class TestRunMatrix:
    def test_report_structure_and_determinism(self):
        tables, alarms = _toy_tables(seed=5)
        kwargs = dict(
            scenarios=("A", "B"),
            classifiers=("BoostedTrees", "RUSBoostedTrees"),
            folds=4,
            seed=7,
            rounds=4,
        )
        r1 = run_matrix(tables, alarms, **kwargs)
        r2 = run_matrix(tables, alarms, **kwargs)
        assert r1 == r2
        assert set(r1["cells"]) == {
            "A/BoostedTrees", "A/RUSBoostedTrees",
            "B/BoostedTrees", "B/RUSBoostedTrees",
        }
        for cell in r1["cells"].values():
            for metric in ("accuracy", "sensitivity", "specificity", "auc"):
                assert 0.0 <= cell[metric] <= 1.0

    def test_missing_scenario_raises(self):
        tables, alarms = _toy_tables()
        with pytest.raises(MissingInput):
            run_matrix(tables, alarms, scenarios=("A", "C"), folds=4, seed=0, rounds=2)

    def test_scenario_dimension_check(self):
        tables, alarms = _toy_tables(dim_a=30)
        tables["HLF_cityblock"] = tables.pop("A")  # wrong width: 30 != 31
        with pytest.raises(ConfigError):
            run_matrix(
                tables, alarms, scenarios=("HLF_cityblock",), folds=4, seed=0, rounds=2
            )

    def test_combine_tables_dims(self):
        tables, _ = _toy_tables(dim_a=120, dim_b=31)
        combined = combine_tables(tables["A"], tables["B"])
        assert combined.X.shape[1] == SCENARIO_DIMS["DWT+HLF_cityblock"]

    def test_markdown_render(self):
        tables, alarms = _toy_tables(seed=8)
        report = run_matrix(
            tables, alarms, scenarios=("A",), classifiers=("BoostedTrees",),
            folds=4, seed=1, rounds=3,
        )
        text = render_markdown(report)
        assert "## BoostedTrees" in text
        assert "| Accuracy |" in text
