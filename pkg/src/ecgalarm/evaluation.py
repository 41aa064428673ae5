"""Stratified cross-validation, classification metrics, and the experiment
matrix over the six feature scenarios and two boosting algorithms.

Folds are stratified on (alarm type x label). Metrics are pooled: every
record is scored exactly once by the model of the fold that held it out,
and accuracy / sensitivity / specificity / AUC are computed once over the
pooled predictions (per-fold breakdowns are also reported). The positive
class is the true alarm, so specificity reads as the fraction of false
alarms correctly suppressed.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .ensemble import (
    DEFAULT_LEARNING_RATE,
    DEFAULT_MAX_SPLITS,
    DEFAULT_ROUNDS,
    DEFAULT_TARGET_RATIO,
    fit_adaboost,
    fit_rusboost,
)
from .exceptions import ConfigError, EmptyInput, MissingInput, UndefinedAuc
from .record_io import TRUE_ALARM

SCENARIOS = (
    "LLF",
    "DWT",
    "HLF_cityblock",
    "HLF_euclidean",
    "DWT+HLF_cityblock",
    "DWT+HLF_euclidean",
)
CLASSIFIERS = ("BoostedTrees", "RUSBoostedTrees")
SCENARIO_DIMS = {
    "LLF": 588,
    "DWT": 120,
    "HLF_cityblock": 31,
    "HLF_euclidean": 31,
    "DWT+HLF_cityblock": 151,
    "DWT+HLF_euclidean": 151,
}
METRIC_ROWS = ("accuracy", "specificity", "sensitivity", "auc")


def stratified_folds(
    records: list[tuple[str, int]], k: int, seed: int = 0
) -> np.ndarray:
    """Fold index per record, stratified on (alarm_type, label).

    Each stratum is shuffled with the seeded generator and dealt round-robin,
    so per-stratum fold sizes differ by at most one.
    """
    n = len(records)
    if k < 2:
        raise ConfigError("need at least 2 folds")
    if k > n:
        raise ConfigError(f"cannot make {k} folds from {n} records")

    strata: dict[tuple[str, int], list[int]] = {}
    for i, (alarm, label) in enumerate(records):
        strata.setdefault((alarm, label), []).append(i)

    rng = np.random.default_rng(seed)
    folds = np.empty(n, dtype=int)
    offset = 0  # carries across strata so tiny strata still spread over folds
    for key in sorted(strata):
        members = np.array(strata[key])
        rng.shuffle(members)
        for pos, idx in enumerate(members):
            folds[idx] = (offset + pos) % k
        offset = (offset + len(members)) % k
    return folds


@dataclass
class ConfusionMetrics:
    tp: int
    fn: int
    tn: int
    fp: int

    @property
    def accuracy(self) -> float:
        return (self.tp + self.tn) / (self.tp + self.tn + self.fp + self.fn)

    @property
    def sensitivity(self) -> float:
        denom = self.tp + self.fn
        return self.tp / denom if denom else float("nan")

    @property
    def specificity(self) -> float:
        denom = self.tn + self.fp
        return self.tn / denom if denom else float("nan")


def confusion_metrics(y_true: np.ndarray, y_pred: np.ndarray) -> ConfusionMetrics:
    """Confusion counts and derived rates; positive class = true alarm."""
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if y_true.size == 0:
        raise EmptyInput("no predictions to score")
    if y_true.shape != y_pred.shape:
        raise ValueError("y_true and y_pred must have the same length")
    pos = y_true == TRUE_ALARM
    pred_pos = y_pred == TRUE_ALARM
    return ConfusionMetrics(
        tp=int(np.sum(pos & pred_pos)),
        fn=int(np.sum(pos & ~pred_pos)),
        tn=int(np.sum(~pos & ~pred_pos)),
        fp=int(np.sum(~pos & pred_pos)),
    )


def roc_auc(y_true: np.ndarray, scores: np.ndarray):
    """AUC + ROC points. Tied scores collapse into single ROC steps; the
    trapezoidal area is cross-checked against the normalized Mann-Whitney
    statistic and must agree to 1e-12."""
    y_true = np.asarray(y_true)
    scores = np.asarray(scores, dtype=np.float64)
    pos = y_true == TRUE_ALARM
    n_pos = int(pos.sum())
    n_neg = int(len(y_true) - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise UndefinedAuc("ROC needs both classes present")

    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    p = pos[order]

    points = [(0.0, 0.0, float("inf"))]
    tp = fp = 0
    i = 0
    while i < len(s):
        j = i
        while j < len(s) and s[j] == s[i]:
            j += 1
        tp += int(p[i:j].sum())
        fp += (j - i) - int(p[i:j].sum())
        points.append((fp / n_neg, tp / n_pos, float(s[i])))
        i = j

    auc_trap = 0.0
    for (x0, y0, _), (x1, y1, _) in zip(points[:-1], points[1:]):
        auc_trap += (x1 - x0) * (y1 + y0) / 2.0

    ranks = stats.rankdata(scores)  # midranks for ties
    u = ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0
    auc_mw = u / (n_pos * n_neg)
    if abs(auc_trap - auc_mw) > 1e-12:
        raise AssertionError(
            f"trapezoid AUC {auc_trap!r} disagrees with Mann-Whitney {auc_mw!r}"
        )
    return auc_trap, points


@dataclass
class FeatureTable:
    """Aligned per-record design matrix for one scenario."""

    records: list[str]
    y: np.ndarray  # +-1 labels
    X: np.ndarray


def combine_tables(left: FeatureTable, right: FeatureTable) -> FeatureTable:
    """Column-concatenate two scenarios (records must align)."""
    if left.records != right.records:
        raise MissingInput("feature tables cover different record sets")
    if not np.array_equal(left.y, right.y):
        raise MissingInput("feature tables disagree on labels")
    return FeatureTable(left.records, left.y, np.hstack([left.X, right.X]))


@dataclass
class CellResult:
    scenario: str
    classifier: str
    confusion: ConfusionMetrics
    auc: float
    roc_points: list[tuple[float, float, float]]
    per_fold: list[dict] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "classifier": self.classifier,
            "accuracy": self.confusion.accuracy,
            "sensitivity": self.confusion.sensitivity,
            "specificity": self.confusion.specificity,
            "auc": self.auc,
            "confusion": {
                "tp": self.confusion.tp,
                "fn": self.confusion.fn,
                "tn": self.confusion.tn,
                "fp": self.confusion.fp,
            },
            "per_fold": self.per_fold,
            "roc_points": [list(pt) for pt in self.roc_points],
        }


def _cell_seed(seed: int, scenario: str, classifier: str, fold: int) -> int:
    tag = f"{scenario}|{classifier}|{fold}"
    return (seed ^ zlib.crc32(tag.encode())) & 0xFFFFFFFF


def run_cell(
    table: FeatureTable,
    folds: np.ndarray,
    scenario: str,
    classifier: str,
    seed: int,
    rounds: int = DEFAULT_ROUNDS,
    learning_rate: float = DEFAULT_LEARNING_RATE,
    max_splits: int = DEFAULT_MAX_SPLITS,
    target_ratio: float = DEFAULT_TARGET_RATIO,
) -> CellResult:
    """Cross-validated evaluation of one (scenario, classifier) cell."""
    n = len(table.records)
    pooled_pred = np.zeros(n, dtype=int)
    pooled_score = np.zeros(n, dtype=np.float64)
    per_fold = []

    for fold in sorted(set(folds.tolist())):
        test = np.flatnonzero(folds == fold)
        train = np.flatnonzero(folds != fold)
        X_train, y_train = table.X[train], table.y[train]
        if classifier == "BoostedTrees":
            model = fit_adaboost(
                X_train, y_train, rounds, learning_rate, max_splits,
                feature_layout_version=scenario,
            )
        elif classifier == "RUSBoostedTrees":
            model = fit_rusboost(
                X_train, y_train, rounds, learning_rate, max_splits, target_ratio,
                seed=_cell_seed(seed, scenario, classifier, fold),
                feature_layout_version=scenario,
            )
        else:
            raise ConfigError(f"unknown classifier {classifier!r}")
        scores = model.score_batch(table.X[test])
        pooled_score[test] = scores
        pooled_pred[test] = np.where(scores >= 0, 1, -1)

        fold_conf = confusion_metrics(table.y[test], pooled_pred[test])
        per_fold.append(
            {
                "fold": int(fold),
                "n_test": int(len(test)),
                "accuracy": fold_conf.accuracy,
                "sensitivity": fold_conf.sensitivity,
                "specificity": fold_conf.specificity,
            }
        )

    confusion = confusion_metrics(table.y, pooled_pred)
    auc, points = roc_auc(table.y, pooled_score)
    return CellResult(scenario, classifier, confusion, auc, points, per_fold)


def run_matrix(
    tables: dict[str, FeatureTable],
    alarm_types: dict[str, str],
    scenarios: tuple[str, ...] = SCENARIOS,
    classifiers: tuple[str, ...] = CLASSIFIERS,
    folds: int = 5,
    seed: int = 0,
    **hyper,
) -> dict:
    """Evaluate every requested (scenario, classifier) cell on shared folds."""
    for scenario in scenarios:
        if scenario not in tables:
            raise MissingInput(f"no feature table for scenario {scenario!r}")
        got = tables[scenario].X.shape[1]
        want = SCENARIO_DIMS.get(scenario)
        if want is not None and got != want:
            raise ConfigError(f"{scenario}: expected {want} columns, got {got}")

    base = tables[scenarios[0]]
    for scenario in scenarios[1:]:
        if tables[scenario].records != base.records:
            raise MissingInput("scenario tables cover different record sets")

    meta = [(alarm_types[name], int(label)) for name, label in zip(base.records, base.y)]
    fold_of = stratified_folds(meta, folds, seed)

    cells = {}
    for scenario in scenarios:
        for classifier in classifiers:
            result = run_cell(
                tables[scenario], fold_of, scenario, classifier, seed, **hyper
            )
            cells[f"{scenario}/{classifier}"] = result

    return {
        "config": {
            "folds": folds,
            "seed": seed,
            "scenarios": list(scenarios),
            "classifiers": list(classifiers),
            "n_records": len(base.records),
            **hyper,
        },
        "cells": {key: cell.as_dict() for key, cell in cells.items()},
    }


def render_markdown(report: dict) -> str:
    """Markdown tables, one per classifier: metric rows x scenario columns."""
    scenarios = report["config"]["scenarios"]
    classifiers = report["config"]["classifiers"]
    lines = []
    for classifier in classifiers:
        lines.append(f"## {classifier}")
        lines.append("")
        lines.append("| Metric | " + " | ".join(scenarios) + " |")
        lines.append("|---" * (len(scenarios) + 1) + "|")
        for metric in METRIC_ROWS:
            row = [metric.capitalize()]
            for scenario in scenarios:
                cell = report["cells"].get(f"{scenario}/{classifier}")
                row.append("" if cell is None else f"{cell[metric]:.3f}")
            lines.append("| " + " | ".join(row) + " |")
        lines.append("")
    return "\n".join(lines)
