"""Shallow CART trees boosted with AdaBoost.M1 and RUSBoost, from scratch.

Trees grow best-first on weighted Gini decrease up to a split budget, with
thresholds at midpoints of adjacent observed values (ties resolved toward
the lowest feature index, then the lowest threshold, so fits are fully
deterministic). The ensembles store per-column min-max normalization fitted
on their training data and apply it internally when scoring. Defaults follow
the common "Boosted Trees" / "RUSBoosted Trees" presets: 30 rounds, learning
rate 0.1, 20 splits, 1:1 resampling.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .exceptions import DimensionError, SingleClassError

DEFAULT_ROUNDS = 30
DEFAULT_LEARNING_RATE = 0.1
DEFAULT_MAX_SPLITS = 20
DEFAULT_TARGET_RATIO = 1.0
_EPS_PERFECT = 1e-10  # stand-in error when a round classifies perfectly

MODEL_FORMAT_VERSION = "ensemble-v1"


def _gini_mass(w_pos: np.ndarray, w_neg: np.ndarray) -> np.ndarray:
    """Weighted Gini impurity times node weight: 2*p*n/(p+n), 0 when empty."""
    total = w_pos + w_neg
    out = np.zeros_like(total)
    nz = total > 0
    out[nz] = 2.0 * w_pos[nz] * w_neg[nz] / total[nz]
    return out


def _best_split(X: np.ndarray, w_pos: np.ndarray, w_neg: np.ndarray, rows: np.ndarray):
    """Best (gain, feature, threshold) over a node's rows; None if no split helps."""
    Xs = X[rows]
    wp = w_pos[rows]
    wn = w_neg[rows]
    parent = _gini_mass(np.array([wp.sum()]), np.array([wn.sum()]))[0]
    if parent <= 0 or len(rows) < 2:
        return None

    order = np.argsort(Xs, axis=0, kind="stable")
    sorted_vals = np.take_along_axis(Xs, order, axis=0)
    cum_p = np.cumsum(wp[order], axis=0)
    cum_n = np.cumsum(wn[order], axis=0)

    left_p = cum_p[:-1]
    left_n = cum_n[:-1]
    right_p = cum_p[-1] - left_p
    right_n = cum_n[-1] - left_n
    gains = parent - _gini_mass(left_p, left_n) - _gini_mass(right_p, right_n)
    gains[sorted_vals[:-1] == sorted_vals[1:]] = -np.inf  # ties can't split

    # Gini gain is never negative, so any valid threshold is splittable;
    # zero-gain splits are allowed (an impure node may need two levels, as
    # with XOR patterns) and the budget bounds growth.
    best = None
    for f in range(Xs.shape[1]):
        col = gains[:, f]
        i = int(np.argmax(col))  # first (lowest threshold) among equals
        if col[i] == -np.inf:
            continue
        if best is None or col[i] > best[0]:
            thr = 0.5 * (sorted_vals[i, f] + sorted_vals[i + 1, f])
            best = (float(col[i]), f, float(thr))
    return best


@dataclass
class DecisionTree:
    """Flat-array binary CART tree; feature -1 marks a leaf."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    leaf_w_neg: np.ndarray
    leaf_w_pos: np.ndarray

    def predict(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(len(X), dtype=int)
        while True:
            internal = self.feature[node] >= 0
            if not internal.any():
                break
            idx = np.flatnonzero(internal)
            f = self.feature[node[idx]]
            go_left = X[idx, f] <= self.threshold[node[idx]]
            node[idx] = np.where(go_left, self.left[node[idx]], self.right[node[idx]])
        return np.where(self.leaf_w_pos[node] >= self.leaf_w_neg[node], 1, -1)

    @property
    def n_splits(self) -> int:
        return int(np.sum(self.feature >= 0))


def fit_tree(
    X: np.ndarray, y: np.ndarray, w: np.ndarray, max_splits: int = DEFAULT_MAX_SPLITS
) -> DecisionTree:
    """Grow a tree best-first by weighted Gini decrease up to `max_splits`."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    w = np.asarray(w, dtype=np.float64)
    if w.sum() <= 0:
        raise ValueError("sample weights must sum to a positive value")
    w_pos = np.where(y > 0, w, 0.0)
    w_neg = np.where(y < 0, w, 0.0)

    feature = [-1]
    threshold = [0.0]
    left = [-1]
    right = [-1]
    node_rows = {0: np.arange(len(X))}
    # Candidate splits per leaf, refreshed as leaves appear.
    candidates = {0: _best_split(X, w_pos, w_neg, node_rows[0])}

    n_splits = 0
    while n_splits < max_splits:
        best_leaf = None
        for leaf in sorted(candidates):
            cand = candidates[leaf]
            if cand is None:
                continue
            if best_leaf is None or cand[0] > candidates[best_leaf][0]:
                best_leaf = leaf
        if best_leaf is None:
            break
        gain, f, thr = candidates.pop(best_leaf)
        rows = node_rows.pop(best_leaf)
        mask = X[rows, f] <= thr
        for child_rows in (rows[mask], rows[~mask]):
            child = len(feature)
            feature.append(-1)
            threshold.append(0.0)
            left.append(-1)
            right.append(-1)
            node_rows[child] = child_rows
            candidates[child] = _best_split(X, w_pos, w_neg, child_rows)
        feature[best_leaf] = f
        threshold[best_leaf] = thr
        left[best_leaf] = len(feature) - 2
        right[best_leaf] = len(feature) - 1
        n_splits += 1

    n_nodes = len(feature)
    leaf_w_pos = np.zeros(n_nodes)
    leaf_w_neg = np.zeros(n_nodes)
    for node, rows in node_rows.items():
        leaf_w_pos[node] = w_pos[rows].sum()
        leaf_w_neg[node] = w_neg[rows].sum()
    return DecisionTree(
        feature=np.asarray(feature, dtype=int),
        threshold=np.asarray(threshold, dtype=np.float64),
        left=np.asarray(left, dtype=int),
        right=np.asarray(right, dtype=int),
        leaf_w_neg=leaf_w_neg,
        leaf_w_pos=leaf_w_pos,
    )


@dataclass
class BoostedEnsemble:
    trees: list[DecisionTree]
    alphas: list[float]
    learning_rate: float
    algorithm: str  # "adaboost" or "rusboost"
    feature_layout_version: str
    col_min: np.ndarray
    col_max: np.ndarray
    hyperparameters: dict = field(default_factory=dict)

    def _normalize(self, X: np.ndarray) -> np.ndarray:
        scale = self.col_max - self.col_min
        scale = np.where(scale > 0, scale, 1.0)
        return (X - self.col_min) / scale

    def score(self, x: np.ndarray) -> float:
        return float(self.score_batch(np.asarray(x, dtype=np.float64).reshape(1, -1))[0])

    def score_batch(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.shape[1] != len(self.col_min):
            raise DimensionError(
                f"expected {len(self.col_min)} features, got {X.shape[1]}"
            )
        Xn = self._normalize(X)
        scores = np.zeros(len(X))
        for tree, alpha in zip(self.trees, self.alphas):
            scores += alpha * tree.predict(Xn)
        return scores

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.where(self.score_batch(X) >= 0, 1, -1)

    def save(self, path: str | Path) -> None:
        doc = {
            "format": MODEL_FORMAT_VERSION,
            "algorithm": self.algorithm,
            "learning_rate": self.learning_rate,
            "feature_layout_version": self.feature_layout_version,
            "hyperparameters": self.hyperparameters,
            "normalization": {
                "min": self.col_min.tolist(),
                "max": self.col_max.tolist(),
            },
            "alphas": list(self.alphas),
            "trees": [
                {
                    "feature": t.feature.tolist(),
                    "threshold": t.threshold.tolist(),
                    "left": t.left.tolist(),
                    "right": t.right.tolist(),
                    "leaf_w_neg": t.leaf_w_neg.tolist(),
                    "leaf_w_pos": t.leaf_w_pos.tolist(),
                }
                for t in self.trees
            ],
        }
        Path(path).write_text(json.dumps(doc, sort_keys=True, indent=1) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "BoostedEnsemble":
        doc = json.loads(Path(path).read_text())
        if doc.get("format") != MODEL_FORMAT_VERSION:
            raise ValueError(f"unknown model format {doc.get('format')!r}")
        trees = [
            DecisionTree(
                feature=np.asarray(t["feature"], dtype=int),
                threshold=np.asarray(t["threshold"], dtype=np.float64),
                left=np.asarray(t["left"], dtype=int),
                right=np.asarray(t["right"], dtype=int),
                leaf_w_neg=np.asarray(t["leaf_w_neg"], dtype=np.float64),
                leaf_w_pos=np.asarray(t["leaf_w_pos"], dtype=np.float64),
            )
            for t in doc["trees"]
        ]
        return cls(
            trees=trees,
            alphas=[float(a) for a in doc["alphas"]],
            learning_rate=float(doc["learning_rate"]),
            algorithm=doc["algorithm"],
            feature_layout_version=doc["feature_layout_version"],
            col_min=np.asarray(doc["normalization"]["min"], dtype=np.float64),
            col_max=np.asarray(doc["normalization"]["max"], dtype=np.float64),
            hyperparameters=doc["hyperparameters"],
        )


def _check_labels(y: np.ndarray) -> None:
    if len(np.unique(y)) < 2:
        raise SingleClassError("training labels contain a single class")


def _boost(
    X: np.ndarray,
    y: np.ndarray,
    rounds: int,
    learning_rate: float,
    max_splits: int,
    subset_fn,
    algorithm: str,
    feature_layout_version: str,
    hyperparameters: dict,
) -> BoostedEnsemble:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=int)
    _check_labels(y)

    col_min = X.min(axis=0)
    col_max = X.max(axis=0)
    scale = np.where(col_max - col_min > 0, col_max - col_min, 1.0)
    Xn = (X - col_min) / scale

    n = len(X)
    w = np.full(n, 1.0 / n)
    trees: list[DecisionTree] = []
    alphas: list[float] = []

    for t in range(rounds):
        rows = subset_fn(t, w)
        tree = fit_tree(Xn[rows], y[rows], w[rows] / w[rows].sum(), max_splits)
        pred = tree.predict(Xn)
        miss = pred != y
        eps = float(w[miss].sum())
        if eps >= 0.5:
            break  # discard this round
        if eps == 0.0:
            alphas.append(learning_rate * 0.5 * np.log((1 - _EPS_PERFECT) / _EPS_PERFECT))
            trees.append(tree)
            break
        alpha = learning_rate * 0.5 * np.log((1.0 - eps) / eps)
        trees.append(tree)
        alphas.append(alpha)
        w = w * np.exp(-alpha * y * pred)
        w = w / w.sum()

    return BoostedEnsemble(
        trees=trees,
        alphas=alphas,
        learning_rate=learning_rate,
        algorithm=algorithm,
        feature_layout_version=feature_layout_version,
        col_min=col_min,
        col_max=col_max,
        hyperparameters=hyperparameters,
    )


def fit_adaboost(
    X: np.ndarray,
    y: np.ndarray,
    rounds: int = DEFAULT_ROUNDS,
    learning_rate: float = DEFAULT_LEARNING_RATE,
    max_splits: int = DEFAULT_MAX_SPLITS,
    feature_layout_version: str = "",
) -> BoostedEnsemble:
    """AdaBoost.M1 with shallow CART weak learners."""
    n = len(X)
    all_rows = np.arange(n)
    return _boost(
        X, y, rounds, learning_rate, max_splits,
        subset_fn=lambda t, w: all_rows,
        algorithm="adaboost",
        feature_layout_version=feature_layout_version,
        hyperparameters={"rounds": rounds, "max_splits": max_splits},
    )


def fit_rusboost(
    X: np.ndarray,
    y: np.ndarray,
    rounds: int = DEFAULT_ROUNDS,
    learning_rate: float = DEFAULT_LEARNING_RATE,
    max_splits: int = DEFAULT_MAX_SPLITS,
    target_ratio: float = DEFAULT_TARGET_RATIO,
    seed: int = 0,
    feature_layout_version: str = "",
) -> BoostedEnsemble:
    """RUSBoost: each round trains on all minority plus a random majority
    subsample (minority:majority = target_ratio); errors and weight updates
    stay on the full weighted set."""
    y = np.asarray(y, dtype=int)
    _check_labels(y)
    pos = np.flatnonzero(y > 0)
    neg = np.flatnonzero(y < 0)
    minority, majority = (pos, neg) if len(pos) <= len(neg) else (neg, pos)
    n_keep = min(len(majority), int(round(len(minority) / target_ratio)))
    rng = np.random.default_rng(seed)

    def subset(t: int, w: np.ndarray) -> np.ndarray:
        sampled = rng.choice(majority, size=n_keep, replace=False)
        return np.sort(np.concatenate([minority, sampled]))

    return _boost(
        X, y, rounds, learning_rate, max_splits,
        subset_fn=subset,
        algorithm="rusboost",
        feature_layout_version=feature_layout_version,
        hyperparameters={
            "rounds": rounds,
            "max_splits": max_splits,
            "target_ratio": target_ratio,
            "seed": seed,
        },
    )
