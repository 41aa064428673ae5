"""Per-patient k-means over segment features, cityblock or squared-Euclidean.

Lloyd iteration with k-means++ seeding. The update step matches the metric:
per-dimension mean for squared Euclidean, per-dimension median for cityblock
(the median minimizes within-cluster L1 cost). Empty clusters are repaired
by splitting off the point currently farthest from its centroid, which keeps
k constant and never increases the objective.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DimensionError, EmptyInput

METRICS = ("cityblock", "sqeuclidean")
DEFAULT_K = 5
MAX_ITER = 300


@dataclass
class Clustering:
    k: int
    metric: str
    centroids: np.ndarray  # k x d
    assignments: np.ndarray  # n
    sizes: np.ndarray  # k
    seed: int
    objective_trace: list[float] = field(default_factory=list)

    @property
    def objective(self) -> float:
        return self.objective_trace[-1]


def distance(a: np.ndarray, b: np.ndarray, metric: str) -> float:
    """Point-to-point distance under the clustering metric."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    if metric == "cityblock":
        return float(np.sum(np.abs(a - b)))
    if metric == "sqeuclidean":
        return float(np.sum((a - b) ** 2))
    raise ValueError(f"unknown metric {metric!r}")


def _costs_to_centroids(X: np.ndarray, centroids: np.ndarray, metric: str) -> np.ndarray:
    """(n, k) matrix of point costs under the metric."""
    diff = X[:, None, :] - centroids[None, :, :]
    if metric == "cityblock":
        return np.sum(np.abs(diff), axis=2)
    return np.sum(diff**2, axis=2)


def _plusplus_init(X: np.ndarray, k: int, metric: str, rng: np.random.Generator) -> np.ndarray:
    """k-means++ seeding; selection weights follow the metric's point cost."""
    n = len(X)
    chosen = [int(rng.integers(n))]
    cost = _costs_to_centroids(X, X[chosen[-1:]], metric)[:, 0]
    while len(chosen) < k:
        total = cost.sum()
        if total <= 0:
            remaining = np.setdiff1d(np.arange(n), np.array(chosen))
            chosen.append(int(rng.choice(remaining)))
        else:
            chosen.append(int(rng.choice(n, p=cost / total)))
        new_cost = _costs_to_centroids(X, X[chosen[-1:]], metric)[:, 0]
        cost = np.minimum(cost, new_cost)
    return X[np.array(chosen)].copy()


def _update_centroid(points: np.ndarray, metric: str) -> np.ndarray:
    if metric == "cityblock":
        return np.median(points, axis=0)
    return np.mean(points, axis=0)


def _lloyd(X: np.ndarray, k: int, metric: str, rng: np.random.Generator):
    centroids = _plusplus_init(X, k, metric, rng)
    prev_assign = None
    trace: list[float] = []
    for _ in range(MAX_ITER):
        costs = _costs_to_centroids(X, centroids, metric)
        assign = np.argmin(costs, axis=1)

        # Empty-cluster repair: split off the farthest point as a singleton.
        for empty in np.flatnonzero(np.bincount(assign, minlength=k) == 0):
            point_cost = costs[np.arange(len(X)), assign]
            donors = np.bincount(assign, minlength=k) > 1
            candidates = np.flatnonzero(donors[assign])
            far = candidates[int(np.argmax(point_cost[candidates]))]
            assign[far] = empty
            costs[far, empty] = 0.0

        for c in range(k):
            members = X[assign == c]
            if len(members):
                centroids[c] = _update_centroid(members, metric)

        obj = float(
            _costs_to_centroids(X, centroids, metric)[np.arange(len(X)), assign].sum()
        )
        trace.append(obj)
        if prev_assign is not None and np.array_equal(assign, prev_assign):
            break
        prev_assign = assign
    sizes = np.bincount(assign, minlength=k)
    return centroids, assign, sizes, trace


def kmeans(
    matrix: np.ndarray,
    k: int = DEFAULT_K,
    metric: str = "cityblock",
    seed: int = 0,
    restarts: int = 1,
) -> Clustering:
    """Cluster the rows of `matrix`; deterministic for a fixed seed.

    With fewer rows than clusters the effective k drops to the row count.
    `restarts` runs independently seeded Lloyd passes and keeps the best
    objective (first wins ties).
    """
    X = np.asarray(matrix, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if len(X) == 0:
        raise EmptyInput("kmeans needs at least one row")
    if metric not in METRICS:
        raise ValueError(f"metric must be one of {METRICS}, got {metric!r}")
    if k < 1:
        raise ValueError("k must be >= 1")
    k_eff = min(k, len(X))

    best = None
    for r in range(restarts):
        rng = np.random.default_rng([seed & 0xFFFFFFFF, r])
        centroids, assign, sizes, trace = _lloyd(X, k_eff, metric, rng)
        if best is None or trace[-1] < best[3][-1]:
            best = (centroids, assign, sizes, trace)

    centroids, assign, sizes, trace = best
    return Clustering(
        k=k_eff,
        metric=metric,
        centroids=centroids,
        assignments=assign,
        sizes=sizes,
        seed=seed,
        objective_trace=trace,
    )


def record_seed(global_seed: int, record_name: str) -> int:
    """Per-record clustering seed: stable hash of the name XOR the global seed."""
    return (global_seed ^ zlib.crc32(record_name.encode("utf-8"))) & 0xFFFFFFFF


def dump_clustering_csv(clustering: Clustering, path) -> None:
    """Debug dump: one row per centroid, then a sizes line."""
    with open(path, "w", newline="") as fh:
        for centroid in clustering.centroids:
            fh.write(",".join(repr(float(v)) for v in centroid) + "\n")
        fh.write("sizes," + ",".join(str(int(s)) for s in clustering.sizes) + "\n")
