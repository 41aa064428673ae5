"""Patient-level high-level feature vector built from the segment clustering.

Fixed 31-entry layout:

    [0]      heart rate (bpm)
    [1:6]    alarm type one-hot (ASY, EBR, ETC, VTA, VFB)
    [6:11]   cluster sizes, ascending
    [11:16]  sum of normalized centroid entries / cluster size
    [16:21]  sum of normalized centroid entries / total segment count
    [21:31]  pairwise distances between normalized centroids, lexicographic
             pairs over the size-sorted clusters, under the clustering metric

Clusters are canonicalized by ascending size (ties: ascending normalized
centroid sum, then original index). Records with fewer than five clusters
pad the missing ones with zeros in every block.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .clustering import Clustering, distance
from .record_io import ALARM_TYPES

HLF_LENGTH = 31
HLF_CLUSTERS = 5
HLF_LAYOUT_VERSION = "hlf-v1"


@dataclass
class HlfVector:
    record_name: str
    values: np.ndarray  # 31
    label: int


def normalize_centroid(centroid: np.ndarray) -> np.ndarray:
    """Min-max scale a centroid's entries into [0, 1]; constant input -> zeros."""
    centroid = np.asarray(centroid, dtype=np.float64)
    lo = centroid.min()
    hi = centroid.max()
    if hi == lo:
        return np.zeros_like(centroid)
    return (centroid - lo) / (hi - lo)


def synthesize(
    clustering: Clustering | None,
    hr: float,
    alarm_type: str,
    n_clusters: int = HLF_CLUSTERS,
) -> np.ndarray:
    """Assemble the 31-entry high-level feature vector for one patient."""
    values = np.zeros(HLF_LENGTH, dtype=np.float64)
    values[0] = hr
    values[1 + ALARM_TYPES.index(alarm_type)] = 1.0

    if clustering is None or clustering.k == 0:
        return values
    if clustering.k > n_clusters:
        raise ValueError(
            f"vector layout holds {n_clusters} clusters, clustering has {clustering.k}"
        )

    normalized = np.array([normalize_centroid(c) for c in clustering.centroids])
    norm_sums = normalized.sum(axis=1)
    sizes = np.asarray(clustering.sizes, dtype=np.float64)

    # Ascending size; ties broken by normalized sum, then original index.
    order = np.lexsort((np.arange(clustering.k), norm_sums, sizes))
    sizes = sizes[order]
    norm_sums = norm_sums[order]
    normalized = normalized[order]

    total = sizes.sum()
    pad = n_clusters - clustering.k  # missing clusters sort first (size 0)

    values[6 + pad : 6 + n_clusters] = sizes
    values[11 + pad : 11 + n_clusters] = norm_sums / sizes
    values[16 + pad : 16 + n_clusters] = norm_sums / total

    for slot, (i, j) in enumerate(combinations(range(n_clusters), 2)):
        if i < pad or j < pad:
            continue
        values[21 + slot] = distance(
            normalized[i - pad], normalized[j - pad], clustering.metric
        )
    return values
