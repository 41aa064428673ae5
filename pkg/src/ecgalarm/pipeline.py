"""Per-record feature extraction: one record in, all four feature vectors out.

Kept separate from the CLI so worker processes can import it and tests can
drive the exact code path the commands use.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .clustering import DEFAULT_K, kmeans, record_seed
from .dwt import dwt_feature_vector
from .feature_synthesis import synthesize
from .segment_features import LLF_LENGTH, heart_rate, llf_tail, segment_features
from .segmentation import segment_record


@dataclass
class RecordFeatures:
    record_name: str
    label: int
    alarm_type: str
    n_beats: int
    heart_rate: float
    llf: np.ndarray  # 588
    hlf_cityblock: np.ndarray  # 31
    hlf_euclidean: np.ndarray  # 31
    dwt: np.ndarray  # 120


def featurize_record(
    record_name: str,
    samples: np.ndarray,
    fs: float,
    alarm_type: str,
    label: int,
    k_clusters: int = DEFAULT_K,
    seed: int = 0,
) -> RecordFeatures:
    """Run segmentation, clustering, and all feature banks for one record.

    Records where nothing can be delineated (flatline, too few beats) fall
    back to the documented sentinels: zero heart rate, zero LLF, and the
    padded high-level vector.
    """
    beats = segment_record(samples, fs, record_name)
    hr = heart_rate(beats, fs)

    if len(beats) > 0:
        matrix = segment_features(beats)
        llf = llf_tail(matrix).values
    else:
        matrix = None
        llf = np.zeros(LLF_LENGTH)

    hlf = {}
    for metric in ("cityblock", "sqeuclidean"):
        if matrix is not None and len(matrix.rows) > 0:
            clustering = kmeans(
                matrix.rows, k=k_clusters, metric=metric,
                seed=record_seed(seed, record_name),
            )
        else:
            clustering = None
        hlf[metric] = synthesize(clustering, hr, alarm_type)

    return RecordFeatures(
        record_name=record_name,
        label=label,
        alarm_type=alarm_type,
        n_beats=len(beats),
        heart_rate=hr,
        llf=llf,
        hlf_cityblock=hlf["cityblock"],
        hlf_euclidean=hlf["sqeuclidean"],
        dwt=dwt_feature_vector(samples),
    )


def _featurize_task(args) -> tuple[str, RecordFeatures | None, str]:
    """Pool-friendly wrapper: returns (record, features-or-None, error)."""
    record_name, cache_path, fs, alarm_type, label, k_clusters, seed = args
    try:
        samples = np.load(cache_path)
        feats = featurize_record(record_name, samples, fs, alarm_type, label, k_clusters, seed)
        return record_name, feats, ""
    except Exception as exc:  # per-record failures must not kill the batch
        return record_name, None, f"{type(exc).__name__}: {exc}"
