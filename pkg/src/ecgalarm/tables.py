"""Flat-CSV interchange for per-record feature tables and the manifest.

Every intermediate product is a header-row CSV so runs can be inspected and
diffed; floats are written with repr so a re-read is bit-exact and repeated
runs are byte-identical.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .evaluation import FeatureTable
from .exceptions import MissingInput
from .record_io import FALSE_ALARM, TRUE_ALARM


def _label_str(label: int) -> str:
    return "true" if label == TRUE_ALARM else "false"


def _label_int(text: str) -> int:
    return TRUE_ALARM if text.strip().lower() == "true" else FALSE_ALARM


def write_feature_csv(
    path: str | Path,
    records: list[str],
    labels: list[int],
    matrix: np.ndarray,
    columns: list[str],
    comment: str | None = None,
) -> None:
    with open(path, "w", newline="") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["record", "label"] + list(columns))
        for name, label, row in zip(records, labels, matrix):
            writer.writerow([name, _label_str(label)] + [repr(float(v)) for v in row])


def read_feature_csv(path: str | Path) -> FeatureTable:
    path = Path(path)
    if not path.exists():
        raise MissingInput(f"feature CSV not found: {path}")
    records: list[str] = []
    labels: list[int] = []
    rows: list[list[float]] = []
    with open(path, newline="") as fh:
        lines = (ln for ln in fh if not ln.startswith("#"))
        for row in csv.DictReader(lines):
            records.append(row["record"])
            labels.append(_label_int(row["label"]))
            rows.append(
                [float(row[c]) for c in row if c not in ("record", "label")]
            )
    return FeatureTable(records, np.asarray(labels, dtype=int), np.asarray(rows))


MANIFEST_COLUMNS = ("record", "alarm_type", "label", "n_samples", "skipped_reason")


def write_manifest(path: str | Path, rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=MANIFEST_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in sorted(rows, key=lambda r: r["record"]):
            writer.writerow(row)


def read_manifest(path: str | Path) -> list[dict]:
    path = Path(path)
    if not path.exists():
        raise MissingInput(f"manifest not found: {path} (run ingest first)")
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
