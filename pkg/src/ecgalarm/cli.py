"""Command-line pipeline: ingest -> featurize -> evaluate -> report.

Configuration comes from (lowest to highest precedence) built-in defaults,
a JSON config file (--config), ECGALARM_* environment variables, and CLI
flags. All intermediate products are flat CSVs under the output directory;
a single seed drives fold shuffling, k-means init, and RUSBoost sampling,
so identical configs produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import json
import multiprocessing
import os
import sys
from pathlib import Path

import numpy as np

from . import record_io
from .dwt import DEFAULT_LEVELS, DWT_LAYOUT_VERSION, N_BAND_STATS, STAT_NAMES
from .evaluation import (
    CLASSIFIERS,
    SCENARIOS,
    combine_tables,
    render_markdown,
    run_matrix,
)
from .exceptions import ConfigError, EcgAlarmError, EmptyDataset, MissingInput
from .feature_synthesis import HLF_LAYOUT_VERSION, HLF_LENGTH
from .pipeline import _featurize_task
from .record_io import ALARM_TYPES, TARGET_FS
from .segment_features import LLF_LENGTH
from .tables import (
    read_feature_csv,
    read_manifest,
    write_feature_csv,
    write_manifest,
)

ENV_PREFIX = "ECGALARM_"

DEFAULTS = {
    "data_dir": None,
    "labels": None,
    "out": "out",
    "seed": 0,
    "k": 5,
    "folds": 5,
    "scenarios": ",".join(SCENARIOS),
    "workers": 1,
    "cache": "reuse",
    "rounds": 30,
    "learning_rate": 0.1,
    "max_splits": 20,
    "target_ratio": 1.0,
}

_INT_KEYS = {"seed", "k", "folds", "workers", "rounds", "max_splits"}
_FLOAT_KEYS = {"learning_rate", "target_ratio"}


def resolve_config(args: argparse.Namespace) -> dict:
    """defaults < config file < environment < CLI flags."""
    cfg = dict(DEFAULTS)
    if args.config:
        cfg.update(json.loads(Path(args.config).read_text()))
    for key in DEFAULTS:
        env = os.environ.get(ENV_PREFIX + key.upper())
        if env is not None:
            cfg[key] = env
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    for key in _INT_KEYS:
        cfg[key] = int(cfg[key])
    for key in _FLOAT_KEYS:
        cfg[key] = float(cfg[key])
    if isinstance(cfg["scenarios"], str):
        cfg["scenarios"] = [s.strip() for s in cfg["scenarios"].split(",") if s.strip()]
    return cfg


def _out_dir(cfg: dict) -> Path:
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_ingest(cfg: dict) -> int:
    if not cfg["data_dir"] or not cfg["labels"]:
        raise MissingInput("ingest needs --data-dir and --labels")
    out = _out_dir(cfg)
    cache_dir = out / "cache"
    cache_dir.mkdir(exist_ok=True)
    manifest_path = out / "manifest.csv"

    if cfg["cache"] == "reuse" and manifest_path.exists():
        rows = read_manifest(manifest_path)
        usable = [r for r in rows if not r["skipped_reason"]]
        if all((cache_dir / f"{r['record']}.npy").exists() for r in usable):
            _print_counts(rows)
            return 0

    labels = record_io.load_labels(cfg["labels"])
    paths = record_io.discover_records(cfg["data_dir"])
    rows = []
    for path in paths:
        row = {"record": path.stem, "alarm_type": "", "label": "",
               "n_samples": 0, "skipped_reason": ""}
        try:
            record = record_io.load_any(path, labels)
            if record is None:
                header = record_io.parse_header(path.read_text())
                row["record"] = header.record_name
                row["alarm_type"] = record_io.alarm_type_from_header(header) or ""
                row["n_samples"] = header.n_samples
                row["skipped_reason"] = "no_lead_II"
            else:
                if record.sampling_rate != TARGET_FS:
                    record.samples = record_io.resample_to(
                        record.samples, record.sampling_rate, TARGET_FS
                    )
                    record.sampling_rate = TARGET_FS
                if len(record.samples) > record_io.ANALYSIS_SAMPLES:
                    record.samples = record.samples[: record_io.ANALYSIS_SAMPLES]
                row["record"] = record.record_name
                row["alarm_type"] = record.alarm_type
                row["label"] = "true" if record.label == record_io.TRUE_ALARM else "false"
                row["n_samples"] = len(record.samples)
                np.save(cache_dir / f"{record.record_name}.npy", record.samples)
        except (EcgAlarmError, OSError, ValueError) as exc:
            row["skipped_reason"] = type(exc).__name__
        rows.append(row)

    if not any(not r["skipped_reason"] for r in rows):
        raise EmptyDataset(f"no usable records in {cfg['data_dir']}")
    write_manifest(manifest_path, rows)
    _print_counts(rows)
    return 0


def _print_counts(rows: list[dict]) -> None:
    usable = [r for r in rows if not r["skipped_reason"]]
    print(f"usable records: {len(usable)}   skipped: {len(rows) - len(usable)}")
    for alarm in ALARM_TYPES:
        members = [r for r in usable if r["alarm_type"] == alarm]
        n_true = sum(1 for r in members if r["label"] == "true")
        print(f"  {alarm}: {len(members)} patients, {len(members) - n_true} false, {n_true} true")


def _feature_columns() -> dict[str, list[str]]:
    dwt_cols = [f"d{level}_f{i}" for level in range(1, DEFAULT_LEVELS + 1)
                for i in range(1, N_BAND_STATS + 1)]
    return {
        "llf": [f"f{i}" for i in range(1, LLF_LENGTH + 1)],
        "hlf": [f"f{i}" for i in range(1, HLF_LENGTH + 1)],
        "dwt": dwt_cols,
    }


def cmd_featurize(cfg: dict) -> int:
    out = _out_dir(cfg)
    manifest = read_manifest(out / "manifest.csv")
    cache_dir = out / "cache"
    usable = sorted(
        (r for r in manifest if not r["skipped_reason"]), key=lambda r: r["record"]
    )

    tasks = [
        (
            r["record"],
            str(cache_dir / f"{r['record']}.npy"),
            TARGET_FS,
            r["alarm_type"],
            record_io.TRUE_ALARM if r["label"] == "true" else record_io.FALSE_ALARM,
            cfg["k"],
            cfg["seed"],
        )
        for r in usable
    ]

    if cfg["workers"] > 1:
        with multiprocessing.Pool(cfg["workers"]) as pool:
            results = pool.map(_featurize_task, tasks)
    else:
        results = [_featurize_task(t) for t in tasks]

    done = []
    for name, feats, error in results:
        if feats is None:
            print(f"featurize failed for {name}: {error}", file=sys.stderr)
        else:
            done.append(feats)

    cols = _feature_columns()
    records = [f.record_name for f in done]
    labels = [f.label for f in done]
    write_feature_csv(out / "llf.csv", records, labels,
                      np.array([f.llf for f in done]), cols["llf"])
    write_feature_csv(out / "hlf_cityblock.csv", records, labels,
                      np.array([f.hlf_cityblock for f in done]), cols["hlf"],
                      comment=f"layout={HLF_LAYOUT_VERSION} metric=cityblock")
    write_feature_csv(out / "hlf_euclidean.csv", records, labels,
                      np.array([f.hlf_euclidean for f in done]), cols["hlf"],
                      comment=f"layout={HLF_LAYOUT_VERSION} metric=sqeuclidean")
    write_feature_csv(out / "dwt.csv", records, labels,
                      np.array([f.dwt for f in done]), cols["dwt"],
                      comment=f"layout={DWT_LAYOUT_VERSION} stats={','.join(STAT_NAMES)}")
    print(f"featurized {len(done)} records -> {out}")
    return 0


_SCENARIO_FILES = {
    "LLF": "llf.csv",
    "DWT": "dwt.csv",
    "HLF_cityblock": "hlf_cityblock.csv",
    "HLF_euclidean": "hlf_euclidean.csv",
}


def _load_tables(out: Path, scenarios: list[str]) -> dict:
    unknown = set(scenarios) - set(SCENARIOS)
    if unknown:
        raise ConfigError(f"unknown scenarios: {sorted(unknown)} (choose from {list(SCENARIOS)})")
    base_needed = set()
    for scenario in scenarios:
        if scenario.startswith("DWT+"):
            base_needed.add("DWT")
            base_needed.add(scenario.split("+", 1)[1])
        else:
            base_needed.add(scenario)
    base = {name: read_feature_csv(out / _SCENARIO_FILES[name]) for name in base_needed}
    tables = {}
    for scenario in scenarios:
        if scenario.startswith("DWT+"):
            tables[scenario] = combine_tables(base["DWT"], base[scenario.split("+", 1)[1]])
        else:
            tables[scenario] = base[scenario]
    return tables


def _safe_name(text: str) -> str:
    return text.replace("+", "-")


def cmd_evaluate(cfg: dict) -> int:
    out = _out_dir(cfg)
    manifest = read_manifest(out / "manifest.csv")
    alarm_types = {r["record"]: r["alarm_type"] for r in manifest}
    scenarios = tuple(cfg["scenarios"])
    tables = _load_tables(out, list(scenarios))

    report = run_matrix(
        tables,
        alarm_types,
        scenarios=scenarios,
        classifiers=CLASSIFIERS,
        folds=cfg["folds"],
        seed=cfg["seed"],
        rounds=cfg["rounds"],
        learning_rate=cfg["learning_rate"],
        max_splits=cfg["max_splits"],
        target_ratio=cfg["target_ratio"],
    )

    (out / "report.json").write_text(json.dumps(report, sort_keys=True, indent=1) + "\n")
    (out / "report.md").write_text(render_markdown(report))
    roc_dir = out / "roc"
    roc_dir.mkdir(exist_ok=True)
    for key, cell in report["cells"].items():
        scenario, classifier = key.split("/")
        path = roc_dir / f"roc_{_safe_name(scenario)}_{classifier}.csv"
        with open(path, "w", newline="") as fh:
            fh.write("fpr,tpr,threshold\n")
            for fpr, tpr, thr in cell["roc_points"]:
                fh.write(f"{fpr!r},{tpr!r},{thr!r}\n")
    print(render_markdown(report))
    return 0


def cmd_report(cfg: dict) -> int:
    out = _out_dir(cfg)
    path = out / "report.json"
    if not path.exists():
        raise MissingInput(f"no report at {path} (run evaluate first)")
    report = json.loads(path.read_text())
    markdown = render_markdown(report)
    (out / "report.md").write_text(markdown)
    print(markdown)
    return 0


def cmd_all(cfg: dict) -> int:
    cmd_ingest(cfg)
    cmd_featurize(cfg)
    return cmd_evaluate(cfg)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ecgalarm",
        description="ECG false-alarm classification pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("ingest", "parse records, attach labels, cache signals"),
        ("featurize", "compute LLF/HLF/DWT feature CSVs"),
        ("evaluate", "cross-validated experiment matrix and reports"),
        ("report", "re-render report.md from report.json"),
        ("all", "ingest + featurize + evaluate"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--data-dir", dest="data_dir", help="directory of .hea/.mat or fixture CSVs")
        p.add_argument("--labels", help="labels CSV (record,label)")
        p.add_argument("--out", help="output directory")
        p.add_argument("--seed", type=int)
        p.add_argument("--k", type=int, help="clusters per patient")
        p.add_argument("--folds", type=int)
        p.add_argument("--scenarios", help="comma-separated scenario list")
        p.add_argument("--workers", type=int)
        p.add_argument("--cache", choices=["reuse", "rebuild"])
    return parser


COMMANDS = {
    "ingest": cmd_ingest,
    "featurize": cmd_featurize,
    "evaluate": cmd_evaluate,
    "report": cmd_report,
    "all": cmd_all,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = resolve_config(args)
    try:
        return COMMANDS[args.command](cfg)
    except (EcgAlarmError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
