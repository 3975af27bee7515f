"""Seeded execution, result files and export.

A run writes into ``<out>/<experiment>-<seed>/``:

``summary.json``
    ``experiment, level, seed, config_hash, params, metrics, checks, passed, series``
    with sorted keys; no timing, so reruns are byte-identical.
``timing.json``
    ``{"wall_clock_s": ...}``, kept apart from the summary.
``<series>.csv``
    one file per time series, header first.

``export_results`` gathers every ``summary.json`` below a directory into
``results.json`` (a list sorted by experiment then seed) or ``results.csv``
with the columns in ``RESULTS_CSV_HEADER``: one row per metric or check.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import ExperimentConfig
from .registry import get_experiment

SUMMARY_KEYS = ("checks", "config_hash", "experiment", "level", "metrics", "params", "passed", "seed", "series")
RESULTS_CSV_HEADER = ("experiment", "seed", "level", "config_hash", "passed", "kind", "name", "value")


@dataclass
class RunResult:
    experiment: str
    config_hash: str
    metrics: dict
    series: list[str]
    checks: dict
    wall_clock: float
    run_dir: Path

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


def _clean(value):
    """JSON-safe plain Python values; non-finite floats become strings."""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return v if math.isfinite(v) else repr(v)
    return value


def dumps(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=2) + "\n"


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_clean(v) for v in row])
    return buf.getvalue()


def execute(cfg: ExperimentConfig) -> tuple[dict, dict, float]:
    """Run without touching the disk: (summary, series texts, seconds)."""
    exp = get_experiment(cfg.experiment)
    start = time.perf_counter()
    outcome = exp.body(cfg.params, cfg.seed)
    elapsed = time.perf_counter() - start
    series = {f"{name}.csv": _csv_text(header, rows) for name, (header, rows) in sorted(outcome.series.items())}
    checks = {k: bool(v) for k, v in sorted(outcome.checks.items())}
    summary = {
        "experiment": cfg.experiment, "level": exp.level, "seed": cfg.seed, "config_hash": cfg.config_hash(),
        "params": cfg.params, "metrics": outcome.metrics, "checks": checks,
        "passed": all(checks.values()), "series": sorted(series),
    }
    return _clean(summary), series, elapsed


def run_experiment(cfg: ExperimentConfig) -> RunResult:
    summary, series, elapsed = execute(cfg)
    run_dir = cfg.run_dir
    run_dir.mkdir(parents=True, exist_ok=True)
    (run_dir / "summary.json").write_text(dumps(summary))
    (run_dir / "timing.json").write_text(dumps({"wall_clock_s": elapsed}))
    for name, text in series.items():
        (run_dir / name).write_text(text)
    return RunResult(cfg.experiment, summary["config_hash"], summary["metrics"], summary["series"],
                     summary["checks"], elapsed, run_dir)


def summary_text(cfg: ExperimentConfig) -> str:
    """Serialized summary, computed in-process (used for determinism checks)."""
    return dumps(execute(cfg)[0])


def run_many(configs: list[ExperimentConfig], workers: int = 1) -> list[str]:
    """Summaries for several configs, optionally in a process pool; order follows ``configs``."""
    if workers <= 1:
        return [summary_text(c) for c in configs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(summary_text, configs))


def _summaries(run_dir: Path) -> list[dict]:
    found = [json.loads(p.read_text()) for p in sorted(run_dir.rglob("summary.json"))]
    return sorted(found, key=lambda s: (s["experiment"], s["seed"]))


def export_results(run_dir, fmt: str = "json") -> Path:
    """Collect run summaries below ``run_dir`` into ``results.json`` or ``results.csv``."""
    run_dir = Path(run_dir)
    if not run_dir.is_dir():
        raise FileNotFoundError(f"run directory {run_dir} does not exist")
    if fmt not in ("json", "csv"):
        raise ValueError("format must be json or csv")
    summaries = _summaries(run_dir)
    if fmt == "json":
        target = run_dir / "results.json"
        target.write_text(dumps(summaries))
        return target
    rows = []
    for s in summaries:
        head = (s["experiment"], s["seed"], s["level"], s["config_hash"], json.dumps(s["passed"]))
        rows += [(*head, "metric", k, json.dumps(v)) for k, v in sorted(s["metrics"].items())]
        rows += [(*head, "check", k, json.dumps(v)) for k, v in sorted(s["checks"].items())]
    target = run_dir / "results.csv"
    target.write_text(_csv_text(RESULTS_CSV_HEADER, rows))
    return target
