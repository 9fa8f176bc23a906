"""Seeded experiments and CSV output.

Every row carries the schema version and (seed, case, mode) provenance.
Missing values are written as ``NA``.  Floats use ``repr`` so that equal
inputs give byte-identical files; the wall-clock column is the only
non-deterministic field and can be switched off.
"""
from __future__ import annotations

import csv
import io
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from . import admission, oracle
from .channel import generate_scenario
from .model import CASES, AdmissionResult, SystemConfig

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
NA = "NA"

TRACE_COLUMNS = ("schema", "seed", "case", "mode", "iter", "objective", "admitted_count", "max_violation")
SWEEP_COLUMNS = ("schema", "row", "axis", "value", "seed", "case", "mode", "status", "admitted_algo",
                 "admitted_oracle", "iterations", "final_objective", "runtime_ms", "error")
COMPARE_COLUMNS = ("schema", "row", "seed", "case", "mode", "status", "admitted_algo", "admitted_oracle",
                   "difference", "oracle_indeterminate", "runtime_ms", "mean_abs_diff", "frac_within_one",
                   "error")

AXES = {
    # axis name -> (config field, converter from grid units)
    "rtarget": ("target_rate", lambda v: float(v) * 1e6),      # Mbps
    "btotal": ("total_bandwidth", lambda v: float(v) * 1e6),   # MHz
    "jcount": ("num_urllc", lambda v: int(round(float(v)))),
}


class UrllcInfeasible(RuntimeError):
    """The URLLC requirements alone cannot be met for this scenario."""


def case_label(config: SystemConfig) -> str:
    if config.split_mode == "free":
        return "free"
    for case, frac in CASES.items():
        if abs(config.embb_fraction - frac) < 1e-12:
            return str(case)
    return f"custom:{config.embb_fraction!r}"


def mode_label(config: SystemConfig) -> str:
    if config.split_mode == "free":
        return "free"
    return "fixed-uniform" if config.uniform_urllc_bandwidth else "fixed"


def with_case(config: SystemConfig, case: int | None) -> SystemConfig:
    if case is None:
        return config
    if case not in CASES:
        raise ValueError(f"unknown case {case}; choose from {sorted(CASES)}")
    return config.replace(split_mode="fixed", embb_fraction=CASES[case])


def with_axis(config: SystemConfig, axis: str, value: float) -> SystemConfig:
    field, conv = AXES[axis]
    return config.replace(**{field: conv(value)})


def fmt(v: Any) -> str:
    if v is None:
        return NA
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(rows: Iterable[dict[str, Any]], columns: Sequence[str], out: io.TextIOBase) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(row.get(c)) for c in columns])


def csv_text(rows: Iterable[dict[str, Any]], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    write_csv(rows, columns, buf)
    return buf.getvalue()


def _provenance(config: SystemConfig, seed: int) -> dict[str, Any]:
    return {"schema": SCHEMA_VERSION, "seed": seed, "case": case_label(config), "mode": mode_label(config)}


# ---------------------------------------------------------------- run

def run_once(config: SystemConfig, seed: int) -> AdmissionResult:
    return admission.run(generate_scenario(config, seed), config)


def trace_rows(config: SystemConfig, seed: int, result: AdmissionResult) -> list[dict[str, Any]]:
    base = _provenance(config, seed)
    return [dict(base, iter=r.iteration, objective=r.objective, admitted_count=r.admitted_count,
                 max_violation=r.max_violation) for r in result.trace]


def cmd_run(config: SystemConfig, seed: int) -> tuple[AdmissionResult, list[dict[str, Any]]]:
    """One scenario; rows are the per-iteration trace."""
    res = run_once(config, seed)
    if res.status == "urllc_infeasible":
        raise UrllcInfeasible(f"seed {seed}: URLLC targets cannot be met within the budgets")
    return res, trace_rows(config, seed, res)


# ---------------------------------------------------------------- sweep

@dataclass(frozen=True)
class SeedTask:
    config: SystemConfig
    seed: int
    with_oracle: bool
    timing: bool


def evaluate_seed(task: SeedTask) -> dict[str, Any]:
    """Algorithm (and optionally oracle) on one seed; failures stay in the row."""
    cfg, seed = task.config, task.seed
    row: dict[str, Any] = _provenance(cfg, seed)
    try:
        t0 = time.perf_counter()
        scen = generate_scenario(cfg, seed)
        res = admission.run(scen, cfg)
        elapsed = (time.perf_counter() - t0) * 1e3
        row.update(status=res.status, admitted_algo=res.num_admitted, iterations=res.outer_iterations,
                   final_objective=res.objective_trace[-1] if res.objective_trace else None,
                   runtime_ms=elapsed if task.timing else None)
        if task.with_oracle:
            orc = oracle.exhaustive_max_admitted(scen, cfg)
            row.update(admitted_oracle=orc.size, oracle_indeterminate=orc.indeterminate)
    except Exception as exc:  # recorded in-row, never aborts the experiment
        logger.exception("seed %d failed", seed)
        row.update(status="error", error=f"{type(exc).__name__}: {exc}")
    return row


def map_tasks(fn: Callable[[SeedTask], dict[str, Any]], tasks: Sequence[SeedTask],
              workers: int = 1) -> list[dict[str, Any]]:
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


def _mean(rows: list[dict[str, Any]], key: str) -> float | None:
    vals = [r[key] for r in rows if r.get(key) is not None]
    return float(np.mean(vals)) if vals and len(vals) == len(rows) else None


def cmd_sweep(config: SystemConfig, axis: str, grid: Sequence[float], seeds: Sequence[int], *,
              with_oracle: bool = False, timing: bool = True, workers: int = 1) -> list[dict[str, Any]]:
    """Per (grid value, seed) rows followed by one mean row per grid value."""
    if axis not in AXES:
        raise ValueError(f"unknown axis {axis!r}; choose from {sorted(AXES)}")
    seeds = sorted(seeds)
    tasks = [SeedTask(with_axis(config, axis, v), s, with_oracle, timing) for v in grid for s in seeds]
    results = map_tasks(evaluate_seed, tasks, workers)
    out: list[dict[str, Any]] = []
    for i, v in enumerate(grid):
        block = results[i * len(seeds):(i + 1) * len(seeds)]
        for r in block:
            out.append(dict(r, row="seed", axis=axis, value=v))
        ok = [r for r in block if r["status"] != "error"]
        cfg_v = tasks[i * len(seeds)].config
        out.append({"schema": SCHEMA_VERSION, "row": "mean", "axis": axis, "value": v, "seed": None,
                    "case": case_label(cfg_v), "mode": mode_label(cfg_v),
                    "status": f"{len(ok)}/{len(block)} ok",
                    "admitted_algo": _mean(ok, "admitted_algo"),
                    "admitted_oracle": _mean(ok, "admitted_oracle") if with_oracle else None,
                    "iterations": _mean(ok, "iterations"),
                    "final_objective": _mean(ok, "final_objective"),
                    "runtime_ms": _mean(ok, "runtime_ms") if timing else None})
    return out


def mean_rows(rows: Iterable[dict[str, Any]], key: str = "admitted_algo") -> dict[float, float | None]:
    """Grid value -> mean column from the summary rows of a sweep."""
    return {r["value"]: r[key] for r in rows if r["row"] == "mean"}


# ---------------------------------------------------------------- oracle comparison

def comparison_config(config: SystemConfig) -> SystemConfig:
    """The shared resource model: fixed split with uniform URLLC bandwidths."""
    if config.split_mode != "fixed":
        raise ValueError("oracle comparison needs a fixed eMBB/URLLC split")
    if config.num_embb > oracle.MAX_ORACLE_USERS:
        raise ValueError(f"oracle comparison allows at most {oracle.MAX_ORACLE_USERS} eMBB users")
    return config.replace(uniform_urllc_bandwidth=True)


def cmd_oracle_compare(config: SystemConfig, seeds: Sequence[int], *, with_oracle: bool = True,
                       timing: bool = True, workers: int = 1) -> list[dict[str, Any]]:
    """Per-seed algorithm vs oracle counts plus one summary row."""
    cfg = comparison_config(config)
    seeds = sorted(seeds)
    results = map_tasks(evaluate_seed, [SeedTask(cfg, s, with_oracle, timing) for s in seeds], workers)
    out: list[dict[str, Any]] = []
    diffs: list[int] = []
    for r in results:
        row = dict(r, row="seed")
        if with_oracle and r["status"] != "error" and r.get("admitted_oracle") is not None:
            row["difference"] = r["admitted_algo"] - r["admitted_oracle"]
            if not r.get("oracle_indeterminate"):
                diffs.append(row["difference"])
        out.append(row)
    summary: dict[str, Any] = {"schema": SCHEMA_VERSION, "row": "summary", "seed": None,
                               "case": case_label(cfg), "mode": mode_label(cfg),
                               "status": f"{len(diffs)}/{len(results)} compared"}
    if diffs:
        d = np.abs(np.asarray(diffs))
        summary.update(mean_abs_diff=float(d.mean()), frac_within_one=float(np.mean(d <= 1)))
    out.append(summary)
    return out


def parse_seeds(text: str) -> list[int]:
    """``"3"``, ``"0..19"`` (inclusive) or a comma list of either."""
    seeds: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = (int(v) for v in part.split(".."))
            if hi < lo:
                raise ValueError(f"empty seed range {part!r}")
            seeds.extend(range(lo, hi + 1))
        elif part:
            seeds.append(int(part))
    if not seeds:
        raise ValueError("no seeds given")
    return sorted(set(seeds))


def parse_grid(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]
