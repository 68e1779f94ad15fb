"""Simulation study: Gibbs vs AIC vs full AR(q) on held-out halves.

For each (model, innovation, n, replication) a series of length 2n is
simulated; all methods are fitted on the first n values and scored on the
last n. The AIC and full-model baselines use the Yule-Walker path by
default (``baseline="ols"`` switches to conditional least squares). Each
replication has its own seed derived from the master seed and the cell
key, so output does not depend on how work is scheduled.
"""
from __future__ import annotations

import csv
import io
import logging
import statistics
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass
from pathlib import Path

from .baselines import aic_select, aic_select_yw, ar_holdout_risk, ols_ar_fit, yule_walker_path
from .basis import make_basis
from .config import INNOVATION_KINDS, ExperimentConfig, make_sampler_config
from .core import holdout_risk
from .sampler import fit_gibbs, heuristic_lambda
from .simulate import STUDY_MODELS, model_spec, simulate, substream_seed

log = logging.getLogger(__name__)

METHODS = ("gibbs", "aic", "full")
MODEL_ORDER = tuple(STUDY_MODELS)
RESULT_COLUMNS = ("model", "innovation", "n", "rep", "method", "test_mse", "wall_ms", "seed")
SUMMARY_COLUMNS = ("model", "innovation", "n", "method", "mean_mse", "sd_mse")
TIMING_COLUMNS = ("model", "innovation", "n", "rep", "method", "wall_ms")


@dataclass(frozen=True)
class Task:
    model: str
    innovation: str
    n: int
    rep: int

    def sort_key(self):
        return (MODEL_ORDER.index(self.model), INNOVATION_KINDS.index(self.innovation), self.n, self.rep)

    def seed(self, master_seed: int) -> int:
        return substream_seed(master_seed, MODEL_ORDER.index(self.model),
                              INNOVATION_KINDS.index(self.innovation), self.n, self.rep)


def tasks(config: ExperimentConfig) -> list[Task]:
    out = [Task(m, i, n, r) for m in config.models for i in config.innovations
           for n in config.n_values for r in range(config.replications)]
    return sorted(out, key=Task.sort_key)


def run_task(task: Task, config: ExperimentConfig) -> list[dict]:
    """Fit the three methods on one replication; one row per method."""
    seed = task.seed(config.master_seed)
    spec = model_spec(task.model, config.innovation(task.innovation), config.burn_in)
    train, test = simulate(spec, 2 * task.n, seed).split(task.n)
    q = config.q
    rows = []

    def record(method, mse, t0):
        rows.append({"model": task.model, "innovation": task.innovation, "n": task.n, "rep": task.rep,
                     "method": method, "test_mse": mse, "wall_ms": 1000.0 * (time.perf_counter() - t0),
                     "seed": seed})

    t0 = time.perf_counter()
    basis = make_basis("ar_linear", q)
    sampler = make_sampler_config(heuristic_lambda(train), config.b, config.sampler, substream_seed(seed, 1))
    theta, _ = fit_gibbs(train, basis, b=config.b, config=sampler)
    record("gibbs", holdout_risk(theta, basis, test, q).empirical_risk, t0)

    t0 = time.perf_counter()
    fit = aic_select(train, q, q) if config.baseline == "ols" else aic_select_yw(train, q)
    record("aic", ar_holdout_risk(fit, test, q).empirical_risk, t0)

    t0 = time.perf_counter()
    fit = ols_ar_fit(train, q, q) if config.baseline == "ols" else yule_walker_path(train, q)[q]
    record("full", ar_holdout_risk(fit, test, q).empirical_risk, t0)
    return rows


def _fmt(value) -> str:
    return repr(value) if isinstance(value, float) else str(value)


def _write_csv(path: Path, columns, rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in columns])
    path.write_text(buf.getvalue())


def read_results(path: str | Path) -> list[dict]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    for row in rows:
        row["n"] = int(row["n"])
        row["rep"] = int(row["rep"])
        row["test_mse"] = float(row["test_mse"])
    return rows


def summarize(rows: list[dict]) -> list[dict]:
    """Mean and sample sd (divisor reps - 1) of the test error per (model, innovation, n, method)."""
    groups: dict[tuple, list[float]] = {}
    for row in rows:
        key = (row["model"], row["innovation"], int(row["n"]), row["method"])
        groups.setdefault(key, []).append(float(row["test_mse"]))

    def order(key):
        m, i, n, meth = key
        return (MODEL_ORDER.index(m), INNOVATION_KINDS.index(i), n, METHODS.index(meth))

    out = []
    for key in sorted(groups, key=order):
        vals = groups[key]
        sd = statistics.stdev(vals) if len(vals) > 1 else float("nan")
        out.append(dict(zip(("model", "innovation", "n", "method"), key),
                        mean_mse=statistics.fmean(vals), sd_mse=sd))
    return out


def run_experiment(config: ExperimentConfig, out_dir: str | Path, jobs: int = 1) -> tuple[Path, Path]:
    """Run every replication, writing ``results.csv``, ``summary.csv`` and ``timings.csv``.

    Rows are appended to ``results.partial.csv`` as replications finish (in
    completion order); the final files are sorted by cell key. The
    ``wall_ms`` column of ``results.csv`` is left empty unless
    ``config.timing`` is set, which keeps reruns byte-identical; measured
    times always go to ``timings.csv``.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    partial = out / "results.partial.csv"
    todo = tasks(config)
    done: dict[Task, list[dict]] = {}

    with open(partial, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RESULT_COLUMNS)

        def flush(task, rows):
            done[task] = rows
            for row in rows:
                writer.writerow([_fmt(row[c]) for c in RESULT_COLUMNS])
            fh.flush()
            log.info("finished %s (%d/%d)", task, len(done), len(todo))

        if jobs <= 1:
            for task in todo:
                flush(task, run_task(task, config))
        else:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                futures = {pool.submit(run_task, task, config): task for task in todo}
                for fut in as_completed(futures):
                    flush(futures[fut], fut.result())

    rows = [row for task in sorted(done, key=Task.sort_key) for row in done[task]]
    _write_csv(out / "timings.csv", TIMING_COLUMNS, rows)
    if not config.timing:
        rows = [{**row, "wall_ms": ""} for row in rows]
    results_path = out / "results.csv"
    _write_csv(results_path, RESULT_COLUMNS, rows)
    partial.unlink()
    summary_path = out / "summary.csv"
    _write_csv(summary_path, SUMMARY_COLUMNS, summarize(read_results(results_path)))
    return results_path, summary_path
