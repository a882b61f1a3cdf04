"""Replication loop of the simulation study: null sizes, power, PP-plot data."""

from __future__ import annotations

import csv
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .datagen import GeneratorSpec
from .errors import ConfigError, NumericalError, TailGofError
from .families import TailCopulaFamily
from .pipeline import run_test
from .stats import STAT_NAMES, BenchmarkTable
from .transform import GridSpec

log = logging.getLogger(__name__)

# model id -> (family, null generator, alternative generator)
MODELS = {
    1: ("fixed_logistic_half", "cauchy_quadrant", "model1_alt_mixture"),
    2: ("logistic", "cauchy_quadrant", "linear_factor"),
    3: ("scaled_model1", "model3_null_mixture", "asym_logistic"),
}
DEFAULT_REPLICATIONS = {"null": 300, "alt": 100}
MAX_NULL_FAILURE_RATE = 0.05
_MODE_CODE = {"null": 0, "alt": 1}


def model_family(model: int) -> TailCopulaFamily:
    fid = MODELS[model][0]
    return TailCopulaFamily(fid, () if fid == "fixed_logistic_half" else (0.5,))


def model_generator(model: int, mode: str) -> GeneratorSpec:
    return GeneratorSpec(MODELS[model][1 if mode == "null" else 2])


def replication_seed(seed: int, model: int, mode: str, index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([int(seed), int(model), _MODE_CODE[mode], int(index)])


@dataclass
class Replication:
    index: int
    status: str  # "ok" or the error class name
    stats: tuple = (np.nan, np.nan, np.nan)
    theta_hat: float = np.nan
    gamma_hats: tuple = (np.nan, np.nan)
    message: str = ""


def _run_one(args) -> Replication:
    model, mode, seed, index, n, k, grid = args
    sample = model_generator(model, mode).sample(n, replication_seed(seed, model, mode, index))
    try:
        rep = run_test(sample, model_family(model), k=k, grid=grid)
    except TailGofError as exc:
        return Replication(index, type(exc).__name__, message=str(exc))
    theta = rep.theta_hat[0] if rep.theta_hat else np.nan
    return Replication(index, "ok", rep.statistics, theta, rep.gamma_hats)


class ReplicationFailure(NumericalError):
    pass


@dataclass
class StudyResult:
    model: int
    mode: str
    replications: list
    table: BenchmarkTable
    alpha: float = 0.05

    @property
    def failures(self) -> int:
        return sum(r.status != "ok" for r in self.replications)

    def values(self, name: str) -> np.ndarray:
        j = STAT_NAMES.index(name)
        return np.array([r.stats[j] for r in self.replications if r.status == "ok"])

    def rejections(self, name: str) -> int:
        crit = self.table.critical_value(name, self.alpha)
        hits = int(np.sum(self.values(name) > crit))
        # breakdown of the estimator under the alternative is evidence against the null
        return hits + (self.failures if self.mode == "alt" else 0)

    def rejection_rate(self, name: str) -> float:
        total = len(self.replications) if self.mode == "alt" else len(self.replications) - self.failures
        return self.rejections(name) / total

    def pp_points(self, name: str):
        """``(F_benchmark(x), F_replications(x))`` at each sorted replication value."""
        vals = np.sort(self.values(name))
        bench = self.table.column(name)
        fb = np.searchsorted(bench, vals, side="right") / bench.size
        fr = np.arange(1, vals.size + 1) / vals.size
        return fb, fr

    def write(self, out_dir) -> dict:
        os.makedirs(out_dir, exist_ok=True)
        stem = f"model{self.model}_{self.mode}"
        paths = {k: os.path.join(out_dir, f"{stem}_{k}.csv") for k in ("replications", "summary", "ppplot")}
        with open(paths["replications"], "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["index", "status", *STAT_NAMES, "theta_hat", "gamma1", "gamma2", "message"])
            for r in self.replications:
                w.writerow([r.index, r.status, *(f"{v:.17g}" for v in r.stats), f"{r.theta_hat:.17g}",
                            *(f"{g:.17g}" for g in r.gamma_hats), r.message])
        with open(paths["summary"], "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["model", "mode", "statistic", "critical_value", "rejections", "replications",
                        "failures", "rate"])
            for name in STAT_NAMES:
                w.writerow([self.model, self.mode, name, f"{self.table.critical_value(name, self.alpha):.17g}",
                            self.rejections(name), len(self.replications), self.failures,
                            f"{self.rejection_rate(name):.17g}"])
        with open(paths["ppplot"], "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["statistic", "benchmark_cdf", "replication_cdf"])
            for name in STAT_NAMES:
                for a, b in zip(*self.pp_points(name)):
                    w.writerow([name, f"{a:.17g}", f"{b:.17g}"])
        return paths


def run_study(model: int, mode: str, table: BenchmarkTable, seed: int = 0, replications: int | None = None,
              n: int = 1500, k: int = 250, grid: GridSpec = GridSpec(), workers: int = 1,
              alpha: float = 0.05) -> StudyResult:
    if model not in MODELS or mode not in _MODE_CODE:
        raise ConfigError(f"unknown model/mode {model}/{mode}")
    table.check_grid(grid)
    reps = replications or DEFAULT_REPLICATIONS[mode]
    jobs = [(model, mode, seed, i, n, k, grid) for i in range(reps)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            results = list(ex.map(_run_one, jobs, chunksize=max(1, reps // (4 * workers))))
    else:
        results = [_run_one(j) for j in jobs]
    study = StudyResult(model, mode, results, table, alpha)
    for r in results:
        if r.status != "ok":
            log.warning("replication %d failed: %s: %s", r.index, r.status, r.message)
    if mode == "null" and study.failures > MAX_NULL_FAILURE_RATE * reps:
        raise ReplicationFailure(
            f"{study.failures}/{reps} null replications failed; first error: "
            f"{next(r.message for r in results if r.status != 'ok')}")
    return study
