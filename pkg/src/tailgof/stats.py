"""Test statistics on the transformed field and the Wiener-sheet benchmark."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import BenchmarkMismatchError, DataError
from .transform import GridSpec, TransformedField

STAT_NAMES = ("kappa", "omega2", "a2")
HEADER_TAG = "tailgof-benchmark v1"


def test_statistics(fld, grid: GridSpec | None = None) -> tuple[float, float, float]:
    """Kolmogorov-Smirnov, Cramer-von Mises and Anderson-Darling type statistics."""
    if isinstance(fld, TransformedField):
        grid = grid or fld.grid
        values = fld.values
    else:
        values = np.asarray(fld, dtype=float)
    grid = grid or GridSpec()
    return tuple(float(v) for v in kernels.field_statistics(values, grid.mesh))


# pytest would otherwise collect this as a test function
test_statistics.__test__ = False


def path_seed(seed: int, index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([int(seed), int(index)])


def _path_increments(grid: GridSpec, seed: int, index: int) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(path_seed(seed, index)))
    incr = rng.standard_normal((grid.eval_cells, grid.eval_cells))
    incr *= grid.mesh
    return incr


def sheet_path(grid: GridSpec, seed: int, index: int) -> np.ndarray:
    """Path ``index`` of the benchmark: the sheet at the evaluation nodes."""
    return np.cumsum(np.cumsum(_path_increments(grid, seed, index), axis=0), axis=1)


def _path_stats(grid: GridSpec, seed: int, start: int, stop: int) -> np.ndarray:
    out = np.empty((stop - start, 3))
    for row, idx in enumerate(range(start, stop)):
        out[row] = kernels.sheet_path_statistics(_path_increments(grid, seed, idx), grid.mesh)
    return out


@dataclass
class BenchmarkTable:
    kappa: np.ndarray
    omega2: np.ndarray
    a2: np.ndarray
    grid: GridSpec = field(default_factory=GridSpec)
    seed: int = 0

    def __post_init__(self):
        for name in STAT_NAMES:
            arr = np.sort(np.asarray(getattr(self, name), dtype=float))
            setattr(self, name, arr)
        if not (len(self.kappa) == len(self.omega2) == len(self.a2)):
            raise DataError("benchmark columns differ in length")

    @property
    def path_count(self) -> int:
        return len(self.kappa)

    @property
    def fingerprint(self) -> str:
        return self.grid.fingerprint

    def column(self, name: str) -> np.ndarray:
        return getattr(self, name)

    def check_grid(self, grid: GridSpec) -> None:
        if grid.fingerprint != self.fingerprint:
            raise BenchmarkMismatchError(
                f"benchmark grid ({self.fingerprint}) does not match test grid ({grid.fingerprint})")

    def critical_value(self, name: str, alpha: float = 0.05) -> float:
        col = self.column(name)
        rank = math.ceil((1.0 - alpha) * (self.path_count + 1))
        return float(col[min(rank, self.path_count) - 1])

    def p_values(self, stats) -> tuple[float, float, float]:
        return tuple(p_value(s, self.column(n)) for s, n in zip(stats, STAT_NAMES))

    def save(self, path) -> None:
        g = self.grid
        with open(path, "w") as fh:
            fh.write(f"{HEADER_TAG}; delta={g.delta!r}; tau={g.tau!r}; cells={g.eval_cells}; "
                     f"paths={self.path_count}; seed={self.seed}\n")
            fh.write("kappa,omega2,a2\n")
            for row in zip(self.kappa, self.omega2, self.a2):
                fh.write(",".join(f"{v:.17g}" for v in row) + "\n")

    @classmethod
    def load(cls, path, T: float = 2.0) -> "BenchmarkTable":
        with open(path) as fh:
            header = fh.readline().strip()
            if not header.startswith(HEADER_TAG):
                raise DataError(f"{path}: not a benchmark table")
            meta = dict(part.strip().split("=", 1) for part in header.split(";")[1:])
            fh.readline()
            data = np.loadtxt(fh, delimiter=",", ndmin=2)
        delta, tau = float(meta["delta"]), float(meta["tau"])
        # T is not part of the fingerprint; any value above tau will do
        grid = GridSpec(delta=delta, tau=tau, T=T if T > tau else 2.0 * tau, eval_cells=int(meta["cells"]))
        table = cls(data[:, 0], data[:, 1], data[:, 2], grid, int(meta["seed"]))
        if table.path_count != int(meta["paths"]):
            raise DataError(f"{path}: header says {meta['paths']} paths, found {table.path_count}")
        return table


def wiener_benchmark(grid: GridSpec = GridSpec(), paths: int = 10_000, seed: int = 0,
                     workers: int = 1) -> BenchmarkTable:
    """Statistics of ``paths`` simulated standard Wiener sheets on ``grid``.

    Path ``i`` draws from its own stream keyed by ``(seed, i)``, so the table
    does not depend on ``workers``.
    """
    if paths < 1:
        raise DataError("need at least one path")
    chunks = [(s, min(s + 500, paths)) for s in range(0, paths, 500)]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(workers) as ex:
            parts = list(ex.map(_path_stats, *zip(*[(grid, seed, a, b) for a, b in chunks])))
    else:
        parts = [_path_stats(grid, seed, a, b) for a, b in chunks]
    res = np.concatenate(parts)
    return BenchmarkTable(res[:, 0], res[:, 1], res[:, 2], grid, seed)


def p_value(stat: float, table) -> float:
    """``(1 + #{table >= stat}) / (N + 1)``."""
    table = np.asarray(table, dtype=float)
    if table.size == 0:
        raise DataError("empty benchmark table")
    n_ge = table.size - np.searchsorted(table, stat, side="left")
    return float((1 + n_ge) / (table.size + 1))


def kolmogorov_distance(sample, reference) -> float:
    """Sup distance between two empirical d.f.s."""
    a = np.sort(np.asarray(sample, dtype=float))
    b = np.sort(np.asarray(reference, dtype=float))
    pts = np.concatenate([a, b])
    fa = np.searchsorted(a, pts, side="right") / a.size
    fb = np.searchsorted(b, pts, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))
