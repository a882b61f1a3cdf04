"""Martingale-type transform of the parametric empirical process.

The transformed field is

    W_n([d, x] x [d, y]) = int int_{[d,x]x[d,y]} r^(-1/2) d eta
        - int_d^x int_d^y q(s, t)' I(t)^(-1) J(t) sqrt(r(s, t)) dt ds,

with ``J(t) = int_d^T int_t^T q d eta`` and ``I(t)`` the matching integral of
``q q'`` against the fitted tail copula. The scanning family is the set of
horizontal slabs ``[d, T] x [d, t]``.

Two grids are used. The evaluation grid has ``eval_cells`` uniform cells on
``[delta, tau]`` per axis; the field is reported at its nodes excluding
``delta``. The integration grid covers ``[delta, T]``: it refines every
evaluation cell into ``m`` cells and splits ``[tau, T]`` uniformly, so both
grids share their edges on ``[delta, tau]``. Every integral against the
smooth part of a measure, and every entry of ``I(t)``, goes through the same
cellwise rule, so the compensator cancels smooth inputs consistently.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .empirical import CellRule
from .errors import ConfigError, DomainError, SingularInformationError
from .families import TailCopulaFamily

MAX_CONDITION = 1e12
_SERIES_CUTOFF = 1e-3


@dataclass(frozen=True)
class GridSpec:
    delta: float = 0.001
    tau: float = 1.001
    T: float = 2.0
    eval_cells: int = 200
    integ_cells_per_axis: int = 400

    def __post_init__(self):
        if not 0 < self.delta < self.tau < self.T:
            raise ConfigError(f"need 0 < delta < tau < T, got {self.delta}, {self.tau}, {self.T}")
        if self.eval_cells < 1 or self.integ_cells_per_axis < 1:
            raise ConfigError("cell counts must be positive")

    @property
    def mesh(self) -> float:
        return (self.tau - self.delta) / self.eval_cells

    @property
    def eval_edges(self) -> np.ndarray:
        return self.delta + self.mesh * np.arange(self.eval_cells + 1)

    @property
    def eval_nodes(self) -> np.ndarray:
        return self.eval_edges[1:]

    @property
    def refinement(self) -> int:
        """Integration cells per evaluation cell inside ``[delta, tau]``."""
        share = self.integ_cells_per_axis * (self.tau - self.delta) / (self.T - self.delta)
        return max(1, int(round(share / self.eval_cells)))

    @property
    def integ_edges(self) -> np.ndarray:
        m = self.refinement
        inner = np.linspace(self.delta, self.tau, self.eval_cells * m + 1)
        inner[-1] = self.tau
        n_rest = max(1, self.integ_cells_per_axis - self.eval_cells * m)
        outer = np.linspace(self.tau, self.T, n_rest + 1)[1:]
        return np.concatenate([inner, outer])

    @property
    def fingerprint(self) -> str:
        return f"delta={self.delta!r}; tau={self.tau!r}; cells={self.eval_cells}"

    def doubled(self) -> "GridSpec":
        return GridSpec(self.delta, self.tau, self.T, 2 * self.eval_cells, 2 * self.integ_cells_per_axis)

    def to_config(self) -> dict:
        return {"delta": self.delta, "tau": self.tau, "T": self.T,
                "eval_cells": self.eval_cells, "integ_cells_per_axis": self.integ_cells_per_axis}


# ---------------------------------------------------------------------------
# f, g, h and derivatives

def _exprel1(z):
    """``(e^z - 1)/z`` with the removable singularity filled in."""
    z = np.asarray(z, dtype=float)
    small = np.abs(z) < _SERIES_CUTOFF
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(small, 0.0, np.expm1(z) / np.where(small, 1.0, z))
    series = 1.0 + z / 2.0 + z * z / 6.0 + z ** 3 / 24.0
    return np.where(small, series, out)


def _exprel2(z):
    """``(e^z - 1 - z)/z^2``."""
    z = np.asarray(z, dtype=float)
    small = np.abs(z) < _SERIES_CUTOFF
    zz = np.where(small, 1.0, z)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = (np.expm1(zz) - zz) / (zz * zz)
    series = 0.5 + z / 6.0 + z * z / 24.0 + z ** 3 / 120.0
    return np.where(small, series, out)


def fgh(gamma: float, x):
    """Return ``(f, g, h, f', g', h')`` at ``x > 0`` for index ``gamma``.

    Written through ``z = gamma log x`` so the ``gamma = 0`` branch is the
    continuous limit of the general one rather than a separate case.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("f, g, h are defined for x > 0 only")
    L = np.log(x)
    z = gamma * L
    e1 = _exprel1(z)
    e2 = _exprel2(z)
    xg = np.exp(z)
    f = x * L * e1
    g = -x * xg
    h = -x * L * L * e2
    df = L * e1 + xg
    dg = -(gamma + 1.0) * xg
    dh = -L * L * e2 - L * e1
    return f, g, h, df, dg, dh


def score_vector(family: TailCopulaFamily, gamma1: float, gamma2: float, s, t):
    """Scores ``q_1 .. q_{6+d}`` at ``(s, t)``; shape ``(..., 6 + d)``."""
    s, t = np.broadcast_arrays(np.asarray(s, dtype=float), np.asarray(t, dtype=float))
    rho = family.log_density_grads(s, t)
    f1, g1, h1, df1, dg1, dh1 = fgh(gamma1, s)
    f2, g2, h2, df2, dg2, dh2 = fgh(gamma2, t)
    r1, r2 = rho[..., 0], rho[..., 1]
    cols = [df1 + f1 * r1, dg1 + g1 * r1, dh1 + h1 * r1,
            df2 + f2 * r2, dg2 + g2 * r2, dh2 + h2 * r2]
    cols.extend(rho[..., 2 + i] for i in range(family.dim))
    return np.stack(cols, axis=-1)


def transform_scores(family: TailCopulaFamily, gamma1: float, gamma2: float, s, t):
    """Score basis used by the transform: redundant theta scores removed."""
    q = score_vector(family, gamma1, gamma2, s, t)
    return q[..., :6] if family.redundant_theta_scores else q


# ---------------------------------------------------------------------------

@dataclass
class InformationCurve:
    t_nodes: np.ndarray
    matrices: np.ndarray
    inverses: np.ndarray
    condition_numbers: np.ndarray


@dataclass
class TransformedField:
    x_nodes: np.ndarray
    y_nodes: np.ndarray
    values: np.ndarray  # values[i, j] = W_n([delta, x_i] x [delta, y_j])
    grid: GridSpec = field(default_factory=GridSpec)

    def rectangle(self, i0: int, i1: int, j0: int, j1: int) -> float:
        """Field mass of ``(x_i0, x_i1] x (y_j0, y_j1]``; index -1 is the delta edge."""
        def at(i, j):
            return 0.0 if i < 0 or j < 0 else self.values[i, j]
        return at(i1, j1) - at(i0, j1) - at(i1, j0) + at(i0, j0)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["y\\x"] + [f"{x:.17g}" for x in self.x_nodes])
            for j, y in enumerate(self.y_nodes):
                w.writerow([f"{y:.17g}"] + [f"{v:.17g}" for v in self.values[:, j]])

    @classmethod
    def from_csv(cls, path, grid: GridSpec | None = None) -> "TransformedField":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        x_nodes = np.array([float(v) for v in rows[0][1:]])
        y_nodes = np.array([float(r[0]) for r in rows[1:]])
        vals = np.array([[float(v) for v in r[1:]] for r in rows[1:]]).T
        return cls(x_nodes, y_nodes, vals, grid or GridSpec())


def _invert_spd(mats):
    """Inverses of symmetric matrices with a 2-norm condition check."""
    eigval, eigvec = np.linalg.eigh(mats)
    lam_max = eigval[..., -1]
    lam_min = eigval[..., 0]
    with np.errstate(divide="ignore"):
        cond = np.where(lam_min > 0, lam_max / np.where(lam_min > 0, lam_min, 1.0), np.inf)
    if np.any(~(cond <= MAX_CONDITION)):
        worst = float(np.max(cond))
        raise SingularInformationError(
            f"information matrix near-singular (condition {worst:.3g}); decrease tau or increase T")
    inv = np.einsum("...ik,...k,...jk->...ij", eigvec, 1.0 / eigval, eigvec)
    return inv, cond


class Transformer:
    """Everything in the transform that depends on the fit but not the data."""

    def __init__(self, family: TailCopulaFamily, gamma_hats, grid: GridSpec = GridSpec()):
        self.family = family
        self.gamma1, self.gamma2 = (float(g) for g in gamma_hats)
        self.grid = grid
        self.edges = grid.integ_edges
        self.rule = CellRule(family, self.edges, self.edges)
        self.m = grid.refinement
        self.n_inner = grid.eval_cells * self.m

        q_mid, q_band = self.rule.evaluate(self.scores)
        w_mid, w_band = self.rule.evaluate(self._inv_sqrt_density)
        self._q = (q_mid, q_band)
        # per-cell integrals against dR of q, r^(-1/2) and q r^(-1/2)
        self.q_cells = self.rule.combine(q_mid, q_band)
        self.w_cells = self.rule.combine(w_mid, w_band)[..., 0]
        self.qw_cells = self.rule.combine(q_mid * w_mid, q_band * w_band)

    def scores(self, s, t):
        return transform_scores(self.family, self.gamma1, self.gamma2, s, t)

    def _inv_sqrt_density(self, s, t):
        return np.exp(-0.5 * self.family.log_density(s, t))[..., None]

    @cached_property
    def information(self) -> InformationCurve:
        q_mid, q_band = self._q
        rule = self.rule
        per_row = np.einsum("xyp,xyq,xy->ypq", q_mid, q_mid, rule.mid_mass)
        band = np.einsum("nkp,nkq,nk->npq", q_band, q_band, rule.band_weights)
        np.add.at(per_row, rule.band_index[1], band)
        tail = np.cumsum(per_row[::-1], axis=0)[::-1][: self.n_inner]
        tail = 0.5 * (tail + np.swapaxes(tail, -1, -2))
        inv, cond = _invert_spd(tail)
        return InformationCurve(self.edges[: self.n_inner], tail, inv, cond)

    def field(self, measure) -> TransformedField:
        n_in, m = self.n_inner, self.m
        info = self.information
        # J(t_j) over [delta, T] x (t_j, T], for each row lower edge t_j
        cells_q = measure.cell_integrals(self.scores, self.edges, self.edges, smooth=self.q_cells)
        J = np.cumsum(cells_q.sum(axis=0)[::-1], axis=0)[::-1][:n_in]
        v = np.einsum("jpq,jq->jp", info.inverses, J)

        inner = self.edges[: n_in + 1]
        sl = np.s_[:n_in, :n_in]
        first_cells = measure.cell_integrals(self._inv_sqrt_density, inner, inner,
                                             smooth=self.w_cells[sl][..., None])[..., 0]
        comp_cells = np.einsum("xyp,yp->xy", self.qw_cells[sl], v)
        cells = first_cells - comp_cells
        cum = np.cumsum(np.cumsum(cells, axis=0), axis=1)
        values = cum[m - 1::m, m - 1::m]
        nodes = self.grid.eval_nodes
        return TransformedField(nodes, nodes, values, self.grid)


def information_curve(family, theta_hat, gamma_hats, grid: GridSpec = GridSpec()) -> InformationCurve:
    if family.dim and theta_hat is not None:
        family = family.with_theta(theta_hat)
    return Transformer(family, gamma_hats, grid).information


def transform_field(measure, family, theta_hat, gamma_hats, grid: GridSpec = GridSpec()) -> TransformedField:
    if family.dim and theta_hat is not None:
        family = family.with_theta(theta_hat)
    return Transformer(family, gamma_hats, grid).field(measure)
