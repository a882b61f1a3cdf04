"""End-to-end test: margins, standardization, estimation, transform, statistics."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .empirical import build_eta_measure, estimate_theta_mom
from .errors import ConfigError
from .families import TailCopulaFamily
from .marginals import MarginalFit, fit_marginal, standardize
from .stats import BenchmarkTable, test_statistics
from .transform import GridSpec, TransformedField, Transformer


@dataclass
class TestReport:
    kappa: float
    omega2: float
    a2: float
    p_values: tuple | None
    grid: GridSpec
    k: int
    family: TailCopulaFamily
    theta_hat: tuple
    gamma_hats: tuple
    fits: tuple = ()
    field: TransformedField | None = field(default=None, repr=False)

    __test__ = False

    @property
    def statistics(self) -> tuple[float, float, float]:
        return self.kappa, self.omega2, self.a2

    def to_dict(self) -> dict:
        return {
            "statistics": {"kappa": self.kappa, "omega2": self.omega2, "a2": self.a2},
            "p_values": None if self.p_values is None else dict(zip(("kappa", "omega2", "a2"), self.p_values)),
            "config": {
                "grid": self.grid.to_config(),
                "k": self.k,
                "family": self.family.family_id,
                "theta_hat": list(self.theta_hat),
                "gamma_hats": list(self.gamma_hats),
                "marginals": [{"gamma_hat": f.gamma_hat, "a_hat": f.a_hat, "b_hat": f.b_hat}
                              for f in self.fits],
            },
        }


def run_test(sample, family: TailCopulaFamily, k: int = 250, grid: GridSpec = GridSpec(),
             table: BenchmarkTable | None = None, max_k_fraction: float = 0.5) -> TestReport:
    """Fit, transform and test one bivariate sample.

    ``family`` with ``dim == 0`` is tested as a fully specified null; otherwise
    its parameter is re-estimated by the method of moments.
    """
    sample = np.asarray(sample, dtype=float)
    n = sample.shape[0]
    if k > max_k_fraction * n:
        raise ConfigError(f"k too close to n: k={k}, n={n} (limit {max_k_fraction} n)")
    if table is not None:
        table.check_grid(grid)
    fx: MarginalFit = fit_marginal(sample[:, 0], k)
    fy: MarginalFit = fit_marginal(sample[:, 1], k)
    std = standardize(sample, fx, fy)
    if family.dim:
        family = family.with_theta(estimate_theta_mom(std, k, family).theta_hat)
    gammas = (fx.gamma_hat, fy.gamma_hat)
    measure = build_eta_measure(std, k, family)
    fld = Transformer(family, gammas, grid).field(measure)
    stats = test_statistics(fld, grid)
    pv = table.p_values(stats) if table is not None else None
    return TestReport(*stats, pv, grid, k, family, family.theta, gammas, (fx, fy), fld)
