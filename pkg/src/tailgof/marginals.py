"""Marginal extreme-value fits and standardization to the common tail scale."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError, DegenerateSampleError

# below this |gamma| the standardization uses a series for log1p(g*u)/g
GAMMA_SWITCH = 1e-6


@dataclass(frozen=True)
class MarginalFit:
    gamma_hat: float
    a_hat: float
    b_hat: float
    k: int
    n: int

    def __post_init__(self):
        if not self.a_hat > 0:
            raise DataError(f"scale estimate must be positive, got {self.a_hat}")
        if not 0 < self.k < self.n:
            raise DataError(f"need 0 < k < n, got k={self.k}, n={self.n}")


def moment_statistics(values, k: int) -> tuple[float, float, float]:
    """Return ``(M1, M2, threshold)`` from the top ``k`` log-spacings."""
    x = np.sort(np.asarray(values, dtype=float))
    n = x.size
    if not 2 <= k < n:
        raise DataError(f"need 2 <= k < n, got k={k}, n={n}")
    threshold = x[n - k - 1]
    if not threshold > 0:
        raise DataError("moment estimator requires positive threshold "
                        f"(order statistic X_(n-k:n) = {threshold})")
    logs = np.log(x[n - k:]) - np.log(threshold)
    return float(np.mean(logs)), float(np.mean(logs ** 2)), float(threshold)


def fit_marginal(values, k: int) -> MarginalFit:
    """Moment estimators of the extreme value index, scale and location.

    ``b_hat`` is the ``(n-k)``-th order statistic and the scale uses the
    negative-part companion ``1 - 1/(2(1 - M1^2/M2))`` of the index.
    """
    m1, m2, b = moment_statistics(values, k)
    if m2 <= 0:
        raise DegenerateSampleError("degenerate sample: top order statistics are all equal")
    ratio = 1.0 - m1 * m1 / m2
    if ratio <= 0:
        raise DegenerateSampleError("degenerate sample: M1^2 >= M2")
    gamma_minus = 1.0 - 0.5 / ratio
    gamma = m1 + gamma_minus
    a = b * m1 * (1.0 - gamma_minus)
    return MarginalFit(gamma_hat=gamma, a_hat=a, b_hat=b, k=k, n=len(values))


def standardize_values(values, fit: MarginalFit) -> np.ndarray:
    """Map raw values x to ``[(1 + g (x - b)/a) v 0]^(-1/g)``.

    A zero bracket gives ``+inf`` for ``g > 0`` (far below the threshold) and
    ``0`` for ``g < 0`` (beyond the fitted endpoint).
    """
    x = np.asarray(values, dtype=float)
    g = fit.gamma_hat
    u = (x - fit.b_hat) / fit.a_hat
    if abs(g) < GAMMA_SWITCH:
        # log1p(g u)/g = u - g u^2/2 + g^2 u^3/3 - ...
        expo = u * (1.0 - g * u / 2.0 + (g * u) ** 2 / 3.0)
        with np.errstate(over="ignore"):
            return np.exp(-expo)
    bracket = 1.0 + g * u
    out = np.empty_like(u)
    pos = bracket > 0
    with np.errstate(over="ignore"):
        out[pos] = np.exp(-np.log(bracket[pos]) / g)
    out[~pos] = np.inf if g > 0 else 0.0
    return out


def standardize(sample, fit_x: MarginalFit, fit_y: MarginalFit) -> np.ndarray:
    """Standardize a bivariate sample; returns an ``(n, 2)`` array."""
    sample = np.asarray(sample, dtype=float)
    if sample.ndim != 2 or sample.shape[1] != 2:
        raise DataError("sample must have shape (n, 2)")
    return np.column_stack([standardize_values(sample[:, 0], fit_x),
                            standardize_values(sample[:, 1], fit_y)])
