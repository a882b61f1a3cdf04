"""Parametric tail copula families.

Three families are supported:

``logistic``
    ``R(x, y) = x + y - (x^(1/theta) + y^(1/theta))^theta``, theta in (0, 1).
``scaled_model1``
    ``R(x, y) = psi (x + y - sqrt(x^2 + y^2))``, psi in (0, 1). The remaining
    mass ``1 - psi`` sits on the axes at infinity and never meets a finite
    rectangle, so only the absolutely continuous part is represented.
``fixed_logistic_half``
    The parameter-free member ``x + y - sqrt(x^2 + y^2)``.

All functions broadcast over numpy arrays of coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

FAMILY_IDS = ("logistic", "scaled_model1", "fixed_logistic_half")
THETA_FD_STEP = 1e-6


@dataclass(frozen=True)
class Rectangle:
    x_lo: float
    x_hi: float
    y_lo: float
    y_hi: float

    def __post_init__(self):
        if not (0 <= self.x_lo <= self.x_hi and 0 <= self.y_lo <= self.y_hi):
            raise DomainError(f"invalid rectangle {self}")


@dataclass(frozen=True)
class TailCopulaFamily:
    family_id: str
    theta: tuple = field(default=())

    def __post_init__(self):
        if self.family_id not in FAMILY_IDS:
            raise DomainError(f"unknown family {self.family_id!r}; expected one of {FAMILY_IDS}")
        theta = tuple(float(t) for t in np.atleast_1d(self.theta)) if np.size(self.theta) else ()
        object.__setattr__(self, "theta", theta)
        if len(theta) != self.dim:
            raise DomainError(f"{self.family_id} takes {self.dim} parameter(s), got {len(theta)}")
        for t in theta:
            if not 0.0 < t < 1.0:
                raise DomainError(f"parameter {t} outside the open interval (0, 1)")

    @property
    def dim(self) -> int:
        return 0 if self.family_id == "fixed_logistic_half" else 1

    @property
    def redundant_theta_scores(self) -> bool:
        """True when the theta scores lie in the span of the marginal scores.

        For ``psi * R1`` the psi-score is ``R/psi``; by Euler's identity for an
        order-one homogeneous ``R`` this is a fixed combination of the location
        and scale scores of both margins, so it must be dropped from the score
        basis or the information matrices are singular.
        """
        return self.family_id == "scaled_model1"

    def with_theta(self, theta) -> "TailCopulaFamily":
        return TailCopulaFamily(self.family_id, tuple(np.atleast_1d(theta)) if np.size(theta) else ())

    @classmethod
    def from_config(cls, cfg: dict) -> "TailCopulaFamily":
        return cls(cfg["family"], tuple(cfg.get("theta", ())))

    def to_config(self) -> dict:
        return {"family": self.family_id, "theta": list(self.theta)}

    # ------------------------------------------------------------------
    def value(self, x, y):
        x, y = _nonneg(x, y)
        if self.family_id == "logistic":
            return _logistic_value(x, y, self.theta[0])
        out = _model1_value(x, y)
        return self.theta[0] * out if self.family_id == "scaled_model1" else out

    def density(self, x, y):
        x, y = _positive(x, y)
        if self.family_id == "logistic":
            return np.exp(_logistic_log_density(x, y, self.theta[0]))
        out = x * y * (x * x + y * y) ** -1.5
        return self.theta[0] * out if self.family_id == "scaled_model1" else out

    def log_density(self, x, y):
        x, y = _positive(x, y)
        if self.family_id == "logistic":
            return _logistic_log_density(x, y, self.theta[0])
        out = np.log(x) + np.log(y) - 1.5 * np.log(x * x + y * y)
        return out + np.log(self.theta[0]) if self.family_id == "scaled_model1" else out

    def partials(self, x, y):
        x, y = _positive(x, y)
        if self.family_id == "logistic":
            th = self.theta[0]
            p = 1.0 / th
            log_s = _log_power_sum(x, y, p)
            # S^(theta-1) x^(p-1) = exp((theta-1) log S + (p-1) log x)
            dx = 1.0 - np.exp((th - 1.0) * log_s + (p - 1.0) * np.log(x))
            dy = 1.0 - np.exp((th - 1.0) * log_s + (p - 1.0) * np.log(y))
            return dx, dy
        norm = np.hypot(x, y)
        dx, dy = 1.0 - x / norm, 1.0 - y / norm
        if self.family_id == "scaled_model1":
            return self.theta[0] * dx, self.theta[0] * dy
        return dx, dy

    def theta_gradient(self, x, y, analytic: bool = False):
        """Gradient of ``R`` with respect to the parameters, shape ``(..., d)``.

        The scaled family is differentiated in closed form. The logistic family
        uses central differences unless ``analytic`` is set.
        """
        x, y = _positive(x, y)
        shape = np.broadcast(x, y).shape
        if self.dim == 0:
            return np.zeros(shape + (0,))
        if self.family_id == "scaled_model1":
            return _model1_value(x, y)[..., None] * np.ones(shape + (1,))
        th = self.theta[0]
        if analytic:
            p = 1.0 / th
            log_s = _log_power_sum(x, y, p)
            sx = np.exp(p * np.log(x) - log_s)
            sy = np.exp(p * np.log(y) - log_s)
            grad = -np.exp(th * log_s) * (log_s - p * (sx * np.log(x) + sy * np.log(y)))
            return grad[..., None]
        step = min(THETA_FD_STEP, 0.5 * th, 0.5 * (1.0 - th))
        hi = _logistic_value(x, y, th + step)
        lo = _logistic_value(x, y, th - step)
        return ((hi - lo) / (2.0 * step))[..., None]

    def log_density_grads(self, x, y):
        """Stack of ``d log r / dx``, ``d log r / dy`` and ``d log r / dtheta_i``.

        Returns an array of shape ``(..., 2 + d)``.
        """
        x, y = _positive(x, y)
        if self.family_id == "logistic":
            return _logistic_log_density_grads(x, y, self.theta[0])
        ss = x * x + y * y
        rho1 = 1.0 / x - 3.0 * x / ss
        rho2 = 1.0 / y - 3.0 * y / ss
        parts = [rho1, rho2]
        if self.family_id == "scaled_model1":
            parts.append(np.full(np.shape(rho1), 1.0 / self.theta[0]))
        return np.stack(np.broadcast_arrays(*parts), axis=-1)

    def rectangle_mass(self, rect: Rectangle) -> float:
        return float(self.rectangle_masses(rect.x_lo, rect.x_hi, rect.y_lo, rect.y_hi))

    def rectangle_masses(self, x_lo, x_hi, y_lo, y_hi):
        """Vectorized inclusion-exclusion mass of ``(x_lo, x_hi] x (y_lo, y_hi]``."""
        m = (self.value(x_hi, y_hi) - self.value(x_lo, y_hi)
             - self.value(x_hi, y_lo) + self.value(x_lo, y_lo))
        return np.maximum(m, 0.0)

    def cell_masses(self, x_edges, y_edges):
        """Masses of all grid cells, shape ``(len(x_edges)-1, len(y_edges)-1)``."""
        vals = self.value(np.asarray(x_edges)[:, None], np.asarray(y_edges)[None, :])
        return np.maximum(np.diff(np.diff(vals, axis=0), axis=1), 0.0)


def _nonneg(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x < 0) or np.any(y < 0):
        raise DomainError("tail copula arguments must be non-negative")
    return x, y


def _positive(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if not (np.all(x > 0) and np.all(y > 0)):
        raise DomainError("coordinates must lie in (0, inf)^2")
    return x, y


def _model1_value(x, y):
    # x + y - hypot(x, y) cancels badly when one coordinate dominates;
    # 2xy / (x + y + hypot) is the same quantity without cancellation
    norm = np.hypot(x, y)
    denom = x + y + norm
    with np.errstate(invalid="ignore", divide="ignore"):
        out = 2.0 * x * y / denom
    return np.where(denom > 0, out, 0.0)


def _log_power_sum(x, y, p):
    """``log(x^p + y^p)`` for positive x, y without overflow."""
    return np.logaddexp(p * np.log(x), p * np.log(y))


def _logistic_value(x, y, th):
    p = 1.0 / th
    hi = np.maximum(x, y)
    lo = np.minimum(x, y)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(hi > 0, lo / np.where(hi > 0, hi, 1.0), 0.0)
    # x + y - (x^p + y^p)^theta = lo - hi ((1 + (lo/hi)^p)^theta - 1)
    excess = np.expm1(th * np.log1p(ratio ** p))
    out = lo - np.where(hi > 0, hi * excess, 0.0)
    return np.clip(out, 0.0, lo)


def _logistic_log_density(x, y, th):
    p = 1.0 / th
    lx, ly = np.log(x), np.log(y)
    log_s = np.logaddexp(p * lx, p * ly)
    return np.log((1.0 - th) / th) + (p - 1.0) * (lx + ly) + (th - 2.0) * log_s


def _logistic_log_density_grads(x, y, th):
    p = 1.0 / th
    lx, ly = np.log(x), np.log(y)
    log_s = np.logaddexp(p * lx, p * ly)
    wx = np.exp(p * lx - log_s)  # x^p / S
    wy = np.exp(p * ly - log_s)
    rho1 = (p - 1.0) / x + (th - 2.0) * p * wx / x
    rho2 = (p - 1.0) / y + (th - 2.0) * p * wy / y
    # dp/dtheta = -p^2
    rho3 = (-1.0 / (th * (1.0 - th)) - p * p * (lx + ly) + log_s
            - (th - 2.0) * p * p * (wx * lx + wy * ly))
    return np.stack(np.broadcast_arrays(rho1, rho2, rho3), axis=-1)
