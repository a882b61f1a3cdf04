"""Seeded samplers for the simulation-study distributions.

Each generator returns raw (unstandardized) data of shape ``(n, 2)`` and is
a deterministic function of its arguments. True tail copulas:

=====================  =============================================
cauchy_quadrant        x + y - sqrt(x^2 + y^2)
model3_null_mixture    p (x + y - sqrt(x^2 + y^2))
model1_alt_mixture     0.75 (x + y - (x^4 + y^4)^(1/4))
linear_factor          min(lx, my) + min((1-l)x, (1-m)y)
asym_logistic          x + phi y - sqrt(x^2 + (phi y)^2)
=====================  =============================================
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

GENERATORS = ("cauchy_quadrant", "model3_null_mixture", "model1_alt_mixture",
              "linear_factor", "asym_logistic")


def _rng(seed):
    return np.random.default_rng(seed)


def _check_unit(name, value):
    if not 0.0 < value < 1.0:
        raise ConfigError(f"{name} must lie in (0, 1), got {value}")


def positive_stable(alpha: float, size, rng) -> np.ndarray:
    """Positive stable variates with Laplace transform ``exp(-s^alpha)``.

    Kanter's representation of the Chambers-Mallows-Stuck sampler.
    """
    _check_unit("stable exponent", alpha)
    u = rng.uniform(0.0, np.pi, size)
    w = rng.standard_exponential(size)
    a = np.sin(alpha * u) / np.sin(u) ** (1.0 / alpha)
    b = (np.sin((1.0 - alpha) * u) / w) ** ((1.0 - alpha) / alpha)
    return a * b


def _half_cauchy_pair(n, rng):
    # spherical bivariate Cauchy = bivariate normal over an independent |N(0,1)|
    z = rng.standard_normal((n, 2))
    w = np.abs(rng.standard_normal(n))
    return np.abs(z / w[:, None])


def gen_cauchy_quadrant(n: int, seed=None) -> np.ndarray:
    """Density ``2 / (pi (1 + x^2 + y^2)^(3/2))`` on the positive quadrant."""
    return _half_cauchy_pair(n, _rng(seed))


def gen_model3_null_mixture(n: int, p: float = 0.75, seed=None) -> np.ndarray:
    """Bernoulli(p) mixture of the quadrant Cauchy and a countermonotonic pair.

    The countermonotonic branch is ``(X, 1/X)`` for half-Cauchy ``X``, since
    ``F^-1(1 - F(x)) = 1/x`` for ``F(x) = (2/pi) arctan x``.
    """
    _check_unit("mixing probability", p)
    rng = _rng(seed)
    first = _half_cauchy_pair(n, rng)
    x2 = np.abs(rng.standard_cauchy(n))
    second = np.column_stack([x2, 1.0 / x2])
    pick = rng.uniform(size=n) < p
    return np.where(pick[:, None], first, second)


def logistic_frechet(theta_dep: float, n: int, rng) -> np.ndarray:
    """Unit-Frechet pair with d.f. ``exp(-(x^(-1/t) + y^(-1/t))^t)``."""
    _check_unit("dependence parameter", theta_dep)
    s = positive_stable(theta_dep, n, rng)
    e = rng.standard_exponential((n, 2))
    return (s[:, None] / e) ** theta_dep


def gen_logistic_frechet(theta_dep: float, n: int, seed=None) -> np.ndarray:
    """Logistic pair on ``(-1, inf)^2``: ``exp(-[(1+x)^(-1/t) + (1+y)^(-1/t)]^t)``.

    With ``theta_dep = 1/4`` this is the alternative for the fixed model.
    """
    return logistic_frechet(theta_dep, n, _rng(seed)) - 1.0


def _frechet_countermonotone(x):
    """``F^-1(1 - F(x))`` for ``F(x) = exp(-1/(1+x))`` on ``(-1, inf)``."""
    return -1.0 / np.log(-np.expm1(-1.0 / (1.0 + x))) - 1.0


def gen_model1_alt_mixture(n: int, p: float = 0.75, theta_dep: float = 0.25, seed=None) -> np.ndarray:
    _check_unit("mixing probability", p)
    rng = _rng(seed)
    first = logistic_frechet(theta_dep, n, rng) - 1.0
    # unit Frechet minus one
    x2 = -1.0 / np.log(rng.uniform(size=n)) - 1.0
    second = np.column_stack([x2, _frechet_countermonotone(x2)])
    pick = rng.uniform(size=n) < p
    return np.where(pick[:, None], first, second)


def gen_linear_factor(lam: float = 0.95, mu: float = 0.65, n: int = 1500, seed=None) -> np.ndarray:
    """``(l Z1 + (1-l) Z2, m Z1 + (1-m) Z2)`` with standard Pareto factors."""
    _check_unit("lambda", lam)
    _check_unit("mu", mu)
    rng = _rng(seed)
    z = 1.0 / rng.uniform(size=(n, 2))
    return np.column_stack([lam * z[:, 0] + (1 - lam) * z[:, 1],
                            mu * z[:, 0] + (1 - mu) * z[:, 1]])


def gen_asym_logistic(phi: float = 0.25, n: int = 1500, seed=None) -> np.ndarray:
    """Asymmetric logistic d.f. with unit Frechet margins shifted by -1.

    ``(A - 1, max(phi B, C) - 1)`` where ``(A, B)`` is logistic with
    dependence 1/2 and ``C`` is Frechet with scale ``1 - phi``.
    """
    _check_unit("phi", phi)
    rng = _rng(seed)
    ab = logistic_frechet(0.5, n, rng)
    c = -(1.0 - phi) / np.log(rng.uniform(size=n))
    return np.column_stack([ab[:, 0] - 1.0, np.maximum(phi * ab[:, 1], c) - 1.0])


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in GENERATORS:
            raise ConfigError(f"unknown generator {self.kind!r}; expected one of {GENERATORS}")

    def sample(self, n: int, seed) -> np.ndarray:
        p = self.params
        if self.kind == "cauchy_quadrant":
            return gen_cauchy_quadrant(n, seed)
        if self.kind == "model3_null_mixture":
            return gen_model3_null_mixture(n, p.get("p", 0.75), seed)
        if self.kind == "model1_alt_mixture":
            return gen_model1_alt_mixture(n, p.get("p", 0.75), p.get("theta_dep", 0.25), seed)
        if self.kind == "linear_factor":
            return gen_linear_factor(p.get("lambda", 0.95), p.get("mu", 0.65), n, seed)
        return gen_asym_logistic(p.get("phi", 0.25), n, seed)


def true_tail_copula(kind: str, params: dict | None = None):
    """Callable ``R(x, y)`` of the generator's tail copula."""
    p = params or {}
    if kind == "cauchy_quadrant":
        return lambda x, y: x + y - np.hypot(x, y)
    if kind == "model3_null_mixture":
        w = p.get("p", 0.75)
        return lambda x, y: w * (x + y - np.hypot(x, y))
    if kind == "model1_alt_mixture":
        w = p.get("p", 0.75)
        e = 1.0 / p.get("theta_dep", 0.25)
        return lambda x, y: w * (x + y - (x ** e + y ** e) ** (1.0 / e))
    if kind == "linear_factor":
        lam, mu = p.get("lambda", 0.95), p.get("mu", 0.65)
        return lambda x, y: np.minimum(lam * x, mu * y) + np.minimum((1 - lam) * x, (1 - mu) * y)
    if kind == "asym_logistic":
        phi = p.get("phi", 0.25)
        return lambda x, y: x + phi * y - np.hypot(x, phi * y)
    raise ConfigError(f"unknown generator {kind!r}")
