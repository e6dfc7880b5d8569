"""Gompertz-Pareto two-class income distribution.

Incomes are expressed in units of the mean income of their year. Below the
threshold ``x_t`` the cumulative distribution is the Gompertz curve

    G(x) = 1 - exp[-eta (e^{b x} - 1)]

and above it a Pareto tail ``1 - beta_P x^{-alpha}`` whose scale ``beta_P`` is
fixed by continuity at ``x_t``. Integrals over the Gompertz region are done by
adaptive Gauss-Kronrod quadrature; integrals over the tail are power laws and
are evaluated in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .exceptions import DomainError, ParameterError

#: Absolute tolerance used for every Gompertz-region quadrature.
QUAD_TOL = 1e-10
_QUAD_LIMIT = 200


@dataclass(frozen=True)
class GpdParams:
    """Parameters of the Gompertz-Pareto distribution.

    Parameters
    ----------
    x_t : float
        Threshold between the Gompertz and Pareto regimes (mean-income units).
    eta : float
        Gompertz shape.
    b : float
        Gompertz rate, per unit normalized income.
    alpha : float
        Pareto exponent. Must exceed 1 so that the mean is finite.
    """

    x_t: float
    eta: float
    b: float
    alpha: float

    def __post_init__(self):
        for name in ("x_t", "eta", "b", "alpha"):
            value = getattr(self, name)
            if not isinstance(value, (int, float, np.floating, np.integer)) or not math.isfinite(value):
                raise ParameterError(f"{name} must be a finite number, got {value!r}")
            object.__setattr__(self, name, float(value))
        if self.x_t <= 0 or self.eta <= 0 or self.b <= 0:
            raise ParameterError(
                f"x_t, eta and b must be positive (x_t={self.x_t}, eta={self.eta}, b={self.b})"
            )
        if self.alpha <= 1:
            raise ParameterError(f"alpha must exceed 1 for a finite mean, got {self.alpha}")

    @property
    def threshold_survival(self) -> float:
        """Population share above ``x_t``: exp[-eta (e^{b x_t} - 1)]."""
        return math.exp(-self.eta * math.expm1(self.b * self.x_t))

    @property
    def pareto_scale(self) -> float:
        """Continuity constant beta_P = x_t^alpha exp[-eta (e^{b x_t} - 1)]."""
        return self.x_t**self.alpha * self.threshold_survival

    def rescaled(self, factor: float) -> "GpdParams":
        """Parameters of ``factor * X`` when ``X`` follows this distribution."""
        if factor <= 0:
            raise ParameterError("scale factor must be positive")
        return GpdParams(self.x_t * factor, self.eta, self.b / factor, self.alpha)

    def as_dict(self) -> dict:
        return {"x_t": self.x_t, "eta": self.eta, "b": self.b, "alpha": self.alpha}


@dataclass(frozen=True)
class LorenzCurve:
    """Lorenz curve sampled on an income grid.

    ``population[i]`` is the population share with income <= ``grid[i]`` and
    ``income[i]`` the share of total income they hold.
    """

    grid: np.ndarray
    population: np.ndarray
    income: np.ndarray

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.population.tolist(), self.income.tolist()))


def _check_params(p) -> GpdParams:
    if not isinstance(p, GpdParams):
        raise ParameterError(f"expected GpdParams, got {type(p).__name__}")
    return p


def _as_income(x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if np.any(np.isnan(arr)):
        raise DomainError("income values must not be NaN")
    if np.any(arr < 0):
        raise DomainError("income values must be nonnegative")
    return arr


def _gompertz_survival(p: GpdParams, x):
    return np.exp(-p.eta * np.expm1(p.b * x))


def _pareto_survival(p: GpdParams, x):
    with np.errstate(divide="ignore"):
        return p.threshold_survival * (p.x_t / x) ** p.alpha


def cdf(p: GpdParams, x):
    """Cumulative distribution F(x): Gompertz below ``x_t``, Pareto at and above."""
    p = _check_params(p)
    x = _as_income(x)
    out = np.where(
        x < p.x_t,
        -np.expm1(-p.eta * np.expm1(p.b * np.minimum(x, p.x_t))),
        1.0 - _pareto_survival(p, np.maximum(x, p.x_t)),
    )
    return out[()] if out.ndim == 0 else out


def survival(p: GpdParams, x):
    """Complementary CDF 1 - F(x), accurate deep in the tail."""
    p = _check_params(p)
    x = _as_income(x)
    out = np.where(
        x < p.x_t,
        _gompertz_survival(p, np.minimum(x, p.x_t)),
        _pareto_survival(p, np.maximum(x, p.x_t)),
    )
    return out[()] if out.ndim == 0 else out


def _gompertz_density(p: GpdParams, x):
    return p.eta * p.b * np.exp(p.b * x - p.eta * np.expm1(p.b * x))


def _pareto_density(p: GpdParams, x):
    return p.alpha * p.pareto_scale * x ** (-p.alpha - 1.0)


def pdf(p: GpdParams, x):
    """Probability density f(x).

    The density is discontinuous at ``x_t`` in general; at exactly ``x_t`` the
    Pareto branch is returned.
    """
    p = _check_params(p)
    x = _as_income(x)
    out = np.where(
        x < p.x_t,
        _gompertz_density(p, np.minimum(x, p.x_t)),
        _pareto_density(p, np.maximum(x, p.x_t)),
    )
    return out[()] if out.ndim == 0 else out


def quantile(p: GpdParams, q):
    """Inverse of :func:`cdf` for ``0 <= q < 1``."""
    p = _check_params(p)
    q = np.asarray(q, dtype=float)
    if np.any(np.isnan(q)) or np.any(q < 0) or np.any(q >= 1):
        raise DomainError("quantile levels must lie in [0, 1)")
    s = p.threshold_survival
    in_gompertz = q < 1.0 - s
    qg = np.where(in_gompertz, q, 0.0)
    x_g = np.log1p(-np.log1p(-qg) / p.eta) / p.b
    tail = np.where(in_gompertz, s, 1.0 - q)
    x_p = p.x_t * (s / tail) ** (1.0 / p.alpha)
    out = np.where(in_gompertz, x_g, x_p)
    return out[()] if out.ndim == 0 else out


def _partial_mean_integrand(y, eta, b):
    return y * eta * b * math.exp(b * y - eta * math.expm1(b * y))


def _partial_mean(p: GpdParams, x: float) -> float:
    if x == 0.0:
        return 0.0
    val, _ = integrate.quad(
        _partial_mean_integrand, 0.0, x, args=(p.eta, p.b),
        epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=_QUAD_LIMIT,
    )
    return val


def gompertz_partial_mean(p: GpdParams, x):
    """I(x): integral of y g(y) over [0, x], for ``0 <= x <= x_t``."""
    p = _check_params(p)
    arr = _as_income(x)
    if np.any(arr > p.x_t * (1.0 + 1e-12)):
        raise DomainError(f"partial mean is only defined up to x_t={p.x_t}")
    arr = np.minimum(arr, p.x_t)
    if arr.ndim == 0:
        return _partial_mean(p, float(arr))
    return np.array([_partial_mean(p, float(v)) for v in arr.ravel()]).reshape(arr.shape)


def mean(p: GpdParams) -> float:
    """Mean income: I(x_t) + alpha x_t S / (alpha - 1), S the share above x_t."""
    p = _check_params(p)
    tail = p.alpha * p.x_t / (p.alpha - 1.0) * p.threshold_survival
    return _partial_mean(p, p.x_t) + tail


def tail_income(p: GpdParams) -> float:
    """Total income held above ``x_t``, in mean-income units."""
    p = _check_params(p)
    return p.alpha * p.x_t / (p.alpha - 1.0) * p.threshold_survival


def _income_share_gompertz(p, x, mu):
    return _partial_mean(p, x) / mu


def _income_share_pareto(p, x, mu):
    return 1.0 + p.alpha * p.pareto_scale / ((1.0 - p.alpha) * mu) * x ** (1.0 - p.alpha)


def income_share(p: GpdParams, x, *, branch: str | None = None):
    """Cumulative income share F1(x) held by incomes <= x.

    ``branch`` forces the Gompertz (``"gompertz"``) or Pareto (``"pareto"``)
    expression regardless of where ``x`` lies; it exists so that the two
    expressions can be compared at the threshold.
    """
    p = _check_params(p)
    arr = _as_income(x)
    mu = mean(p)
    flat = arr.ravel()
    out = np.empty_like(flat)
    for i, v in enumerate(flat):
        use = branch or ("gompertz" if v < p.x_t else "pareto")
        if use == "gompertz":
            if v > p.x_t * (1.0 + 1e-12):
                raise DomainError("Gompertz branch of F1 is only defined up to x_t")
            out[i] = _income_share_gompertz(p, min(v, p.x_t), mu)
        elif use == "pareto":
            out[i] = 1.0 if math.isinf(v) else _income_share_pareto(p, v, mu)
        else:
            raise ValueError(f"unknown branch {branch!r}")
    out = out.reshape(arr.shape)
    return out[()] if out.ndim == 0 else out


def lorenz(p: GpdParams, grid) -> LorenzCurve:
    """Lorenz curve (F(x), F1(x)) on an ascending grid of incomes."""
    p = _check_params(p)
    grid = _as_income(grid)
    if grid.ndim != 1:
        raise DomainError("grid must be one-dimensional")
    if np.any(np.diff(grid) < 0):
        raise DomainError("grid must be sorted in ascending order")
    population = np.atleast_1d(cdf(p, grid))
    income = np.atleast_1d(income_share(p, grid))
    if np.any(np.isinf(grid)):
        population[np.isinf(grid)] = 1.0
    return LorenzCurve(grid=grid, population=population, income=income)


def gini_analytic(p: GpdParams) -> float:
    """Gini coefficient of the fitted distribution.

    Closed form for the Pareto part, with the remaining Gompertz-region term
    ``integral_0^{x_t} I(x) g(x) dx`` done by nested quadrature.
    """
    p = _check_params(p)
    mu = mean(p)
    s = p.threshold_survival

    def inner(x):
        return _partial_mean(p, x) * math.exp(p.b * x - p.eta * math.expm1(p.b * x))

    body, _ = integrate.quad(inner, 0.0, p.x_t, epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=_QUAD_LIMIT)
    a = p.alpha
    cross = a * a * p.x_t / (mu * (1.0 - a) * (2.0 * a - 1.0)) * s * s
    return 1.0 - 2.0 * (p.eta * p.b / mu * body + s + cross)
