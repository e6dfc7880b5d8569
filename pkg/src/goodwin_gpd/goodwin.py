"""Goodwin growth cycle: wage share and employment from income distributions.

The wage share ``u`` and employment rate ``v`` obey the Lotka-Volterra form

    v'/v = a2 - b2 u          u'/u = -a1 + b1 v

with employment as prey and wage share as predator. Both are handled in
percent throughout; rates are per year, ``b1`` and ``b2`` per year per
percentage point, so the center ``(u_c, v_c) = (a2/b2, a1/b1)`` comes out in
percent and the period ``2 pi / sqrt(a1 a2)`` in years.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from .empirical import IncomeSample, income_share_below
from .exceptions import CycleError, DataError, DomainError
from .gpd import GpdParams, cdf, income_share

MIN_SERIES_LENGTH = 5


@dataclass(frozen=True)
class UvPoint:
    year: int
    u: float
    v: float

    def __post_init__(self):
        if not (0 < self.u < 100 and 0 < self.v < 100):
            raise DomainError(f"year {self.year}: u and v must lie in (0, 100), got ({self.u}, {self.v})")


class UvSeries(Sequence):
    """Year-ordered sequence of :class:`UvPoint`."""

    def __init__(self, points):
        pts = sorted(points, key=lambda p: p.year)
        years = [p.year for p in pts]
        if len(set(years)) != len(years):
            raise DataError("duplicate years in u-v series")
        self._points = tuple(pts)

    @classmethod
    def from_arrays(cls, years, u, v) -> "UvSeries":
        return cls(UvPoint(int(y), float(a), float(b)) for y, a, b in zip(years, u, v))

    def __getitem__(self, i):
        return self._points[i]

    def __len__(self):
        return len(self._points)

    def __eq__(self, other):
        return isinstance(other, UvSeries) and self._points == other._points

    @property
    def years(self) -> np.ndarray:
        return np.array([p.year for p in self._points], dtype=int)

    @property
    def u(self) -> np.ndarray:
        return np.array([p.u for p in self._points])

    @property
    def v(self) -> np.ndarray:
        return np.array([p.v for p in self._points])

    def is_consecutive(self) -> bool:
        return bool(np.all(np.diff(self.years) == 1))


@dataclass(frozen=True)
class LvCoefficients:
    """Lotka-Volterra rates with the derived cycle center and period.

    ``r1_fit_rss`` and ``r2_fit_rss`` are the residual sums of squares of the
    u'/u and v'/v regressions when the coefficients were estimated.
    """

    a1: float
    b1: float
    a2: float
    b2: float
    r1_fit_rss: float = float("nan")
    r2_fit_rss: float = float("nan")

    @property
    def u_c(self) -> float:
        return self.a2 / self.b2 if self.b2 != 0 else float("nan")

    @property
    def v_c(self) -> float:
        return self.a1 / self.b1 if self.b1 != 0 else float("nan")

    @property
    def period(self) -> float:
        prod = self.a1 * self.a2
        return 2.0 * math.pi / math.sqrt(prod) if prod > 0 else float("nan")

    T = period

    def vector_field(self, u, v):
        """(u', v') of the cycle equations at (u, v)."""
        return u * (-self.a1 + self.b1 * v), v * (self.a2 - self.b2 * u)

    def as_dict(self) -> dict:
        return {
            "a1": self.a1,
            "b1": self.b1,
            "a2": self.a2,
            "b2": self.b2,
            "u_c": self.u_c,
            "v_c": self.v_c,
            "T": self.period,
            "r1_fit_rss": self.r1_fit_rss,
            "r2_fit_rss": self.r2_fit_rss,
        }


@dataclass(frozen=True)
class GoodwinStructuralParams:
    """Structural Goodwin parameters.

    sigma_inv is capital productivity, alpha_lp labor productivity growth,
    beta_pg population growth, and rho and gamma the slope and constant of the
    real-wage Phillips curve.
    """

    sigma_inv: float
    alpha_lp: float
    beta_pg: float
    rho: float
    gamma: float

    def __post_init__(self):
        if not self.sigma_inv > 0:
            raise DomainError("sigma_inv (capital productivity) must be positive")


class StructuralEstimate(NamedTuple):
    params: GoodwinStructuralParams
    a2_residual: float


def uv_from_fit(p: GpdParams, x_d: float, *, year: int) -> UvPoint:
    """Employment v = 100 (1 - F(x_d)) and wage share u = 100 F1(x_t)."""
    if not 0 < x_d < p.x_t:
        raise DomainError(f"x_d must lie in (0, x_t={p.x_t}), got {x_d}")
    v = 100.0 * (1.0 - float(cdf(p, x_d)))
    u = 100.0 * float(income_share(p, p.x_t, branch="gompertz"))
    return UvPoint(year, u, v)


def uv_from_sample(s: IncomeSample, x_t: float, x_d: float) -> UvPoint:
    """Raw-data counterpart of :func:`uv_from_fit` on a normalized sample."""
    if not 0 < x_d < x_t:
        raise DomainError(f"x_d must lie in (0, x_t={x_t}), got {x_d}")
    below_xd = np.count_nonzero(s.values <= x_d) / s.n
    return UvPoint(s.year, 100.0 * income_share_below(s, x_t), 100.0 * (1.0 - below_xd))


def structural_to_lv(g: GoodwinStructuralParams) -> LvCoefficients:
    a1 = g.alpha_lp + g.gamma
    b1 = g.rho
    a2 = g.sigma_inv - (g.alpha_lp + g.beta_pg)
    b2 = g.sigma_inv
    if a2 <= 0:
        warnings.warn(
            f"a2 = {a2:.6g} <= 0: employment cannot grow even with zero wage share",
            RuntimeWarning,
            stacklevel=2,
        )
    return LvCoefficients(a1, b1, a2, b2)


def lv_to_structural(c: LvCoefficients, alpha_lp: float, beta_pg: float) -> StructuralEstimate:
    """Invert the rate mapping given externally supplied alpha and beta.

    The mapping has four equations in five unknowns plus one redundancy, so
    ``a2`` is not used; its mismatch with 1/sigma - (alpha + beta) is returned.
    """
    sigma_inv = c.b2
    params = GoodwinStructuralParams(
        sigma_inv=sigma_inv,
        alpha_lp=alpha_lp,
        beta_pg=beta_pg,
        rho=c.b1,
        gamma=c.a1 - alpha_lp,
    )
    return StructuralEstimate(params, c.a2 - (sigma_inv - (alpha_lp + beta_pg)))


class GrowthTable(NamedTuple):
    """Per-year finite-difference derivatives and growth rates."""

    years: np.ndarray
    u: np.ndarray
    v: np.ndarray
    du_dt: np.ndarray
    dv_dt: np.ndarray
    u_growth: np.ndarray
    v_growth: np.ndarray


def _check_series(series: UvSeries):
    if len(series) < MIN_SERIES_LENGTH:
        raise DataError(
            f"cycle estimation needs at least {MIN_SERIES_LENGTH} consecutive years, got {len(series)}"
        )
    if not series.is_consecutive():
        raise DataError(f"u-v series years are not consecutive: {series.years.tolist()}")


def growth_rates(series: UvSeries) -> GrowthTable:
    """Central differences in the interior, one-sided at both ends, dt = 1 year."""
    _check_series(series)
    u, v = series.u, series.v
    du = np.gradient(u)
    dv = np.gradient(v)
    return GrowthTable(series.years, u, v, du, dv, du / u, dv / v)


def _ols(x, y):
    A = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - (slope * x + intercept)
    return float(slope), float(intercept), float(resid @ resid)


def estimate_lv(series: UvSeries) -> LvCoefficients:
    """Regress u'/u on v and v'/v on u to recover the cycle rates.

    u'/u = -a1 + b1 v gives ``b1`` as slope and ``-a1`` as intercept;
    v'/v = a2 - b2 u gives ``-b2`` as slope and ``a2`` as intercept. Any sign
    that rules out a closed cycle raises :class:`CycleError`.
    """
    tab = growth_rates(series)
    b1, neg_a1, rss1 = _ols(tab.v, tab.u_growth)
    neg_b2, a2, rss2 = _ols(tab.u, tab.v_growth)
    a1, b2 = -neg_a1, -neg_b2
    diagnostics = {"a1": a1, "b1": b1, "a2": a2, "b2": b2, "r1_fit_rss": rss1, "r2_fit_rss": rss2}
    problems = []
    if b1 <= 0:
        problems.append(f"slope of u'/u on v is {b1:.4g} (needs > 0)")
    if b2 <= 0:
        problems.append(f"slope of v'/v on u is {-b2:.4g} (needs < 0)")
    if a1 <= 0:
        problems.append(f"intercept of u'/u is {-a1:.4g} (needs < 0)")
    if a2 <= 0:
        problems.append(f"intercept of v'/v is {a2:.4g} (needs > 0)")
    if problems:
        raise CycleError("series does not trace a Goodwin cycle: " + "; ".join(problems), diagnostics)
    return LvCoefficients(a1, b1, a2, b2, rss1, rss2)


def write_uv_csv(path, series: UvSeries, header_lines: Sequence[str] = ()):
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["year", "u", "v"])
        for p in series:
            w.writerow([p.year, repr(p.u), repr(p.v)])


def read_uv_csv(path) -> UvSeries:
    path = Path(path)
    points = []
    header = None
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        for row in reader:
            if not row or row[0].startswith("#"):
                continue
            if header is None:
                header = [c.strip().lower() for c in row]
                if header[:3] != ["year", "u", "v"]:
                    raise DataError(f"{path}:{reader.line_num}: expected header 'year,u,v'")
                continue
            try:
                points.append(UvPoint(int(row[0]), float(row[1]), float(row[2])))
            except (ValueError, IndexError):
                raise DataError(f"{path}:{reader.line_num}: cannot parse {row!r}") from None
    if header is None:
        raise DataError(f"{path}: missing 'year,u,v' header")
    return UvSeries(points)
