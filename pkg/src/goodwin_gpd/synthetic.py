"""Synthetic yearly panels consistent with a prescribed Goodwin cycle.

Real survey microdata are not distributable, so end-to-end checks run on
panels built here: a Lotka-Volterra orbit is integrated through a given
starting point and sampled once a year, and every year gets a unit-mean
Gompertz-Pareto distribution whose wage share and employment rate equal the
orbit's values. Gompertz shapes are borrowed from the reference fits; the
Pareto exponent is solved for, and the whole distribution rescaled to mean 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .exceptions import DomainError
from .goodwin import LvCoefficients, UvSeries
from .gpd import GpdParams, cdf, gompertz_partial_mean, mean, quantile
from .lv_sim import SimConfig, integrate
from .reference import REFERENCE_FITS, REFERENCE_MINWAGE_SHARE_ENDS


def coefficients_from_cycle(u_c: float, v_c: float, period: float, rate_ratio: float = 1.0) -> LvCoefficients:
    """Rates with the given center and small-amplitude period.

    ``rate_ratio`` is a1/a2, the one degree of freedom the center and period
    leave open.
    """
    if not (u_c > 0 and v_c > 0 and period > 0 and rate_ratio > 0):
        raise DomainError("center, period and rate ratio must be positive")
    omega = 2.0 * math.pi / period
    a1 = omega * math.sqrt(rate_ratio)
    a2 = omega / math.sqrt(rate_ratio)
    return LvCoefficients(a1, a1 / v_c, a2, a2 / u_c)


def simulate_uv(c: LvCoefficients, start: tuple[float, float], years: Sequence[int], dt: float = 1e-3) -> UvSeries:
    """Orbit through ``start = (u, v)`` sampled at each integer year."""
    years = list(years)
    span = years[-1] - years[0]
    steps_per_year = int(round(1.0 / dt))
    u0, v0 = start
    traj = integrate(SimConfig(c, (v0, u0), 1.0 / steps_per_year, max(span, 1.0 / steps_per_year)))
    idx = [(y - years[0]) * steps_per_year for y in years]
    return UvSeries.from_arrays(years, traj.y[idx], traj.x[idx])


def params_for_wage_share(base: GpdParams, u: float) -> GpdParams:
    """Unit-mean parameters sharing ``base``'s Gompertz shape with F1(x_t) = u.

    ``u`` is a fraction. Solving I(x_t) / (I(x_t) + alpha x_t S / (alpha-1)) = u
    for alpha and then rescaling incomes leaves the income share unchanged.
    """
    if not 0 < u < 1:
        raise DomainError("wage share must lie in (0, 1)")
    s = base.threshold_survival
    ratio = float(gompertz_partial_mean(base, base.x_t)) / (base.x_t * s)
    k = ratio * (1.0 - u) / u
    if k <= 1.0:
        raise DomainError(f"wage share {u:.4f} unreachable with this Gompertz shape")
    shaped = GpdParams(base.x_t, base.eta, base.b, k / (k - 1.0))
    return shaped.rescaled(1.0 / mean(shaped))


@dataclass(frozen=True)
class PanelYear:
    year: int
    params: GpdParams
    x_d: float
    minimum_wage: float
    u: float
    v: float


def goodwin_panel(
    c: LvCoefficients,
    start: tuple[float, float],
    years: Sequence[int],
    shapes: Iterable[GpdParams] | None = None,
    x_d_fraction: float = 0.5,
) -> list[PanelYear]:
    """Per-year unit-mean distributions reproducing an orbit's (u, v).

    ``shapes`` supplies one base distribution per year (defaults to the
    reference fits in order). Minimum wages are in normalized units.
    """
    series = simulate_uv(c, start, years)
    if shapes is None:
        shapes = [row.params for row in REFERENCE_FITS]
    shapes = list(shapes)
    if len(shapes) < len(series):
        raise DomainError("need one base shape per year")
    panel = []
    for pt, base in zip(series, shapes):
        p = params_for_wage_share(base, pt.u / 100.0)
        x_d = float(quantile(p, 1.0 - pt.v / 100.0))
        panel.append(PanelYear(pt.year, p, x_d, x_d / x_d_fraction, pt.u, pt.v))
    return panel


def ramp_minimum_wages(
    params_by_year: dict[int, GpdParams],
    ends: dict[int, float] = REFERENCE_MINWAGE_SHARE_ENDS,
) -> dict[int, float]:
    """Minimum wages (normalized units) whose population share ramps linearly.

    ``ends`` maps the first and last year to the share of the population
    earning at most the minimum wage; intermediate years are interpolated.
    """
    (y0, s0), (y1, s1) = sorted(ends.items())
    out = {}
    for year, p in sorted(params_by_year.items()):
        share = float(np.interp(year, [y0, y1], [s0, s1]))
        if share >= float(cdf(p, p.x_t)):
            raise DomainError(f"year {year}: minimum-wage share {share} reaches the Pareto regime")
        out[year] = float(quantile(p, share))
    return out
