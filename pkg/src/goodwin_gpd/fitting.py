"""Estimation of Gompertz-Pareto parameters from a normalized income sample.

The Gompertz part is fitted to the empirical CDF below the threshold by a
Levenberg-Marquardt iteration, the Pareto exponent by a least-squares line
through log survival against log income above it, and the threshold itself
by an exhaustive search over empirical quantiles.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .empirical import MIN_FIT_SIZE, EmpiricalCDF, IncomeSample
from .exceptions import ConvergenceError, DataError, ParameterError
from .gpd import GpdParams, mean

MIN_GOMPERTZ_POINTS = 50
MIN_TAIL_POINTS = 30
DEFAULT_MAX_ITER = 200
DEFAULT_MAX_POINTS = 5000
#: Percentile grid (start, stop inclusive, step) for the threshold search.
DEFAULT_PERCENTILES = (60.0, 99.0, 0.5)
MEAN_CHECK_BAND = (0.99, 1.01)
_MULTISTART = (0.3, 1.0, 3.0)


class MeanCheckWarning(RuntimeWarning):
    """The fitted distribution's mean is outside the accepted band around 1."""


class LMResult(NamedTuple):
    theta: np.ndarray
    cost: float
    iterations: int
    converged: bool


def levenberg_marquardt(
    residual: Callable[[np.ndarray], np.ndarray],
    jacobian: Callable[[np.ndarray], np.ndarray],
    theta0,
    *,
    max_iter: int = DEFAULT_MAX_ITER,
    xtol: float = 1e-13,
    ftol: float = 1e-15,
    lam0: float = 1e-3,
) -> LMResult:
    """Minimize ``sum(residual(theta)**2)`` with Marquardt-scaled damping.

    Each iteration solves ``(J'J + lam diag(J'J)) step = -J'r`` and adapts
    ``lam`` by factors of 10 depending on whether the cost fell.
    """
    theta = np.asarray(theta0, dtype=float).copy()
    r = residual(theta)
    cost = float(r @ r)
    if not np.isfinite(cost):
        return LMResult(theta, cost, 0, False)
    lam = lam0
    for it in range(1, max_iter + 1):
        J = jacobian(theta)
        JtJ = J.T @ J
        g = J.T @ r
        diag = np.maximum(np.diag(JtJ), 1e-300)
        while True:
            A = JtJ + lam * np.diag(diag)
            try:
                step = np.linalg.solve(A, -g)
            except np.linalg.LinAlgError:
                step = np.full_like(theta, np.nan)
            trial = theta + step
            r_new = residual(trial) if np.all(np.isfinite(step)) else None
            new_cost = float(r_new @ r_new) if r_new is not None else np.inf
            if np.isfinite(new_cost) and new_cost <= cost:
                break
            lam *= 10.0
            if lam > 1e16:
                # No descent direction left at working precision.
                return LMResult(theta, cost, it, True)
        small_step = np.max(np.abs(step)) <= xtol * (1.0 + np.max(np.abs(theta)))
        small_gain = cost - new_cost <= ftol * cost
        theta, r, cost = trial, r_new, new_cost
        lam = max(lam / 10.0, 1e-12)
        if small_step or small_gain or cost == 0.0:
            return LMResult(theta, cost, it, True)
    return LMResult(theta, cost, max_iter, False)


class GompertzFit(NamedTuple):
    eta: float
    b: float
    rss: float
    iterations: int


class ParetoFit(NamedTuple):
    alpha: float
    rss: float
    intercept: float


def _gompertz_residual_jacobian(x, F):
    def residual(theta):
        eta, b = np.exp(theta)
        with np.errstate(over="ignore", invalid="ignore"):
            return -np.expm1(-eta * np.expm1(b * x)) - F

    def jacobian(theta):
        eta, b = np.exp(theta)
        with np.errstate(over="ignore", invalid="ignore"):
            ebx = np.exp(b * x)
            surv = np.exp(-eta * (ebx - 1.0))
        d_log_eta = eta * (ebx - 1.0) * surv
        d_log_b = eta * b * x * ebx * surv
        return np.column_stack([d_log_eta, d_log_b])

    return residual, jacobian


def fit_gompertz(x, F, init=None, *, max_iter: int = DEFAULT_MAX_ITER) -> GompertzFit:
    """Least-squares fit of G(x) = 1 - exp[-eta (e^{b x} - 1)] to CDF points.

    ``x`` and ``F`` are the sub-threshold empirical CDF locations and heights.
    The default start is ``eta = 1, b = 1 / median(x)``; if that does not
    converge a 3x3 grid of rescaled starts is tried and the best converged
    fit kept.
    """
    x = np.asarray(x, dtype=float)
    F = np.asarray(F, dtype=float)
    if x.shape != F.shape or x.ndim != 1:
        raise DataError("x and F must be one-dimensional arrays of equal length")
    if x.size < MIN_GOMPERTZ_POINTS:
        raise DataError(f"Gompertz fit needs at least {MIN_GOMPERTZ_POINTS} points, got {x.size}")
    if init is None:
        med = float(np.median(x))
        init = (1.0, 1.0 / med if med > 0 else 1.0)
    eta0, b0 = init
    if eta0 <= 0 or b0 <= 0:
        raise ParameterError("initial eta and b must be positive")
    residual, jacobian = _gompertz_residual_jacobian(x, F)

    res = levenberg_marquardt(residual, jacobian, np.log([eta0, b0]), max_iter=max_iter)
    total_iter = res.iterations
    if not res.converged:
        best = None
        for fe in _MULTISTART:
            for fb in _MULTISTART:
                trial = levenberg_marquardt(
                    residual, jacobian, np.log([eta0 * fe, b0 * fb]), max_iter=max_iter
                )
                total_iter += trial.iterations
                if trial.converged and (best is None or trial.cost < best.cost):
                    best = trial
        if best is None:
            raise ConvergenceError(
                f"Gompertz fit did not converge within {max_iter} iterations from any start",
                iterations=total_iter,
                diagnostics={"last_cost": res.cost},
            )
        res = best
    eta, b = np.exp(res.theta)
    return GompertzFit(float(eta), float(b), float(res.cost), total_iter)


def fit_pareto_tail(x, F) -> ParetoFit:
    """Slope of ln(1 - F) against ln(x) over the tail; alpha is minus the slope."""
    x = np.asarray(x, dtype=float)
    F = np.asarray(F, dtype=float)
    if x.shape != F.shape or x.ndim != 1:
        raise DataError("x and F must be one-dimensional arrays of equal length")
    if x.size < MIN_TAIL_POINTS:
        raise DataError(f"tail fit needs at least {MIN_TAIL_POINTS} points, got {x.size}")
    if np.any(F >= 1.0):
        raise DataError("tail survival 1 - F must be positive; drop the maximum observation")
    if np.any(x <= 0):
        raise DataError("tail incomes must be positive")
    lx = np.log(x)
    ls = np.log1p(-F)
    A = np.column_stack([lx, np.ones_like(lx)])
    (slope, intercept), *_ = np.linalg.lstsq(A, ls, rcond=None)
    resid = ls - (slope * lx + intercept)
    return ParetoFit(float(-slope), float(resid @ resid), float(intercept))


def hill_alpha(values, k: int) -> float:
    """Hill estimate of the tail exponent from the ``k`` largest observations."""
    x = np.sort(np.asarray(values, dtype=float).ravel())
    if not 1 <= k < x.size:
        raise DataError(f"Hill estimator needs 1 <= k < n, got k={k}, n={x.size}")
    ref = x[-k - 1]
    if ref <= 0:
        raise DataError("Hill estimator needs positive reference order statistic")
    return float(k / np.sum(np.log(x[-k:] / ref)))


def threshold_candidates(s: IncomeSample, percentiles=DEFAULT_PERCENTILES) -> np.ndarray:
    """Empirical quantiles of ``s`` on an evenly spaced percentile grid."""
    lo, hi, step = percentiles
    levels = np.arange(lo, hi + step / 2, step)
    return np.unique(np.percentile(s.values, levels))


def _split(xs, Fs, x_t):
    below = xs < x_t
    tail = (~below) & (Fs < 1.0)
    return xs[below], Fs[below], xs[tail], Fs[tail]


class ThresholdFit(NamedTuple):
    objective: float
    gompertz: GompertzFit
    pareto: ParetoFit
    n_below: int
    n_above: int


def evaluate_threshold(xs, Fs, x_t: float, *, max_iter: int = DEFAULT_MAX_ITER) -> ThresholdFit:
    """Fit both regimes for one threshold and return the combined misfit.

    The objective is ``gompertz_rss / n_below + pareto_rss / n_above`` with
    counts of fitted CDF points on each side.
    """
    xb, Fb, xa, Fa = _split(xs, Fs, x_t)
    g = fit_gompertz(xb, Fb, max_iter=max_iter)
    p = fit_pareto_tail(xa, Fa)
    objective = g.rss / xb.size + p.rss / xa.size
    return ThresholdFit(objective, g, p, int(xb.size), int(xa.size))


class ThresholdSearch(NamedTuple):
    x_t: float
    objective: float
    candidates: np.ndarray
    objectives: np.ndarray
    best: ThresholdFit


def find_threshold(
    s: IncomeSample,
    candidates=None,
    *,
    max_points: int | None = DEFAULT_MAX_POINTS,
    max_iter: int = DEFAULT_MAX_ITER,
) -> ThresholdSearch:
    """Grid search for the threshold minimizing the combined two-regime misfit.

    Candidates whose fits fail (too few points, no convergence, tail exponent
    <= 1) get an objective of NaN. The first candidate attaining the minimum
    wins, so the result is deterministic for a fixed grid.
    """
    if candidates is None:
        candidates = threshold_candidates(s)
    candidates = np.asarray(candidates, dtype=float)
    if candidates.ndim != 1 or candidates.size == 0:
        raise DataError("need at least one threshold candidate")
    if np.any(np.diff(candidates) <= 0):
        raise DataError("threshold candidates must be strictly ascending")
    xs, Fs = EmpiricalCDF(s.values).points(max_points)
    objectives = np.full(candidates.size, np.nan)
    fits: list[ThresholdFit | None] = [None] * candidates.size
    for i, c in enumerate(candidates):
        try:
            tf = evaluate_threshold(xs, Fs, c, max_iter=max_iter)
        except (DataError, ConvergenceError):
            continue
        if tf.pareto.alpha <= 1.0 or not np.isfinite(tf.objective):
            continue
        objectives[i] = tf.objective
        fits[i] = tf
    if np.all(np.isnan(objectives)):
        raise ConvergenceError(
            "no threshold candidate gave converged fits on both sides",
            diagnostics={"candidates": candidates.tolist()},
        )
    i_best = int(np.nanargmin(objectives))
    return ThresholdSearch(
        float(candidates[i_best]), float(objectives[i_best]), candidates, objectives, fits[i_best]
    )


@dataclass(frozen=True)
class FitResult:
    params: GpdParams
    gompertz_rss: float
    pareto_rss: float
    mean_check: float
    converged: bool
    iterations: int
    n_below: int
    n_above: int
    objective: float
    hill_alpha: float
    threshold_fixed: bool
    warnings: tuple[str, ...] = field(default=())

    def as_dict(self) -> dict:
        return {
            **self.params.as_dict(),
            "pareto_scale": self.params.pareto_scale,
            "gompertz_rss": self.gompertz_rss,
            "pareto_rss": self.pareto_rss,
            "mean_check": self.mean_check,
            "converged": self.converged,
            "iterations": self.iterations,
            "n_below": self.n_below,
            "n_above": self.n_above,
            "objective": self.objective,
            "hill_alpha": self.hill_alpha,
            "threshold_fixed": self.threshold_fixed,
            "warnings": list(self.warnings),
        }


def fit_full(
    s: IncomeSample,
    *,
    x_t: float | None = None,
    candidates=None,
    max_points: int | None = DEFAULT_MAX_POINTS,
    max_iter: int = DEFAULT_MAX_ITER,
) -> FitResult:
    """Fit all four parameters to a normalized sample.

    With ``x_t`` given the threshold search is skipped. A fitted mean outside
    ``MEAN_CHECK_BAND`` emits :class:`MeanCheckWarning` and marks the result
    as not converged, without raising.
    """
    if not s.normalized:
        raise DataError(f"year {s.year}: fit_full needs a normalized sample")
    if s.n < MIN_FIT_SIZE:
        raise DataError(f"year {s.year}: need at least {MIN_FIT_SIZE} incomes, got {s.n}")
    fixed = x_t is not None
    if not fixed:
        search = find_threshold(s, candidates, max_points=max_points, max_iter=max_iter)
        x_t, tf = search.x_t, search.best
    else:
        xs, Fs = EmpiricalCDF(s.values).points(max_points)
        try:
            tf = evaluate_threshold(xs, Fs, float(x_t), max_iter=max_iter)
        except DataError as exc:
            raise ConvergenceError(f"year {s.year}: fixed x_t={x_t}: {exc}") from exc
    try:
        params = GpdParams(x_t, tf.gompertz.eta, tf.gompertz.b, tf.pareto.alpha)
    except ParameterError as exc:
        raise ConvergenceError(f"year {s.year}: fitted parameters invalid: {exc}") from exc
    m = mean(params)
    notes = []
    ok = bool(np.isfinite(tf.gompertz.rss) and np.isfinite(tf.pareto.rss))
    lo, hi = MEAN_CHECK_BAND
    if not lo <= m <= hi:
        msg = f"year {s.year}: fitted mean {m:.4f} outside [{lo}, {hi}]"
        warnings.warn(msg, MeanCheckWarning, stacklevel=2)
        notes.append(msg)
        ok = False
    n_tail = int(np.count_nonzero(s.values >= x_t))
    hill = hill_alpha(s.values, n_tail) if 1 <= n_tail < s.n else float("nan")
    return FitResult(
        params=params,
        gompertz_rss=tf.gompertz.rss,
        pareto_rss=tf.pareto.rss,
        mean_check=m,
        converged=ok,
        iterations=tf.gompertz.iterations,
        n_below=tf.n_below,
        n_above=tf.n_above,
        objective=tf.objective,
        hill_alpha=hill,
        threshold_fixed=fixed,
        warnings=tuple(notes),
    )
