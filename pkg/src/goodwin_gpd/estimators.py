"""scikit-learn compatible wrappers around the fitting and cycle routines."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, DensityMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import empirical, fitting, goodwin, gpd
from .lv_sim import sample_gpd


def _incomes(X) -> np.ndarray:
    X = check_array(X, ensure_2d=False, dtype=np.float64)
    if X.ndim == 2:
        if X.shape[1] != 1:
            raise ValueError(f"expected a single income column, got {X.shape[1]} columns")
        X = X[:, 0]
    return X


class GompertzParetoEstimator(TransformerMixin, DensityMixin, BaseEstimator):
    """Fit a Gompertz-Pareto distribution to incomes.

    Parameters
    ----------
    threshold : float or None
        Fixed threshold in mean-income units; searched for when None.
    percentiles : tuple of (start, stop, step)
        Percentile grid for the threshold search.
    max_points : int or None
        Number of empirical CDF points kept (evenly spaced in rank).
    max_iter : int
        Iteration cap for the Gompertz least-squares fit.
    normalize : bool
        Divide incomes by their mean before fitting. Attributes ending in
        ``_`` are then in normalized units and ``scale_`` converts back.

    Attributes
    ----------
    params_ : GpdParams
    fit_result_ : FitResult
    scale_ : float
    gini_ : float
        Gini coefficient of the fitted distribution.
    gini_raw_ : float
        Gini coefficient of the training incomes.
    """

    def __init__(
        self,
        threshold=None,
        percentiles=fitting.DEFAULT_PERCENTILES,
        max_points=fitting.DEFAULT_MAX_POINTS,
        max_iter=fitting.DEFAULT_MAX_ITER,
        normalize=True,
    ):
        self.threshold = threshold
        self.percentiles = percentiles
        self.max_points = max_points
        self.max_iter = max_iter
        self.normalize = normalize

    def fit(self, X, y=None):
        x = _incomes(X)
        sample = empirical.IncomeSample(0, x, normalized=not self.normalize)
        if self.normalize:
            sample = empirical.normalize(sample)
        candidates = None
        if self.threshold is None:
            candidates = fitting.threshold_candidates(sample, self.percentiles)
        result = fitting.fit_full(
            sample,
            x_t=self.threshold,
            candidates=candidates,
            max_points=self.max_points,
            max_iter=self.max_iter,
        )
        self.fit_result_ = result
        self.params_ = result.params
        self.scale_ = sample.scale
        self.gini_ = gpd.gini_analytic(result.params)
        self.gini_raw_ = empirical.gini_raw(sample)
        self.n_features_in_ = 1
        return self

    def _normalized(self, X):
        check_is_fitted(self, "params_")
        return _incomes(X) / self.scale_

    def cdf(self, X):
        x = self._normalized(X)
        return gpd.cdf(self.params_, x)

    def transform(self, X):
        """Probability integral transform: column of F(x)."""
        return np.atleast_1d(self.cdf(X)).reshape(-1, 1)

    def score_samples(self, X):
        """Log density of each income, in the units of the training data."""
        x = self._normalized(X)
        dens = np.atleast_1d(gpd.pdf(self.params_, x))
        with np.errstate(divide="ignore"):
            return np.log(dens) - np.log(self.scale_)

    def score(self, X, y=None):
        return float(np.sum(self.score_samples(X)))

    def sample(self, n_samples=1, random_state=0):
        check_is_fitted(self, "params_")
        seed = random_state if isinstance(random_state, (int, np.integer)) else 0
        return sample_gpd(self.params_, n_samples, int(seed)).values * self.scale_


class GoodwinCycleEstimator(BaseEstimator):
    """Estimate Lotka-Volterra cycle rates from a yearly (u, v) series.

    ``X`` has two columns, wage share and employment rate in percent, one row
    per consecutive year.

    Attributes
    ----------
    coef_ : LvCoefficients
    center_ : tuple of float
        (u_c, v_c) in percent.
    period_ : float
        Cycle period in years.
    growth_ : GrowthTable
        Finite-difference derivatives used in the regressions.
    """

    def __init__(self, first_year=0):
        self.first_year = first_year

    def _series(self, X):
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != 2:
            raise ValueError(f"expected columns (u, v), got {X.shape[1]} columns")
        years = np.arange(X.shape[0]) + self.first_year
        return goodwin.UvSeries.from_arrays(years, X[:, 0], X[:, 1])

    def fit(self, X, y=None):
        series = self._series(X)
        self.coef_ = goodwin.estimate_lv(series)
        self.growth_ = goodwin.growth_rates(series)
        self.center_ = (self.coef_.u_c, self.coef_.v_c)
        self.period_ = self.coef_.period
        self.n_features_in_ = 2
        return self

    def predict(self, X):
        """Model growth rates (u'/u, v'/v) at each (u, v) row."""
        check_is_fitted(self, "coef_")
        X = check_array(X, dtype=np.float64)
        c = self.coef_
        return np.column_stack([-c.a1 + c.b1 * X[:, 1], c.a2 - c.b2 * X[:, 0]])
