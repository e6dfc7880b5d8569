import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from goodwin_gpd import gpd
from goodwin_gpd.exceptions import DomainError, ParameterError
from goodwin_gpd.gpd import GpdParams
from goodwin_gpd.lv_sim import sample_gpd
from goodwin_gpd.reference import REFERENCE_FITS

# Frozen from 30-digit mpmath evaluations using the exponential-integral
# closed form of the partial mean (independent of the quadrature path).
PARTIAL_MEAN_XT_2019 = 0.68527876085905638
MEAN_2019 = 1.0042763867920366
MEAN_2002 = 1.0292864900789351
GINI_2019 = 0.45106975191438781
GINI_2002 = 0.53371686173988829
CDF_2019_AT_10 = 0.99795776162331996


def partial_mean_e1(p, x):
    """I(x) = -x S(x) + (e^eta / b) [E1(eta) - E1(eta e^{b x})]."""
    s = math.exp(-p.eta * math.expm1(p.b * x))
    return -x * s + math.exp(p.eta) / p.b * (special.exp1(p.eta) - special.exp1(p.eta * math.exp(p.b * x)))


def gini_from_lorenz_integral(p):
    """1 - 2 * integral of F1 f over [0, inf), F1 from the E1 closed form."""
    xt, eta, b, a = p.x_t, p.eta, p.b, p.alpha
    s = math.exp(-eta * math.expm1(b * xt))
    mu = partial_mean_e1(p, xt) + a * xt * s / (a - 1)

    def g(x):
        return eta * b * math.exp(b * x) * math.exp(-eta * math.expm1(b * x))

    def tail_density(x):
        return a * xt**a * s * x ** (-a - 1)

    def tail_share(x):
        return 1 + a * xt**a * s / ((1 - a) * mu) * x ** (1 - a)

    body, _ = integrate.quad(lambda x: partial_mean_e1(p, x) / mu * g(x), 0, xt, epsabs=1e-13, epsrel=1e-13)
    tail, _ = integrate.quad(lambda x: tail_share(x) * tail_density(x), xt, np.inf, epsabs=1e-13, epsrel=1e-13)
    return 1 - 2 * (body + tail)


params_strategy = st.builds(
    GpdParams,
    x_t=st.floats(0.8, 3.5),
    eta=st.floats(0.3, 4.0),
    b=st.floats(0.2, 1.5),
    alpha=st.floats(1.2, 3.5),
)


class TestParams:
    def test_pareto_scale_continuity(self, p2002):
        assert p2002.pareto_scale == pytest.approx(p2002.x_t**p2002.alpha * math.exp(-p2002.eta * (math.exp(p2002.b * p2002.x_t) - 1)))

    @pytest.mark.parametrize("kw", [dict(x_t=0), dict(eta=-1), dict(b=0), dict(alpha=1.0), dict(alpha=0.5), dict(x_t=float("nan"))])
    def test_invalid(self, kw):
        base = dict(x_t=2.0, eta=1.0, b=0.5, alpha=2.0)
        base.update(kw)
        with pytest.raises(ParameterError):
            GpdParams(**base)

    def test_rescaled_matches_scaled_variable(self, p2019):
        q = p2019.rescaled(2.0)
        x = np.array([0.3, 1.0, 2.5, 5.0, 20.0])
        np.testing.assert_allclose(gpd.cdf(q, 2.0 * x), gpd.cdf(p2019, x), rtol=1e-14)


class TestCdf:
    def test_zero(self, ref_row):
        assert gpd.cdf(ref_row.params, 0.0) == 0.0

    def test_branches_agree_at_threshold(self, p2002):
        left = -math.expm1(-p2002.eta * math.expm1(p2002.b * p2002.x_t))
        right = 1 - p2002.pareto_scale * p2002.x_t ** (-p2002.alpha)
        assert gpd.cdf(p2002, p2002.x_t) == pytest.approx(right, abs=1e-15)
        assert left == pytest.approx(right, abs=1e-15)

    def test_pareto_value_2019(self, p2019):
        v = gpd.cdf(p2019, 10.0)
        assert v == pytest.approx(CDF_2019_AT_10, abs=1e-15)
        independent = 1.787**2.256 * math.exp(-0.919 * (math.exp(0.703 * 1.787) - 1)) * 10.0**-2.256
        assert 1 - v == pytest.approx(independent, rel=1e-12)

    def test_limits(self, p2019):
        assert gpd.cdf(p2019, 1e12) == pytest.approx(1.0, abs=1e-20)
        assert gpd.survival(p2019, 1e12) > 0

    def test_negative_income(self, p2019):
        with pytest.raises(DomainError):
            gpd.cdf(p2019, -0.1)
        with pytest.raises(DomainError):
            gpd.pdf(p2019, [0.1, -1.0])

    @settings(max_examples=60, deadline=None)
    @given(params_strategy)
    def test_monotone_and_bounded(self, p):
        grid = np.concatenate([np.linspace(0, 3 * p.x_t, 400), np.geomspace(3 * p.x_t, 1e6, 100)])
        F = gpd.cdf(p, grid)
        assert np.all(np.diff(F) >= 0)
        assert F[0] == 0 and np.all(F <= 1)
        assert np.all(gpd.survival(p, grid) > 0)


class TestPdf:
    def test_at_zero(self, ref_row):
        p = ref_row.params
        assert gpd.pdf(p, 0.0) == pytest.approx(p.eta * p.b, rel=1e-15)

    def test_right_continuous_at_threshold(self, p2002):
        expected = p2002.alpha * p2002.pareto_scale * p2002.x_t ** (-p2002.alpha - 1)
        assert gpd.pdf(p2002, p2002.x_t) == pytest.approx(expected, rel=1e-14)

    def test_normalization(self, ref_row):
        p = ref_row.params
        body, _ = integrate.quad(lambda x: float(gpd.pdf(p, x)), 0, p.x_t, epsabs=1e-12, epsrel=1e-12)
        tail = p.pareto_scale * p.x_t ** (-p.alpha)
        assert body + tail == pytest.approx(1.0, abs=1e-6)

    def test_matches_cdf_derivative(self, ref_row):
        p = ref_row.params
        x, h = p.x_t / 2, 1e-5
        numeric = (gpd.cdf(p, x + h) - gpd.cdf(p, x - h)) / (2 * h)
        assert gpd.pdf(p, x) == pytest.approx(numeric, abs=1e-5)

    @settings(max_examples=40, deadline=None)
    @given(params_strategy)
    def test_nonnegative(self, p):
        grid = np.linspace(0, 10 * p.x_t, 500)
        assert np.all(gpd.pdf(p, grid) >= 0)


class TestQuantile:
    def test_zero(self, p2019):
        assert gpd.quantile(p2019, 0.0) == 0.0

    def test_threshold_round_trip(self, p2002):
        assert gpd.quantile(p2002, gpd.cdf(p2002, p2002.x_t)) == pytest.approx(p2002.x_t, abs=1e-10)

    def test_round_trip_grid(self, ref_row):
        p = ref_row.params
        q = np.array([0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 0.99])
        np.testing.assert_allclose(gpd.cdf(p, gpd.quantile(p, q)), q, atol=1e-10, rtol=0)

    @pytest.mark.parametrize("q", [-0.1, 1.0, 1.5, float("nan")])
    def test_domain(self, p2019, q):
        with pytest.raises(DomainError):
            gpd.quantile(p2019, q)

    @settings(max_examples=60, deadline=None)
    @given(params_strategy, st.floats(0.0, 0.999999))
    def test_round_trip_property(self, p, q):
        assert gpd.cdf(p, gpd.quantile(p, q)) == pytest.approx(q, abs=1e-10)


class TestPartialMean:
    def test_zero(self, p2019):
        assert gpd.gompertz_partial_mean(p2019, 0.0) == 0.0

    def test_small_x_taylor(self, p2019):
        x = 1e-4
        assert gpd.gompertz_partial_mean(p2019, x) == pytest.approx(p2019.eta * p2019.b * x**2 / 2, rel=1e-3)

    def test_frozen_value(self, p2019):
        assert gpd.gompertz_partial_mean(p2019, p2019.x_t) == pytest.approx(PARTIAL_MEAN_XT_2019, abs=1e-9)

    def test_matches_exponential_integral_form(self, ref_row):
        p = ref_row.params
        xs = np.linspace(0.1, p.x_t, 7)
        got = gpd.gompertz_partial_mean(p, xs)
        want = [partial_mean_e1(p, x) for x in xs]
        np.testing.assert_allclose(got, want, atol=1e-9)
        assert np.all(np.diff(got) > 0)

    def test_beyond_threshold(self, p2019):
        with pytest.raises(DomainError):
            gpd.gompertz_partial_mean(p2019, p2019.x_t + 0.01)

    @pytest.mark.slow
    def test_monte_carlo(self, p2019):
        y = sample_gpd(p2019, 10**7, seed=2019).values
        z = np.where(y < p2019.x_t, y, 0.0)
        se = z.std(ddof=1) / math.sqrt(z.size)
        assert abs(z.mean() - gpd.gompertz_partial_mean(p2019, p2019.x_t)) <= 3 * se


class TestMean:
    def test_frozen(self, p2019, p2002):
        assert gpd.mean(p2019) == pytest.approx(MEAN_2019, abs=1e-10)
        assert gpd.mean(p2002) == pytest.approx(MEAN_2002, abs=1e-10)

    def test_direct_quadrature(self, ref_row):
        p = ref_row.params
        body, _ = integrate.quad(lambda x: x * float(gpd.pdf(p, x)), 0, p.x_t, epsabs=1e-12)
        tail, _ = integrate.quad(lambda x: x * float(gpd.pdf(p, x)), p.x_t, np.inf, epsabs=1e-12, limit=400)
        assert gpd.mean(p) == pytest.approx(body + tail, abs=1e-8)

    @pytest.mark.slow
    @pytest.mark.parametrize("year", [2002, 2019])
    def test_monte_carlo(self, year):
        p = next(r.params for r in REFERENCE_FITS if r.year == year)
        y = sample_gpd(p, 10**7, seed=year + 1).values
        se = y.std(ddof=1) / math.sqrt(y.size)
        assert abs(y.mean() - gpd.mean(p)) <= 3 * se


class TestLorenz:
    def test_origin_and_limit(self, p2019):
        curve = gpd.lorenz(p2019, [0.0, 1.0, p2019.x_t, 1e9])
        assert curve.points[0] == (0.0, 0.0)
        assert curve.income[-1] == pytest.approx(1.0, abs=1e-7)
        assert curve.population[-1] == pytest.approx(1.0, abs=1e-10)

    def test_branch_continuity(self, ref_row):
        p = ref_row.params
        g = gpd.income_share(p, p.x_t, branch="gompertz")
        q = gpd.income_share(p, p.x_t, branch="pareto")
        assert g == pytest.approx(q, abs=1e-8)

    def test_below_diagonal_and_monotone(self, ref_row):
        p = ref_row.params
        grid = np.concatenate([np.linspace(0, p.x_t, 60, endpoint=False), np.geomspace(p.x_t, 1e4, 60)])
        curve = gpd.lorenz(p, grid)
        assert np.all(curve.income <= curve.population + 1e-12)
        assert np.all(np.diff(curve.income) >= 0)
        assert np.all(np.diff(curve.population) >= 0)

    def test_unsorted_grid(self, p2019):
        with pytest.raises(DomainError):
            gpd.lorenz(p2019, [1.0, 0.5])
        with pytest.raises(DomainError):
            gpd.lorenz(p2019, [-1.0, 0.5])


class TestGini:
    @pytest.mark.parametrize("year,expected", [(2002, 0.533), (2019, 0.451)])
    def test_published(self, year, expected):
        p = next(r.params for r in REFERENCE_FITS if r.year == year)
        assert gpd.gini_analytic(p) == pytest.approx(expected, abs=0.01)

    def test_frozen(self, p2019, p2002):
        assert gpd.gini_analytic(p2019) == pytest.approx(GINI_2019, abs=1e-9)
        assert gpd.gini_analytic(p2002) == pytest.approx(GINI_2002, abs=1e-9)

    def test_matches_lorenz_integral(self, ref_row):
        p = ref_row.params
        assert gpd.gini_analytic(p) == pytest.approx(gini_from_lorenz_integral(p), abs=1e-6)

    @settings(max_examples=25, deadline=None)
    @given(params_strategy)
    def test_in_unit_interval(self, p):
        assert 0 < gpd.gini_analytic(p) < 1
