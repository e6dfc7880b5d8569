"""Gompertz-Pareto income distributions and Goodwin growth cycles."""

__version__ = "0.1.0"

from .exceptions import (  # noqa: E402
    ConvergenceError,
    CycleError,
    DataError,
    DomainError,
    GoodwinGpdError,
    IntegrationError,
    ParameterError,
)
from .gpd import (  # noqa: E402
    GpdParams,
    LorenzCurve,
    cdf,
    gini_analytic,
    gompertz_partial_mean,
    income_share,
    lorenz,
    mean,
    pdf,
    quantile,
)
from .empirical import (  # noqa: E402
    EmpiricalCDF,
    IncomeSample,
    YearConfig,
    empirical_cdf,
    gini_raw,
    normalize,
    population_shares,
)
from .fitting import FitResult, find_threshold, fit_full, fit_gompertz, fit_pareto_tail  # noqa: E402
from .goodwin import (  # noqa: E402
    GoodwinStructuralParams,
    LvCoefficients,
    UvPoint,
    UvSeries,
    estimate_lv,
    lv_to_structural,
    structural_to_lv,
    uv_from_fit,
)
from .lv_sim import SimConfig, Trajectory, integrate, measure_period, sample_gpd  # noqa: E402
from .estimators import GompertzParetoEstimator, GoodwinCycleEstimator  # noqa: E402
