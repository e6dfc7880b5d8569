"""Income microdata: ingestion, normalization and raw-data statistics."""

from __future__ import annotations

import csv
from array import array
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .exceptions import DataError
from .gpd import GpdParams

#: Smallest sample accepted for distribution fitting.
MIN_FIT_SIZE = 100


@dataclass(frozen=True)
class IncomeSample:
    """One year of individual incomes.

    ``scale`` is the currency amount corresponding to one normalized unit,
    i.e. the raw sample mean once :func:`normalize` has been applied, and 1.0
    for data that were never rescaled.
    """

    year: int
    values: np.ndarray
    normalized: bool = False
    scale: float = 1.0

    def __post_init__(self):
        values = np.array(self.values, dtype=float, copy=True).ravel()
        if values.size == 0:
            raise DataError(f"year {self.year}: empty income sample")
        if not np.all(np.isfinite(values)):
            raise DataError(f"year {self.year}: incomes must be finite")
        if np.any(values < 0):
            raise DataError(f"year {self.year}: incomes must be nonnegative")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return int(self.values.size)

    @property
    def fit_eligible(self) -> bool:
        return self.n >= MIN_FIT_SIZE


@dataclass(frozen=True)
class YearConfig:
    """Per-year external quantities.

    ``annual_minimum_wage`` is in the same currency units as the raw incomes.
    ``x_t`` optionally pins the threshold (normalized units) instead of
    searching for it.
    """

    year: int
    annual_minimum_wage: float
    x_d_fraction: float = 0.5
    x_t: float | None = None

    def __post_init__(self):
        if not self.annual_minimum_wage > 0:
            raise DataError(f"year {self.year}: annual_minimum_wage must be positive")
        if not 0 < self.x_d_fraction < 1:
            raise DataError(f"year {self.year}: x_d_fraction must lie in (0, 1)")
        if self.x_t is not None and not self.x_t > 0:
            raise DataError(f"year {self.year}: fixed x_t must be positive")

    def thresholds(self, scale: float) -> tuple[float, float]:
        """(x_d, minimum wage) in normalized units for a year whose mean is ``scale``."""
        minwage = self.annual_minimum_wage / scale
        return self.x_d_fraction * minwage, minwage


class PopulationShares(NamedTuple):
    below_xd: float
    below_minimum_wage: float
    below_xt: float


def normalize(s: IncomeSample) -> IncomeSample:
    """Divide every income by the sample mean so that the mean becomes 1."""
    if s.normalized:
        raise DataError(f"year {s.year}: sample is already normalized")
    m = float(np.mean(s.values))
    if not m > 0:
        raise DataError(f"year {s.year}: sample mean must be positive")
    return IncomeSample(s.year, s.values / m, normalized=True, scale=s.scale * m)


class EmpiricalCDF:
    """Right-continuous step function F(x) = #{values <= x} / n."""

    def __init__(self, values):
        values = np.sort(np.asarray(values, dtype=float).ravel())
        if values.size == 0:
            raise DataError("empirical CDF of an empty sample")
        self.sorted_values = values
        self.n = values.size

    def __call__(self, x):
        counts = np.searchsorted(self.sorted_values, x, side="right")
        out = np.asarray(counts / self.n, dtype=float)
        return out[()] if out.ndim == 0 else out

    def points(self, max_points: int | None = None) -> tuple[np.ndarray, np.ndarray]:
        """Step locations and heights, optionally thinned to evenly spaced ranks.

        The smallest and largest observations are always kept. Ties are
        collapsed so every returned height counts all values <= its location.
        """
        x = self.sorted_values
        if max_points is not None and self.n > max_points:
            idx = np.unique(np.linspace(0, self.n - 1, max_points).round().astype(np.int64))
            x = x[idx]
        x = np.unique(x)
        return x, self(x)


def empirical_cdf(s) -> EmpiricalCDF:
    values = s.values if isinstance(s, IncomeSample) else s
    return EmpiricalCDF(values)


def gini_raw(s) -> float:
    """Gini coefficient from sorted data: 2 sum(i x_(i)) / (n sum x) - (n+1)/n."""
    values = s.values if isinstance(s, IncomeSample) else np.asarray(s, dtype=float)
    x = np.sort(values.ravel())
    n = x.size
    if n < 2:
        raise DataError("Gini coefficient needs at least two observations")
    if np.any(x < 0):
        raise DataError("Gini coefficient needs nonnegative incomes")
    total = x.sum()
    if total <= 0:
        raise DataError("Gini coefficient is undefined when all incomes are zero")
    ranks = np.arange(1, n + 1, dtype=float)
    g = 2.0 * np.dot(ranks, x) / (n * total) - (n + 1.0) / n
    return float(max(g, 0.0))


def population_shares(s: IncomeSample, cfg: YearConfig, p: GpdParams) -> PopulationShares:
    """Shares of individuals with income <= x_d, <= minimum wage, <= x_t."""
    x_d, minwage = cfg.thresholds(s.scale)
    thresholds = np.array([x_d, minwage, p.x_t])
    if np.any(np.diff(thresholds) < 0):
        raise DataError(
            f"year {s.year}: thresholds must ascend (x_d={x_d:.6g}, "
            f"minimum wage={minwage:.6g}, x_t={p.x_t:.6g})"
        )
    return PopulationShares(*(float(v) for v in empirical_cdf(s)(thresholds)))


def income_share_below(s, x: float) -> float:
    """Share of total income held by individuals with income <= x."""
    values = s.values if isinstance(s, IncomeSample) else np.asarray(s, dtype=float)
    total = values.sum()
    if total <= 0:
        raise DataError("income share is undefined when all incomes are zero")
    return float(values[values <= x].sum() / total)


def read_income_csv(path) -> dict[int, IncomeSample]:
    """Read a ``year,income`` CSV into one raw sample per year.

    Lines starting with ``#`` are comments. The header row is required.
    """
    path = Path(path)
    by_year: dict[int, array] = {}
    header_seen = False
    try:
        fh = path.open(newline="", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"{path}: {exc.strerror or exc}") from exc
    with fh:
        reader = csv.reader(fh)
        for row in reader:
            lineno = reader.line_num
            if not row or (row[0].lstrip().startswith("#")):
                continue
            if not header_seen:
                cols = [c.strip().lower() for c in row]
                if cols != ["year", "income"]:
                    raise DataError(f"{path}:{lineno}: expected header 'year,income', got {row!r}")
                header_seen = True
                continue
            if len(row) != 2:
                raise DataError(f"{path}:{lineno}: expected 2 fields, got {len(row)}")
            try:
                year = int(row[0])
                income = float(row[1])
            except ValueError:
                raise DataError(f"{path}:{lineno}: cannot parse {row!r}") from None
            if not math.isfinite(income) or income < 0:
                raise DataError(f"{path}:{lineno}: income must be a finite nonnegative number")
            by_year.setdefault(year, array("d")).append(income)
    if not header_seen:
        raise DataError(f"{path}: missing 'year,income' header")
    if not by_year:
        raise DataError(f"{path}: no income rows")
    return {year: IncomeSample(year, np.frombuffer(vals, dtype=float)) for year, vals in sorted(by_year.items())}


def read_year_config(path) -> dict[int, YearConfig]:
    """Read the per-year JSON config.

    Accepted shapes, keyed by year::

        {"2002": 1234.5}
        {"2002": {"annual_minimum_wage": 1234.5, "x_d_fraction": 0.5, "x_t": 2.1}}

    optionally wrapped as ``{"years": {...}}``.
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise DataError(f"{path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}:{exc.lineno}: invalid JSON ({exc.msg})") from exc
    if isinstance(raw, dict) and "years" in raw:
        raw = raw["years"]
    if not isinstance(raw, dict):
        raise DataError(f"{path}: expected a mapping of year -> minimum wage")
    out = {}
    for key, entry in raw.items():
        try:
            year = int(key)
        except ValueError:
            raise DataError(f"{path}: year key {key!r} is not an integer") from None
        if isinstance(entry, (int, float)):
            entry = {"annual_minimum_wage": entry}
        if not isinstance(entry, dict) or "annual_minimum_wage" not in entry:
            raise DataError(f"{path}: year {year} needs annual_minimum_wage")
        unknown = set(entry) - {"annual_minimum_wage", "x_d_fraction", "x_t"}
        if unknown:
            raise DataError(f"{path}: year {year} has unknown keys {sorted(unknown)}")
        out[year] = YearConfig(year=year, **entry)
    return dict(sorted(out.items()))
