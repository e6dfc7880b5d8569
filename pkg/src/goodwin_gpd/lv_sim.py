"""Lotka-Volterra simulation and income sampling used as verification oracles.

State is ``(x, y)`` = (prey, predator) with

    x' = x (a2 - b2 y)        y' = y (-a1 + b1 x)

which is the cycle system with ``x = v`` (employment) and ``y = u`` (wage
share). The first integral

    H(x, y) = b1 x - a1 ln x + b2 y - a2 ln y

is constant along exact orbits and is recorded at every step.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .empirical import IncomeSample
from .exceptions import DataError, DomainError, IntegrationError
from .goodwin import LvCoefficients
from .gpd import GpdParams, quantile


@dataclass(frozen=True)
class SimConfig:
    coeffs: LvCoefficients
    initial: tuple[float, float]
    dt: float
    t_end: float

    def __post_init__(self):
        if not self.dt > 0:
            raise DomainError("dt must be positive")
        if not self.t_end >= self.dt:
            raise DomainError("t_end must be at least dt")
        x0, y0 = self.initial
        if not (x0 > 0 and y0 > 0):
            raise DomainError("initial populations must be strictly positive")


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    conserved: np.ndarray
    coeffs: LvCoefficients

    @property
    def x(self) -> np.ndarray:
        return self.states[:, 0]

    @property
    def y(self) -> np.ndarray:
        return self.states[:, 1]

    def max_drift(self) -> float:
        """Largest deviation of H from its initial value."""
        return float(np.max(np.abs(self.conserved - self.conserved[0])))


def conserved_quantity(c: LvCoefficients, x, y):
    return c.b1 * x - c.a1 * np.log(x) + c.b2 * y - c.a2 * np.log(y)


def integrate(cfg: SimConfig) -> Trajectory:
    """Classical fixed-step fourth-order Runge-Kutta."""
    c = cfg.coeffs
    a1, b1, a2, b2 = c.a1, c.b1, c.a2, c.b2
    dt = cfg.dt
    n_steps = int(round(cfg.t_end / dt))
    xs = np.empty(n_steps + 1)
    ys = np.empty(n_steps + 1)
    x, y = (float(v) for v in cfg.initial)
    xs[0], ys[0] = x, y
    h2 = 0.5 * dt
    for i in range(1, n_steps + 1):
        k1x = x * (a2 - b2 * y)
        k1y = y * (b1 * x - a1)
        tx, ty = x + h2 * k1x, y + h2 * k1y
        k2x = tx * (a2 - b2 * ty)
        k2y = ty * (b1 * tx - a1)
        tx, ty = x + h2 * k2x, y + h2 * k2y
        k3x = tx * (a2 - b2 * ty)
        k3y = ty * (b1 * tx - a1)
        tx, ty = x + dt * k3x, y + dt * k3y
        k4x = tx * (a2 - b2 * ty)
        k4y = ty * (b1 * tx - a1)
        x += dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        y += dt / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        if not (x > 0 and y > 0):
            raise IntegrationError(
                f"state became nonpositive at t={i * dt:.6g} ({x:.3g}, {y:.3g}); use a smaller dt"
            )
        xs[i], ys[i] = x, y
    times = np.arange(n_steps + 1) * dt
    states = np.column_stack([xs, ys])
    return Trajectory(times, states, conserved_quantity(c, xs, ys), c)


def measure_period(t: Trajectory, x_c: float | None = None) -> float:
    """Mean time between upward crossings of the section x = x_c.

    ``x_c`` defaults to the fixed-point prey level a1/b1. Crossing times are
    found by linear interpolation between the bracketing steps.
    """
    if x_c is None:
        x_c = t.coeffs.v_c
    d = t.x - x_c
    idx = np.nonzero((d[:-1] < 0) & (d[1:] >= 0))[0]
    if idx.size < 2:
        raise DataError(f"need at least 2 section crossings to measure a period, found {idx.size}")
    frac = -d[idx] / (d[idx + 1] - d[idx])
    crossings = t.times[idx] + frac * (t.times[idx + 1] - t.times[idx])
    return float((crossings[-1] - crossings[0]) / (crossings.size - 1))


def sample_gpd(p: GpdParams, n: int, seed: int, *, year: int = 0) -> IncomeSample:
    """``n`` inverse-CDF draws from ``p``.

    Uniforms come from numpy's PCG64 generator seeded with ``seed``; the
    output is not normalized (its mean is close to, not exactly, mean(p)).
    """
    if n < 1:
        raise DomainError("n must be at least 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    return IncomeSample(year, quantile(p, rng.random(n)), normalized=False)


def write_trajectory_csv(path, t: Trajectory, header_lines: Sequence[str] = (), stride: int = 1):
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "x", "y", "H"])
        for i in range(0, t.times.size, stride):
            w.writerow([repr(float(t.times[i])), repr(float(t.x[i])), repr(float(t.y[i])), repr(float(t.conserved[i]))])

