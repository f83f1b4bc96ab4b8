"""Brownian-excursion finite-dimensional densities and derived reference laws.

The d-point density factors into an entrance factor at each end and a
killed (absorbing-at-zero) Gaussian kernel between consecutive times.
These densities are the reference laws for the Monte Carlo harness:
moments come from adaptive quadrature, CDFs from a tabulated cumulative
with monotone interpolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import DomainError, QuadratureFailure
from .grid import TimeGrid

__all__ = [
    "entrance_density",
    "killed_gauss_kernel",
    "excursion_fdd_density",
    "excursion_marginal_density",
    "excursion_moment",
    "excursion_cross_moment",
    "CdfTable",
    "excursion_marginal_cdf",
]

SQRT_8PI = math.sqrt(8.0 * math.pi)


def entrance_density(t: float, y: float) -> float:
    """End factor y exp(-y^2/(2t)) / sqrt(2 pi t^3) for t, y > 0."""
    if t <= 0:
        raise DomainError(f"time must be positive, got {t}")
    if y <= 0:
        return 0.0
    return y * math.exp(-y * y / (2.0 * t)) / math.sqrt(2.0 * math.pi * t**3)


def killed_gauss_kernel(t: float, y1: float, y2: float) -> float:
    """Heat kernel on (0, oo) with absorption at 0 (image-charge form)."""
    if t <= 0:
        raise DomainError(f"time must be positive, got {t}")
    if y1 <= 0 or y2 <= 0:
        return 0.0
    c = 1.0 / math.sqrt(2.0 * math.pi * t)
    return c * (math.exp(-((y1 - y2) ** 2) / (2.0 * t)) - math.exp(-((y1 + y2) ** 2) / (2.0 * t)))


def excursion_fdd_density(grid: TimeGrid, xs) -> float:
    """Joint density of the excursion at the grid times, evaluated at xs > 0."""
    xs = [float(x) for x in xs]
    d = grid.d
    if d < 1:
        raise DomainError("need at least one grid time")
    if len(xs) != d:
        raise DomainError(f"expected {d} coordinates, got {len(xs)}")
    if any(x <= 0 for x in xs):
        return 0.0
    s = grid.times
    val = SQRT_8PI * entrance_density(s[0], xs[0]) * entrance_density(1.0 - s[-1], xs[-1])
    for k in range(d - 1):
        val *= killed_gauss_kernel(s[k + 1] - s[k], xs[k], xs[k + 1])
    return val


def excursion_marginal_density(s: float, x: float) -> float:
    """One-time marginal density at time s in (0, 1)."""
    return excursion_fdd_density(TimeGrid((s,)), (x,))


def _tail_cutoff(s: float) -> float:
    # Gaussian tail scale sqrt(s(1-s)); 12 sigma leaves mass ~ 1e-30
    return max(12.0 * math.sqrt(s * (1.0 - s)), 4.0)


def excursion_moment(s: float, power: int) -> float:
    """E[(excursion at s)^power] by adaptive quadrature."""
    if not 0 < s < 1:
        raise DomainError(f"time must be interior, got {s}")
    hi = _tail_cutoff(s)
    val, err = quad(
        lambda x: x**power * excursion_marginal_density(s, x), 0.0, hi, epsabs=1e-12, epsrel=1e-10
    )
    if err > 1e-8:
        raise QuadratureFailure(f"moment quadrature error {err}")
    return val


def excursion_cross_moment(s: float, t: float) -> float:
    """E[X_s X_t] of the excursion via the two-time density."""
    if not 0 < s < t < 1:
        raise DomainError(f"need 0 < s < t < 1, got {s}, {t}")
    grid = TimeGrid((s, t))
    hi_s, hi_t = _tail_cutoff(s), _tail_cutoff(t)

    def outer(x):
        inner, _ = quad(
            lambda y: y * excursion_fdd_density(grid, (x, y)), 0.0, hi_t, epsabs=1e-11
        )
        return x * inner

    val, err = quad(outer, 0.0, hi_s, epsabs=1e-9, limit=200)
    if err > 1e-6:
        raise QuadratureFailure(f"cross-moment quadrature error {err}")
    return val


@dataclass(frozen=True)
class CdfTable:
    """Monotone piecewise-linear CDF on tabulated knots."""

    xs: np.ndarray
    values: np.ndarray

    def __call__(self, x) -> np.ndarray:
        return np.interp(x, self.xs, self.values, left=0.0, right=1.0)


def excursion_marginal_cdf(s: float, knots: int = 2048) -> CdfTable:
    """Tabulated CDF of the excursion marginal at time s.

    A fine trapezoid pass (32x the knot count) builds the cumulative, then
    knots are placed at equal CDF increments so resolution adapts to the
    density; interpolation error is < 1e-4, which the Monte Carlo bands
    budget for.
    """
    if not 0 < s < 1:
        raise DomainError(f"time must be interior, got {s}")
    hi = _tail_cutoff(s)
    fine = np.linspace(0.0, hi, 32 * knots + 1)
    a, b = s, 1.0 - s
    pdf = (
        SQRT_8PI
        * fine**2
        * np.exp(-(fine**2) * (1.0 / (2 * a) + 1.0 / (2 * b)))
        / (2.0 * math.pi * math.sqrt(a**3 * b**3))
    )
    cum = np.concatenate([[0.0], np.cumsum((pdf[1:] + pdf[:-1]) * 0.5 * np.diff(fine))])
    cum /= cum[-1]
    # quantile-placed knots (plus the exact endpoints)
    targets = np.linspace(0.0, 1.0, knots)
    idx = np.unique(np.searchsorted(cum, targets).clip(0, len(fine) - 1))
    return CdfTable(fine[idx], cum[idx])
