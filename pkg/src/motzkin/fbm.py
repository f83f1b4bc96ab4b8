"""The semicircle Markov process: marginals, transition kernel, joint moments.

The process has semicircle marginals of radius 2 sqrt(t), an explicit
rational transition kernel, and joint moments given by sums over
non-crossing pairings (the free analogue of the Gaussian pairing formula).
The moment formula and a direct nested-quadrature evaluation of the same
moments provide two independent routes used to cross-check each other.
"""

from __future__ import annotations

import math

from scipy.integrate import quad

from .errors import DomainError, QuadratureFailure, SingularDenominator
from .paths import enumerate_nc2

__all__ = [
    "fbm_density",
    "fbm_transition",
    "fbm_support",
    "fbm_joint_moment",
    "fbm_joint_moment_quadrature",
]


def fbm_support(t: float) -> float:
    """Half-width of the marginal support at time t."""
    return 2.0 * math.sqrt(t)


def fbm_density(t: float, x: float) -> float:
    """Marginal density sqrt(4t - x^2) / (2 pi t) on |x| <= 2 sqrt(t)."""
    if t <= 0:
        raise DomainError(f"time must be positive, got {t}")
    v = 4.0 * t - x * x
    if v <= 0.0:
        return 0.0
    return math.sqrt(v) / (2.0 * math.pi * t)


def fbm_transition(s: float, x: float, t: float, y: float) -> float:
    """Transition density from state x at time s to y at time t (0 <= s < t).

    (t-s) sqrt(4t - y^2) / (2 pi (t x^2 + s y^2 - (s+t) x y + (t-s)^2))
    on |y| <= 2 sqrt(t), zero outside.  At s = 0, x = 0 this reduces to
    the marginal density at t.
    """
    if s < 0 or t <= s:
        raise DomainError(f"need 0 <= s < t, got s={s}, t={t}")
    if x * x > 4.0 * s + 1e-12:
        raise DomainError(f"state x={x} outside support at time s={s}")
    v = 4.0 * t - y * y
    if v <= 0.0:
        return 0.0
    den = t * x * x + s * y * y - (s + t) * x * y + (t - s) ** 2
    if den <= 0.0:
        raise SingularDenominator(
            f"kernel denominator {den} <= 0 at s={s}, x={x}, t={t}, y={y}"
        )
    return (t - s) * math.sqrt(v) / (2.0 * math.pi * den)


def fbm_joint_moment(times) -> float:
    """E[X_{t_1} ... X_{t_d}] via the non-crossing pairing formula.

    Zero for odd d; for even d, the sum over non-crossing pair partitions
    of {1..d} of the product of t at the smaller index of each pair.
    Times must be positive and nondecreasing.
    """
    times = [float(t) for t in times]
    d = len(times)
    if any(t <= 0 for t in times):
        raise DomainError("times must be positive")
    if any(times[i] > times[i + 1] for i in range(d - 1)):
        raise DomainError("times must be nondecreasing")
    if d % 2:
        return 0.0
    if d == 0:
        return 1.0
    total = 0.0
    for partition in enumerate_nc2(range(1, d + 1)):
        prod = 1.0
        for i, _j in partition.pairs:
            prod *= times[i - 1]
        total += prod
    return total


def _quad_checked(f, a, b, epsabs, epsrel=1e-9, limit=200):
    val, err = quad(f, a, b, epsabs=epsabs, epsrel=epsrel, limit=limit)
    if err > max(50 * epsabs, 1e-7 * max(abs(val), 1.0)):
        raise QuadratureFailure(f"estimated error {err} too large for tolerance {epsabs}")
    return val


def fbm_joint_moment_quadrature(times) -> float:
    """Direct nested-quadrature evaluation of E[X_{t_1} ... X_{t_d}], d <= 3.

    Integrates x_1 ... x_d against the marginal-plus-transition chain with
    the substitution x = 2 sqrt(t) sin(theta) that removes the square-root
    endpoint singularities.  Independent of the pairing formula.
    """
    times = [float(t) for t in times]
    d = len(times)
    if d == 0 or d > 3:
        raise DomainError("quadrature oracle supports 1 <= d <= 3")
    if any(t <= 0 for t in times):
        raise DomainError("times must be positive")
    if any(times[i] >= times[i + 1] for i in range(d - 1)):
        raise DomainError("times must be strictly increasing")
    half_pi = math.pi / 2.0

    def level(k: int, x_prev: float) -> float:
        t_k = times[k]
        r = 2.0 * math.sqrt(t_k)

        def integrand(theta: float) -> float:
            x = r * math.sin(theta)
            jac = r * math.cos(theta)
            ker = fbm_density(t_k, x) if k == 0 else fbm_transition(times[k - 1], x_prev, t_k, x)
            rest = 1.0 if k == d - 1 else level(k + 1, x)
            return x * ker * jac * rest

        # inner levels run at tighter tolerance than the level above them
        return _quad_checked(integrand, -half_pi, half_pi, epsabs=10.0 ** (-9 - k))

    return level(0, 0.0)
