"""Generating functions over Motzkin paths and their semicircle integral forms.

Each quantity here can be computed at least two independent ways (path
enumeration, semicircle quadrature, coefficient recurrences); the
cross-checked evaluators raise :class:`InternalMismatch` when the routes
disagree, which indicates a bug rather than bad input.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError, InternalMismatch
from .fbm import fbm_joint_moment
from .paths import catalan, enumerate_paths, motzkin_number
from .quadrature import build_quadrature, nodes_for_degree

__all__ = [
    "level_pgf",
    "level_pgf_enum",
    "joint_pgf",
    "joint_pgf_paths",
    "joint_pgf_moments",
    "sulanke_poly",
    "sulanke_coeffs",
    "semicircle_stieltjes",
]

_REL_TOL = 1e-9


def _rel_err(a: float, b: float) -> float:
    scale = max(abs(a), abs(b), 1e-300)
    return abs(a - b) / scale


def level_pgf(u) -> float:
    """Sum over length-n Motzkin paths of prod u_j over level positions.

    Evaluated as the semicircle integral of prod_j (u_j + y), which the
    quadrature rule computes exactly (degree-n polynomial integrand).
    """
    u = np.asarray(u, dtype=float)
    n = len(u)
    if n < 1:
        raise DomainError("need at least one u value")
    rule = build_quadrature(nodes_for_degree(n))
    vals = np.prod(u[:, None] + rule.nodes[None, :], axis=0)
    return rule.integrate_values(vals)


def level_pgf_enum(u) -> float:
    """Enumeration route for :func:`level_pgf`; exponential, for n <= ~12."""
    u = np.asarray(u, dtype=float)
    total = 0.0
    for path in enumerate_paths(len(u)):
        prod = 1.0
        for j, s in enumerate(path.steps):
            if s == 0:
                prod *= u[j]
        total += prod
    return total


def joint_pgf_paths(times, u) -> float:
    """Path-enumeration route: sum over paths of prod t_j^[ascent] u_j^[level]."""
    times = np.asarray(times, dtype=float)
    u = np.asarray(u, dtype=float)
    n = len(times)
    if len(u) != n:
        raise DomainError("times and u must have equal length")
    total = 0.0
    for path in enumerate_paths(n):
        prod = 1.0
        for j, s in enumerate(path.steps):
            if s == 1:
                prod *= times[j]
            elif s == 0:
                prod *= u[j]
        total += prod
    return float(total)


def joint_pgf_moments(times, u) -> float:
    """Moment-expansion route: sum over even index subsets S of
    prod_{j not in S} u_j times the non-crossing pairing moment of the
    times restricted to S."""
    times = tuple(float(t) for t in times)
    u = tuple(float(x) for x in u)
    n = len(times)
    if len(u) != n:
        raise DomainError("times and u must have equal length")
    if any(t <= 0 for t in times) or any(times[i] > times[i + 1] for i in range(n - 1)):
        raise DomainError("times must be positive and nondecreasing")
    total = 0.0
    for mask in range(1 << n):
        if bin(mask).count("1") % 2:
            continue
        sub = [times[j] for j in range(n) if mask >> j & 1]
        prod = fbm_joint_moment(sub)
        if prod == 0.0:
            continue
        for j in range(n):
            if not mask >> j & 1:
                prod *= u[j]
        total += prod
    return total


def joint_pgf(times, u) -> tuple[float, float]:
    """Both evaluators of the joint ascent/level generating function.

    Returns (path sum, moment expansion) and raises
    :class:`InternalMismatch` if they differ by more than 1e-9 relative.
    """
    lhs = joint_pgf_paths(times, u)
    rhs = joint_pgf_moments(times, u)
    if _rel_err(lhs, rhs) > _REL_TOL:
        raise InternalMismatch(f"joint pgf routes disagree: {lhs!r} vs {rhs!r}")
    return lhs, rhs


# -- level-weight polynomials -------------------------------------------------


def sulanke_coeffs(n: int) -> list[int]:
    """Exact coefficients of the level-weight polynomial S_n.

    S_n(t) = sum_j c_j t^j where c_j counts length-n paths with j level
    steps; computed by the integer convolution recurrence
    S_n = t S_{n-1} + sum_k S_k S_{n-2-k}.  The coefficients sum to the
    Motzkin number.
    """
    if n < 0:
        raise DomainError("n must be >= 0")
    polys: list[list[int]] = [[1]]
    for m in range(1, n + 1):
        out = [0] * (m + 1)
        prev = polys[m - 1]
        for j, c in enumerate(prev):  # t * S_{m-1}
            out[j + 1] += c
        for k in range(m - 1):  # S_k * S_{m-2-k}
            a, b = polys[k], polys[m - 2 - k]
            for i, ca in enumerate(a):
                if ca:
                    for j, cb in enumerate(b):
                        out[i + j] += ca * cb
        polys.append(out)
    return polys[n]


def _sulanke_recurrence(n: int, t: float) -> float:
    vals = [1.0]
    for m in range(1, n + 1):
        s = t * vals[m - 1] + sum(vals[k] * vals[m - 2 - k] for k in range(m - 1))
        vals.append(s)
    return vals[n]


def _sulanke_quadrature(n: int, t: float) -> float:
    rule = build_quadrature(nodes_for_degree(n))
    return rule.integrate_values((t + rule.nodes) ** n)


def _sulanke_enum(n: int, t: float) -> float:
    total = 0.0
    for path in enumerate_paths(n):
        total += t ** sum(1 for s in path.steps if s == 0)
    return total


def sulanke_poly(n: int, t: float) -> float:
    """Level-weight polynomial S_n(t): weight t per level step, 1 otherwise.

    Evaluated by semicircle quadrature of (t+y)^n and by the convolution
    recurrence (plus direct weighted enumeration for n <= 12); the routes
    must agree to 1e-9 relative.  S_n(1) is the Motzkin number.
    """
    if n < 0:
        raise DomainError("n must be >= 0")
    quad_val = _sulanke_quadrature(n, t)
    rec_val = _sulanke_recurrence(n, t)
    if _rel_err(quad_val, rec_val) > _REL_TOL:
        raise InternalMismatch(f"S_{n}({t}): quadrature {quad_val!r} vs recurrence {rec_val!r}")
    if n <= 12:
        enum_val = _sulanke_enum(n, t)
        if _rel_err(rec_val, enum_val) > _REL_TOL:
            raise InternalMismatch(f"S_{n}({t}): recurrence {rec_val!r} vs enumeration {enum_val!r}")
    return rec_val


def semicircle_stieltjes(z: float) -> float:
    """Cauchy-Stieltjes transform of the semicircle law on the real axis.

    (z - sqrt(z^2 - 4))/2 for z > 2, with the odd-symmetric branch for
    z < -2, so that z G(z) -> 1 at infinity.
    """
    if abs(z) <= 2:
        raise DomainError(f"|z| must exceed 2, got {z}")
    root = math.sqrt(z * z - 4.0)
    return (z - root) / 2.0 if z > 0 else (z + root) / 2.0
