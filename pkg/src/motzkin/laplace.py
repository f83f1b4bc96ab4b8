"""Laplace transforms of block step-counts, at finite n and in the limit.

Finite-n transforms are semicircle integrals of n-th-degree products; the
polynomial ones are computed with the exact Gauss rule and the Markov-chain
ones with nested adaptive quadrature.  Factors reach 3^n, so all product
evaluation happens in log space with explicit sign tracking, normalized by
log of the Motzkin number.  The limiting transform has a closed-form
density built from Gaussian edge and bridge factors, which must (and does)
match the rescaled Brownian-excursion law.
"""

from __future__ import annotations

import heapq
import math
import warnings
from functools import lru_cache

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .errors import DomainError, QuadratureFailure
from .fbm import fbm_density, fbm_transition
from .grid import TimeGrid
from .paths import motzkin_log
from .quadrature import build_quadrature, nodes_for_degree

__all__ = [
    "laplace_level_increments",
    "laplace_level_fluctuations",
    "laplace_joint",
    "limit_laplace",
    "limit_edge_factor",
    "limit_edge_factor_integral",
    "limit_bridge_factor",
    "limit_bridge_factor_integral",
    "limit_density",
]


@lru_cache(maxsize=8)
def _leg_rule(m: int):
    return np.polynomial.legendre.leggauss(m)


def _adaptive_gl(
    f,
    a: float,
    b: float,
    epsabs: float,
    breakpoints=(),
    noise_rel: float = 1e-14,
    max_panels: int = 4000,
) -> float:
    """Adaptive Gauss-Legendre quadrature for a vectorized integrand.

    Error is controlled globally: the panel with the largest 16-vs-32-node
    disagreement is bisected until the disagreements sum below ``epsabs``.
    ``noise_rel`` is the relative roundoff scale of f values (integrands
    assembled in log space carry eps times their log magnitude); panels
    whose disagreement is below that scale are frozen since refinement
    cannot improve them.  ``breakpoints`` seed the initial panel edges.
    """
    x16, w16 = _leg_rule(16)
    x32, w32 = _leg_rule(32)
    span = b - a
    width_floor = 1e-12 * span

    def measure(lo: float, hi: float):
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        coarse = half * float(np.dot(w16, f(mid + half * x16)))
        vals = f(mid + half * x32)
        fine = half * float(np.dot(w32, vals))
        gap = abs(fine - coarse)
        noise = noise_rel * 2.0 * half * float(np.max(np.abs(vals), initial=0.0))
        refinable = gap > noise and hi - lo > width_floor
        return gap, fine, refinable

    edges = sorted({a, b, *(p for p in breakpoints if a < p < b)})
    heap: list[tuple[float, float, float, float]] = []  # (-gap, lo, hi, fine)
    frozen_err = frozen_sum = live_err = live_sum = 0.0
    for i in range(len(edges) - 1):
        gap, fine, refinable = measure(edges[i], edges[i + 1])
        if refinable:
            heapq.heappush(heap, (-gap, edges[i], edges[i + 1], fine))
            live_err += gap
            live_sum += fine
        else:
            frozen_sum += fine
            frozen_err += gap
    count = len(edges) - 1
    while heap:
        target = max(epsabs, noise_rel * 4.0 * abs(frozen_sum + live_sum))
        if frozen_err + live_err <= target:
            break
        if live_err <= 0.25 * frozen_err:
            break  # remaining error is roundoff-frozen; refinement cannot help
        if count >= max_panels:
            if frozen_err + live_err <= 1e4 * epsabs:
                break
            raise QuadratureFailure(
                f"global error {frozen_err + live_err} above {epsabs} after {count} panels"
            )
        neg_gap, lo, hi, fine0 = heapq.heappop(heap)
        live_err += neg_gap  # remove the parent's gap
        live_sum -= fine0
        mid = 0.5 * (lo + hi)
        for left, right in ((lo, mid), (mid, hi)):
            gap, fine, refinable = measure(left, right)
            if refinable:
                heapq.heappush(heap, (-gap, left, right, fine))
                live_err += gap
                live_sum += fine
            else:
                frozen_sum += fine
                frozen_err += gap
        count += 2
    return frozen_sum + live_sum


def _check_weights(grid: TimeGrid, w) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if len(w) != grid.d + 1:
        raise DomainError(f"need {grid.d + 1} block weights, got {len(w)}")
    return w


def _block_integral(n: int, sizes, bases_at) -> float:
    """(1/(2 pi M_n)) integral of prod_k base_k(y)^{n_k} sqrt(4-y^2) dy.

    ``bases_at(y_nodes)`` returns the (d+1, N) matrix of factor bases at
    the quadrature nodes.  Exact Gauss rule (the integrand is a degree-n
    polynomial against the weight); log-space with sign tracking.
    """
    rule = build_quadrature(nodes_for_degree(n))
    bases = bases_at(rule.nodes)
    counts = np.asarray(sizes, dtype=int)[:, None]
    log_m = motzkin_log(n)
    with np.errstate(divide="ignore"):
        log_mag = np.sum(counts * np.log(np.abs(bases)), axis=0)
    neg_parity = np.sum((bases < 0) * (counts % 2), axis=0) % 2
    signs = np.where(neg_parity, -1.0, 1.0)
    terms = np.where(np.isfinite(log_mag), signs * np.exp(log_mag - log_m), 0.0)
    return float(np.dot(rule.weights, terms))


def laplace_level_increments(n: int, grid: TimeGrid, w) -> float:
    """E exp(sum_k w_k D_k) where D_k is the level count in block k.

    Blocks are the index ranges cut at floor(n s_k); evaluated as the
    exact semicircle integral of prod_k (e^{w_k} + y)^{n_k} over M_n.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    w = _check_weights(grid, w)
    sizes = grid.block_sizes(n)
    ew = np.exp(w)
    return _block_integral(n, sizes, lambda y: ew[:, None] + y[None, :])


def laplace_level_fluctuations(n: int, grid: TimeGrid, w) -> float:
    """E exp(sum_k w_k (G(s_k) - G(s_{k-1}))) for the centered, scaled
    level-count statistic G(s) = (3 * levels(floor(ns)) - floor(ns)) / sqrt(2n).

    Same integral with bases u_k^2 + y / u_k, u_k = e^{w_k / sqrt(2n)};
    converges to exp(sum (s_k - s_{k-1}) w_k^2 / 2) as n grows.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    w = _check_weights(grid, w)
    sizes = grid.block_sizes(n)
    u = np.exp(w / math.sqrt(2.0 * n))
    return _block_integral(n, sizes, lambda y: (u * u)[:, None] + y[None, :] / u[:, None])


# -- joint transform of the two fluctuation statistics ------------------------


def laplace_joint(n: int, grid: TimeGrid, z, w) -> float:
    """Joint Laplace transform of the increment vector of (F, G) at the grid.

    F(s) = (2 ascents + levels - floor(ns))/sqrt(2n) at index floor(ns),
    G(s) = (3 levels - floor(ns))/sqrt(2n).  Computed as the expectation
    of prod_k (u_k^2 + X_{tau_k} / (u_k t_k))^{n_k} over the semicircle
    Markov process at times tau_k = t_k^2, with u_k = e^{w_k/sqrt(2n)},
    t_k = e^{z_k/sqrt(2n)}, normalized by the Motzkin number.

    Supports d <= 2 (up to three nested integrals).  z must be strictly
    increasing and positive.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    d = grid.d
    if d > 2:
        raise DomainError("laplace_joint supports d <= 2 only")
    z = np.asarray(z, dtype=float)
    w = _check_weights(grid, w)
    if len(z) != d + 1:
        raise DomainError(f"need {d + 1} z values, got {len(z)}")
    if z[0] <= 0 or np.any(np.diff(z) <= 0):
        raise DomainError("z must be strictly increasing and positive")
    sizes = [int(c) for c in grid.block_sizes(n)]
    u = np.exp(w / math.sqrt(2.0 * n))
    t = np.exp(z / math.sqrt(2.0 * n))
    tau = t * t
    log_m = motzkin_log(n)

    # Substitute y_k = t_k (2 - v_k^2/(2n)): the integrand's boundary layer
    # at y_k = 2 t_k becomes an O(1)-width feature in v_k, and the
    # square-root vanishing at the edge becomes linear.  Per point the
    # (sign, log magnitude) of (u^2 + y/(u t))^{n_k} is accumulated in log
    # space; the kernel chain is O(1) and multiplied in linearly.
    two_t = 2.0 * t
    curv = t / (2.0 * n)  # y_k = two_t[k] - curv[k] v^2
    inv_ut = 1.0 / (u * t)
    usq = u * u
    jac = t / float(n)  # |dy/dv| = jac[k] * v

    def piece(k: int, v: float) -> tuple[float, float, float]:
        """(y, sign, log|base|^{n_k}) for block k at substitution point v."""
        y = two_t[k] - curv[k] * v * v
        base = usq[k] + y * inv_ut[k]
        if base == 0.0:
            return y, 0.0, -math.inf
        sign = -1.0 if (base < 0.0 and sizes[k] & 1) else 1.0
        return y, sign, sizes[k] * math.log(abs(base))

    def level_vec(k: int, y_prev: float, sign_in: float, log_in: float):
        """Vectorized deepest-level integrand over v, given the prefix state.

        All block factors, kernels and jacobians accumulated so far enter
        through (sign_in, log_in); this level adds its own factor and the
        transition kernel from y_prev (or the marginal density for k = 0).
        """
        tk = tau[k]
        tm = tau[k - 1] if k else None

        def f(v: np.ndarray) -> np.ndarray:
            y = two_t[k] - curv[k] * v * v
            base = usq[k] + y * inv_ut[k]
            sgn = np.where((base < 0.0) & bool(sizes[k] & 1), -sign_in, sign_in)
            root = np.sqrt(np.maximum(4.0 * tk - y * y, 0.0))
            if k == 0:
                kernel = root / (2.0 * math.pi * tk)
            else:
                den = tm * y * y + tk * y_prev * y_prev - (tm + tk) * y_prev * y + (tk - tm) ** 2
                kernel = (tk - tm) * root / (2.0 * math.pi * den)
            lin = kernel * jac[k] * v
            with np.errstate(divide="ignore", invalid="ignore"):
                log_val = log_in + sizes[k] * np.log(np.abs(base)) + np.log(lin)
            out = np.where(
                np.isfinite(log_val) & (lin > 0.0), sgn * np.exp(log_val), 0.0
            )
            return out

        return f

    # Each block contributes a factor bounded by e^{w^2} e^{-span v^2/6}
    # for large n, so the integrand beyond v* is below e^{-v*^2 min_span/6}
    # times an O(1) envelope; v* = 48/sqrt(min span) puts the omitted tail
    # under 1e-12 relative while the negative-state region (reached only
    # at v ~ sqrt(8n)) is smaller still.
    v_hi = 2.0 * math.sqrt(2.0 * n)  # v range covering the full support
    min_span = min(grid.spans())
    cut = min(48.0 / math.sqrt(min_span), v_hi)

    # tolerance budget: tight for the d <= 1 cases the identity tests rely
    # on, proportionate for the threefold-nested d = 2 case; inner errors
    # average out in the levels above, so these need not be extreme
    deep_abs = 1e-10 if d <= 1 else 1e-9
    # integrand values are assembled in log space, so their roundoff is
    # eps times the log magnitude (which reaches n log 3 and cancels
    # against log M_n only at the very end)
    noise_rel = np.finfo(float).eps * 4.0 * (log_m + 16.0)

    def deepest(k: int, y_prev: float, sign_in: float, log_in: float, peak) -> float:
        breaks = (min(peak, cut),) if peak is not None else ()
        return _adaptive_gl(
            level_vec(k, y_prev, sign_in, log_in), 0.0, cut, deep_abs, breaks, noise_rel
        )

    if d == 0:
        return deepest(0, 0.0, 1.0, -log_m, None)

    def outer(v0: float) -> float:
        y0, s0, lm0 = piece(0, v0)
        dens = fbm_density(tau[0], y0) * jac[0] * v0
        if s0 == 0.0 or dens <= 0.0:
            return 0.0
        state = lm0 - log_m + math.log(dens)
        if d == 1:
            return deepest(1, y0, s0, state, v0)
        return mid(v0, y0, s0, state)

    def mid(v0: float, y0: float, s0: float, state0: float) -> float:
        def g(v1: float) -> float:
            y1, s1, lm1 = piece(1, v1)
            ker = fbm_transition(tau[0], y0, tau[1], y1) * jac[1] * v1
            if s1 == 0.0 or ker <= 0.0:
                return 0.0
            return deepest(2, y1, s0 * s1, state0 + lm1 + math.log(ker), v1)

        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IntegrationWarning)
            val, err = quad(g, 0.0, cut, epsabs=3e-9, epsrel=1e-7, limit=200)
        if err > max(1e-6, 1e-4 * abs(val)):
            raise QuadratureFailure(f"joint transform mid-level error {err}")
        return val

    if d == 1:
        out_abs = max(1e-11, 1e2 * noise_rel)
        out_rel = max(1e-9, 1e3 * noise_rel)
        err_cap = max(2e-8, 1e4 * noise_rel)
    else:
        out_abs, out_rel = 1e-9, 1e-7
        err_cap = max(1e-6, 1e4 * noise_rel)
    with warnings.catch_warnings():
        # the error estimate is checked explicitly below
        warnings.simplefilter("ignore", IntegrationWarning)
        val, err = quad(outer, 0.0, cut, epsabs=out_abs, epsrel=out_rel, limit=200)
    if err > max(err_cap, 1e-5 * abs(val)):
        raise QuadratureFailure(f"joint transform quadrature error {err}")
    return val


# -- limiting transform --------------------------------------------------------

SQRT_8PI_OVER_3RT3 = math.sqrt(8.0 * math.pi) / (3.0 * math.sqrt(3.0))


def limit_edge_factor(s: float, x: float) -> float:
    """Closed form 3 sqrt(3) x exp(-3x^2/(2s)) / (sqrt(2 pi) s^{3/2})."""
    if s <= 0:
        raise DomainError(f"span must be positive, got {s}")
    if x <= 0:
        return 0.0
    return 3.0 * math.sqrt(3.0) / (math.sqrt(2.0 * math.pi) * s**1.5) * x * math.exp(
        -3.0 * x * x / (2.0 * s)
    )


def limit_edge_factor_integral(s: float, x: float) -> float:
    """The defining integral (1/pi) int_0^oo v e^{-s v^2/6} sin(v x) dv."""
    if s <= 0:
        raise DomainError(f"span must be positive, got {s}")
    hi = math.sqrt(6.0 / s) * 14.0  # e^{-s v^2/6} < 1e-85 beyond
    val, _ = quad(
        lambda v: v * math.exp(-s * v * v / 6.0) * math.sin(v * x),
        0.0,
        hi,
        epsabs=1e-12,
        epsrel=1e-10,
        limit=400,
    )
    return val / math.pi


def limit_bridge_factor(s: float, x: float, y: float) -> float:
    """Closed form sqrt(3/(2 pi s)) (e^{-3(y-x)^2/(2s)} - e^{-3(y+x)^2/(2s)})."""
    if s <= 0:
        raise DomainError(f"span must be positive, got {s}")
    if x <= 0 or y <= 0:
        return 0.0
    c = math.sqrt(3.0 / (2.0 * math.pi * s))
    return c * (math.exp(-3.0 * (y - x) ** 2 / (2.0 * s)) - math.exp(-3.0 * (y + x) ** 2 / (2.0 * s)))


def limit_bridge_factor_integral(s: float, x: float, y: float) -> float:
    """The defining integral (2/pi) int_0^oo e^{-s v^2/6} sin(vx) sin(vy) dv."""
    if s <= 0:
        raise DomainError(f"span must be positive, got {s}")
    hi = math.sqrt(6.0 / s) * 14.0
    val, _ = quad(
        lambda v: math.exp(-s * v * v / 6.0) * math.sin(v * x) * math.sin(v * y),
        0.0,
        hi,
        epsabs=1e-12,
        epsrel=1e-10,
        limit=400,
    )
    return 2.0 * val / math.pi


def limit_density(grid: TimeGrid, xs) -> float:
    """Limit density of the scaled first fluctuation statistic at the grid.

    sqrt(8 pi)/(3 sqrt 3) times edge factors at spans s_1 and 1 - s_d and
    bridge factors over the interior spans; equals the density of the
    Brownian-excursion marginal vector divided by sqrt(3) coordinatewise.
    """
    xs = [float(x) for x in xs]
    d = grid.d
    if d < 1:
        raise DomainError("need at least one grid time")
    if len(xs) != d:
        raise DomainError(f"expected {d} coordinates, got {len(xs)}")
    s = grid.times
    val = SQRT_8PI_OVER_3RT3 * limit_edge_factor(s[0], xs[0]) * limit_edge_factor(
        1.0 - s[-1], xs[-1]
    )
    for k in range(d - 1):
        val *= limit_bridge_factor(s[k + 1] - s[k], xs[k], xs[k + 1])
    return val


def limit_laplace(grid: TimeGrid, z, w) -> float:
    """Limit of the joint transform: Gaussian block factor times the
    exponentially tilted integral of the limit density.

    exp(sum_k (s_k - s_{k-1}) w_k^2 / 2) *
    int exp(-sum_k (z_{k+1} - z_k) x_k) f(x) dx with f from
    :func:`limit_density`.  z must be nondecreasing (equal values allowed;
    the density then just integrates to one).  d <= 2.
    """
    d = grid.d
    if d > 2:
        raise DomainError("limit_laplace supports d <= 2 only")
    z = np.asarray(z, dtype=float)
    w = _check_weights(grid, w)
    if len(z) != d + 1:
        raise DomainError(f"need {d + 1} z values, got {len(z)}")
    if np.any(np.diff(z) < 0):
        raise DomainError("z must be nondecreasing")
    spans = grid.spans()
    gauss = math.exp(0.5 * sum(spans[k] * w[k] ** 2 for k in range(d + 1)))
    if d == 0:
        return gauss
    dz = np.diff(z)
    hi = [min(12.0 * math.sqrt(sk * (1.0 - sk) / 3.0), 8.0) + 2.0 for sk in grid.times]

    if d == 1:
        def f1(x):
            return math.exp(-dz[0] * x) * limit_density(grid, (x,))

        val, err = quad(f1, 0.0, hi[0], epsabs=1e-12, epsrel=1e-10, limit=200)
        if err > 1e-8:
            raise QuadratureFailure(f"limit transform quadrature error {err}")
        return gauss * val

    def outer(x1):
        inner, _ = quad(
            lambda x2: math.exp(-dz[1] * x2) * limit_density(grid, (x1, x2)),
            0.0,
            hi[1],
            epsabs=1e-12,
            limit=200,
        )
        return math.exp(-dz[0] * x1) * inner

    val, err = quad(outer, 0.0, hi[0], epsabs=1e-10, limit=200)
    if err > 1e-7:
        raise QuadratureFailure(f"limit transform quadrature error {err}")
    return gauss * val
