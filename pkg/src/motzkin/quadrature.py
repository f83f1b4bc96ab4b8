"""Gauss-type quadrature for the semicircle weight sqrt(4 - y^2) / (2 pi).

The rule has closed-form nodes and weights (Chebyshev points of the second
kind mapped to [-2, 2]) and integrates polynomials of degree <= 2N-1
exactly, so polynomial integrands need no adaptive machinery at all.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .paths import catalan

__all__ = ["SemicircleQuadrature", "build_quadrature", "semicircle_moment", "nodes_for_degree"]


@dataclass(frozen=True)
class SemicircleQuadrature:
    """Nodes in (-2, 2) and positive weights summing to 1."""

    nodes: np.ndarray
    weights: np.ndarray

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    def integrate(self, f) -> float:
        """sum_i w_i f(y_i) ~ (1/2pi) int f(y) sqrt(4-y^2) dy; f vectorized."""
        return float(np.dot(self.weights, f(self.nodes)))

    def integrate_values(self, values: np.ndarray) -> float:
        return float(np.dot(self.weights, values))


def build_quadrature(n_nodes: int) -> SemicircleQuadrature:
    """Rule with nodes y_i = 2 cos(i pi/(N+1)), weights 2 sin^2(i pi/(N+1))/(N+1)."""
    if n_nodes < 1:
        raise DomainError("need at least one node")
    i = np.arange(1, n_nodes + 1)
    theta = i * np.pi / (n_nodes + 1)
    return SemicircleQuadrature(2.0 * np.cos(theta), (2.0 / (n_nodes + 1)) * np.sin(theta) ** 2)


def semicircle_moment(m: int) -> int:
    """Exact m-th moment of the semicircle law: 0 for odd m, C_{m/2} for even."""
    if m < 0:
        raise DomainError("m must be >= 0")
    return 0 if m % 2 else catalan(m // 2)


def nodes_for_degree(degree: int) -> int:
    """Node count that integrates polynomials up to ``degree`` exactly."""
    return max(1, (degree + 2) // 2 + 1)
