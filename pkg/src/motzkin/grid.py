"""Evaluation-time grids 0 = s_0 < s_1 < ... < s_d < s_{d+1} = 1."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import DomainError
from .paths import floor_index

__all__ = ["TimeGrid"]


@dataclass(frozen=True)
class TimeGrid:
    """Ordered interior evaluation times, with exact block-index arithmetic.

    ``times`` are the strictly increasing interior points s_1 < ... < s_d,
    all in (0, 1); the boundary points 0 and 1 are implicit.  d = 0 (no
    interior time, a single block) is allowed.  Times given as strings are
    read as exact decimals, floats at their exact binary value, so that
    floor(n * s_k) is computed without rounding surprises.
    """

    times: tuple[float, ...]
    _exact: tuple[Fraction, ...] = None  # type: ignore[assignment]

    def __init__(self, times: Sequence = ()):
        exact = tuple(t if isinstance(t, Fraction) else Fraction(t) for t in times)
        object.__setattr__(self, "_exact", exact)
        object.__setattr__(self, "times", tuple(float(t) for t in exact))
        prev = Fraction(0)
        for t in exact:
            if not prev < t < 1:
                raise DomainError(f"grid times must satisfy 0 < s_1 < ... < s_d < 1, got {times!r}")
            prev = t

    @property
    def d(self) -> int:
        return len(self.times)

    def boundaries(self) -> tuple[float, ...]:
        """(0, s_1, ..., s_d, 1)."""
        return (0.0,) + self.times + (1.0,)

    def indices(self, n: int) -> list[int]:
        """floor(n * s_k) for the interior times, exact."""
        return [floor_index(n, t) for t in self._exact]

    def block_sizes(self, n: int) -> list[int]:
        """n_k = floor(n s_k) - floor(n s_{k-1}) for k = 1..d+1; sums to n."""
        cuts = [0] + self.indices(n) + [n]
        return [cuts[k + 1] - cuts[k] for k in range(len(cuts) - 1)]

    def spans(self) -> list[float]:
        """s_k - s_{k-1} for k = 1..d+1; sums to 1."""
        b = self.boundaries()
        return [b[k + 1] - b[k] for k in range(len(b) - 1)]
