"""Exact Motzkin-path combinatorics.

Paths are step sequences over {+1 (ascent), 0 (level), -1 (descent)} that
stay non-negative and end at height 0.  Everything in this module is exact:
counts are Python integers (arbitrary precision), enumeration orders are
fixed, and the bijection with non-crossing pair partitions is implemented
in both directions.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import IntEnum
from fractions import Fraction
from typing import Iterable, Iterator, NamedTuple, Sequence

from .errors import (
    CrossingPartition,
    DomainError,
    InternalMismatch,
    NonzeroEndpoint,
    OddSupport,
    PrefixNegative,
)

__all__ = [
    "Step",
    "MotzkinPath",
    "CountingTriple",
    "PairPartition",
    "validate",
    "counting_prefix",
    "counting_processes",
    "enumerate_paths",
    "catalan",
    "motzkin_number",
    "motzkin_log",
    "meander_table",
    "path_to_partition",
    "partition_to_path",
    "enumerate_nc2",
    "is_noncrossing",
    "floor_index",
]


class Step(IntEnum):
    """One lattice step, encoded by its vertical displacement."""

    DESCENT = -1
    LEVEL = 0
    ASCENT = 1


_STEP_TO_CHAR = {Step.ASCENT: "U", Step.LEVEL: "L", Step.DESCENT: "D"}
_CHAR_TO_STEP = {"U": 1, "L": 0, "D": -1}


def _check_steps(steps: Sequence[int]) -> None:
    height = 0
    for i, s in enumerate(steps):
        if s not in (-1, 0, 1):
            raise DomainError(f"step value {s!r} at position {i + 1} not in {{-1, 0, 1}}")
        height += s
        if height < 0:
            raise PrefixNegative(i + 1)
    if height != 0:
        raise NonzeroEndpoint(height)


@dataclass(frozen=True)
class MotzkinPath:
    """A validated Motzkin path; immutable after construction.

    ``steps`` holds plain ints in {-1, 0, 1}.  Construction raises
    :class:`PrefixNegative` or :class:`NonzeroEndpoint` on invalid input,
    so every instance is a genuine Motzkin path.
    """

    steps: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(int(s) for s in self.steps))
        _check_steps(self.steps)

    def __len__(self):
        return len(self.steps)

    @property
    def n(self) -> int:
        return len(self.steps)

    def heights(self) -> tuple[int, ...]:
        """Prefix sums of the step values (all >= 0, last one 0)."""
        out = []
        h = 0
        for s in self.steps:
            h += s
            out.append(h)
        return tuple(out)

    # -- serialization ----------------------------------------------------

    def to_text(self) -> str:
        """One-line text form: 'U' ascent, 'L' level, 'D' descent."""
        return "".join(_STEP_TO_CHAR[Step(s)] for s in self.steps)

    @classmethod
    def from_text(cls, line: str) -> "MotzkinPath":
        line = line.strip()
        try:
            steps = tuple(_CHAR_TO_STEP[c] for c in line)
        except KeyError as exc:
            raise DomainError(f"invalid path character {exc.args[0]!r}") from None
        return cls(steps)

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "steps": list(self.steps)})

    @classmethod
    def from_json(cls, text: str) -> "MotzkinPath":
        obj = json.loads(text)
        if obj.get("n") != len(obj.get("steps", [])):
            raise DomainError("JSON path: 'n' disagrees with len(steps)")
        return cls(tuple(obj["steps"]))


def validate(steps: Iterable[int]) -> MotzkinPath:
    """Validate a step sequence and wrap it as a :class:`MotzkinPath`."""
    return MotzkinPath(tuple(steps))


class CountingTriple(NamedTuple):
    """Step counts over a path prefix; ascents + descents + levels == index."""

    ascents: int
    descents: int
    levels: int
    index: int


def floor_index(n: int, t) -> int:
    """Exact floor(n*t) for t in [0, 1].

    Floats are taken at their exact binary value (via Fraction) so the
    result never suffers from rounding in the product; strings such as
    "0.3" are read as exact decimals.
    """
    frac = t if isinstance(t, Fraction) else Fraction(t)
    if frac < 0 or frac > 1:
        raise DomainError(f"time {t!r} outside [0, 1]")
    return math.floor(n * frac)


def counting_prefix(path: MotzkinPath, m: int) -> CountingTriple:
    """Counts of ascents, descents and levels among the first m steps."""
    if not 0 <= m <= path.n:
        raise DomainError(f"prefix length {m} outside [0, {path.n}]")
    a = d = lv = 0
    for s in path.steps[:m]:
        if s == 1:
            a += 1
        elif s == -1:
            d += 1
        else:
            lv += 1
    return CountingTriple(a, d, lv, m)


def counting_processes(path: MotzkinPath, t) -> CountingTriple:
    """Step counts over the first floor(n*t) steps, t in [0, 1]."""
    return counting_prefix(path, floor_index(path.n, t))


# -- enumeration and counting ---------------------------------------------


def enumerate_paths(n: int) -> Iterator[MotzkinPath]:
    """Yield every Motzkin path of length n once, in lexicographic order.

    Step values are ordered -1 < 0 < 1 (descent < level < ascent).
    """
    if n < 0:
        raise DomainError("n must be >= 0")
    prefix: list[int] = []

    def extend(height: int, remaining: int) -> Iterator[MotzkinPath]:
        if remaining == 0:
            yield MotzkinPath(tuple(prefix))
            return
        for s in (-1, 0, 1):
            h = height + s
            # must stay >= 0 and still be able to come back to 0
            if h < 0 or h > remaining - 1:
                continue
            prefix.append(s)
            yield from extend(h, remaining - 1)
            prefix.pop()

    yield from extend(0, n)


def catalan(k: int) -> int:
    """Exact Catalan number C_k = binom(2k, k)/(k+1)."""
    if k < 0:
        raise DomainError("k must be >= 0")
    return math.comb(2 * k, k) // (k + 1)


def _motzkin_binomial(n: int) -> int:
    # sum_k binom(n, 2k) * C_k, with exact incremental term ratios:
    # term_{k+1} = term_k * (n-2k)(n-2k-1) / ((k+1)(k+2))
    term = 1
    total = 1
    for k in range(n // 2):
        term = term * (n - 2 * k) * (n - 2 * k - 1) // ((k + 1) * (k + 2))
        total += term
    return total


_MOTZKIN_CONV: list[int] = [1, 1]


def _motzkin_convolution(n: int) -> int:
    # M_n = M_{n-1} + sum_{k=0}^{n-2} M_k M_{n-2-k}; table extended on demand.
    M = _MOTZKIN_CONV
    while len(M) <= n:
        j = len(M)
        M.append(M[j - 1] + sum(M[k] * M[j - 2 - k] for k in range(j - 1)))
    return M[n]


def motzkin_number(n: int) -> int:
    """Exact Motzkin number, computed two independent ways.

    Evaluates both the binomial-Catalan sum and the convolution recurrence
    and insists they agree.  The convolution table costs O(n^2) big-integer
    multiplications overall, so this is meant for n up to a few thousand;
    use :func:`motzkin_log` when only the magnitude is needed.
    """
    if n < 0:
        raise DomainError("n must be >= 0")
    a = _motzkin_binomial(n)
    b = _motzkin_convolution(n)
    if a != b:
        raise InternalMismatch(f"Motzkin number mismatch at n={n}: {a} != {b}")
    return a


def motzkin_log(n: int) -> float:
    """log of the Motzkin number, exact big-integer sum then one log."""
    if n < 0:
        raise DomainError("n must be >= 0")
    return math.log(_motzkin_binomial(n))


def meander_table(n: int) -> list[list[int]]:
    """DP table W with W[m][h] = # of non-negative {-1,0,1} paths, m steps, height h -> 0.

    Row m has entries h = 0..m (higher starting points cannot reach 0).
    W[n][0] is the Motzkin number.
    """
    if n < 0:
        raise DomainError("n must be >= 0")
    rows = [[1]]
    for m in range(1, n + 1):
        prev = rows[-1]
        pm = len(prev)

        def at(h):
            return prev[h] if 0 <= h < pm else 0

        rows.append([at(h + 1) + at(h) + (at(h - 1) if h > 0 else 0) for h in range(m + 1)])
    return rows


# -- non-crossing pair partitions -------------------------------------------


@dataclass(frozen=True)
class PairPartition:
    """A perfect matching of a finite index set (1-based indices).

    ``pairs`` are (i, j) tuples with i < j; they must be disjoint and
    cover ``support`` exactly.
    """

    support: tuple[int, ...]
    pairs: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        support = tuple(sorted(int(i) for i in self.support))
        pairs = frozenset((int(i), int(j)) for i, j in self.pairs)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "pairs", pairs)
        if len(set(support)) != len(support):
            raise DomainError("support contains duplicates")
        if any(i < 1 for i in support):
            raise DomainError("support indices must be positive (1-based)")
        seen: set[int] = set()
        for i, j in pairs:
            if i >= j:
                raise DomainError(f"pair ({i}, {j}) not ordered i < j")
            if i in seen or j in seen:
                raise DomainError("pairs are not disjoint")
            seen.update((i, j))
        if seen != set(support):
            raise DomainError("pairs do not cover the support exactly")

    @property
    def size(self) -> int:
        return len(self.support)


def is_noncrossing(partition: PairPartition) -> bool:
    """True iff no two pairs (i, j), (i', j') satisfy i < i' < j < j'."""
    pairs = sorted(partition.pairs)
    for a in range(len(pairs)):
        i, j = pairs[a]
        for b in range(a + 1, len(pairs)):
            ip, jp = pairs[b]
            if i < ip < j < jp:
                return False
    return True


def enumerate_nc2(support: Sequence[int]) -> Iterator[PairPartition]:
    """Yield every non-crossing pair partition of the sorted index set.

    The count is the Catalan number C_{|support|/2}.
    """
    items = tuple(sorted(int(i) for i in support))
    if len(items) % 2:
        raise OddSupport(f"support size {len(items)} is odd")

    def rec(seg: tuple[int, ...]) -> Iterator[tuple[tuple[int, int], ...]]:
        if not seg:
            yield ()
            return
        first = seg[0]
        # partner at odd offset keeps both sides even
        for off in range(1, len(seg), 2):
            inner = seg[1:off]
            outer = seg[off + 1 :]
            for pin in rec(inner):
                for pout in rec(outer):
                    yield ((first, seg[off]),) + pin + pout

    for plist in rec(items):
        yield PairPartition(items, frozenset(plist))


def path_to_partition(path: MotzkinPath) -> PairPartition:
    """Match each ascent with its closing descent (stack matching, 1-based)."""
    stack: list[int] = []
    pairs = []
    support = []
    for idx, s in enumerate(path.steps, start=1):
        if s == 1:
            stack.append(idx)
            support.append(idx)
        elif s == -1:
            pairs.append((stack.pop(), idx))
            support.append(idx)
    assert not stack  # guaranteed by path validity
    return PairPartition(tuple(support), frozenset(pairs))


def partition_to_path(n: int, partition: PairPartition) -> MotzkinPath:
    """Inverse of :func:`path_to_partition`: ascent at each pair's smaller index.

    Raises :class:`CrossingPartition` if the pairing crosses (no Motzkin
    path realizes a crossing matching).
    """
    if partition.support and partition.support[-1] > n:
        raise DomainError(f"support exceeds path length {n}")
    if not is_noncrossing(partition):
        raise CrossingPartition(f"crossing pairs in {sorted(partition.pairs)}")
    steps = [0] * n
    for i, j in partition.pairs:
        steps[i - 1] = 1
        steps[j - 1] = -1
    return MotzkinPath(tuple(steps))
