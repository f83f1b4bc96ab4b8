"""Exact uniform random generation of Motzkin paths.

Three interchangeable algorithms:

* ``cycle_lemma`` (default): draw the ascent count k from its exact
  big-integer weight, lay out k ascents, k+1 descents and n-2k levels in
  uniformly random order, and rotate the length-(n+1) word at the unique
  point that turns its first n steps into a Motzkin path.  O(n) per
  sample, exact for any n.
* ``dp_exact``: sequential conditional sampling against exact big-integer
  suffix counts from :func:`motzkin.paths.meander_table`.  O(n^2) table,
  kept as an independent oracle.
* ``dp_logspace``: same walk driven by float64 log-counts, for large n.

All randomness flows through :class:`RandomSource`, a seeded wrapper
around numpy's PCG64 with a documented per-stream derivation, so runs are
reproducible given (seed, mode, n, worker layout) within one build.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional

import numpy as np

from .errors import BadSum, DomainError
from .paths import MotzkinPath, meander_table

__all__ = [
    "RandomSource",
    "SamplerConfig",
    "sample_k_weight",
    "cycle_rotation_point",
    "sample_uniform",
    "sample_paths",
    "sample_steps",
    "meander_log_table",
    "dp_step_weights",
    "dp_step_probs_exact",
    "dp_step_probs_log",
]

MODES = ("cycle_lemma", "dp_exact", "dp_logspace")

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    """One SplitMix64 output step; the documented stream-mixing function."""
    x = (x + _GOLDEN) & _MASK64
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & _MASK64
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & _MASK64
    x ^= x >> 31
    return x


class RandomSource:
    """Seedable 64-bit random stream with derived per-worker substreams.

    Stream w of seed s drives ``PCG64(splitmix64(s XOR splitmix64(w)))``;
    stream 0 is the default stream.  Identical (seed, stream) gives an
    identical word stream within one build of numpy; cross-version bit
    stability is not promised.
    """

    def __init__(self, seed: int, stream: int = 0):
        self.seed = int(seed) & _MASK64
        self.stream = int(stream)
        derived = splitmix64(self.seed ^ splitmix64(self.stream & _MASK64))
        self.generator = np.random.Generator(np.random.PCG64(derived))

    def split(self, stream: int) -> "RandomSource":
        """Independent substream for worker ``stream`` of the same seed."""
        return RandomSource(self.seed, stream)

    def randbelow(self, bound: int) -> int:
        """Uniform integer in [0, bound), exact for arbitrary-size bounds.

        Draws ceil(bits/8) bytes, masks to the bit length and rejects
        values >= bound, so every residue is exactly equally likely.
        """
        if bound <= 0:
            raise DomainError("bound must be positive")
        nbits = bound.bit_length()
        nbytes = (nbits + 7) // 8
        shift = nbytes * 8 - nbits
        while True:
            x = int.from_bytes(self.generator.bytes(nbytes), "little") >> shift
            if x < bound:
                return x


@dataclass(frozen=True)
class SamplerConfig:
    """What to sample: path length, algorithm, seed."""

    n: int
    mode: str = "cycle_lemma"
    seed: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise DomainError("n must be >= 0")
        if self.mode not in MODES:
            raise DomainError(f"mode must be one of {MODES}, got {self.mode!r}")


# -- cycle-lemma sampler ------------------------------------------------------


def sample_k_weight(n: int, k: int) -> int:
    """Number of length-(n+1) words with k ascents, k+1 descents, n-2k levels.

    Exact multinomial (n+1)! / (k! (k+1)! (n-2k)!); the unnormalized
    weight of k in the cycle-lemma sampler.
    """
    if k < 0 or n - 2 * k < 0:
        raise DomainError(f"need 0 <= 2k <= n, got n={n}, k={k}")
    return math.factorial(n + 1) // (
        math.factorial(k) * math.factorial(k + 1) * math.factorial(n - 2 * k)
    )


@lru_cache(maxsize=32)
def _k_cumulative(n: int) -> tuple[tuple[int, ...], int]:
    # cumulative weights of k = 0..floor(n/2), built by exact ratio steps:
    # w_{k+1} = w_k * (n-2k)(n-2k-1) / ((k+1)(k+2))
    term = n + 1  # k = 0: (n+1)!/(1!(n)!) ... = n+1
    cum = [term]
    for k in range(n // 2):
        term = term * (n - 2 * k) * (n - 2 * k - 1) // ((k + 1) * (k + 2))
        cum.append(cum[-1] + term)
    return tuple(cum), cum[-1]


def cycle_rotation_point(steps) -> int:
    """1-based rotation index for a {-1,0,1} word with total sum -1.

    Returns r = (position of the first prefix attaining the minimal prefix
    sum) + 1, taken cyclically; the rotation starting at r is the unique
    cyclic shift whose first len-1 steps form a Motzkin path and whose
    final step is the descent reaching -1.
    """
    steps = [int(s) for s in steps]
    if sum(steps) != -1:
        raise BadSum(f"word must sum to -1, got {sum(steps)}")
    best = None
    best_at = 0
    h = 0
    for i, s in enumerate(steps, start=1):
        h += s
        if best is None or h < best:
            best = h
            best_at = i
    return best_at % len(steps) + 1


def _cycle_batch(n: int, count: int, rng: RandomSource) -> np.ndarray:
    """(count, n) int8 array of uniform Motzkin paths via the cycle lemma."""
    if n == 0:
        return np.zeros((count, 0), dtype=np.int8)
    cum, total = _k_cumulative(n)
    gen = rng.generator
    word = np.zeros((count, n + 1), dtype=np.int8)
    for i in range(count):
        k = bisect.bisect_right(cum, rng.randbelow(total))
        word[i, :k] = 1
        word[i, k : 2 * k + 1] = -1
    word = gen.permuted(word, axis=1)
    # rotate each row to start right after its first prefix-sum minimum
    prefix = np.cumsum(word, axis=1, dtype=np.int32)
    start = (np.argmin(prefix, axis=1) + 1) % (n + 1)
    idx = (start[:, None] + np.arange(n + 1, dtype=np.int64)[None, :]) % (n + 1)
    rotated = np.take_along_axis(word, idx, axis=1)
    return rotated[:, :n].copy()


# -- DP samplers --------------------------------------------------------------


def dp_step_weights(table, remaining: int, h: int) -> list[tuple[int, int]]:
    """Exact weights [(step, count), ...] for the next step of the DP walk.

    ``remaining`` steps are left and the walk sits at height ``h``; the
    weight of a step to h' is the number of completions W[remaining-1][h'].
    """
    row = table[remaining - 1]

    def w(hh):
        return row[hh] if 0 <= hh < len(row) else 0

    out = [(1, w(h + 1)), (0, w(h))]
    if h > 0:
        out.append((-1, w(h - 1)))
    return out


def dp_step_probs_exact(table, remaining: int, h: int) -> dict[int, float]:
    weights = dp_step_weights(table, remaining, h)
    total = sum(w for _, w in weights)
    return {s: w / total for s, w in weights if w}


def _dp_exact_one(n: int, rng: RandomSource, table) -> list[int]:
    steps = []
    h = 0
    for m in range(n):
        weights = dp_step_weights(table, n - m, h)
        total = sum(w for _, w in weights)
        x = rng.randbelow(total)
        for s, w in weights:
            if x < w:
                steps.append(s)
                h += s
                break
            x -= w
    return steps


@lru_cache(maxsize=8)
def meander_log_table(n: int) -> np.ndarray:
    """float64 log-counts of the meander DP table; shape (n+1, n+1)."""
    neg = -np.inf
    rows = np.full((n + 1, n + 1), neg)
    rows[0, 0] = 0.0
    for m in range(1, n + 1):
        prev = rows[m - 1]
        up = np.concatenate([prev[1:], [neg]])
        down = np.concatenate([[neg], prev[:-1]])
        stacked = np.stack([up, prev, down])
        with np.errstate(invalid="ignore"):
            mx = stacked.max(axis=0)
            good = mx > neg
            out = np.full(n + 1, neg)
            out[good] = mx[good] + np.log(
                np.exp(stacked[:, good] - mx[good]).sum(axis=0)
            )
        rows[m] = out
    return rows


def dp_step_probs_log(log_table: np.ndarray, remaining: int, h: int) -> dict[int, float]:
    row = log_table[remaining - 1]

    def lw(hh):
        return row[hh] if 0 <= hh < len(row) else -np.inf

    cand = [(1, lw(h + 1)), (0, lw(h))]
    if h > 0:
        cand.append((-1, lw(h - 1)))
    mx = max(v for _, v in cand)
    raw = {s: math.exp(v - mx) for s, v in cand if v > -np.inf}
    total = sum(raw.values())
    return {s: v / total for s, v in raw.items()}


def _dp_log_one(n: int, rng: RandomSource, log_table: np.ndarray) -> list[int]:
    steps = []
    h = 0
    for m in range(n):
        probs = dp_step_probs_log(log_table, n - m, h)
        u = rng.generator.random()
        acc = 0.0
        chosen = None
        for s, p in probs.items():
            acc += p
            if u < acc:
                chosen = s
                break
        if chosen is None:  # float round-off at the top end
            chosen = next(reversed(probs))
        steps.append(chosen)
        h += chosen
    return steps


# -- public sampling API ------------------------------------------------------


def _step_chunks(
    config: SamplerConfig, count: int, rng: RandomSource, chunk: int = 2048
) -> Iterator[np.ndarray]:
    """Yield (c, n) int8 arrays until ``count`` paths have been produced.

    The chunk size is part of the random-stream consumption pattern and
    therefore of the reproducibility contract; do not change it casually.
    """
    n = config.n
    if config.mode == "cycle_lemma":
        done = 0
        while done < count:
            c = min(chunk, count - done)
            yield _cycle_batch(n, c, rng)
            done += c
        return
    if config.mode == "dp_exact":
        table = meander_table(n)
        maker = lambda: _dp_exact_one(n, rng, table)
    else:
        log_table = meander_log_table(n)
        maker = lambda: _dp_log_one(n, rng, log_table)
    done = 0
    while done < count:
        c = min(chunk, count - done)
        arr = np.empty((c, n), dtype=np.int8)
        for i in range(c):
            arr[i] = maker()
        yield arr
        done += c


def sample_steps(
    config: SamplerConfig,
    count: int,
    rng: Optional[RandomSource] = None,
    workers: int = 1,
) -> np.ndarray:
    """(count, n) int8 step matrix of uniform Motzkin paths.

    With ``workers`` > 1 the draw is split into per-worker quotas served
    by derived substreams (worker w uses stream w of the seed) and the
    results are concatenated in worker order, so the output depends only
    on (seed, mode, n, workers, count).
    """
    if count < 0:
        raise DomainError("count must be >= 0")
    if workers < 1:
        raise DomainError("workers must be >= 1")
    if workers == 1:
        source = rng if rng is not None else RandomSource(config.seed)
        parts = list(_step_chunks(config, count, source))
    else:
        base = count // workers
        extra = count % workers
        parts = []
        for w in range(workers):
            quota = base + (1 if w < extra else 0)
            if quota == 0:
                continue
            parts.extend(_step_chunks(config, quota, RandomSource(config.seed, w)))
    if not parts:
        return np.zeros((0, config.n), dtype=np.int8)
    return np.concatenate(parts, axis=0)


def sample_uniform(config: SamplerConfig, rng: Optional[RandomSource] = None) -> MotzkinPath:
    """One Motzkin path distributed uniformly over the M_n paths of length n."""
    steps = sample_steps(config, 1, rng=rng)
    return MotzkinPath(tuple(int(s) for s in steps[0]))


def sample_paths(
    config: SamplerConfig,
    count: int,
    rng: Optional[RandomSource] = None,
    workers: int = 1,
) -> list[MotzkinPath]:
    """``count`` independent uniform paths, each validated on construction."""
    arr = sample_steps(config, count, rng=rng, workers=workers)
    return [MotzkinPath(tuple(int(s) for s in row)) for row in arr]
