"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the documented domain of an operation."""


class PrefixNegative(ValueError):
    """A step sequence dips below the horizontal axis.

    ``index`` is the 1-based position of the first offending prefix.
    """

    def __init__(self, index):
        self.index = index
        super().__init__(f"prefix sum drops below 0 after step {index}")


class NonzeroEndpoint(ValueError):
    """A step sequence does not return to height 0."""

    def __init__(self, total):
        self.total = total
        super().__init__(f"step values sum to {total}, expected 0")


class CrossingPartition(ValueError):
    """A pair partition is crossing, so no lattice path realizes it."""


class OddSupport(ValueError):
    """A pair partition was requested on a set of odd cardinality."""


class BadSum(ValueError):
    """A pre-rotation word does not have total step sum -1."""


class InternalMismatch(RuntimeError):
    """Two supposedly-equivalent evaluation routes disagree.

    Raised by operations that cross-check themselves; indicates a bug,
    not bad input.
    """


class QuadratureFailure(RuntimeError):
    """Adaptive quadrature could not reach the requested tolerance."""


class SingularDenominator(RuntimeError):
    """A transition-kernel denominator was non-positive inside its domain."""
