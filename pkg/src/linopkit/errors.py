"""Exception types raised by operators, kernels and solvers."""


class LinOpError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(LinOpError, ValueError):
    """Input rows do not match the operator's expected dimension."""


class MaterializationTooLarge(LinOpError, ValueError):
    """Dense materialization would exceed the configured byte cap."""


class NotPowerOfTwo(LinOpError, ValueError):
    """Length must be a power of two."""


class EmptyInput(LinOpError, ValueError):
    """A nonempty vector, matrix or operator list is required."""


class IndexOutOfRange(LinOpError, IndexError):
    """An index lies outside the valid range."""


class OrderTooLarge(LinOpError, ValueError):
    """Requested transform order exceeds the addressable size."""


class ChainMismatch(LinOpError, ValueError):
    """Adjacent factors in a product do not chain."""


class TooFewFactors(LinOpError, ValueError):
    """A Kronecker product needs at least two factors."""


class RaggedGrid(LinOpError, ValueError):
    """Block grid rows have inconsistent lengths."""


class BlockShapeMismatch(LinOpError, ValueError):
    """A block's shape is inconsistent with its grid row/column."""


class NonSquare(LinOpError, ValueError):
    """A square operator is required."""


class NegativeThreshold(LinOpError, ValueError):
    """Soft-threshold level must be nonnegative."""


class BreakdownError(LinOpError, ArithmeticError):
    """Conjugate-gradient breakdown: curvature p^H A p is not positive."""


class KOutOfRange(LinOpError, ValueError):
    """Requested sparsity level is outside [1, cols]."""


class UnknownScenario(LinOpError, ValueError):
    """Benchmark scenario name is not registered."""
