"""Matrix-free structured linear operators.

Structured matrices (Fourier, Hadamard, circulant, Kronecker products,
block grids, ...) expose validated forward/backward transforms without
ever materializing their entries, compose into an operator algebra, and
plug into matrix-free solvers (CG, ISTA, OMP, power iteration).  The
``linopkit`` CLI benchmarks the structured paths against the dense
brute-force baseline.
"""

from .core import (
    Adjoint,
    DEFAULT_DENSE_CAP_BYTES,
    LinearOperator,
    ScalarField,
    as_field,
    field_of,
    promote_field,
)
from .composites import (
    BlockDiag,
    Blocks,
    Kron,
    Partial,
    Polynomial,
    Power,
    Product,
)
from .errors import (
    BlockShapeMismatch,
    BreakdownError,
    ChainMismatch,
    DimensionMismatch,
    EmptyInput,
    IndexOutOfRange,
    KOutOfRange,
    LinOpError,
    MaterializationTooLarge,
    NegativeThreshold,
    NonSquare,
    NotPowerOfTwo,
    OrderTooLarge,
    RaggedGrid,
    TooFewFactors,
    UnknownScenario,
)
from .kernels import DftPlan, circular_convolve, dft, fwht
from .leaves import (
    Circulant,
    Dense,
    Diagonal,
    Fourier,
    Hadamard,
    Identity,
    Parametric,
    Sparse,
    Toeplitz,
    Zero,
)
from .solvers import (
    IstaOptions,
    IstaResult,
    OmpResult,
    SolveOptions,
    SolveReport,
    SpectralReport,
    cg_solve,
    ista,
    omp,
    power_iteration,
    soft_threshold,
)

__version__ = "0.1.0"

__all__ = [
    "Adjoint",
    "BlockDiag",
    "BlockShapeMismatch",
    "Blocks",
    "BreakdownError",
    "ChainMismatch",
    "Circulant",
    "DEFAULT_DENSE_CAP_BYTES",
    "Dense",
    "DftPlan",
    "Diagonal",
    "DimensionMismatch",
    "EmptyInput",
    "Fourier",
    "Hadamard",
    "Identity",
    "IndexOutOfRange",
    "IstaOptions",
    "IstaResult",
    "KOutOfRange",
    "Kron",
    "LinOpError",
    "LinearOperator",
    "MaterializationTooLarge",
    "NegativeThreshold",
    "NonSquare",
    "NotPowerOfTwo",
    "OmpResult",
    "OrderTooLarge",
    "Parametric",
    "Partial",
    "Polynomial",
    "Power",
    "Product",
    "RaggedGrid",
    "ScalarField",
    "SolveOptions",
    "SolveReport",
    "Sparse",
    "SpectralReport",
    "Toeplitz",
    "TooFewFactors",
    "UnknownScenario",
    "Zero",
    "as_field",
    "cg_solve",
    "circular_convolve",
    "dft",
    "field_of",
    "fwht",
    "ista",
    "omp",
    "power_iteration",
    "promote_field",
    "soft_threshold",
]
