"""Operator interface: validation, scalar fields, dense oracle, adjoint, footprint.

Every structured operator derives from :class:`LinearOperator`.  The public
``forward``/``backward`` entry points validate shape and dtype, then dispatch
to the subclass fast paths ``_forward``/``_backward`` which may assume clean
2-D inputs.  Operators are immutable after construction and safe to share
across threads; all work buffers are function-local.
"""

import enum

import numpy as np

from .errors import DimensionMismatch, MaterializationTooLarge

DEFAULT_DENSE_CAP_BYTES = 2 ** 31  # 2 GiB materialization guard


class ScalarField(enum.Enum):
    """Scalar field of an operator or batch: real or complex double."""

    REAL64 = "real64"
    COMPLEX128 = "complex128"

    @property
    def dtype(self):
        return np.complex128 if self is ScalarField.COMPLEX128 else np.float64

    @property
    def size_bytes(self):
        return 16 if self is ScalarField.COMPLEX128 else 8


def promote_field(a, b):
    """Complex wins: the promoted field is complex iff either argument is."""
    if a is ScalarField.COMPLEX128 or b is ScalarField.COMPLEX128:
        return ScalarField.COMPLEX128
    return ScalarField.REAL64


def as_field(value):
    """Coerce a ScalarField, dtype or string into a ScalarField."""
    if isinstance(value, ScalarField):
        return value
    if isinstance(value, str):
        try:
            return ScalarField(value.lower())
        except ValueError:
            raise ValueError(f"unknown scalar field {value!r}") from None
    dt = np.dtype(value)
    if np.issubdtype(dt, np.complexfloating):
        return ScalarField.COMPLEX128
    if np.issubdtype(dt, np.number) or np.issubdtype(dt, np.bool_):
        return ScalarField.REAL64
    raise TypeError(f"no scalar field for dtype {dt}")


def field_of(arr):
    """ScalarField of an ndarray (complex dtypes map to COMPLEX128)."""
    return as_field(arr.dtype)


def coerce_array(x, name="x"):
    """Normalize input to a float64/complex128 ndarray of ndim 1 or 2."""
    arr = np.asarray(x)
    if arr.dtype == object or not (
        np.issubdtype(arr.dtype, np.number) or np.issubdtype(arr.dtype, np.bool_)
    ):
        raise TypeError(f"{name} must be numeric, got dtype {arr.dtype}")
    if arr.ndim not in (1, 2):
        raise ValueError(f"{name} must be 1-D or 2-D, got ndim {arr.ndim}")
    target = as_field(arr.dtype).dtype
    return arr.astype(target, copy=False)


class LinearOperator:
    """Abstract matrix-free operator A with validated forward x -> A x and
    backward y -> A^H y transforms.

    Subclasses set ``_shape`` and ``_field`` during construction and
    implement ``_forward``/``_backward`` on 2-D batches, plus
    ``_param_bytes`` (own parameter storage) and optionally ``_children``.
    """

    _shape = None
    _field = ScalarField.REAL64

    def _init_shape(self, rows, cols, field):
        rows = int(rows)
        cols = int(cols)
        if rows < 1 or cols < 1:
            raise ValueError(f"operator shape must be positive, got ({rows}, {cols})")
        self._shape = (rows, cols)
        self._field = field

    @property
    def shape(self):
        return self._shape

    @property
    def rows(self):
        return self._shape[0]

    @property
    def cols(self):
        return self._shape[1]

    @property
    def field(self):
        return self._field

    # -- fast paths supplied by subclasses ---------------------------------

    def _forward(self, x):
        raise NotImplementedError

    def _backward(self, y):
        raise NotImplementedError

    def _param_bytes(self):
        raise NotImplementedError

    def _children(self):
        return ()

    # -- validated public entry points -------------------------------------

    def forward(self, x):
        """Apply the operator: returns A @ x.

        ``x`` may be a vector of length ``cols`` or a batch of column
        vectors of shape ``(cols, k)``; the result has matching ndim and
        field ``promote(op.field, field(x))``.
        """
        arr = coerce_array(x)
        squeeze = arr.ndim == 1
        if squeeze:
            arr = arr[:, None]
        if arr.shape[0] != self.cols:
            raise DimensionMismatch(
                f"{self!r} expects input with {self.cols} rows, got {arr.shape[0]} "
                f"(operator shape {self.shape}, input shape "
                f"{arr.shape[:1] if squeeze else arr.shape})"
            )
        out_field = promote_field(self.field, field_of(arr))
        out = self._forward(arr.astype(out_field.dtype, copy=False))
        out = np.asarray(out, dtype=out_field.dtype)
        assert out.shape == (self.rows, arr.shape[1])
        return out[:, 0] if squeeze else out

    def backward(self, y):
        """Apply the Hermitian adjoint: returns A^H @ y."""
        arr = coerce_array(y, name="y")
        squeeze = arr.ndim == 1
        if squeeze:
            arr = arr[:, None]
        if arr.shape[0] != self.rows:
            raise DimensionMismatch(
                f"adjoint of {self!r} expects input with {self.rows} rows, got "
                f"{arr.shape[0]} (operator shape {self.shape}, input shape "
                f"{arr.shape[:1] if squeeze else arr.shape})"
            )
        out_field = promote_field(self.field, field_of(arr))
        out = self._backward(arr.astype(out_field.dtype, copy=False))
        out = np.asarray(out, dtype=out_field.dtype)
        assert out.shape == (self.cols, arr.shape[1])
        return out[:, 0] if squeeze else out

    def __matmul__(self, x):
        return self.forward(x)

    # -- derived operations -------------------------------------------------

    def adjoint(self):
        """The Hermitian adjoint as an operator (wraps, does not copy)."""
        return Adjoint(self)

    @property
    def H(self):
        return self.adjoint()

    def to_dense(self, cap_bytes=DEFAULT_DENSE_CAP_BYTES):
        """Materialize the dense matrix; column j is forward(e_j).

        This is the brute-force oracle the structured paths are tested
        against.  Refuses to allocate more than ``cap_bytes``.
        """
        n, m = self.shape
        need = n * m * self.field.size_bytes
        if need >= cap_bytes:
            raise MaterializationTooLarge(
                f"dense {n}x{m} {self.field.value} needs {need} bytes "
                f"(cap {cap_bytes})"
            )
        out = np.empty((n, m), dtype=self.field.dtype)
        # Column blocks keep the transient identity batch small.
        block = max(1, min(m, (1 << 26) // max(1, n * self.field.size_bytes)))
        eye_dtype = self.field.dtype
        for j0 in range(0, m, block):
            j1 = min(m, j0 + block)
            basis = np.zeros((m, j1 - j0), dtype=eye_dtype)
            basis[np.arange(j0, j1), np.arange(j1 - j0)] = 1
            out[:, j0:j1] = self._forward(basis)
        return out

    def footprint_bytes(self):
        """Bytes of parameter storage owned by this operator tree.

        Each distinct operator instance is counted exactly once, so block
        grids reusing the same sub-operator pay for it once.  Transient
        work buffers and shared transform plans are excluded.
        """
        seen = set()
        total = 0
        stack = [self]
        while stack:
            op = stack.pop()
            if id(op) in seen:
                continue
            seen.add(id(op))
            total += op._param_bytes()
            stack.extend(op._children())
        return total

    def __repr__(self):
        return f"{type(self).__name__}(shape={self.shape}, field={self.field.value})"


class Adjoint(LinearOperator):
    """Hermitian-adjoint view of a base operator: forward is the base's
    backward and vice versa.  Taking the adjoint twice returns the base."""

    def __init__(self, base):
        self.base = base
        self._init_shape(base.cols, base.rows, base.field)

    def adjoint(self):
        return self.base

    def _forward(self, x):
        return self.base._backward(x)

    def _backward(self, y):
        return self.base._forward(y)

    def _param_bytes(self):
        return 8  # reference to the base

    def _children(self):
        return (self.base,)

    def __repr__(self):
        return f"Adjoint({self.base!r})"
