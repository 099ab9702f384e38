"""Concrete structured operators with fast forward/backward paths.

Each class stores only the parameters its transform needs: the Fourier and
Hadamard operators keep a single integer, the circulant keeps its defining
column plus the cached spectrum, and so on.  The dense operator doubles as
the brute-force baseline the benchmarks compare against.
"""

import numpy as np
import scipy.sparse

from . import kernels
from .core import LinearOperator, ScalarField, as_field, field_of, promote_field
from .errors import EmptyInput, IndexOutOfRange, OrderTooLarge

MAX_HADAMARD_ORDER = 30


def _as_param_vector(d, name):
    arr = np.asarray(d)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-D, got ndim {arr.ndim}")
    if arr.shape[0] == 0:
        raise EmptyInput(f"{name} must be nonempty")
    return arr.astype(as_field(arr.dtype).dtype, copy=False)


class Dense(LinearOperator):
    """Unstructured operator over explicitly stored entries."""

    def __init__(self, entries):
        arr = np.asarray(entries)
        if arr.ndim != 2:
            raise ValueError(f"entries must be 2-D, got ndim {arr.ndim}")
        if arr.size == 0:
            raise EmptyInput("entries must be nonempty")
        self.entries = np.ascontiguousarray(arr, dtype=as_field(arr.dtype).dtype)
        self._init_shape(arr.shape[0], arr.shape[1], field_of(self.entries))

    def _forward(self, x):
        kernels._count(self.rows * self.cols * x.shape[1])
        return self.entries @ x

    def _backward(self, y):
        kernels._count(self.rows * self.cols * y.shape[1])
        return self.entries.conj().T @ y

    def _param_bytes(self):
        return self.entries.nbytes


class Zero(LinearOperator):
    """All-zeros operator; forward never reads the input entries."""

    def __init__(self, rows, cols):
        self._init_shape(rows, cols, ScalarField.REAL64)

    def _forward(self, x):
        return np.zeros((self.rows, x.shape[1]), dtype=x.dtype)

    def _backward(self, y):
        return np.zeros((self.cols, y.shape[1]), dtype=y.dtype)

    def _param_bytes(self):
        return 16


class Identity(LinearOperator):
    def __init__(self, n):
        self._init_shape(n, n, ScalarField.REAL64)

    def _forward(self, x):
        return x.copy()

    def _backward(self, y):
        return y.copy()

    def _param_bytes(self):
        return 8


class Diagonal(LinearOperator):
    """Square operator scaling entry i by d[i]."""

    def __init__(self, d):
        self.d = _as_param_vector(d, "diagonal")
        n = self.d.shape[0]
        self._init_shape(n, n, field_of(self.d))

    def _forward(self, x):
        return self.d[:, None] * x

    def _backward(self, y):
        return self.d.conj()[:, None] * y

    def _param_bytes(self):
        return self.d.nbytes


class Sparse(LinearOperator):
    """Compressed-sparse-row operator built from (row, col, value) triplets.

    Duplicate coordinates are summed.  The conjugate-transposed CSR is built
    once at construction so the backward transform also runs in O(nnz).
    """

    def __init__(self, rows, cols, triplets):
        rows = int(rows)
        cols = int(cols)
        tri = list(triplets)
        if tri:
            i = np.asarray([t[0] for t in tri], dtype=np.intp)
            j = np.asarray([t[1] for t in tri], dtype=np.intp)
            v = np.asarray([t[2] for t in tri])
        else:
            i = np.zeros(0, dtype=np.intp)
            j = np.zeros(0, dtype=np.intp)
            v = np.zeros(0)
        if i.size and (i.min() < 0 or i.max() >= rows or j.min() < 0 or j.max() >= cols):
            raise IndexOutOfRange(
                f"triplet index outside {rows}x{cols} matrix"
            )
        dtype = as_field(v.dtype).dtype if v.size else np.float64
        self._csr = scipy.sparse.csr_matrix(
            (v.astype(dtype), (i, j)), shape=(rows, cols)
        )
        self._csr.sum_duplicates()
        self._csr_adj = self._csr.conj().T.tocsr()
        self._init_shape(rows, cols, field_of(self._csr.data))

    @property
    def row_ptr(self):
        return self._csr.indptr

    @property
    def col_idx(self):
        return self._csr.indices

    @property
    def values(self):
        return self._csr.data

    @property
    def nnz(self):
        return self._csr.nnz

    def _forward(self, x):
        kernels._count(self.nnz * x.shape[1])
        return np.asarray(self._csr @ x)

    def _backward(self, y):
        kernels._count(self.nnz * y.shape[1])
        return np.asarray(self._csr_adj @ y)

    def _param_bytes(self):
        return sum(
            m.data.nbytes + m.indices.nbytes + m.indptr.nbytes
            for m in (self._csr, self._csr_adj)
        )


class Fourier(LinearOperator):
    """Unnormalized discrete Fourier matrix, entry (j, k) = w^(jk) with
    w = exp(-2i pi / n).  Forward is the FFT; backward applies the
    conjugate transpose, i.e. n times the inverse transform.  Only the
    length is stored; twiddle tables live in the shared plan cache."""

    def __init__(self, n):
        self._init_shape(n, n, ScalarField.COMPLEX128)

    def _forward(self, x):
        return kernels.dft(x)

    def _backward(self, y):
        return kernels.dft(y, inverse=True) * self.rows

    def _param_bytes(self):
        return 8


class Hadamard(LinearOperator):
    """Recursive +/-1 orthogonal matrix of size 2^order; symmetric, so the
    forward and backward transforms are both the in-place butterfly."""

    def __init__(self, order):
        order = int(order)
        if order < 0:
            raise ValueError(f"order must be >= 0, got {order}")
        if order > MAX_HADAMARD_ORDER:
            raise OrderTooLarge(
                f"order {order} exceeds the {MAX_HADAMARD_ORDER} cap"
            )
        self.order = order
        n = 1 << order
        self._init_shape(n, n, ScalarField.REAL64)

    def _forward(self, x):
        return kernels.fwht(x)

    def _backward(self, y):
        return kernels.fwht(y)

    def _param_bytes(self):
        return 8


class Circulant(LinearOperator):
    """Circulant operator defined by its first column ``c``; forward is the
    circular convolution with ``c``.  The spectrum dft(c) is cached at
    construction, so forward and backward are elementwise multiplies
    between two FFT passes."""

    def __init__(self, c):
        self.c = _as_param_vector(c, "first column")
        n = self.c.shape[0]
        self.spectrum = kernels.dft(self.c.astype(np.complex128))
        self._init_shape(n, n, field_of(self.c))

    def _forward(self, x):
        plan = kernels.get_plan(self.rows)
        freq = plan.execute(x) * self.spectrum[:, None]
        kernels._count(self.rows * x.shape[1])
        out = plan.execute(freq, inverse=True)
        return out.real if x.dtype == np.float64 else out

    def _backward(self, y):
        plan = kernels.get_plan(self.rows)
        freq = plan.execute(y) * self.spectrum.conj()[:, None]
        kernels._count(self.rows * y.shape[1])
        out = plan.execute(freq, inverse=True)
        return out.real if y.dtype == np.float64 else out

    def _param_bytes(self):
        return self.c.nbytes + self.spectrum.nbytes


class Toeplitz(LinearOperator):
    """Toeplitz operator from its first column and the rest of its first
    row (the shared corner element appears only in the column).

    Products embed the data into a circulant of the next power-of-two
    length >= rows + cols - 1 and truncate, so both transforms cost
    O((n+m) log(n+m)).
    """

    def __init__(self, first_col, first_row_rest=()):
        self.first_col = _as_param_vector(first_col, "first column")
        row = np.asarray(first_row_rest)
        if row.ndim != 1:
            raise ValueError("first_row_rest must be 1-D")
        self.first_row_rest = row.astype(as_field(row.dtype).dtype, copy=False) \
            if row.size else np.zeros(0)
        n = self.first_col.shape[0]
        m = self.first_row_rest.shape[0] + 1
        L = kernels.next_power_of_two(n + m - 1)
        embed = np.zeros(L, dtype=np.complex128)
        embed[:n] = self.first_col
        if m > 1:
            embed[L - (m - 1):] = self.first_row_rest[::-1]
        self._embed_len = L
        self._embed_spectrum = kernels.dft(embed)
        field = field_of(self.first_col)
        if self.first_row_rest.size:
            field = promote_field(field, field_of(self.first_row_rest))
        self._init_shape(n, m, field)

    def _forward(self, x):
        plan = kernels.get_plan(self._embed_len)
        padded = np.zeros((self._embed_len, x.shape[1]), dtype=np.complex128)
        padded[: self.cols] = x
        freq = plan.execute(padded) * self._embed_spectrum[:, None]
        kernels._count(self._embed_len * x.shape[1])
        out = plan.execute(freq, inverse=True)[: self.rows]
        return out.real if x.dtype == np.float64 else out

    def _backward(self, y):
        plan = kernels.get_plan(self._embed_len)
        padded = np.zeros((self._embed_len, y.shape[1]), dtype=np.complex128)
        padded[: self.rows] = y
        freq = plan.execute(padded) * self._embed_spectrum.conj()[:, None]
        kernels._count(self._embed_len * y.shape[1])
        out = plan.execute(freq, inverse=True)[: self.cols]
        return out.real if y.dtype == np.float64 else out

    def _param_bytes(self):
        return (
            self.first_col.nbytes
            + self.first_row_rest.nbytes
            + self._embed_spectrum.nbytes
        )


class Parametric(LinearOperator):
    """Operator whose entries come from a function f(i, j) evaluated on the
    fly: O(1) parameter storage, O(rows*cols) work per application."""

    def __init__(self, f, rows, cols, field=ScalarField.COMPLEX128):
        self.f = f
        self._init_shape(rows, cols, as_field(field))

    def _row(self, i, dtype):
        return np.fromiter(
            (self.f(i, j) for j in range(self.cols)), dtype=dtype, count=self.cols
        )

    def _forward(self, x):
        out = np.empty((self.rows, x.shape[1]), dtype=x.dtype)
        for i in range(self.rows):
            out[i] = self._row(i, x.dtype) @ x
        return out

    def _backward(self, y):
        out = np.empty((self.cols, y.shape[1]), dtype=y.dtype)
        col = np.empty(self.rows, dtype=y.dtype)
        for j in range(self.cols):
            for i in range(self.rows):
                col[i] = self.f(i, j)
            out[j] = col.conj() @ y
        return out

    def _param_bytes(self):
        return 24  # function reference plus the two dimensions
