"""Operator algebra: compositions that keep their children's fast paths.

Composites hold references to child operators and route every application
through the children's transforms, so a product of a Fourier matrix with a
diagonal still runs in O(n log n) and a block grid of shared sparse blocks
stores each block once.
"""

import numpy as np

from .core import LinearOperator, ScalarField, promote_field
from .errors import (
    BlockShapeMismatch,
    ChainMismatch,
    EmptyInput,
    IndexOutOfRange,
    NonSquare,
    RaggedGrid,
    TooFewFactors,
)


def _promote_all(ops):
    field = ScalarField.REAL64
    for op in ops:
        field = promote_field(field, op.field)
    return field


class Product(LinearOperator):
    """Matrix product of the factors, applied right-to-left."""

    def __init__(self, *factors):
        if len(factors) == 1 and isinstance(factors[0], (list, tuple)):
            factors = tuple(factors[0])
        if not factors:
            raise EmptyInput("product needs at least one factor")
        for left, right in zip(factors, factors[1:]):
            if left.cols != right.rows:
                raise ChainMismatch(
                    f"cannot chain {left!r} ({left.shape}) with "
                    f"{right!r} ({right.shape})"
                )
        self.factors = tuple(factors)
        self._init_shape(
            factors[0].rows, factors[-1].cols, _promote_all(factors)
        )

    def _forward(self, x):
        # x arrives promoted past every factor's field, and each fast path
        # preserves its input dtype, so the chain needs no casts.
        out = x
        for op in reversed(self.factors):
            out = op._forward(out)
        return out

    def _backward(self, y):
        out = y
        for op in self.factors:
            out = op._backward(out)
        return out

    def _param_bytes(self):
        return 8 * len(self.factors)

    def _children(self):
        return self.factors


class Kron(LinearOperator):
    """Kronecker product of two or more factors, never materialized.

    A two-factor product (A kron B) x reshapes x into a (cols_B, cols_A)
    block, sends it through B, then through A on the transposed block, and
    flattens back.  More factors associate pairwise from the left.
    """

    def __init__(self, *factors):
        if len(factors) == 1 and isinstance(factors[0], (list, tuple)):
            factors = tuple(factors[0])
        if len(factors) < 2:
            raise TooFewFactors("Kronecker product needs at least two factors")
        rows = 1
        cols = 1
        for op in factors:
            rows *= op.rows
            cols *= op.cols
            if rows > 2 ** 62 or cols > 2 ** 62:
                raise OverflowError("Kronecker dimensions overflow")
        self.factors = tuple(factors)
        # Left association: factors[:-1] collapse into the "A" of each pair.
        self._head = factors[0] if len(factors) == 2 else Kron(*factors[:-1])
        self._tail = factors[-1]
        self._init_shape(rows, cols, _promote_all(factors))

    def _pair_apply(self, a, b, x, backward):
        a_rows, a_cols = (a.cols, a.rows) if backward else (a.rows, a.cols)
        b_rows, b_cols = (b.cols, b.rows) if backward else (b.rows, b.cols)
        apply_a = a._backward if backward else a._forward
        apply_b = b._backward if backward else b._forward
        out = np.empty((a_rows * b_rows, x.shape[1]), dtype=x.dtype)
        for col in range(x.shape[1]):
            block = np.ascontiguousarray(x[:, col]).reshape(a_cols, b_cols).T
            block = apply_b(np.ascontiguousarray(block))
            block = apply_a(np.ascontiguousarray(block.T))
            out[:, col] = block.reshape(-1)
        return out

    def _forward(self, x):
        return self._pair_apply(self._head, self._tail, x, backward=False)

    def _backward(self, y):
        return self._pair_apply(self._head, self._tail, y, backward=True)

    def _param_bytes(self):
        return 8 * len(self.factors)

    def _children(self):
        # _head is an internal pairing node over the same factor objects;
        # walking it keeps identity-based footprint deduplication exact.
        return self.factors + ((self._head,) if self._head not in self.factors else ())


class Blocks(LinearOperator):
    """Rectangular grid of operators acting as one block matrix.

    The grid rows must all have the same length, block heights must agree
    along each grid row and widths along each grid column.  The same
    operator instance may appear in many cells; it is stored (and counted)
    once.
    """

    def __init__(self, grid):
        rows = [tuple(r) for r in grid]
        if not rows or not rows[0]:
            raise EmptyInput("block grid must be nonempty")
        width = len(rows[0])
        for i, r in enumerate(rows):
            if len(r) != width:
                raise RaggedGrid(
                    f"grid row {i} has {len(r)} blocks, expected {width}"
                )
        self.grid = tuple(rows)
        self.row_heights = []
        for i, r in enumerate(self.grid):
            h = r[0].rows
            for j, op in enumerate(r):
                if op.rows != h:
                    raise BlockShapeMismatch(
                        f"block ({i},{j}) has {op.rows} rows, row {i} expects {h}"
                    )
            self.row_heights.append(h)
        self.col_widths = []
        for j in range(width):
            w = self.grid[0][j].cols
            for i in range(len(self.grid)):
                if self.grid[i][j].cols != w:
                    raise BlockShapeMismatch(
                        f"block ({i},{j}) has {self.grid[i][j].cols} cols, "
                        f"column {j} expects {w}"
                    )
            self.col_widths.append(w)
        ops = [op for r in self.grid for op in r]
        self._row_offsets = np.concatenate([[0], np.cumsum(self.row_heights)])
        self._col_offsets = np.concatenate([[0], np.cumsum(self.col_widths)])
        self._init_shape(
            int(self._row_offsets[-1]), int(self._col_offsets[-1]),
            _promote_all(ops),
        )

    def _forward(self, x):
        out = np.zeros((self.rows, x.shape[1]), dtype=x.dtype)
        for i, r in enumerate(self.grid):
            acc = out[self._row_offsets[i]:self._row_offsets[i + 1]]
            for j, op in enumerate(r):
                piece = x[self._col_offsets[j]:self._col_offsets[j + 1]]
                acc += op._forward(piece)
        return out

    def _backward(self, y):
        out = np.zeros((self.cols, y.shape[1]), dtype=y.dtype)
        for j in range(len(self.col_widths)):
            acc = out[self._col_offsets[j]:self._col_offsets[j + 1]]
            for i in range(len(self.grid)):
                piece = y[self._row_offsets[i]:self._row_offsets[i + 1]]
                acc += self.grid[i][j]._backward(piece)
        return out

    def _param_bytes(self):
        return 8 * len(self.grid) * len(self.grid[0])

    def _children(self):
        return tuple(op for r in self.grid for op in r)


class BlockDiag(LinearOperator):
    """Direct sum of operators; off-diagonal blocks are implicit zeros."""

    def __init__(self, *blocks):
        if len(blocks) == 1 and isinstance(blocks[0], (list, tuple)):
            blocks = tuple(blocks[0])
        if not blocks:
            raise EmptyInput("block diagonal needs at least one block")
        self.blocks = tuple(blocks)
        self._row_offsets = np.concatenate(
            [[0], np.cumsum([b.rows for b in blocks])]
        )
        self._col_offsets = np.concatenate(
            [[0], np.cumsum([b.cols for b in blocks])]
        )
        self._init_shape(
            int(self._row_offsets[-1]), int(self._col_offsets[-1]),
            _promote_all(blocks),
        )

    def _forward(self, x):
        out = np.empty((self.rows, x.shape[1]), dtype=x.dtype)
        for i, op in enumerate(self.blocks):
            out[self._row_offsets[i]:self._row_offsets[i + 1]] = op._forward(
                x[self._col_offsets[i]:self._col_offsets[i + 1]]
            )
        return out

    def _backward(self, y):
        out = np.empty((self.cols, y.shape[1]), dtype=y.dtype)
        for i, op in enumerate(self.blocks):
            out[self._col_offsets[i]:self._col_offsets[i + 1]] = op._backward(
                y[self._row_offsets[i]:self._row_offsets[i + 1]]
            )
        return out

    def _param_bytes(self):
        return 8 * len(self.blocks)

    def _children(self):
        return self.blocks


class Partial(LinearOperator):
    """Row/column selection of a base operator, keeping its fast transform.

    Forward scatters the input into a full-width vector at ``col_indices``
    (accumulating duplicates), applies the base, then gathers
    ``row_indices``.  ``None`` keeps every row or column.  Duplicate
    indices are allowed; order is preserved.
    """

    def __init__(self, base, row_indices=None, col_indices=None):
        self.base = base
        self.row_indices = self._validate(row_indices, base.rows, "row")
        self.col_indices = self._validate(col_indices, base.cols, "column")
        rows = base.rows if self.row_indices is None else len(self.row_indices)
        cols = base.cols if self.col_indices is None else len(self.col_indices)
        if rows == 0 or cols == 0:
            raise EmptyInput("partial selection must keep at least one index")
        # Duplicate-free index sets scatter by plain assignment; only
        # oversampled selections need the slower accumulating scatter.
        self._rows_unique = (
            self.row_indices is None
            or np.unique(self.row_indices).size == self.row_indices.size
        )
        self._cols_unique = (
            self.col_indices is None
            or np.unique(self.col_indices).size == self.col_indices.size
        )
        self._init_shape(rows, cols, base.field)

    @staticmethod
    def _validate(indices, limit, what):
        if indices is None:
            return None
        idx = np.asarray(indices, dtype=np.intp)
        if idx.ndim != 1:
            raise ValueError(f"{what} indices must be 1-D")
        if idx.size and (idx.min() < 0 or idx.max() >= limit):
            raise IndexOutOfRange(
                f"{what} index outside [0, {limit})"
            )
        return idx

    @staticmethod
    def _scatter(indices, unique, x, length):
        full = np.zeros((length, x.shape[1]), dtype=x.dtype)
        if unique:
            full[indices] = x
        else:
            np.add.at(full, indices, x)
        return full

    def _forward(self, x):
        if self.col_indices is None:
            full = x
        else:
            full = self._scatter(self.col_indices, self._cols_unique, x,
                                 self.base.cols)
        out = self.base._forward(full)
        if self.row_indices is not None:
            out = np.ascontiguousarray(out[self.row_indices])
        return out

    def _backward(self, y):
        if self.row_indices is None:
            full = y
        else:
            full = self._scatter(self.row_indices, self._rows_unique, y,
                                 self.base.rows)
        out = self.base._backward(full)
        if self.col_indices is not None:
            out = np.ascontiguousarray(out[self.col_indices])
        return out

    def _param_bytes(self):
        total = 8
        for idx in (self.row_indices, self.col_indices):
            if idx is not None:
                total += idx.nbytes
        return total

    def _children(self):
        return (self.base,)


class Polynomial(LinearOperator):
    """Matrix polynomial sum(coeffs[i] * base^i) with ascending coefficients
    (coeffs[0] is the constant term).  Applied by Horner's rule on the
    vector side: degree-d evaluation costs d base applications."""

    def __init__(self, base, coeffs):
        if base.rows != base.cols:
            raise NonSquare(f"polynomial base must be square, got {base.shape}")
        arr = np.asarray(coeffs)
        if arr.ndim != 1 or arr.size == 0:
            raise EmptyInput("coefficients must be a nonempty 1-D sequence")
        self.base = base
        self.coeffs = arr.astype(
            np.complex128 if np.iscomplexobj(arr) else np.float64, copy=False
        )
        field = promote_field(
            base.field,
            ScalarField.COMPLEX128 if np.iscomplexobj(self.coeffs)
            else ScalarField.REAL64,
        )
        self._init_shape(base.rows, base.cols, field)

    def _apply(self, x, backward):
        apply_base = self.base._backward if backward else self.base._forward
        coeffs = self.coeffs.conj() if backward else self.coeffs
        out = coeffs[-1] * x
        for c in coeffs[-2::-1]:
            out = apply_base(out)
            out += c * x
        return out

    def _forward(self, x):
        return self._apply(x, backward=False)

    def _backward(self, y):
        return self._apply(y, backward=True)

    def _param_bytes(self):
        return 8 + self.coeffs.nbytes

    def _children(self):
        return (self.base,)


class Power(LinearOperator):
    """k-fold composition of a square operator with itself; k = 0 is the
    identity."""

    def __init__(self, base, exponent):
        if base.rows != base.cols:
            raise NonSquare(f"power base must be square, got {base.shape}")
        exponent = int(exponent)
        if exponent < 0:
            raise ValueError(f"exponent must be >= 0, got {exponent}")
        self.base = base
        self.exponent = exponent
        self._init_shape(base.rows, base.cols, base.field)

    def _apply(self, x, backward):
        apply_base = self.base._backward if backward else self.base._forward
        out = x.copy() if self.exponent == 0 else x
        for _ in range(self.exponent):
            out = apply_base(out)
        return out

    def _forward(self, x):
        return self._apply(x, backward=False)

    def _backward(self, y):
        return self._apply(y, backward=True)

    def _param_bytes(self):
        return 16

    def _children(self):
        return (self.base,)
