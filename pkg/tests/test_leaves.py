import numpy as np
import pytest

import linopkit as lk

from oracles import (
    assert_close,
    circulant_matrix,
    dft_matrix,
    random_batch,
    sylvester_matrix,
    toeplitz_matrix,
    triplet_matrix,
)


def check_against_reference(op, reference, rng, batches=10):
    """Forward, backward and to_dense all agree with the explicit matrix."""
    reference = np.asarray(reference)
    assert op.shape == reference.shape
    assert_close(op.to_dense(), reference, context="to_dense")
    for trial in range(batches):
        x = random_batch(rng, op.cols, 3, complex_valued=trial % 2 == 1)
        y = random_batch(rng, op.rows, 3, complex_valued=trial % 2 == 1)
        assert_close(op.forward(x), reference @ x, context=f"forward #{trial}")
        assert_close(
            op.backward(y), reference.conj().T @ y, context=f"backward #{trial}"
        )


class TestDense:
    def test_matches_entries(self):
        rng = np.random.default_rng(0)
        entries = random_batch(rng, 6, 4, complex_valued=True)
        check_against_reference(lk.Dense(entries), entries, rng)

    def test_rejects_empty_and_ragged(self):
        with pytest.raises(lk.EmptyInput):
            lk.Dense(np.zeros((0, 3)))
        with pytest.raises(ValueError):
            lk.Dense([[1, 2], [3]])

    def test_footprint_is_entry_storage(self):
        entries = np.ones((5, 7))
        assert lk.Dense(entries).footprint_bytes() == entries.nbytes


class TestZeroIdentityDiagonal:
    def test_identity_dense(self):
        assert_close(lk.Identity(2).to_dense(), np.eye(2))

    def test_zero_reference(self):
        rng = np.random.default_rng(1)
        check_against_reference(lk.Zero(3, 5), np.zeros((3, 5)), rng)

    def test_diagonal_signs(self):
        assert_close(lk.Diagonal([1, -1]).forward([5.0, 7.0]), [5.0, -7.0])

    def test_diagonal_reference(self):
        rng = np.random.default_rng(2)
        d = rng.standard_normal(9) + 1j * rng.standard_normal(9)
        check_against_reference(lk.Diagonal(d), np.diag(d), rng)

    def test_empty_diagonal_rejected(self):
        with pytest.raises(lk.EmptyInput):
            lk.Diagonal([])

    def test_bad_shape_rejected(self):
        with pytest.raises(ValueError):
            lk.Zero(0, 3)


class TestSparse:
    def test_empty_triplets_is_zero(self):
        op = lk.Sparse(2, 3, [])
        assert_close(op.to_dense(), np.zeros((2, 3)))

    def test_unit_triplets_is_identity(self):
        op = lk.Sparse(2, 2, [(0, 0, 1.0), (1, 1, 1.0)])
        assert_close(op.to_dense(), np.eye(2))

    def test_off_diagonal_example(self):
        op = lk.Sparse(2, 2, [(0, 1, 2.0), (1, 0, 3.0)])
        assert_close(op.forward([1.0, 1.0]), [2.0, 3.0])

    def test_duplicates_are_summed(self):
        op = lk.Sparse(2, 2, [(0, 0, 1.0), (0, 0, 2.5)])
        assert op.to_dense()[0, 0] == pytest.approx(3.5)
        assert op.nnz == 1

    def test_random_reference(self):
        rng = np.random.default_rng(3)
        triplets = [
            (int(rng.integers(8)), int(rng.integers(5)),
             complex(rng.standard_normal(), rng.standard_normal()))
            for _ in range(20)
        ]
        check_against_reference(
            lk.Sparse(8, 5, triplets), triplet_matrix(8, 5, triplets), rng
        )

    def test_index_out_of_range(self):
        with pytest.raises(lk.IndexOutOfRange):
            lk.Sparse(2, 2, [(2, 0, 1.0)])
        with pytest.raises(lk.IndexOutOfRange):
            lk.Sparse(2, 2, [(0, -1, 1.0)])

    def test_csr_fields_exposed(self):
        op = lk.Sparse(2, 2, [(0, 1, 2.0), (1, 0, 3.0)])
        assert list(op.row_ptr) == [0, 1, 2]
        assert list(op.col_idx) == [1, 0]
        assert list(op.values) == [2.0, 3.0]


class TestFourier:
    def test_length_one_is_scalar_one(self):
        assert_close(lk.Fourier(1).forward([3.0]), [3.0])

    def test_shifted_impulse(self):
        assert_close(lk.Fourier(4).forward([0, 1, 0, 0]), [1, -1j, -1, 1j])

    def test_backward_of_forward_scales_by_n(self):
        rng = np.random.default_rng(4)
        x = rng.standard_normal(12) + 1j * rng.standard_normal(12)
        op = lk.Fourier(12)
        assert_close(op.backward(op.forward(x)), 12 * x)

    @pytest.mark.parametrize("n", [1, 2, 5, 8, 12])
    def test_reference(self, n):
        rng = np.random.default_rng(n)
        check_against_reference(lk.Fourier(n), dft_matrix(n), rng)

    def test_parseval(self):
        rng = np.random.default_rng(6)
        x = rng.standard_normal(64)
        lhs = np.linalg.norm(lk.Fourier(64).forward(x)) ** 2
        rhs = 64 * np.linalg.norm(x) ** 2
        assert abs(lhs - rhs) <= 1e-10 * rhs


class TestHadamard:
    def test_order_zero_is_scalar_one(self):
        assert_close(lk.Hadamard(0).forward([5.0]), [5.0])

    def test_order_one_dense(self):
        assert_close(lk.Hadamard(1).to_dense(), [[1, 1], [1, -1]])

    def test_known_vector(self):
        assert_close(lk.Hadamard(2).forward([1, 2, 3, 4]), [10, -2, -4, 0])

    @pytest.mark.parametrize("order", range(0, 5))
    def test_orthogonality(self, order):
        h = lk.Hadamard(order).to_dense()
        n = 2 ** order
        assert_close(h @ h.T, n * np.eye(n))

    @pytest.mark.parametrize("order", range(0, 6))
    def test_reference(self, order):
        rng = np.random.default_rng(order)
        check_against_reference(
            lk.Hadamard(order), sylvester_matrix(order), rng, batches=4
        )

    def test_order_cap(self):
        with pytest.raises(lk.OrderTooLarge):
            lk.Hadamard(31)
        with pytest.raises(ValueError):
            lk.Hadamard(-1)


class TestCirculant:
    def test_unit_impulse_is_identity(self):
        x = np.array([4.0, 5.0, 6.0])
        assert_close(lk.Circulant([1, 0, 0]).forward(x), x)

    def test_shift_column(self):
        assert_close(lk.Circulant([0, 1, 0]).forward([5.0, 6.0, 7.0]), [7, 5, 6])

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 7, 8, 12])
    def test_reference(self, n):
        rng = np.random.default_rng(n + 20)
        c = rng.standard_normal(n)
        check_against_reference(lk.Circulant(c), circulant_matrix(c), rng, batches=4)

    def test_complex_kernel_reference(self):
        rng = np.random.default_rng(30)
        c = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        check_against_reference(lk.Circulant(c), circulant_matrix(c), rng, batches=4)

    @pytest.mark.parametrize("n", [2, 4, 8])
    def test_eigenvalues_are_spectrum(self, n):
        rng = np.random.default_rng(n + 40)
        c = rng.standard_normal(n)
        eig = list(np.linalg.eigvals(lk.Circulant(c).to_dense()))
        scale = 1.0 + np.abs(eig).max()
        for value in lk.dft(c):  # greedy multiset matching
            nearest = int(np.argmin(np.abs(np.asarray(eig) - value)))
            assert abs(eig[nearest] - value) <= 1e-8 * scale
            eig.pop(nearest)

    def test_empty_rejected(self):
        with pytest.raises(lk.EmptyInput):
            lk.Circulant([])


class TestToeplitz:
    def test_scalar(self):
        assert_close(lk.Toeplitz([2.0]).forward([3.0]), [6.0])

    def test_two_by_two(self):
        op = lk.Toeplitz([1.0, 2.0], [3.0])
        assert_close(op.to_dense(), [[1, 3], [2, 1]])
        assert_close(op.forward([1.0, 1.0]), [4.0, 3.0])

    def test_twenty_random_shapes(self):
        rng = np.random.default_rng(50)
        for _ in range(20):
            n = int(rng.integers(1, 33))
            m = int(rng.integers(1, 33))
            col = rng.standard_normal(n)
            row = rng.standard_normal(m - 1)
            op = lk.Toeplitz(col, row)
            ref = toeplitz_matrix(col, row)
            x = random_batch(rng, m, 2)
            y = random_batch(rng, n, 2)
            assert_close(op.forward(x), ref @ x, context=f"{n}x{m} fwd")
            assert_close(op.backward(y), ref.T @ y, context=f"{n}x{m} bwd")

    def test_banded_equals_sparse_band(self):
        n = 16
        col = np.zeros(n)
        col[0], col[1] = 2.0, -1.0
        row = np.zeros(n - 1)
        row[0] = 0.5
        toep = lk.Toeplitz(col, row)
        triplets = []
        for i in range(n):
            triplets.append((i, i, 2.0))
            if i + 1 < n:
                triplets.append((i + 1, i, -1.0))
                triplets.append((i, i + 1, 0.5))
        band = lk.Sparse(n, n, triplets)
        assert_close(toep.to_dense(), band.to_dense())

    def test_empty_rejected(self):
        with pytest.raises(lk.EmptyInput):
            lk.Toeplitz([])


class TestParametric:
    def test_indicator_is_identity(self):
        op = lk.Parametric(lambda i, j: 1.0 if i == j else 0.0, 3, 3, "real64")
        assert_close(op.to_dense(), np.eye(3))

    @pytest.mark.parametrize("n", [2, 5, 16])
    def test_fourier_entries_match_fourier_op(self, n):
        omega = np.exp(-2j * np.pi / n)
        op = lk.Parametric(lambda i, j: omega ** (i * j), n, n, "complex128")
        rng = np.random.default_rng(n)
        x = rng.standard_normal(n)
        assert_close(op.forward(x), lk.Fourier(n).forward(x), rtol=1e-9)

    def test_rectangular_reference(self):
        rng = np.random.default_rng(60)
        entries = random_batch(rng, 5, 7, complex_valued=True)
        op = lk.Parametric(lambda i, j: entries[i, j], 5, 7, "complex128")
        check_against_reference(op, entries, rng, batches=4)

    def test_footprint_constant(self):
        op = lk.Parametric(lambda i, j: 1.0, 10_000, 10_000, "real64")
        assert op.footprint_bytes() <= 64
