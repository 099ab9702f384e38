"""Self-verification: every operator class against the dense brute force.

Builds a zoo of seeded instances per operator class (leaves and
composites), each paired with an explicit reference matrix assembled from
definitions rather than from the operator's own fast path, then checks

* forward/backward agreement with the reference at 1e-10 relative,
* ``to_dense`` agreement,
* the adjoint identity <Ax, y> == <x, A^H y>,
* batch-versus-column consistency and output-field promotion.

The ``linopkit verify`` subcommand and the acceptance tests both run this.
"""

from dataclasses import dataclass

import numpy as np

from . import composites, leaves
from .core import Adjoint, promote_field, field_of

ORACLE_RTOL = 1e-10
ADJOINT_RTOL = 1e-10
TRIALS = 10


def _dft_matrix(n):
    j = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(j, j) / n)


def _sylvester(order):
    h = np.array([[1.0]])
    for _ in range(order):
        h = np.block([[h, h], [h, -h]])
    return h


def _circulant_matrix(c):
    c = np.asarray(c)
    return np.column_stack([np.roll(c, k) for k in range(c.shape[0])])


def _toeplitz_matrix(col, row_rest):
    col = np.asarray(col)
    row_rest = np.asarray(row_rest)
    n = col.shape[0]
    m = row_rest.shape[0] + 1
    out = np.zeros((n, m), dtype=np.promote_types(col.dtype, row_rest.dtype)
                   if row_rest.size else col.dtype)
    for i in range(n):
        for j in range(m):
            out[i, j] = col[i - j] if i >= j else row_rest[j - i - 1]
    return out


def _sizes(max_size):
    """Representative dimensions: a small, a medium and the cap."""
    pool = sorted({2, 3, min(8, max_size), min(12, max_size), max_size})
    return [s for s in pool if 1 <= s <= max_size]


def build_zoo(max_size=64, seed=0):
    """(class name, operator, reference matrix) triples for every operator
    class, sizes bounded by ``max_size``."""
    rng = np.random.default_rng([seed, max_size])
    zoo = []

    def complex_mat(n, m):
        return rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))

    for n in _sizes(max_size):
        m = max(1, n - 1)
        entries = complex_mat(n, m)
        zoo.append(("Dense", leaves.Dense(entries), entries))

        zoo.append(("Zero", leaves.Zero(n, m), np.zeros((n, m))))
        zoo.append(("Identity", leaves.Identity(n), np.eye(n)))

        d = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        zoo.append(("Diagonal", leaves.Diagonal(d), np.diag(d)))

        triplets = [
            (int(rng.integers(n)), int(rng.integers(m)),
             complex(rng.standard_normal(), rng.standard_normal()))
            for _ in range(2 * n)
        ]
        ref = np.zeros((n, m), dtype=np.complex128)
        for i, j, v in triplets:
            ref[i, j] += v
        zoo.append(("Sparse", leaves.Sparse(n, m, triplets), ref))

        zoo.append(("Fourier", leaves.Fourier(n), _dft_matrix(n)))

        c = rng.standard_normal(n)
        zoo.append(("Circulant", leaves.Circulant(c), _circulant_matrix(c)))

        col = rng.standard_normal(n)
        row_rest = rng.standard_normal(m - 1)
        zoo.append(
            ("Toeplitz", leaves.Toeplitz(col, row_rest),
             _toeplitz_matrix(col, row_rest))
        )

        param = complex_mat(min(n, 12), min(m, 12))
        zoo.append(
            ("Parametric",
             leaves.Parametric(
                 lambda i, j, _p=param: _p[i, j],
                 param.shape[0], param.shape[1], "complex128",
             ),
             param)
        )

    for order in (0, 2, int(np.log2(max_size))):
        if 2 ** order <= max_size:
            zoo.append(("Hadamard", leaves.Hadamard(order), _sylvester(order)))

    # Composites over mixed leaves, sized at most max_size.
    k = min(8, max_size)
    d1 = rng.standard_normal(k) + 1j * rng.standard_normal(k)
    f_ref = _dft_matrix(k)
    dense_a = complex_mat(k, k)

    zoo.append(
        ("Product",
         composites.Product(
             leaves.Diagonal(d1), leaves.Fourier(k), leaves.Dense(dense_a)
         ),
         np.diag(d1) @ f_ref @ dense_a)
    )

    small = complex_mat(2, 3)
    zoo.append(
        ("Kron",
         composites.Kron(leaves.Dense(small), leaves.Diagonal(d1[:2]),
                         leaves.Fourier(2)),
         np.kron(np.kron(small, np.diag(d1[:2])), _dft_matrix(2)))
    )

    shared = leaves.Sparse(
        3, 3,
        [(int(rng.integers(3)), int(rng.integers(3)), rng.standard_normal())
         for _ in range(4)],
    )
    shared_ref = shared.to_dense()
    zero3 = leaves.Zero(3, 3)
    grid = [[shared, zero3], [leaves.Identity(3), shared]]
    grid_ref = np.block(
        [[shared_ref, np.zeros((3, 3))], [np.eye(3), shared_ref]]
    )
    zoo.append(("Blocks", composites.Blocks(grid), grid_ref))

    zoo.append(
        ("BlockDiag",
         composites.BlockDiag(leaves.Fourier(k), leaves.Diagonal(d1)),
         np.block([
             [f_ref, np.zeros((k, k))],
             [np.zeros((k, k)), np.diag(d1)],
         ]))
    )

    order = max(2, int(np.log2(max_size)))
    h = leaves.Hadamard(order)
    rows = rng.choice(h.rows, size=h.rows // 2, replace=False)
    cols = rng.choice(h.cols, size=h.cols // 2, replace=False)
    zoo.append(
        ("Partial", composites.Partial(h, rows, cols),
         _sylvester(order)[np.ix_(rows, cols)])
    )

    c2 = rng.standard_normal(k)
    circ_ref = _circulant_matrix(c2)
    zoo.append(
        ("Polynomial",
         composites.Polynomial(leaves.Circulant(c2), [1.0, -0.5, 2.0]),
         np.eye(k) - 0.5 * circ_ref + 2.0 * circ_ref @ circ_ref)
    )
    zoo.append(
        ("Power", composites.Power(leaves.Circulant(c2), 3),
         circ_ref @ circ_ref @ circ_ref)
    )

    zoo.append(("Adjoint", Adjoint(leaves.Dense(small)), small.conj().T))
    return zoo


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def _relative_error(got, ref):
    scale = 1.0 + (np.max(np.abs(ref)) if ref.size else 0.0)
    return (np.max(np.abs(got - ref)) if ref.size else 0.0) / scale


def check_operator(name, op, reference, seed=0, trials=TRIALS):
    """Oracle, adjoint, batch and promotion checks for one instance."""
    rng = np.random.default_rng([seed, op.rows, op.cols])
    reference = np.asarray(reference)
    failures = []

    err = _relative_error(op.to_dense(), reference)
    if err > ORACLE_RTOL:
        failures.append(f"to_dense error {err:.2e}")

    for trial in range(trials):
        complex_input = trial % 2 == 1
        x = rng.standard_normal((op.cols, 3))
        y = rng.standard_normal((op.rows, 3))
        if complex_input:
            x = x + 1j * rng.standard_normal(x.shape)
            y = y + 1j * rng.standard_normal(y.shape)
        fwd = op.forward(x)
        err = _relative_error(fwd, reference @ x)
        if err > ORACLE_RTOL:
            failures.append(f"forward error {err:.2e} (trial {trial})")
            break
        bwd = op.backward(y)
        err = _relative_error(bwd, reference.conj().T @ y)
        if err > ORACLE_RTOL:
            failures.append(f"backward error {err:.2e} (trial {trial})")
            break
        # Adjoint identity on the first columns.
        lhs = np.vdot(y[:, 0], fwd[:, 0])
        rhs = np.vdot(bwd[:, 0], x[:, 0])
        bound = ADJOINT_RTOL * (
            1.0 + np.linalg.norm(x[:, 0]) * np.linalg.norm(y[:, 0])
            * (1.0 + np.max(np.abs(reference), initial=0.0)) * op.cols
        )
        if abs(lhs - rhs) > bound:
            failures.append(
                f"adjoint identity off by {abs(lhs - rhs):.2e} (trial {trial})"
            )
            break
        expected_field = promote_field(op.field, field_of(x))
        if field_of(fwd) is not expected_field:
            failures.append(f"field promotion broke (trial {trial})")
            break

    x = rng.standard_normal((op.cols, 4))
    batch = op.forward(x)
    for col in range(4):
        if _relative_error(batch[:, col], op.forward(x[:, col])) > ORACLE_RTOL:
            failures.append(f"batch/column mismatch at column {col}")
            break

    detail = "; ".join(failures) if failures else "ok"
    return CheckResult(name, not failures, detail)


def run_verification(max_size=64, seed=0, emit=print):
    """Run the whole suite; returns the per-instance results.

    ``emit`` receives one PASS/FAIL line per operator instance.
    """
    results = []
    for name, op, reference in build_zoo(max_size=max_size, seed=seed):
        result = check_operator(name, op, reference, seed=seed)
        results.append(result)
        status = "PASS" if result.passed else "FAIL"
        emit(f"{status} {name} {op.shape[0]}x{op.shape[1]}: {result.detail}")
    return results
