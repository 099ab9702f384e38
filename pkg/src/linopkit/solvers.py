"""Iterative matrix-free algorithms.

Every routine touches the system operator only through ``forward`` and
``backward``, so any structured operator accelerates it for free.  All
randomized starting points take an explicit seed; nothing reads global RNG
state.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    BreakdownError,
    DimensionMismatch,
    KOutOfRange,
    NegativeThreshold,
    NonSquare,
)


def soft_threshold(x, c):
    """Shrink magnitudes toward zero by ``c``: real entries map to
    sign(u) * max(|u| - c, 0), complex entries shrink in modulus while
    keeping their phase."""
    if c < 0:
        raise NegativeThreshold(f"threshold must be >= 0, got {c}")
    arr = np.asarray(x)
    shrunk = np.maximum(np.abs(arr) - c, 0.0)
    if not np.issubdtype(arr.dtype, np.complexfloating):
        return np.sign(arr) * shrunk
    scale = np.zeros_like(shrunk)
    np.divide(shrunk, np.abs(arr), out=scale, where=arr != 0)
    return arr * scale


@dataclass
class SolveOptions:
    """Controls for :func:`cg_solve`.

    ``max_iterations`` defaults to the problem dimension.  With
    ``assume_hermitian`` the operator is applied directly (classical CG);
    otherwise the normal equations (A^H A) x = A^H y are solved, at the
    cost of one extra backward per iteration and a squared condition
    number.
    """

    max_iterations: int | None = None
    relative_tolerance: float = 1e-10
    assume_hermitian: bool = False

    def __post_init__(self):
        if self.relative_tolerance <= 0:
            raise ValueError("relative_tolerance must be positive")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass
class SolveReport:
    """Result of a linear solve; per-column fields collapse to scalars when
    the right-hand side was a single vector.

    ``residual_norm`` and ``converged`` refer to the system the recurrence
    actually ran on: A x = y under ``assume_hermitian``, otherwise the
    normal equations (A^H A) x = A^H y.
    """

    solution: np.ndarray
    iterations: np.ndarray
    residual_norm: np.ndarray
    converged: np.ndarray


def _cg_single(apply_op, b, tol, max_iter):
    """Textbook conjugate gradients on one right-hand side from x0 = 0."""
    x = np.zeros_like(b)
    r = b.copy()
    p = r.copy()
    rs_old = np.real(np.vdot(r, r))
    norm_r0 = np.sqrt(rs_old)
    if norm_r0 == 0:
        return x, 0, 0.0, True
    threshold = tol * norm_r0
    for it in range(1, max_iter + 1):
        ap = apply_op(p)
        curvature = np.real(np.vdot(p, ap))
        slack = 1e-14 * np.linalg.norm(p) * np.linalg.norm(ap)
        if curvature <= slack:
            raise BreakdownError(
                f"non-positive curvature p^H A p = {curvature:.3e} at "
                f"iteration {it}; operator is not positive definite"
            )
        alpha = rs_old / curvature
        x += alpha * p
        r -= alpha * ap
        rs_new = np.real(np.vdot(r, r))
        if np.sqrt(rs_new) <= threshold:
            return x, it, float(np.sqrt(rs_new)), True
        p = r + (rs_new / rs_old) * p
        rs_old = rs_new
    return x, max_iter, float(np.sqrt(rs_old)), False


def cg_solve(A, y, options=None):
    """Solve A X = Y by conjugate gradients, column by column.

    Uses exactly one forward per iteration, plus one backward per
    iteration (and one backward on the right-hand side) in
    normal-equations mode.
    """
    options = options or SolveOptions()
    if A.rows != A.cols:
        raise NonSquare(f"cg_solve needs a square operator, got {A.shape}")
    rhs = np.asarray(y)
    squeeze = rhs.ndim == 1
    if squeeze:
        rhs = rhs[:, None]
    if rhs.shape[0] != A.rows:
        raise DimensionMismatch(
            f"right-hand side has {rhs.shape[0]} rows, operator expects {A.rows}"
        )
    max_iter = options.max_iterations or A.cols
    tol = options.relative_tolerance
    dtype = np.result_type(rhs.dtype, A.field.dtype)

    if options.assume_hermitian:
        def apply_op(v):
            return A.forward(v)
        system_rhs = rhs.astype(dtype, copy=False)
    else:
        def apply_op(v):
            return A.backward(A.forward(v))
        system_rhs = A.backward(rhs).astype(dtype, copy=False)

    k = rhs.shape[1]
    solution = np.zeros((A.cols, k), dtype=dtype)
    iterations = np.zeros(k, dtype=int)
    residuals = np.zeros(k)
    converged = np.zeros(k, dtype=bool)
    for col in range(k):
        xcol, its, res, ok = _cg_single(
            apply_op, system_rhs[:, col].copy(), tol, max_iter
        )
        solution[:, col] = xcol
        iterations[col] = its
        residuals[col] = res
        converged[col] = ok
    if squeeze:
        return SolveReport(
            solution[:, 0], int(iterations[0]), float(residuals[0]),
            bool(converged[0]),
        )
    return SolveReport(solution, iterations, residuals, converged)


@dataclass
class IstaOptions:
    """Controls for :func:`ista`: l1 weight ``lam``, iteration count, and
    the gradient step size (``None`` estimates 1/L with L the squared top
    singular value, found by power iteration and padded by 1%)."""

    lam: float
    steps: int = 100
    step_size: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError("lam must be positive")
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if self.step_size is not None and self.step_size <= 0:
            raise ValueError("step_size must be positive")


@dataclass
class IstaResult:
    solution: np.ndarray
    objective_trace: np.ndarray
    step_size: float


def ista(M, b, options):
    """Iterative soft thresholding for min_x lam*||x||_1 + 0.5*||b - Mx||^2.

    Runs ``steps`` iterations of
    ``x <- t_{lam*alpha}(x + alpha * M^H (b - M x))`` from ``x = 0``.  The
    objective trace holds the iterates x_0 .. x_steps, so computing the
    last entry costs one forward beyond the one-forward-one-backward
    budget of each step.
    """
    rhs = np.asarray(b)
    if rhs.ndim != 1:
        raise ValueError("ista expects a single measurement vector")
    if rhs.shape[0] != M.rows:
        raise DimensionMismatch(
            f"measurement has {rhs.shape[0]} rows, operator expects {M.rows}"
        )
    alpha = options.step_size
    if alpha is None:
        spec = power_iteration(
            M, mode="singular", tol=1e-6, max_iter=50, seed=options.seed
        )
        alpha = 1.0 / (1.01 * spec.value ** 2)
    level = options.lam * alpha

    x = np.zeros(M.cols, dtype=np.result_type(rhs.dtype, M.field.dtype))
    trace = np.empty(options.steps + 1)
    for k in range(options.steps):
        residual = rhs - M.forward(x)
        trace[k] = options.lam * np.abs(x).sum() + 0.5 * np.real(
            np.vdot(residual, residual)
        )
        x = soft_threshold(x + alpha * M.backward(residual), level)
    residual = rhs - M.forward(x)
    trace[-1] = options.lam * np.abs(x).sum() + 0.5 * np.real(
        np.vdot(residual, residual)
    )
    return IstaResult(x, trace, float(alpha))


@dataclass
class OmpResult:
    """Greedy selection result: atoms in the order they were picked, their
    least-squares coefficients, and the assembled sparse solution."""

    support: np.ndarray
    coefficients: np.ndarray
    solution: np.ndarray
    residual_norm: float


def omp(M, b, sparsity, residual_tol=None):
    """Orthogonal matching pursuit: pick ``sparsity`` atoms by correlating
    the residual through the fast backward, re-fitting a dense
    least-squares on the selected columns after every pick.

    Ties in the correlation magnitudes resolve to the lowest index.  Stops
    early once ||r|| <= residual_tol * ||b||.
    """
    rhs = np.asarray(b)
    if rhs.ndim != 1:
        raise ValueError("omp expects a single measurement vector")
    if rhs.shape[0] != M.rows:
        raise DimensionMismatch(
            f"measurement has {rhs.shape[0]} rows, operator expects {M.rows}"
        )
    if not 1 <= sparsity <= M.cols:
        raise KOutOfRange(
            f"sparsity {sparsity} outside [1, {M.cols}]"
        )
    dtype = np.result_type(rhs.dtype, M.field.dtype)
    rhs = rhs.astype(dtype)
    stop_norm = (
        residual_tol * np.linalg.norm(rhs) if residual_tol is not None else None
    )
    support = []
    columns = np.zeros((M.rows, 0), dtype=dtype)
    coeffs = np.zeros(0, dtype=dtype)
    residual = rhs.copy()
    for _ in range(sparsity):
        correlation = np.abs(M.backward(residual))
        correlation[support] = -1.0  # never re-pick an atom
        atom = int(np.argmax(correlation))
        support.append(atom)
        unit = np.zeros(M.cols, dtype=dtype)
        unit[atom] = 1
        columns = np.hstack([columns, M.forward(unit)[:, None]])
        coeffs = np.linalg.lstsq(columns, rhs, rcond=None)[0]
        residual = rhs - columns @ coeffs
        if stop_norm is not None and np.linalg.norm(residual) <= stop_norm:
            break
    solution = np.zeros(M.cols, dtype=dtype)
    solution[support] = coeffs
    return OmpResult(
        np.asarray(support, dtype=int),
        coeffs,
        solution,
        float(np.linalg.norm(residual)),
    )


@dataclass
class SpectralReport:
    """Dominant eigen/singular estimate: ``value`` is the magnitude of the
    Rayleigh quotient (eigen mode) or the top singular value."""

    value: float
    vector: np.ndarray
    iterations: int
    converged: bool


def power_iteration(A, mode="eigen", tol=1e-9, max_iter=1000, seed=0):
    """Largest-magnitude eigenvalue (``mode='eigen'``, square operators) or
    largest singular value (``mode='singular'``, iterates on A^H A) by the
    power method from a seeded random start.

    Non-convergence within ``max_iter`` is reported through the
    ``converged`` flag, not an exception.
    """
    if mode not in ("eigen", "singular"):
        raise ValueError(f"mode must be 'eigen' or 'singular', got {mode!r}")
    if mode == "eigen" and A.rows != A.cols:
        raise NonSquare(f"eigen mode needs a square operator, got {A.shape}")
    rng = np.random.default_rng(seed)
    n = A.cols
    v = rng.standard_normal(n)
    if A.field.dtype == np.complex128:
        v = v + 1j * rng.standard_normal(n)
    v = v / np.linalg.norm(v)

    def apply_op(u):
        return A.forward(u) if mode == "eigen" else A.backward(A.forward(u))

    estimate = 0.0
    for it in range(1, max_iter + 1):
        w = apply_op(v)
        rayleigh = np.vdot(v, w)
        new_estimate = float(np.abs(rayleigh))
        norm_w = np.linalg.norm(w)
        if norm_w == 0:
            # Operator annihilated the iterate: dominant value is 0.
            return SpectralReport(0.0, v, it, True)
        v = w / norm_w
        if it > 1 and abs(new_estimate - estimate) <= tol * max(new_estimate, 1e-300):
            estimate = new_estimate
            value = np.sqrt(estimate) if mode == "singular" else estimate
            return SpectralReport(float(value), v, it, True)
        estimate = new_estimate
    value = np.sqrt(estimate) if mode == "singular" else estimate
    return SpectralReport(float(value), v, max_iter, False)
