"""Benchmark scenarios: structured operators against the dense baseline.

Each scenario builds a structured operator at a requested size, runs its
workload (a forward pass or a full solve) on both the structured path and
a densely materialized copy, and records min/mean wall time plus the
parameter footprints.  The dense leg is skipped, never fatal, when the
materialization would blow the byte cap; a run is recorded only after the
two legs agree to 1e-8 relative.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from .composites import BlockDiag, Blocks, Kron, Partial, Product
from .core import DEFAULT_DENSE_CAP_BYTES
from .errors import UnknownScenario
from .kernels import dft
from .leaves import Circulant, Dense, Diagonal, Fourier, Hadamard, Sparse, Zero
from .solvers import IstaOptions, SolveOptions, cg_solve, ista, power_iteration

CROSS_CHECK_RTOL = 1e-8


class CrossValidationError(RuntimeError):
    """Structured and dense outputs disagreed beyond tolerance."""


@dataclass(frozen=True)
class Scenario:
    """A named experiment over a list of sizes (size = operator row count)."""

    name: str
    sizes: tuple
    repetitions: int = 3
    seed: int = 0

    def __post_init__(self):
        if self.repetitions < 3:
            raise ValueError("repetitions must be >= 3")
        sizes = tuple(int(s) for s in self.sizes)
        if not sizes or any(s < 1 for s in sizes):
            raise ValueError("sizes must be positive")
        if list(sizes) != sorted(sizes):
            raise ValueError("sizes must be ascending")
        object.__setattr__(self, "sizes", sizes)


@dataclass
class BenchRecord:
    """One measurement row; dense timings are None when the dense leg was
    skipped because of the byte cap."""

    scenario: str
    size: int
    structured_min_s: float
    structured_avg_s: float
    dense_min_s: float | None
    dense_avg_s: float | None
    structured_mem_bytes: int
    dense_mem_bytes: int
    checksum: float


@dataclass
class _Job:
    """Workload for one size: the structured operator plus a runner that
    maps any same-shaped operator to the scenario's output vector."""

    operator: object
    run: object  # callable: LinearOperator -> np.ndarray


def _is_power_of_two(n):
    return n >= 1 and (n & (n - 1)) == 0


def _cube_root(n):
    k = round(n ** (1 / 3))
    for candidate in (k - 1, k, k + 1):
        if candidate >= 1 and candidate ** 3 == n:
            return candidate
    return None


def _rng(scenario, size):
    return np.random.default_rng([scenario.seed, size])


def _setup_hadamard(scenario, size):
    rng = _rng(scenario, size)
    op = Hadamard(int(np.log2(size)))
    x = rng.standard_normal(size)
    return _Job(op, lambda a: a.forward(x))


def _setup_kron(scenario, size):
    rng = _rng(scenario, size)
    k = _cube_root(size)
    f = Fourier(k)
    d = Diagonal(rng.standard_normal(k) + 1j * rng.standard_normal(k))
    a = Dense(rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k)))
    op = Kron(f, d, a)
    x = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    return _Job(op, lambda m: m.forward(x))


def _setup_blockdiag(scenario, size):
    rng = _rng(scenario, size)
    k = size // 2
    op = BlockDiag(
        Fourier(k), Diagonal(rng.standard_normal(k) + 1j * rng.standard_normal(k))
    )
    x = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    return _Job(op, lambda m: m.forward(x))


def well_conditioned_circulant(rng, n):
    """Real circulant whose eigenvalues sit in an annulus around 1, so CG
    converges in a seed-independent handful of iterations."""
    radii = 0.45 * np.sqrt(rng.uniform(0.0, 1.0, size=n))
    angles = rng.uniform(0.0, 2.0 * np.pi, size=n)
    spectrum = 1.0 + radii * np.exp(1j * angles)
    spectrum[0] = 1.0 + radii[0]
    if n % 2 == 0:
        spectrum[n // 2] = 1.0 + radii[n // 2] * np.cos(angles[n // 2])
    for j in range(1, (n - 1) // 2 + 1):
        spectrum[n - j] = spectrum[j].conj()
    return Circulant(dft(spectrum, inverse=True).real)


def _setup_circulant_solve(scenario, size):
    rng = _rng(scenario, size)
    op = well_conditioned_circulant(rng, size)
    x_true = rng.standard_normal(size)
    b = op.forward(x_true)
    options = SolveOptions(relative_tolerance=1e-10)
    return _Job(op, lambda m: cg_solve(m, b, options).solution)


def _setup_ista(scenario, size):
    rng = _rng(scenario, size)
    m = 2 * size
    row_indices = rng.choice(m, size=size, replace=False)
    measurement = Partial(Hadamard(int(np.log2(m))), row_indices=row_indices)
    dictionary = Circulant(rng.standard_normal(m) / np.sqrt(m))
    op = Product(measurement, dictionary)
    sparsity = max(1, size // 16)
    support = rng.choice(m, size=sparsity, replace=False)
    x_true = np.zeros(m)
    x_true[support] = rng.standard_normal(sparsity) + np.sign(
        rng.standard_normal(sparsity)
    )
    b = op.forward(x_true)
    lam = 0.02 * np.abs(op.backward(b)).max()
    # The step size is fixed up front so both legs run identical iterations.
    top = power_iteration(op, mode="singular", tol=1e-6, max_iter=50,
                          seed=scenario.seed).value
    alpha = 1.0 / (1.01 * top ** 2)
    options = IstaOptions(lam=lam, steps=100, step_size=alpha)
    return _Job(op, lambda a: ista(a, b, options).solution)


def _setup_saft(scenario, size):
    rng = _rng(scenario, size)
    block_size = size // 6
    density_nnz = max(1, int(0.01 * block_size * block_size))

    def sparse_block():
        triplets = [
            (int(rng.integers(block_size)), int(rng.integers(block_size)),
             rng.standard_normal())
            for _ in range(density_nnz)
        ]
        return Sparse(block_size, block_size, triplets)

    lo, mid, hi = sparse_block(), sparse_block(), sparse_block()
    z = Zero(block_size, block_size)
    grid = [
        [lo, z, z, z],
        [mid, lo, z, z],
        [hi, mid, lo, z],
        [z, hi, mid, lo],
        [z, z, hi, mid],
        [z, z, z, hi],
    ]
    op = Blocks(grid)
    x = rng.standard_normal(op.cols)
    return _Job(op, lambda m: m.forward(x))


def _pow2_check(size):
    return None if _is_power_of_two(size) else "size must be a power of two"


@dataclass(frozen=True)
class ScenarioSpec:
    name: str
    summary: str
    setup: object
    size_check: object = field(default=lambda size: None)


SCENARIOS = {
    spec.name: spec
    for spec in (
        ScenarioSpec(
            "hadamard.forward",
            "fast Walsh-Hadamard forward vs dense matvec (size = 2^k)",
            _setup_hadamard,
            lambda size: _pow2_check(size),
        ),
        ScenarioSpec(
            "kron.forward",
            "Fourier x diagonal x dense Kronecker forward (size = k^3)",
            _setup_kron,
            lambda size: None if _cube_root(size) else
            "size must be a perfect cube k^3 with k >= 1",
        ),
        ScenarioSpec(
            "blockdiag.forward",
            "Fourier (+) diagonal block-diagonal forward (size = 2k)",
            _setup_blockdiag,
            lambda size: None if size % 2 == 0 else "size must be even",
        ),
        ScenarioSpec(
            "circulant.solve",
            "deconvolution: CG solve of a circulant system",
            _setup_circulant_solve,
        ),
        ScenarioSpec(
            "ista.recovery",
            "100 soft-thresholding steps on a partial-Hadamard/circulant "
            "model (size = measurement count, a power of two)",
            _setup_ista,
            lambda size: _pow2_check(size),
        ),
        ScenarioSpec(
            "saft.forward",
            "block-Toeplitz grid of three shared sparse blocks "
            "(size divisible by 6)",
            _setup_saft,
            lambda size: None if size % 6 == 0 and size >= 6 else
            "size must be a multiple of 6",
        ),
    )
}


def validate_scenario(name, sizes):
    """Error string when a size does not fit the scenario, else None."""
    if name not in SCENARIOS:
        return f"unknown scenario {name!r}"
    spec = SCENARIOS[name]
    for size in sizes:
        problem = spec.size_check(size)
        if problem:
            return f"size {size} invalid for {name}: {problem}"
    return None


def _time_runs(run, op, repetitions):
    run(op)  # warm-up: plan caches, allocator
    times = []
    for _ in range(repetitions):
        start = time.perf_counter()
        out = run(op)
        times.append(time.perf_counter() - start)
    return min(times), sum(times) / len(times), out


def run_scenario(scenario, mem_cap_bytes=DEFAULT_DENSE_CAP_BYTES):
    """Execute one scenario and return a record per size."""
    if scenario.name not in SCENARIOS:
        raise UnknownScenario(f"unknown scenario {scenario.name!r}")
    problem = validate_scenario(scenario.name, scenario.sizes)
    if problem:
        raise ValueError(problem)
    spec = SCENARIOS[scenario.name]
    records = []
    for size in scenario.sizes:
        job = spec.setup(scenario, size)
        op = job.operator
        smin, savg, structured_out = _time_runs(job.run, op, scenario.repetitions)
        dense_bytes = op.rows * op.cols * op.field.size_bytes
        dense_min = dense_avg = None
        if dense_bytes < mem_cap_bytes:
            dense_op = Dense(op.to_dense(cap_bytes=mem_cap_bytes))
            dense_min, dense_avg, dense_out = _time_runs(
                job.run, dense_op, scenario.repetitions
            )
            scale = 1.0 + np.max(np.abs(dense_out))
            err = np.max(np.abs(structured_out - dense_out))
            if err > CROSS_CHECK_RTOL * scale:
                raise CrossValidationError(
                    f"{scenario.name} size {size}: structured/dense outputs "
                    f"differ by {err:.3e} (allowed {CROSS_CHECK_RTOL * scale:.3e})"
                )
        records.append(
            BenchRecord(
                scenario=scenario.name,
                size=size,
                structured_min_s=smin,
                structured_avg_s=savg,
                dense_min_s=dense_min,
                dense_avg_s=dense_avg,
                structured_mem_bytes=op.footprint_bytes(),
                dense_mem_bytes=dense_bytes,
                checksum=float(np.linalg.norm(structured_out)),
            )
        )
    return records


CSV_HEADER = (
    "size,structured_min_s,structured_avg_s,dense_min_s,dense_avg_s,"
    "structured_mem_bytes,dense_mem_bytes,checksum"
)


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{value:.9g}"


def emit_csv(records, destination):
    """Write records as UTF-8 CSV, rows ascending in size, floats at nine
    significant digits, empty fields for skipped dense timings.  Identical
    records produce byte-identical files."""
    records = list(records)
    if len({r.scenario for r in records}) > 1:
        raise ValueError("records must share one scenario")
    lines = [CSV_HEADER]
    for r in sorted(records, key=lambda r: r.size):
        lines.append(
            ",".join(
                _fmt(v)
                for v in (
                    r.size,
                    r.structured_min_s,
                    r.structured_avg_s,
                    r.dense_min_s,
                    r.dense_avg_s,
                    r.structured_mem_bytes,
                    r.dense_mem_bytes,
                    r.checksum,
                )
            )
        )
    with open(destination, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("\n".join(lines) + "\n")
