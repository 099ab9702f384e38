import numpy as np
from hypothesis import given, settings, strategies as st

import linopkit as lk
from linopkit.solvers import soft_threshold

finite = st.floats(
    min_value=-1e6, max_value=1e6, allow_nan=False, allow_subnormal=False
)


@given(u=finite, c=st.floats(min_value=0.0, max_value=1e6, allow_nan=False))
def test_soft_threshold_shrinks_magnitude(u, c):
    out = soft_threshold(np.array([u]), c)[0]
    assert abs(out) == max(abs(u) - c, 0.0)
    if abs(u) <= c:
        assert out == 0.0
    else:
        assert np.sign(out) == np.sign(u)


@given(re=finite, im=finite, c=st.floats(min_value=0.0, max_value=1e6,
                                         allow_nan=False))
def test_soft_threshold_keeps_complex_phase(re, im, c):
    u = complex(re, im)
    out = soft_threshold(np.array([u]), c)[0]
    assert abs(abs(out) - max(abs(u) - c, 0.0)) <= 1e-9 * (1.0 + abs(u))
    if out != 0 and u != 0:
        # Shrinkage never rotates the entry.
        assert abs(out / abs(out) - u / abs(u)) <= 1e-9


@settings(deadline=None, max_examples=25)
@given(
    seed=st.integers(min_value=0, max_value=2 ** 16),
    alpha=finite,
    beta=finite,
)
def test_forward_is_linear(seed, alpha, beta):
    rng = np.random.default_rng(seed)
    op = lk.Circulant(rng.standard_normal(8))
    x = rng.standard_normal(8)
    z = rng.standard_normal(8)
    combined = op.forward(alpha * x + beta * z)
    separate = alpha * op.forward(x) + beta * op.forward(z)
    scale = 1.0 + np.max(np.abs(separate))
    assert np.max(np.abs(combined - separate)) <= 1e-9 * scale


@settings(deadline=None, max_examples=20)
@given(order=st.integers(min_value=0, max_value=10),
       seed=st.integers(min_value=0, max_value=2 ** 16))
def test_fwht_involution(order, seed):
    n = 2 ** order
    x = np.random.default_rng(seed).standard_normal(n)
    assert np.allclose(lk.fwht(lk.fwht(x)), n * x, rtol=1e-10, atol=1e-10)
