"""Fast transform kernels: DFT (radix-2 and Bluestein), Walsh-Hadamard,
and FFT-based circular convolution.

All kernels transform along axis 0 and accept a vector ``(n,)`` or a batch
``(n, k)``.  The DFT is unnormalized: forward computes
``X_j = sum_k x_k w^(jk)`` with ``w = exp(-2i pi / n)``, the inverse divides
by ``n``, so forward-then-inverse is the identity.

A module-level counter tallies the scalar work performed per butterfly
stage and pointwise pass; it backs the complexity measurements and costs
one integer addition per vectorized stage.
"""

import functools

import numpy as np

from .errors import DimensionMismatch, EmptyInput, NotPowerOfTwo

_op_count = 0


def _count(n):
    global _op_count
    _op_count += int(n)


def reset_op_count():
    """Zero the scalar-operation counter."""
    global _op_count
    _op_count = 0


def op_count():
    """Scalar operations performed by the kernels since the last reset."""
    return _op_count


def is_power_of_two(n):
    return n >= 1 and (n & (n - 1)) == 0


def next_power_of_two(n):
    m = 1
    while m < n:
        m <<= 1
    return m


def _bit_reversal(n):
    """Permutation that orders indices by reversed bit patterns."""
    levels = n.bit_length() - 1
    idx = np.zeros(n, dtype=np.intp)
    for bit in range(levels):
        idx[1 << bit : 2 << bit] = idx[: 1 << bit] + (n >> (bit + 1))
    return idx


class DftPlan:
    """Precomputed tables for length-``n`` DFTs, shareable across calls.

    Powers of two run the iterative radix-2 butterfly; any other length
    runs the Bluestein chirp-z reduction onto a padded power-of-two plan.
    Forward and inverse share one plan (the inverse conjugates through the
    forward tables and scales by 1/n).
    """

    def __init__(self, n):
        n = int(n)
        if n < 1:
            raise EmptyInput("DFT length must be >= 1")
        self.n = n
        if is_power_of_two(n):
            self._brev = _bit_reversal(n)
            self._twiddles = []
            size = 2
            while size <= n:
                half = size // 2
                self._twiddles.append(
                    np.exp(-2j * np.pi * np.arange(half) / size)
                )
                size *= 2
        else:
            # Chirp w_j = exp(-i pi j^2 / n); j^2 is reduced mod 2n in exact
            # integer arithmetic to keep the phase argument small.
            j = np.arange(n, dtype=np.int64)
            self._chirp = np.exp(-1j * np.pi * ((j * j) % (2 * n)) / n)
            m = next_power_of_two(2 * n - 1)
            kernel = np.zeros(m, dtype=np.complex128)
            kernel[:n] = self._chirp.conj()
            kernel[m - n + 1 :] = self._chirp[1:][::-1].conj()
            self._inner = get_plan(m)
            self._kernel_spectrum = self._inner._pow2(kernel[:, None])[:, 0]

    def _pow2(self, x):
        """Radix-2 decimation-in-time on a 2-D complex batch, axis 0."""
        n = self.n
        a = np.ascontiguousarray(x[self._brev])
        k = a.shape[1]
        size = 2
        for tw in self._twiddles:
            half = size // 2
            blocks = a.reshape(n // size, size, k)
            t = blocks[:, half:, :] * tw[None, :, None]
            blocks[:, half:, :] = blocks[:, :half, :] - t
            blocks[:, :half, :] += t
            _count(n * k)
            size *= 2
        return a

    def _bluestein(self, x):
        n = self.n
        k = x.shape[1]
        a = x * self._chirp[:, None]
        _count(n * k)
        m = self._inner.n
        padded = np.zeros((m, k), dtype=np.complex128)
        padded[:n] = a
        conv = self._inner._pow2(padded)
        conv *= self._kernel_spectrum[:, None]
        _count(m * k)
        conv = self._inner._pow2(conv.conj()).conj()
        conv /= m
        _count(m * k)
        return conv[:n] * self._chirp[:, None]

    def execute(self, x, inverse=False):
        """Transform along axis 0; ``x`` is ``(n,)`` or ``(n, k)``."""
        arr = np.asarray(x, dtype=np.complex128)
        squeeze = arr.ndim == 1
        if squeeze:
            arr = arr[:, None]
        if arr.shape[0] != self.n:
            raise DimensionMismatch(
                f"plan length {self.n}, input has {arr.shape[0]} rows"
            )
        if inverse:
            arr = arr.conj()
        if is_power_of_two(self.n):
            out = self._pow2(arr)
        else:
            out = self._bluestein(arr)
        if inverse:
            out = out.conj()
            out /= self.n
            _count(self.n * out.shape[1])
        return out[:, 0] if squeeze else out


@functools.lru_cache(maxsize=64)
def get_plan(n):
    """Shared, immutable plan cache (planning state, not operator storage)."""
    return DftPlan(n)


def dft(x, inverse=False):
    """Unnormalized DFT of ``x`` along axis 0 (inverse includes the 1/n)."""
    arr = np.asarray(x)
    if arr.shape[0] == 0:
        raise EmptyInput("cannot transform an empty vector")
    return get_plan(arr.shape[0]).execute(arr, inverse=inverse)


def fwht(x):
    """Walsh-Hadamard transform H_n @ x for the recursive +/-1 matrix
    H_1 = [[1, 1], [1, -1]], doubled by [[H, H], [H, -H]].

    Pure adds/subs via an in-place butterfly; requires a power-of-two
    length and preserves the input dtype (float64 or complex128).
    """
    arr = np.asarray(x)
    n = arr.shape[0]
    if not is_power_of_two(n):
        raise NotPowerOfTwo(f"Walsh-Hadamard length must be a power of two, got {n}")
    dtype = np.complex128 if np.issubdtype(arr.dtype, np.complexfloating) else np.float64
    squeeze = arr.ndim == 1
    out = np.ascontiguousarray(arr, dtype=dtype).copy()
    if squeeze:
        out = out[:, None]
    k = out.shape[1]
    half = 1
    while half < n:
        size = 2 * half
        blocks = out.reshape(n // size, 2, half, k)
        upper = blocks[:, 0] + blocks[:, 1]
        blocks[:, 1] = blocks[:, 0] - blocks[:, 1]
        blocks[:, 0] = upper
        _count(n * k)
        half = size
    return out[:, 0] if squeeze else out


def circular_convolve(c, x):
    """Circular convolution y_i = sum_k c_((i-k) mod n) x_k via the DFT.

    ``c`` is a kernel of length n; ``x`` may be ``(n,)`` or ``(n, k)``.
    When both inputs are real the (round-off) imaginary residue is
    truncated and a real array is returned.
    """
    carr = np.asarray(c)
    xarr = np.asarray(x)
    if carr.ndim != 1:
        raise ValueError("convolution kernel must be 1-D")
    if carr.shape[0] == 0:
        raise EmptyInput("convolution kernel must be nonempty")
    if xarr.shape[0] != carr.shape[0]:
        raise DimensionMismatch(
            f"kernel length {carr.shape[0]} != input rows {xarr.shape[0]}"
        )
    plan = get_plan(carr.shape[0])
    spectrum = plan.execute(carr)
    freq = plan.execute(xarr)
    if freq.ndim == 2:
        freq *= spectrum[:, None]
    else:
        freq *= spectrum
    _count(carr.shape[0])
    out = plan.execute(freq, inverse=True)
    real_inputs = not (
        np.issubdtype(carr.dtype, np.complexfloating)
        or np.issubdtype(xarr.dtype, np.complexfloating)
    )
    return out.real if real_inputs else out
