"""Walsh matrix, fast Walsh-Fourier transform and spectra of dyadic functions."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .dyadic import (
    DyadicLike,
    DyadicRational,
    WalshPolynomial,
    coerce_values,
    is_exact,
    walsh,
)

MAX_MATRIX_LEVEL = 20


@dataclass(frozen=True)
class StepFunction:
    """``sum_k values[k] * chi(Delta_{start + k, level})``.

    ``level`` may be negative (cells wider than one).
    """

    level: int
    values: tuple
    start: int = 0

    def __post_init__(self):
        vals = coerce_values(self.values)
        if not vals:
            raise ValueError("step function needs at least one value")
        if self.start < 0:
            raise ValueError("start index must be non-negative")
        object.__setattr__(self, "values", vals)

    @property
    def exact(self) -> bool:
        return is_exact(self.values)

    @property
    def cell_length(self) -> Fraction:
        return Fraction(2) ** -self.level

    @property
    def support(self) -> tuple[Fraction, Fraction]:
        h = self.cell_length
        return self.start * h, (self.start + len(self.values)) * h

    def norm2(self):
        return sum(v * v for v in self.values) * (
            self.cell_length if self.exact else float(self.cell_length)
        )

    def refine(self, times: int = 1) -> "StepFunction":
        r = 1 << times
        return StepFunction(
            self.level + times,
            tuple(v for v in self.values for _ in range(r)),
            self.start * r,
        )

    def trimmed(self) -> "StepFunction":
        """Drop leading and trailing zero cells."""
        nz = [i for i, v in enumerate(self.values) if v != 0]
        if not nz:
            raise ValueError("zero function")
        return StepFunction(
            self.level, self.values[nz[0] : nz[-1] + 1], self.start + nz[0]
        )

    def __call__(self, x: DyadicLike):
        x = DyadicRational.of(x)
        k = x.cell_index(self.level) - self.start
        if 0 <= k < len(self.values):
            return self.values[k]
        return 0 * self.values[0]


def _check_pow2(size: int) -> int:
    if size == 0 or size & (size - 1):
        raise ValueError(f"length must be a power of two, got {size}")
    return size.bit_length() - 1


def bit_reverse_permutation(n: int) -> np.ndarray:
    """``perm[k]`` is ``k`` with its ``n`` low bits reversed."""
    perm = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        perm |= ((np.arange(1 << n) >> i) & 1) << (n - 1 - i)
    return perm


def hadamard(v) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform in natural (Sylvester) order.

    ``out[i] = sum_j v[j] * (-1)**popcount(i & j)``.
    """
    x = np.array(v, dtype=float)
    size = x.shape[0]
    _check_pow2(size)
    h = 1
    while h < size:
        x = x.reshape(-1, 2, h)
        x = np.stack((x[:, 0] + x[:, 1], x[:, 0] - x[:, 1]), axis=1)
        h *= 2
    return x.reshape(size)


def hadamard_exact(v) -> list:
    """Same as :func:`hadamard` on Python numbers (Fractions stay exact)."""
    x = list(v)
    size = len(x)
    _check_pow2(size)
    h = 1
    while h < size:
        for i in range(0, size, 2 * h):
            for j in range(i, i + h):
                u, w = x[j], x[j + h]
                x[j], x[j + h] = u + w, u - w
        h *= 2
    return x


def paley_sums(v):
    """``out[m] = sum_k v[k] w(m, k / 2^n)`` -- the unnormalized Paley transform.

    Exact (list of Fractions) when all inputs are rational, else a float array.
    """
    vals = list(v) if not isinstance(v, np.ndarray) else v
    n = _check_pow2(len(vals))
    perm = bit_reverse_permutation(n)
    if not isinstance(vals, np.ndarray) and is_exact(coerce_values(vals)):
        vals = coerce_values(vals)
        return hadamard_exact([vals[int(p)] for p in perm])
    arr = np.asarray(vals, dtype=float)
    return hadamard(arr[perm])


def walsh_matrix(n: int, max_level: int = MAX_MATRIX_LEVEL) -> np.ndarray:
    """Normalized Walsh matrix ``2^(-n/2) (w(m, k / 2^n))_{k, m}``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n > max_level:
        raise ValueError(f"walsh_matrix level {n} exceeds the configured maximum {max_level}")
    size = 1 << n
    k = np.arange(size)
    rev = bit_reverse_permutation(n)
    anded = rev[:, None] & k[None, :]
    parity = np.zeros_like(anded)
    while np.any(anded):
        parity ^= anded & 1
        anded >>= 1
    return (1 - 2 * parity) / np.sqrt(size)


def fwft(v) -> np.ndarray:
    """Fast Walsh-Fourier transform ``v W`` in O(N log N); involutive and orthogonal."""
    arr = np.asarray(v, dtype=float)
    n = _check_pow2(arr.shape[0])
    return hadamard(arr[bit_reverse_permutation(n)]) / np.sqrt(arr.shape[0])


def wft_walsh_poly(f: WalshPolynomial) -> StepFunction:
    """Walsh-Fourier transform of a Walsh polynomial.

    For support ``[0, 2^N)`` the spectrum is ``2^N a_k`` on the blocks
    ``[k 2^-N, (k+1) 2^-N)``.
    """
    scale = 1 << f.support_scale
    return StepFunction(f.support_scale, tuple(scale * a for a in f.coeffs), 0)


def walsh_to_step(f: WalshPolynomial) -> StepFunction:
    """Cell values of a Walsh polynomial, at level ``n - N`` on ``[0, 2^N)``."""
    b = paley_sums(f.coeffs)
    return StepFunction(f.n - f.support_scale, tuple(b), 0)


def step_to_walsh(f: StepFunction, support_scale: int = 0) -> WalshPolynomial:
    """Walsh coefficients of a step function supported in ``[0, 2^N)``.

    With ``c = b 2^(-n/2)`` the coefficients satisfy ``a = c W``; computed here
    as ``a = paley_sums(b) / 2^n`` so rational input stays exact.
    """
    n = f.level + support_scale
    if n < 0:
        raise ValueError("step function is coarser than its support block")
    lo, hi = f.support
    if hi > Fraction(2) ** support_scale:
        raise ValueError(f"support {lo}..{hi} is not inside [0, 2^{support_scale})")
    size = 1 << n
    zero = 0 * f.values[0]
    b = [zero] * size
    for i, v in enumerate(f.values):
        b[f.start + i] = v
    sums = paley_sums(b)
    return WalshPolynomial(tuple(s / size for s in sums), support_scale)


def _block_exponent(f: StepFunction) -> int:
    """Smallest ``M >= -level`` with the support inside ``[0, 2^M)``."""
    _, hi = f.support
    m = -f.level
    while Fraction(2) ** m < hi:
        m += 1
    return m


def padded_block(f: StepFunction) -> tuple[int, list]:
    """Values on every level-``n`` cell of the smallest block ``[0, 2^M)``."""
    m = _block_exponent(f)
    size = 1 << (m + f.level)
    zero = 0 * f.values[0]
    b = [zero] * size
    for i, v in enumerate(f.values):
        b[f.start + i] = v
    return m, b


def step_spectrum(f: StepFunction) -> StepFunction:
    """Walsh-Fourier transform of a step function.

    With support in ``[0, 2^M)`` at level ``n`` the transform is a step
    function at level ``M`` on ``[0, 2^n)``:
    ``f^(t) = 2^-n sum_k b_k w(t, k 2^-n)``.
    """
    m, b = padded_block(f)
    sums = paley_sums(b)
    scale = Fraction(2) ** -f.level
    if not f.exact:
        scale = float(scale)
    return StepFunction(m, tuple(scale * s for s in sums), 0)


def evaluate_walsh_sum(coeffs, x: DyadicLike):
    """Pointwise ``sum_k a_k w(k, x)`` by direct evaluation (no transform)."""
    return sum(a * walsh(k, x) for k, a in enumerate(coeffs))
