"""Lang's dyadic scaling function and wavelet, and tight-frame generators.

For ``0 < a <= 1`` and ``b = sqrt(1 - a^2)``

    phi_a(x) = 1/2 chi_[0,1)(x/2) (1 + a sum_j b^j w(2^(j+1) - 1, x/2))
    phi_a^   = chi_[0,1/2) + a sum_j b^j chi_[2^j - 1/2, 2^j)
    psi_a(x) = 2a0 phi_a(2x+1) - 2a1 phi_a(2x) + 2a2 phi_a(2x+3) - 2a3 phi_a(2x+2)

(``+`` being the dyadic sum), with masks a0 = (1+a+b)/4, a1 = (1+a-b)/4,
a2 = (1-a-b)/4, a3 = (1-a+b)/4.  Both have finite UC_d exactly when
``a > sqrt(3)/2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

import numpy as np

from .dyadic import DyadicInterval, DyadicLike, DyadicRational, WalshPolynomial, coarsen_cells, walsh
from .localization import TIE_RTOL, LocalizationReport, uc_series, uc_step
from .transform import StepFunction, walsh_to_step

DEFAULT_TERMS = 14
MAX_LEMMA_LEVEL = 22
_INT_MASK = (1 << 62) - 1


def _exact_sqrt(q: Fraction):
    num, den = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if num * num == q.numerator and den * den == q.denominator:
        return Fraction(num, den)
    return None


@dataclass(frozen=True)
class LangParams:
    a: object

    def __post_init__(self):
        a = self.a
        if isinstance(a, (int, Fraction, str)) and not isinstance(a, bool):
            a = Fraction(a)
        else:
            a = float(a)
        if not 0 < a <= 1:
            raise ValueError(f"Lang parameter a must satisfy 0 < a <= 1, got {a}")
        object.__setattr__(self, "a", a)

    @property
    def b(self):
        if isinstance(self.a, Fraction):
            root = _exact_sqrt(1 - self.a * self.a)
            if root is not None:
                return root
        return math.sqrt(1.0 - float(self.a) ** 2)

    @property
    def exact(self) -> bool:
        return isinstance(self.a, Fraction) and isinstance(self.b, Fraction)

    @property
    def finite_uc(self) -> bool:
        return self.a * self.a > Fraction(3, 4)

    def _num(self):
        a, b = self.a, self.b
        if not self.exact:
            a, b = float(a), float(b)
        return a, b

    @property
    def masks(self) -> tuple:
        a, b = self._num()
        return (1 + a + b) / 4, (1 + a - b) / 4, (1 - a - b) / 4, (1 - a + b) / 4


# -- Walsh coefficients on [0, 2) -------------------------------------------------

def lang_scaling_coeff(p: LangParams, k):
    """Coefficient of ``w(k, x/2)`` in phi_a; ``k`` may be an index array."""
    a, b = p._num()
    if isinstance(k, (int, np.integer)):
        k = int(k)
        if k == 0:
            return Fraction(1, 2) if p.exact else 0.5
        m = k + 1
        if m & (m - 1) == 0:
            return a / 2 * b ** (m.bit_length() - 2)
        return 0 * a
    k = np.asarray(k, dtype=np.int64)
    out = np.zeros(k.shape)
    out[k == 0] = 0.5
    m = k + 1
    hit = (k > 0) & ((m & (m - 1)) == 0)
    j = np.zeros(k.shape, dtype=np.int64)
    j[hit] = np.log2(m[hit]).round().astype(np.int64) - 1
    out[hit] = float(a) / 2 * float(b) ** j[hit]
    return out


def lang_wavelet_coeff(p: LangParams, k):
    """Coefficient of ``w(k, x/2)`` in psi_a.

    From ``psi^(t) = phi^(t/2) (a0 w(t/2,1) - a1 + a2 w(t/2,3) - a3 w(t/2,2))``
    the mask takes the values ``0, b, -1, -a`` for ``k mod 4 = 0, 1, 2, 3``.
    """
    a, b = p._num()
    if isinstance(k, (int, np.integer)):
        k = int(k)
        return lang_scaling_coeff(p, k >> 1) * (0, b, -1, -a)[k & 3]
    k = np.asarray(k, dtype=np.int64)
    table = np.array([0.0, float(b), -1.0, -float(a)])
    return lang_scaling_coeff(p, k >> 1) * table[k & 3]


def lang_scaling_coeffs(p: LangParams, levels: int = DEFAULT_TERMS) -> WalshPolynomial:
    """phi_a truncated after ``levels`` terms of its Walsh series (support [0, 2))."""
    if levels < 1:
        raise ValueError("need at least one term")
    size = 1 << levels
    if p.exact:
        coeffs = tuple(lang_scaling_coeff(p, k) for k in range(size))
    else:
        coeffs = tuple(lang_scaling_coeff(p, np.arange(size)))
    return WalshPolynomial(coeffs, 1)


def lang_tail_energy(p: LangParams, levels: int):
    """Coefficient energy dropped by truncating phi_a after ``levels`` terms."""
    a, b = p._num()
    if b == 0:
        return 0 * a
    return a * a / 4 * b ** (2 * levels) / (1 - b * b)


def lang_wavelet_step(p: LangParams, levels: int = DEFAULT_TERMS, level: int | None = None) -> StepFunction:
    """psi_a on [0, 2) at cell level ``level`` from the truncated phi_a.

    The truncated phi_a is constant on cells of level ``levels - 1``, so
    every dilated translate is resolved once ``level >= levels``; the default
    is ``levels + 2``.
    """
    if level is None:
        level = levels + 2
    if level < levels:
        raise ValueError(f"level {level} too coarse for {levels} terms (need >= {levels})")
    phi = walsh_to_step(lang_scaling_coeffs(p, levels))  # level levels-1 on [0, 2)
    a0, a1, a2, a3 = p.masks
    terms = ((1, 2 * a0), (0, -2 * a1), (3, 2 * a2), (2, -2 * a3))
    shift = level - levels + 1
    size_phi = len(phi.values)
    if p.exact:
        vals = []
        for k in range(1 << (level + 1)):
            v = 0
            for e, c in terms:
                idx = ((2 * k) ^ (e << level)) >> shift
                if idx < size_phi:
                    v += c * phi.values[idx]
            vals.append(v)
        return StepFunction(level, tuple(vals))
    phi_vals = np.asarray(phi.values, dtype=float)
    k = np.arange(1 << (level + 1), dtype=np.int64)
    out = np.zeros(k.shape)
    for e, c in terms:
        idx = ((2 * k) ^ (e << level)) >> shift
        ok = idx < size_phi
        out[ok] += float(c) * phi_vals[idx[ok]]
    return StepFunction(level, tuple(out))


# -- closed-form moments --------------------------------------------------------------

def A_kernel(xi: DyadicLike, eta: DyadicLike) -> Fraction:
    """``int u^2 du`` over the XOR-translate ``[xi, xi + 1/2) (+) eta``.

    The translate of the half-block is again a half-block whose left end is
    ``m = inf``; the result is ``((m + 1/2)^3 - m^3) / 3``.
    """
    xi, eta = DyadicRational.of(xi), DyadicRational.of(eta)
    if xi.scale > 1:
        raise ValueError(f"xi must be a multiple of 1/2, got {xi}")
    m = Fraction((xi ^ eta).cell_index(1), 2)
    h = Fraction(1, 2)
    return ((m + h) ** 3 - m**3) / 3


def _a_values(xi2: int, k: np.ndarray) -> np.ndarray:
    """Float ``A(xi2/2, k/2)`` for an index array ``k``."""
    low = xi2 & _INT_MASK
    m2 = float(xi2 - low) + (low ^ k).astype(float)
    m = m2 / 2
    return m * m / 2 + m / 4 + 1.0 / 24


def _scaling_freq_blocks(p: LangParams, terms: int):
    a, b = p._num()
    blocks = [(0, 1 + 0 * a)]
    blocks += [(2 ** (j + 1) - 1, a * a * b ** (2 * j)) for j in range(terms)]
    return blocks  # (2 * left end, |phi^|^2 on the half-block)


def _wavelet_freq_blocks(p: LangParams, terms: int):
    a, b = p._num()
    blocks = [(1, b * b)]
    for i in range(1, terms + 1):
        w = b ** (2 * i - 2)
        blocks.append((2 ** (i + 1) - 2, a * a * w))
        blocks.append((2 ** (i + 1) - 1, a**4 * w))
    return blocks


@dataclass(frozen=True)
class SeriesValue:
    value: object
    tail_bound: float
    converges: bool


def _freq_tail(p: LangParams, which: str, terms: int, t) -> tuple[float, bool]:
    a, b = (float(v) for v in p._num())
    r = 4 * b * b
    if r >= 1:
        return math.inf, False
    s = (float(t) + 0.5) ** 2 * b ** (2 * terms) / (1 - b * b)
    if which == "scaling":
        return a * a * (r**terms / (1 - r) + s), True
    return (a * a + a**4) * (4 * r**terms / (1 - r) + s), True


def _freq_moment(p: LangParams, which: str, t_shift: DyadicLike, terms: int) -> SeriesValue:
    blocks = _scaling_freq_blocks(p, terms) if which == "scaling" else _wavelet_freq_blocks(p, terms)
    if p.exact:
        value = sum(w * A_kernel(Fraction(x2, 2), t_shift) for x2, w in blocks)
    else:
        # expanded kernel m^2/2 + m/4 + 1/24 stays finite far beyond the cubed form
        eta = DyadicRational.of(t_shift)
        value = 0.0
        for x2, w in blocks:
            if w == 0:
                continue
            m = float(Fraction((DyadicRational(x2, 1) ^ eta).cell_index(1), 2))
            value += w * (m * m / 2 + m / 4 + 1.0 / 24)
    tail, ok = _freq_tail(p, which, terms, DyadicRational.of(t_shift))
    if p.exact and p.b == 0:
        tail = 0.0
    return SeriesValue(value, tail, ok and p.finite_uc)


def lang_freq_moment_scaling(p: LangParams, t_shift: DyadicLike, terms: int = DEFAULT_TERMS) -> SeriesValue:
    """``A(0, t) + a^2 sum_{j < terms} b^(2j) A(2^j - 1/2, t)`` and a tail bound.

    ``converges`` is False when ``a <= sqrt(3)/2``; the partial sums then grow
    like ``(4 b^2)^terms``.
    """
    return _freq_moment(p, "scaling", t_shift, terms)


def lang_freq_moment_wavelet(p: LangParams, t_shift: DyadicLike, terms: int = DEFAULT_TERMS) -> SeriesValue:
    """Frequency moment of psi_a over its half-blocks, with tail bound.

    ``|psi^|^2`` is ``b^2`` on [1/2, 1) and, for ``i >= 1``,
    ``a^2 b^(2i-2)`` on [2^i - 1, 2^i - 1/2) and ``a^4 b^(2i-2)`` on
    [2^i - 1/2, 2^i); ``terms`` counts the values of ``i`` kept.
    """
    return _freq_moment(p, "wavelet", t_shift, terms)


def _min_over_half_grid(blocks, start_bits: int = 3):
    """Minimize ``sum w A(xi, t)`` over ``t = k/2`` with a rigorous search radius.

    Shifts ``t >= 2^K`` push all mass of ``[0, 2^K)`` beyond ``2^K``, so the
    moment is at least ``4^K * mass([0, 2^K))``; ``K`` grows until that bound
    exceeds the minimum found on ``[0, 2^K)``.
    """
    weights = [(x2, float(w)) for x2, w in blocks if w != 0]
    bits = start_bits
    while True:
        k = np.arange(1 << (bits + 1), dtype=np.int64)
        vals = np.zeros(k.shape)
        for x2, w in weights:
            vals += w * _a_values(x2, k)
        best = float(vals.min())
        mass = sum(w / 2 for x2, w in weights if x2 + 1 <= (1 << (bits + 1)))
        if 4.0**bits * mass > best or bits >= 40:
            idx = np.flatnonzero(vals <= best + TIE_RTOL * best).tolist()
            return best, tuple(coarsen_cells(idx, 1))
        bits += 1


def _bitsign(k: np.ndarray, pos: int) -> np.ndarray:
    # (-1)^(bit `pos` of k); positions below zero read as 0
    if pos < 0:
        return np.ones(k.shape)
    return 1.0 - 2.0 * ((k >> pos) & 1)


def _scaling_time_moment_grid(p: LangParams, grid: int) -> np.ndarray:
    a, b = (float(v) for v in p._num())
    k = np.arange(1 << (grid + 1), dtype=np.int64)  # x = k 2^-grid in [0, 2)
    w_half = _bitsign(k, grid)  # w(1, x/2)

    def w_pow(j):  # w(2^j, x)
        return _bitsign(k, grid - 1 - j)

    out = 4.0 / 3 + 0.25 * w_half * (-4 * a + a * b * w_pow(0))
    s1 = np.zeros(k.shape)
    s2 = np.zeros(k.shape)
    for j in range(grid):
        s1 += (b * b / 2) ** j * w_pow(j)
        s2 += (b * b / 4) ** j * w_pow(j) * w_pow(j + 1)
    # beyond the grid all characters are +1 at the sample points
    s1 += (b * b / 2) ** grid / (1 - b * b / 2)
    s2 += (b * b / 4) ** grid / (1 - b * b / 4)
    return out - a * a * b / 2 * s1 + a * a * b * b / 16 * s2


def _wavelet_time_moment_grid(p: LangParams, grid: int) -> np.ndarray:
    a, b = (float(v) for v in p._num())
    k = np.arange(1 << (grid + 1), dtype=np.int64)
    w_half = _bitsign(k, grid)

    def w_pow(j):
        return _bitsign(k, grid - 1 - j)

    w1 = w_pow(0)
    w3 = w_pow(0) * w_pow(1)
    s1 = np.zeros(k.shape)
    s2 = np.zeros(k.shape)
    for j in range(grid):
        s1 += (b * b / 2) ** j * w_pow(j + 1)
        s2 += (b * b / 4) ** j * w_pow(j + 1) * w_pow(j + 2)
    s1 += (b * b / 2) ** grid / (1 - b * b / 2)
    s2 += (b * b / 4) ** grid / (1 - b * b / 4)
    out = (
        4.0 / 3
        - a * w_half
        - a * b / 4 * w_half * w1
        - a * a * b / 2 * (-w1 + b / 8 * w3)
        + a * a * (0.25 + a * a / 4) * (-b * s1 + b * b / 16 * s2)
        + a**3 / 4 * w_half * b * s1
    )
    return out


def lang_time_moment(p: LangParams, which: Literal["scaling", "wavelet"], grid: int = 12) -> np.ndarray:
    """Closed-form ``int (x (+) y)^2 |f(x)|^2 dx`` at ``y = k 2^-grid`` in [0, 2)."""
    if which == "scaling":
        return _scaling_time_moment_grid(p, grid)
    return _wavelet_time_moment_grid(p, grid)


def _infinite_report(p: LangParams) -> LocalizationReport:
    return LocalizationReport(
        v_time=math.inf, v_freq=math.inf, uc=math.inf,
        time_minimizers=(), freq_minimizers=(), norm2=1.0, level=0,
        exact=False, converged=False,
    )


def _lemma_level(p: LangParams, which: str, rtol: float) -> int:
    # smallest level whose frequency tail bound is below rtol
    for n in range(2, MAX_LEMMA_LEVEL + 1):
        terms = n if which == "scaling" else n - 1
        tail, _ = _freq_tail(p, which, terms, 2.0)
        if tail < rtol:
            return n
    return MAX_LEMMA_LEVEL


def lang_uc(
    p: LangParams,
    which: Literal["scaling", "wavelet"] = "scaling",
    method: Literal["lemma", "closed-form"] = "lemma",
    terms: int | None = None,
    grid: int = 12,
    tol: float = 1e-3,
) -> LocalizationReport:
    """UC_d of phi_a or psi_a.

    ``method="lemma"`` runs the partial-sum computation on the Walsh
    coefficients; ``method="closed-form"`` minimizes the series moments over
    a dyadic grid of time shifts (level ``grid``) and half-integer frequency
    shifts.  For ``a <= sqrt(3)/2`` a report with infinite values and
    ``converged=False`` is returned.
    """
    if which not in ("scaling", "wavelet"):
        raise ValueError(f"which must be 'scaling' or 'wavelet', got {which!r}")
    if not p.finite_uc:
        return _infinite_report(p)
    if method == "lemma":
        return _lang_uc_lemma(p, which, terms, tol)
    if method == "closed-form":
        return _lang_uc_closed(p, which, terms, grid)
    raise ValueError(f"unknown method {method!r}")


def _lang_uc_lemma(p: LangParams, which: str, terms: int | None, tol: float) -> LocalizationReport:
    coeff = lang_scaling_coeff if which == "scaling" else lang_wavelet_coeff
    n_max = terms if terms is not None else _lemma_level(p, which, tol)
    if p.exact and p.b == 0:
        # Haar case: finitely many nonzero coefficients, exact rationals throughout
        return uc_series(lambda k: coeff(p, k), 1, 0, max(n_max, 4), tol=1e-15)
    report = uc_series(lambda k: coeff(p, k), 1, max(2, n_max - 2), n_max, tol=tol, vectorized=True)
    # the increments alone can stall while the tail still matters; trust the tail bound
    tail, _ = _freq_tail(p, which, n_max if which == "scaling" else n_max - 1, 2.0)
    return LocalizationReport(**{**report.__dict__, "converged": tail < tol})


def _lang_uc_closed(p: LangParams, which: str, terms: int | None, grid: int) -> LocalizationReport:
    if terms is None:
        terms = 200
    blocks = _scaling_freq_blocks(p, terms) if which == "scaling" else _wavelet_freq_blocks(p, terms)
    f0, f_cells = _min_over_half_grid(blocks)
    tail, _ = _freq_tail(p, which, terms, 2.0 ** 8)
    moments = lang_time_moment(p, which, grid)
    t0 = float(moments.min())
    t_idx = np.flatnonzero(moments <= t0 + TIE_RTOL * t0).tolist()
    v_time, v_freq = t0, f0  # both functions have unit norm
    return LocalizationReport(
        v_time=v_time,
        v_freq=v_freq,
        uc=v_time * v_freq,
        time_minimizers=tuple(coarsen_cells(t_idx, grid)),
        freq_minimizers=f_cells,
        norm2=1.0,
        level=grid,
        exact=False,
        terms=terms,
        converged=tail < 1e-9,
    )


# -- tight-frame generators ---------------------------------------------------------

@dataclass(frozen=True)
class FrameGeneratorSpec:
    """``g_{l,s}(x) = 2^-s chi_[0, 2^s)(x) w(l, 2^-s x)``."""

    l: int
    s: int

    def __post_init__(self):
        if self.l < 1 or self.s < 0:
            raise ValueError("frame generator needs l >= 1 and s >= 0")

    @property
    def spectrum_block(self) -> DyadicInterval:
        """The block ``U_{l,s} = 2^-s (l (+) [0, 1))`` carrying the spectrum."""
        return DyadicInterval(self.l, self.s)


def frame_generator(spec: FrameGeneratorSpec) -> StepFunction:
    """Exact step-function realization of g_{l,s}."""
    bits = spec.l.bit_length()
    amp = Fraction(1, 1 << spec.s)
    values = tuple(amp * walsh(spec.l, Fraction(k, 1 << bits)) for k in range(1 << bits))
    return StepFunction(bits - spec.s, values)


def frame_uc(spec: FrameGeneratorSpec) -> LocalizationReport:
    return uc_step(frame_generator(spec))
