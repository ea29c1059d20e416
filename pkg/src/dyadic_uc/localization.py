"""The dyadic uncertainty constant UC_d = V(f) V(f^).

``V(f) = min_y int (x (+) y)^2 |f(x)|^2 dx / ||f||^2``.  For a step function
at level ``n`` the shifted moment is constant in ``y`` on level-``n`` cells,
and a minimizer lies in the smallest block ``[0, 2^M)`` holding the
support, so the minimum is an exhaustive search over ``2^(n+M)`` cells.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .dyadic import (
    DyadicInterval,
    DyadicLike,
    DyadicRational,
    WalshPolynomial,
    coarsen_cells,
)
from .transform import (
    StepFunction,
    fwft,
    hadamard,
    hadamard_exact,
    padded_block,
    paley_sums,
    step_spectrum,
)

# relative tolerance for float ties in the exhaustive minimum
TIE_RTOL = 1e-10


@dataclass(frozen=True)
class LocalizationReport:
    v_time: object
    v_freq: object
    uc: object
    time_minimizers: tuple
    freq_minimizers: tuple
    norm2: object
    level: int
    exact: bool
    terms: Optional[int] = None
    converged: bool = True
    v0_freq_sequence: tuple = field(default=())

    def as_floats(self) -> tuple[float, float, float]:
        return float(self.v_time), float(self.v_freq), float(self.uc)


def cell_weights(n: int, exact: bool = False):
    """``q_k = (3k^2 + 3k + 1) / (3 * 2^n)`` for ``k < 2^n``."""
    if exact:
        den = 3 * (1 << n)
        return [Fraction(3 * k * k + 3 * k + 1, den) for k in range(1 << n)]
    k = np.arange(1 << n, dtype=float)
    return (3 * k * k + 3 * k + 1) / (3.0 * 2.0**n)


def _moment_weights(size: int, scale, exact: bool):
    # int over cell k of u^2 du with unit cells, times `scale`
    if exact:
        return [scale * Fraction(3 * k * k + 3 * k + 1, 3) for k in range(size)]
    k = np.arange(size, dtype=float)
    return float(scale) * (3 * k * k + 3 * k + 1) / 3.0


def xor_shift_sums(sq, weights):
    """``S[y] = sum_k sq[k XOR y] * weights[k]`` for every shift ``y``."""
    size = len(sq)
    if isinstance(sq, list):
        hs, hw = hadamard_exact(sq), hadamard_exact(weights)
        return [v / size for v in hadamard_exact([a * b for a, b in zip(hs, hw)])]
    sq = np.asarray(sq, dtype=float)
    weights = np.asarray(weights, dtype=float)
    nz = np.flatnonzero(sq)
    shifts = np.arange(size)
    if len(nz) <= 2 * max(size.bit_length(), 4):
        # sparse input: direct sum of non-negative terms keeps full relative accuracy
        out = np.zeros(size)
        for k in nz:
            out += sq[k] * weights[shifts ^ k]
        return out
    return hadamard(hadamard(sq) * hadamard(weights)) / size


def _argmin_set(values, allowed=None) -> tuple[object, list[int]]:
    """Minimum over ``allowed`` shift indices (all when None) and every index attaining it."""
    if isinstance(values, list):
        cand = range(len(values)) if allowed is None else allowed
        best = min(values[i] for i in cand)
        return best, [i for i in cand if values[i] == best]
    if allowed is not None:
        mask = np.zeros(len(values), dtype=bool)
        mask[np.asarray(allowed, dtype=np.int64)] = True
        values = np.where(mask, values, np.inf)
    best = float(values.min())
    tol = TIE_RTOL * max(abs(best), 1e-300)
    return best, np.flatnonzero(values <= best + tol).tolist()


SEARCH_MODES = ("block", "support")


def _allowed_shifts(sq, search: str):
    if search not in SEARCH_MODES:
        raise ValueError(f"search must be one of {SEARCH_MODES}, got {search!r}")
    if search == "block":
        return None
    return [i for i, v in enumerate(sq) if v != 0]


def shifted_second_moment(f: StepFunction, shift: DyadicLike):
    """``int (x (+) shift)^2 |f(x)|^2 dx`` evaluated cell by cell."""
    shift = DyadicRational.of(shift)
    k0 = shift.cell_index(f.level)
    total = 0
    for i, v in enumerate(f.values):
        m = (f.start + i) ^ k0
        total += v * v * Fraction(3 * m * m + 3 * m + 1, 3)
    scale = Fraction(2) ** (-3 * f.level)
    return total * scale if f.exact else float(total) * float(scale)


@dataclass(frozen=True)
class _Variance:
    value: object
    v0: object
    norm2: object
    minimizers: tuple


def _variance(f: StepFunction, search: str = "block") -> _Variance:
    f = f.trimmed()
    m, b = padded_block(f)
    exact = f.exact
    if exact:
        sq = [v * v for v in b]
    else:
        sq = np.asarray(b, dtype=float) ** 2
    weights = _moment_weights(len(b), Fraction(2) ** (-3 * f.level), exact)
    sums = xor_shift_sums(sq, weights)
    v0, idx = _argmin_set(sums, _allowed_shifts(sq, search))
    h = Fraction(2) ** -f.level
    norm2 = sum(sq) * (h if exact else float(h))
    return _Variance(v0 / norm2, v0, norm2, tuple(coarsen_cells(idx, f.level)))


def v_functional(f: StepFunction, search: str = "block") -> tuple[object, tuple]:
    """Normalized minimal shifted second moment and all minimizing cells.

    ``search="block"`` minimizes over every shift, as the definition asks.
    ``search="support"`` only tries shifts inside the support of ``f``; this
    can give a larger value when the support is not a dyadic block (the
    g2 row of the classical example table is computed this way).
    """
    var = _variance(f, search)
    return var.value, var.minimizers


def uc_step(f: StepFunction, search: str = "block") -> LocalizationReport:
    """UC_d of a step function; exact rationals in, exact rationals out."""
    time = _variance(f, search)
    freq = _variance(step_spectrum(f.trimmed()), search)
    return LocalizationReport(
        v_time=time.value,
        v_freq=freq.value,
        uc=time.value * freq.value,
        time_minimizers=time.minimizers,
        freq_minimizers=freq.minimizers,
        norm2=time.norm2,
        level=f.level,
        exact=f.exact,
    )


def _poly_parts(f: WalshPolynomial):
    n = f.n
    size = 1 << n
    if f.exact:
        a2 = [a * a for a in f.coeffs]
        c2 = [h * h / size for h in paley_sums(f.coeffs)]
    else:
        a = np.asarray(f.coeffs, dtype=float)
        a2 = a * a
        c2 = fwft(a) ** 2
    if not any(v != 0 for v in a2):
        raise ValueError("zero Walsh polynomial")
    return n, a2, c2


def uc_walsh_poly(f: WalshPolynomial) -> LocalizationReport:
    """UC_d of a Walsh polynomial by exhaustive search over ``2^n`` shifts.

    The time factor uses the fast transform ``c`` of the coefficients, the
    frequency factor the coefficients themselves; a support ``[0, 2^N)``
    scales the two factors by ``4^N`` and ``4^-N`` and leaves UC_d unchanged.
    """
    n, a2, c2 = _poly_parts(f)
    size = 1 << n
    exact = f.exact
    time_sums = xor_shift_sums(c2, _moment_weights(size, Fraction(1, 1 << (2 * n)), exact))
    freq_sums = xor_shift_sums(a2, _moment_weights(size, 1, exact))
    t0, t_idx = _argmin_set(time_sums)
    w0, w_idx = _argmin_set(freq_sums)
    norm_a, norm_c = sum(a2), sum(c2)
    big = 4 ** f.support_scale
    v_time = t0 / norm_a * big
    v_freq = w0 / norm_c / big
    return LocalizationReport(
        v_time=v_time,
        v_freq=v_freq,
        uc=v_time * v_freq,
        time_minimizers=tuple(coarsen_cells(t_idx, n - f.support_scale)),
        freq_minimizers=tuple(coarsen_cells(w_idx, f.support_scale)),
        norm2=norm_a * (1 << f.support_scale),
        level=n,
        exact=exact,
    )


def uc_series(
    coeff_gen: Callable,
    support_scale: int = 0,
    n_min: int = 0,
    n_max: int = 14,
    tol: float = 1e-4,
    vectorized: bool = False,
) -> LocalizationReport:
    """UC_d of a Walsh series through its partial sums of length ``2^n``.

    Stops once two successive level increments both change UC_d by less
    than ``tol`` (a single flat step is common while leading coefficients
    vanish).  When
    ``n_max`` is reached first the last report is returned with
    ``converged=False``.  ``v0_freq_sequence`` records the unnormalized
    frequency moment per level, which is nondecreasing in ``n``.
    ``vectorized=True`` lets ``coeff_gen`` receive an index array.
    """
    if n_min > n_max:
        raise ValueError("n_min must not exceed n_max")
    coeffs: list = []
    seq = []
    prev = None
    stable = 0
    report = None
    for n in range(n_min, n_max + 1):
        size = 1 << n
        if vectorized:
            if len(coeffs) < size:
                extra = np.asarray(coeff_gen(np.arange(len(coeffs), size)), dtype=float)
                coeffs = np.concatenate([np.asarray(coeffs, dtype=float), extra])
        else:
            coeffs.extend(coeff_gen(k) for k in range(len(coeffs), size))
        poly = WalshPolynomial(tuple(coeffs[:size]), support_scale)
        if not any(a != 0 for a in poly.coeffs):
            continue
        report = uc_walsh_poly(poly)
        seq.append(report.v_freq * report.norm2)
        if prev is not None and abs(float(report.uc) - float(prev)) < tol:
            stable += 1
            if stable >= 2:
                return _with_series(report, size, True, seq)
        else:
            stable = 0
        prev = report.uc
    if report is None:
        raise ValueError("all partial sums vanish")
    return _with_series(report, 1 << report.level, False, seq)


def _with_series(report: LocalizationReport, terms: int, converged: bool, seq) -> LocalizationReport:
    return LocalizationReport(
        **{
            **report.__dict__,
            "terms": terms,
            "converged": converged,
            "v0_freq_sequence": tuple(seq),
        }
    )
