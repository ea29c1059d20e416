"""Dyadic rationals, the dyadic sum, Walsh functions and characters.

Points of the Cantor dyadic group are represented on the half-line by
non-negative dyadic rationals ``m * 2**-s`` whose binary expansion
terminates in zeros.  The group operation is the bitwise XOR of the
aligned expansions.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Sequence, Union

DyadicLike = Union["DyadicRational", int, Fraction, str]


@dataclass(frozen=True, order=False)
class DyadicRational:
    """Exact value ``mantissa * 2**-scale`` kept in canonical form."""

    mantissa: int
    scale: int = 0

    def __post_init__(self):
        m, s = int(self.mantissa), int(self.scale)
        if m < 0 or s < 0:
            raise ValueError(f"dyadic rational must be non-negative: {m}*2^-{s}")
        if m == 0:
            s = 0
        else:
            tz = (m & -m).bit_length() - 1
            shift = min(tz, s)
            m >>= shift
            s -= shift
        object.__setattr__(self, "mantissa", m)
        object.__setattr__(self, "scale", s)

    @classmethod
    def of(cls, value: DyadicLike) -> "DyadicRational":
        """Coerce an int, Fraction, ``"p/q"`` string or DyadicRational."""
        if isinstance(value, DyadicRational):
            return value
        if isinstance(value, str):
            value = Fraction(value)
        if isinstance(value, bool) or not isinstance(value, Rational):
            raise TypeError(f"not a dyadic rational: {value!r}")
        q = Fraction(value)
        den = q.denominator
        if q < 0 or den & (den - 1):
            raise ValueError(f"not a non-negative dyadic rational: {value}")
        return cls(q.numerator, den.bit_length() - 1)

    def to_fraction(self) -> Fraction:
        return Fraction(self.mantissa, 1 << self.scale)

    def __float__(self) -> float:
        return self.mantissa / (1 << self.scale) if self.scale < 1000 else float(self.to_fraction())

    def __xor__(self, other: DyadicLike) -> "DyadicRational":
        return dyadic_add(self, other)

    __rxor__ = __xor__

    def __lt__(self, other):
        return self.to_fraction() < DyadicRational.of(other).to_fraction()

    def __le__(self, other):
        return self.to_fraction() <= DyadicRational.of(other).to_fraction()

    def __gt__(self, other):
        return self.to_fraction() > DyadicRational.of(other).to_fraction()

    def __ge__(self, other):
        return self.to_fraction() >= DyadicRational.of(other).to_fraction()

    def cell_index(self, level: int) -> int:
        """Index ``k`` of the cell ``[k 2^-level, (k+1) 2^-level)`` holding this point."""
        shift = self.scale - level
        return self.mantissa >> shift if shift >= 0 else self.mantissa << -shift

    def __str__(self) -> str:
        return str(self.to_fraction())


def dyadic_add(x: DyadicLike, y: DyadicLike) -> DyadicRational:
    """The dyadic sum ``x (+) y``: XOR of the binary expansions."""
    x, y = DyadicRational.of(x), DyadicRational.of(y)
    s = max(x.scale, y.scale)
    return DyadicRational(
        (x.mantissa << (s - x.scale)) ^ (y.mantissa << (s - y.scale)), s
    )


def _bit_reverse(value: int, width: int) -> int:
    if width <= 0:
        return 0
    return int(format(value & ((1 << width) - 1), f"0{width}b")[::-1], 2)


def character(t: DyadicLike, x: DyadicLike) -> int:
    """Dyadic character ``w(t, x)``.

    The digit of ``t`` of weight ``2**i`` is paired with the digit of ``x`` of
    weight ``2**(-i-1)``; the result is ``(-1)**(number of paired ones)``.
    """
    t, x = DyadicRational.of(t), DyadicRational.of(x)
    width = t.scale + x.scale
    # bit p of t.mantissa pairs with bit (width - 1 - p) of x.mantissa
    paired = t.mantissa & _bit_reverse(x.mantissa, width)
    return -1 if bin(paired).count("1") & 1 else 1


def walsh(m: int, x: DyadicLike) -> int:
    """Walsh function of Paley index ``m`` evaluated at ``x`` (1-periodic in x)."""
    if m < 0:
        raise ValueError("Walsh index must be non-negative")
    return character(m, x)


@dataclass(frozen=True)
class DyadicInterval:
    """The half-open cell ``[k 2^-n, (k+1) 2^-n)``; ``n`` may be negative."""

    index: int
    level: int

    def __post_init__(self):
        if self.index < 0:
            raise ValueError("cell index must be non-negative")

    @property
    def left(self) -> Fraction:
        return Fraction(self.index) * Fraction(2) ** -self.level

    @property
    def right(self) -> Fraction:
        return Fraction(self.index + 1) * Fraction(2) ** -self.level

    @property
    def length(self) -> Fraction:
        return Fraction(2) ** -self.level

    def __contains__(self, x) -> bool:
        q = Fraction(x) if not isinstance(x, DyadicRational) else x.to_fraction()
        return self.left <= q < self.right

    def xor_translate(self, x: DyadicLike) -> "DyadicInterval":
        """Image of the cell under ``u -> u (+) x``; again a cell of the same level."""
        x = DyadicRational.of(x)
        return DyadicInterval(self.index ^ x.cell_index(self.level), self.level)

    def __str__(self) -> str:
        return f"[{self.left}, {self.right})"


def coarsen_cells(indices: Sequence[int], level: int) -> list[DyadicInterval]:
    """Cover a set of level-``level`` cells exactly by maximal dyadic intervals."""
    cells = sorted(set(int(k) for k in indices))
    out: list[DyadicInterval] = []
    while cells:
        merged = []
        i = 0
        while i < len(cells):
            k = cells[i]
            if k % 2 == 0 and i + 1 < len(cells) and cells[i + 1] == k + 1:
                merged.append(k >> 1)
                i += 2
            else:
                out.append(DyadicInterval(k, level))
                i += 1
        cells = merged
        level -= 1
    return sorted(out, key=lambda c: c.left)


def _coerce_scalar(v):
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, bool):
        raise TypeError("boolean is not a scalar value")
    if isinstance(v, Rational):
        return Fraction(v)
    return float(v)


def coerce_values(values) -> tuple:
    """Keep rationals exact; everything else becomes float."""
    vals = tuple(_coerce_scalar(v) for v in values)
    if any(isinstance(v, float) for v in vals):
        return tuple(float(v) for v in vals)
    return vals


def is_exact(values) -> bool:
    return all(isinstance(v, Fraction) for v in values)


@dataclass(frozen=True)
class WalshPolynomial:
    """``chi_[0, 2^N)(x) * sum_k a_k w(k, x / 2^N)`` with ``2^n`` coefficients."""

    coeffs: tuple
    support_scale: int = 0

    def __post_init__(self):
        vals = coerce_values(self.coeffs)
        size = len(vals)
        if size == 0 or size & (size - 1):
            raise ValueError(f"coefficient count must be a power of two, got {size}")
        if self.support_scale < 0:
            raise ValueError("support_scale must be non-negative")
        object.__setattr__(self, "coeffs", vals)

    @property
    def n(self) -> int:
        return len(self.coeffs).bit_length() - 1

    @property
    def exact(self) -> bool:
        return is_exact(self.coeffs)

    def norm2(self):
        """Squared L2 norm over the half-line: ``2^N * sum a_k^2``."""
        return sum(a * a for a in self.coeffs) * (2 ** self.support_scale)

    def __call__(self, x: DyadicLike):
        x = DyadicRational.of(x)
        if x >= (1 << self.support_scale):
            return 0 * self.coeffs[0]
        y = DyadicRational(x.mantissa, x.scale + self.support_scale)
        return sum(a * walsh(k, y) for k, a in enumerate(self.coeffs))


def dyadic_derivative(f: WalshPolynomial) -> WalshPolynomial:
    """Dyadic derivative of a Walsh polynomial on ``[0, 1)``: ``a_k -> k a_k``."""
    if f.support_scale != 0:
        raise ValueError("dyadic derivative is defined here for support [0, 1) only")
    return WalshPolynomial(tuple(k * a for k, a in enumerate(f.coeffs)), 0)
