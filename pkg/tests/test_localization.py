from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dyadic_uc.dyadic import DyadicInterval, WalshPolynomial, walsh
from dyadic_uc.localization import (
    cell_weights,
    shifted_second_moment,
    uc_series,
    uc_step,
    uc_walsh_poly,
    v_functional,
)
from dyadic_uc.transform import StepFunction, walsh_to_step

import oracles

LOWER = 8.5e-5 * (1 - 1e-9)
rng = np.random.default_rng(7)

F1 = StepFunction(2, (1,))
G1 = StepFunction(2, (1,), start=3)
F2 = StepFunction(3, (1, 1, 1))
G2 = StepFunction(3, (1, 1, 1), start=6)


def cells(report_cells):
    return [(c.left, c.right) for c in report_cells]


def test_cell_weights():
    q = cell_weights(3)
    assert q[0] == pytest.approx(1 / 24)
    assert np.all(np.diff(q) > 0)
    assert cell_weights(2, exact=True)[3] == Fraction(37, 12)


def test_shifted_moment_examples():
    assert shifted_second_moment(F1, 0) == Fraction(1, 192)
    assert shifted_second_moment(G1, "3/4") == Fraction(1, 192)
    f0 = StepFunction(0, (1,))
    for x in ("0", "1/2", "3/8", "15/16"):
        assert shifted_second_moment(f0, x) == Fraction(1, 3)


@settings(max_examples=40, deadline=None)
@given(
    st.integers(-1, 4),
    st.lists(st.integers(-3, 3), min_size=1, max_size=6),
    st.integers(0, 5),
    st.integers(0, 63),
)
def test_shifted_moment_riemann_oracle(level, vals, start, shift_idx):
    if not any(vals):
        vals[0] = 1
    f = StepFunction(level, tuple(Fraction(v, 2) for v in vals), start)
    h = Fraction(2) ** -level
    shift = (shift_idx % 16) * h
    got = shifted_second_moment(f, shift)
    ref = oracles.moment_riemann(level, f.values, start, shift, extra=4)
    assert got == ref  # both exact; well within the 1e-8 relative budget


def test_shifted_moment_float_riemann():
    vals = rng.standard_normal(8)
    f = StepFunction(3, tuple(vals), 2)
    for k in range(16):
        ref = float(oracles.moment_riemann(3, [Fraction(v) for v in vals], 2, Fraction(k, 8)))
        assert shifted_second_moment(f, Fraction(k, 8)) == pytest.approx(ref, rel=1e-8)


def test_v_functional_table_rows():
    v, m = v_functional(F1)
    assert v == Fraction(1, 48) and cells(m) == [(0, Fraction(1, 4))]
    v, m = v_functional(G1)
    assert v == Fraction(1, 48) and cells(m) == [(Fraction(3, 4), 1)]
    v, m = v_functional(G2, search="support")
    assert v == Fraction(71, 64) and cells(m) == [(Fraction(3, 4), Fraction(7, 8))]


def test_v_functional_g2_full_search_matches_oracle():
    v, _ = v_functional(G2)
    ref_time, _ = oracles.uc_brute(3, G2.values, 6)
    assert v == ref_time == Fraction(161, 192)


def test_v_functional_bad_search():
    with pytest.raises(ValueError):
        v_functional(F1, search="everywhere")


def test_uc_step_table_one():
    r = uc_step(F1)
    assert (r.v_time, r.v_freq, r.uc, r.norm2) == (Fraction(1, 48), Fraction(16, 3), Fraction(1, 9), Fraction(1, 4))
    assert cells(r.freq_minimizers) == [(0, 4)]
    r = uc_step(F2)
    assert (r.v_time, r.v_freq, r.uc) == (Fraction(3, 64), 8, Fraction(3, 8))
    assert cells(r.time_minimizers) == [(0, Fraction(1, 8))]
    assert cells(r.freq_minimizers) == [(0, 2)]
    r = uc_step(G2, search="support")
    assert (r.v_time, r.v_freq, r.uc) == (Fraction(71, 64), Fraction(32, 3), Fraction(71, 6))


def test_uc_step_haar():
    r = uc_step(StepFunction(0, (1,)))
    assert (r.v_time, r.v_freq, r.uc) == (Fraction(1, 3), Fraction(1, 3), Fraction(1, 9))
    assert r.exact


def test_uc_step_zero_function():
    with pytest.raises(ValueError):
        uc_step(StepFunction(2, (0, 0)))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 3), st.lists(st.integers(-4, 4), min_size=1, max_size=5), st.integers(0, 4))
def test_uc_step_against_brute_force(level, vals, start):
    if not any(vals):
        vals[-1] = 1
    f = StepFunction(level, tuple(vals), start)
    r = uc_step(f)
    v_time, v_freq = oracles.uc_brute(level, f.values, start)
    assert (r.v_time, r.v_freq) == (v_time, v_freq)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 4), st.data())
def test_shift_modulation_invariance(n, data):
    size = 1 << n
    vals = data.draw(st.lists(st.integers(-3, 3), min_size=size, max_size=size))
    if not any(vals):
        vals[0] = 1
    k0 = data.draw(st.integers(0, size - 1))
    t = data.draw(st.integers(0, size - 1))
    f = StepFunction(n, tuple(vals))
    g = StepFunction(n, tuple(walsh(t, Fraction(k, size)) * vals[k ^ k0] for k in range(size)))
    assert uc_step(f).uc == uc_step(g).uc


@pytest.mark.parametrize("big_n", [1, 2, 3])
def test_dilation_invariance(big_n):
    vals = tuple(Fraction(int(v)) for v in rng.integers(-3, 4, 8))
    f = StepFunction(3, vals + (1,))
    g = StepFunction(3 + big_n, f.values)  # g(x) = f(2^N x)
    assert uc_step(f).uc == uc_step(g).uc
    coarse = StepFunction(3 - big_n, f.values)
    assert uc_step(f).uc == uc_step(coarse).uc


def test_uc_walsh_poly_examples():
    r = uc_walsh_poly(WalshPolynomial((Fraction(1, 2),) * 4))
    assert r.uc == Fraction(1, 9)
    assert uc_walsh_poly(WalshPolynomial((1,))).uc == Fraction(1, 9)
    r = uc_walsh_poly(WalshPolynomial((0, 0.094206, 0.551564, 0.828796)))
    assert float(r.uc) == pytest.approx(0.091286, abs=5e-6)
    with pytest.raises(ValueError):
        uc_walsh_poly(WalshPolynomial((0, 0)))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 4), st.integers(0, 3), st.data())
def test_uc_walsh_poly_equals_uc_step_exact(n, big_n, data):
    size = 1 << n
    a = data.draw(st.lists(st.integers(-4, 4), min_size=size, max_size=size))
    if not any(a):
        a[0] = 1
    poly = WalshPolynomial(tuple(Fraction(x, 2) for x in a), big_n)
    r = uc_walsh_poly(poly)
    s = uc_step(walsh_to_step(poly))
    assert (r.v_time, r.v_freq, r.uc) == (s.v_time, s.v_freq, s.uc)
    assert r.time_minimizers == s.time_minimizers
    assert r.freq_minimizers == s.freq_minimizers


def test_minimizers_are_unions_of_cells():
    r = uc_walsh_poly(WalshPolynomial((1, 0, 0, 0)))
    assert r.time_minimizers == (DyadicInterval(0, 0),)


def test_uc_series_finite():
    r = uc_series(lambda k: Fraction(1) if k == 0 else Fraction(0), n_max=6)
    assert r.uc == Fraction(1, 9) and r.converged


def test_uc_series_reports_non_convergence():
    # slowly decaying coefficients cannot settle within 1e-12 by n = 4
    r = uc_series(lambda k: 1.0 / (k + 1), n_max=4, tol=1e-12)
    assert not r.converged and r.level == 4


def test_uc_series_v0_nondecreasing():
    b = np.sqrt(1 - 0.95**2)

    def coeff(k):
        m = k + 1
        if k == 0:
            return 0.5
        return 0.95 / 2 * b ** (m.bit_length() - 2) if m & (m - 1) == 0 else 0.0

    r = uc_series(coeff, support_scale=1, n_max=10, tol=1e-9)
    seq = np.array(r.v0_freq_sequence, dtype=float)
    assert np.all(np.diff(seq) >= -1e-12)


def test_lower_bound_random_polys():
    for _ in range(200):
        n = int(rng.integers(0, 7))
        a = rng.standard_normal(1 << n)
        assert float(uc_walsh_poly(WalshPolynomial(tuple(a))).uc) >= LOWER
