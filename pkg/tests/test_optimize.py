from fractions import Fraction

import numpy as np
import pytest

from dyadic_uc.dyadic import WalshPolynomial
from dyadic_uc.localization import cell_weights, uc_walsh_poly
from dyadic_uc.optimize import (
    canonical_sign,
    embed,
    local_minimize,
    minimize_uc,
    objective,
    objective_gradient,
    shifted_gradient,
    shifted_objective,
    tangent,
)

import oracles

rng = np.random.default_rng(5)


def unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def test_objective_delta():
    # both factors by hand: q_0 = 1/12 and (1/4) sum q_k = 4/3
    q = cell_weights(2, exact=True)
    assert q[0] * sum(q) / 4 == Fraction(1, 9)
    assert objective(np.eye(4)[0]) == pytest.approx(1 / 9, rel=1e-14)


def test_objective_checks_input():
    with pytest.raises(ValueError):
        objective(np.ones(4))
    with pytest.raises(ValueError):
        objective(unit(np.ones(3)))


def test_objective_published_generator():
    a = unit([0, 0.094206, 0.551564, 0.828796])
    assert shifted_objective(a) == pytest.approx(0.091286, abs=1e-3)
    assert shifted_objective(a) == pytest.approx(float(uc_walsh_poly(WalshPolynomial(tuple(a))).uc), rel=1e-12)


def test_objective_bounds_full_uc():
    # the unshifted objective can only exceed the shift-minimized constant
    for n in (2, 3, 4):
        for _ in range(20):
            a = unit(rng.standard_normal(1 << n))
            assert objective(a) >= shifted_objective(a) * (1 - 1e-12)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_gradient_finite_differences(n):
    for _ in range(10):
        a = unit(rng.standard_normal(1 << n))
        g = objective_gradient(a)
        fd = oracles.finite_difference_gradient(lambda x: objective(x, unit=False), a)
        assert np.linalg.norm(g - fd) <= 1e-5 * np.linalg.norm(g)


def test_shifted_gradient_finite_differences():
    for _ in range(10):
        a = unit(rng.standard_normal(8))
        g = shifted_gradient(a)
        # away from ties the active shifts do not change under a small step
        fd = oracles.finite_difference_gradient(
            lambda x: shifted_objective(x / np.linalg.norm(x)) * np.dot(x, x) ** 2, a
        )
        assert np.linalg.norm(g - fd) <= 1e-5 * np.linalg.norm(g)


def test_euler_identity():
    # a quartic form: <grad F(a), a> = 4 F(a)
    a = unit(rng.standard_normal(16))
    assert np.dot(objective_gradient(a), a) == pytest.approx(4 * objective(a), rel=1e-12)


def test_stationary_at_minimum():
    r = minimize_uc(2, restarts=10, seed=1)
    g = tangent(r.coefficients, objective_gradient(r.coefficients))
    assert np.linalg.norm(g) < 1e-6


def test_sign_symmetry_and_canonical():
    a = unit(rng.standard_normal(8))
    assert objective(a) == objective(-a)
    assert canonical_sign(-np.abs(a))[0] > 0
    assert canonical_sign(np.array([0.0, -1.0]))[1] == 1.0


def test_local_minimize_decreases():
    a = unit(rng.standard_normal(8))
    x, f, ok = local_minimize(a)
    assert f <= objective(a) and ok
    assert abs(np.linalg.norm(x) - 1) < 1e-12


def test_zero_constraint_pins_first():
    r = minimize_uc(2, restarts=10, seed=0, constraint="zeroFirstCoeff")
    assert r.coefficients[0] == 0.0
    assert r.full_uc == pytest.approx(r.objective, rel=1e-12)


def test_deterministic():
    r1 = minimize_uc(3, restarts=8, seed=42)
    r2 = minimize_uc(3, restarts=8, seed=42)
    np.testing.assert_array_equal(r1.coefficients, r2.coefficients)
    assert r1.objective == r2.objective


def test_full_uc_is_recomputed():
    r = minimize_uc(3, restarts=10, seed=2)
    assert r.full_uc <= r.objective * (1 + 1e-12)
    assert r.full_uc == pytest.approx(float(uc_walsh_poly(WalshPolynomial(tuple(r.coefficients))).uc))


def test_monotone_under_embedding():
    r2 = minimize_uc(2, restarts=20, seed=0)
    e = embed(r2.coefficients, 4)
    assert objective(e) == pytest.approx(r2.objective, rel=1e-12)
    r4 = minimize_uc(4, restarts=20, seed=0)
    assert r4.objective <= objective(e) + 1e-9


def test_bad_arguments():
    with pytest.raises(ValueError):
        minimize_uc(1)
    with pytest.raises(ValueError):
        minimize_uc(9)
    with pytest.raises(ValueError):
        local_minimize(np.ones(4), constraint="positive")
