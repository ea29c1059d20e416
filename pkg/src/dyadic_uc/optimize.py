"""Minimal UC_d over Walsh polynomials of fixed length.

For a unit coefficient vector ``a`` of length ``2^n`` and ``c = fwft(a)``
the shift-free objective is

    F(a) = (sum_k a_k^2 q_k) (sum_k c_k^2 q_k),   q_k = (3k^2 + 3k + 1) / (3 * 2^n)

and its minimum over the sphere equals the minimum of UC_d over the
polynomials, since the optimal shifts can be absorbed by a modulation and a
translation.  Pinning ``a_0 = 0`` breaks that symmetry, so the constrained
problem minimizes the shift-searched objective instead.  Minimization is
multi-start projected gradient descent on the unit sphere.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .dyadic import WalshPolynomial
from .localization import cell_weights, uc_walsh_poly, xor_shift_sums
from .transform import fwft

log = logging.getLogger(__name__)

Constraint = Literal["none", "zeroFirstCoeff"]


@dataclass(frozen=True)
class OptimizationResult:
    n: int
    coefficients: np.ndarray
    objective: float
    full_uc: float
    restarts: int
    seed: int
    converged: bool
    constraint: str = "none"


def _check_vector(a, unit: bool = True) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    size = a.shape[0]
    if a.ndim != 1 or size == 0 or size & (size - 1):
        raise ValueError(f"coefficient vector length must be a power of two, got {a.shape}")
    if unit and abs(np.linalg.norm(a) - 1.0) > 1e-9:
        raise ValueError(f"coefficient vector must have unit norm, got {np.linalg.norm(a)}")
    return a


def _parts(a: np.ndarray):
    q = cell_weights(a.shape[0].bit_length() - 1)
    c = fwft(a)
    return q, c, float(np.dot(a * a, q)), float(np.dot(c * c, q))


def objective(a, unit: bool = True) -> float:
    """``(sum a_k^2 q_k)(sum c_k^2 q_k)``; ``unit=False`` skips the norm check."""
    a = _check_vector(a, unit)
    _, _, time_part, freq_part = _parts(a)
    return time_part * freq_part


def objective_gradient(a, unit: bool = True) -> np.ndarray:
    """Euclidean gradient of the objective; ``W`` is symmetric so ``d(c)/da = W``."""
    a = _check_vector(a, unit)
    q, c, time_part, freq_part = _parts(a)
    return 2 * q * a * freq_part + 2 * time_part * fwft(q * c)


def _best_shift(sq: np.ndarray, q: np.ndarray) -> int:
    # lowest index among the minimizing XOR shifts
    return int(np.argmin(xor_shift_sums(sq, q)))


def shifted_parts(a: np.ndarray):
    """Factors of UC_d with the time and frequency shifts chosen optimally."""
    q = cell_weights(a.shape[0].bit_length() - 1)
    c = fwft(a)
    idx = np.arange(a.shape[0])
    qa = q[idx ^ _best_shift(a * a, q)]
    qc = q[idx ^ _best_shift(c * c, q)]
    return qa, qc, c, float(np.dot(a * a, qa)), float(np.dot(c * c, qc))


def shifted_objective(a) -> float:
    """The objective after the exhaustive shift search; equals UC_d of the polynomial."""
    a = _check_vector(a)
    *_, time_part, freq_part = shifted_parts(a)
    return time_part * freq_part


def shifted_gradient(a) -> np.ndarray:
    """Gradient of the active smooth piece of :func:`shifted_objective`."""
    a = _check_vector(a)
    qa, qc, c, time_part, freq_part = shifted_parts(a)
    return 2 * qa * a * freq_part + 2 * time_part * fwft(qc * c)


def tangent(a: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Projection of ``g`` onto the tangent space of the sphere at ``a``."""
    return g - np.dot(g, a) * a


# gradient norm accepted as stationary once the objective stops decreasing in floats
STALL_GTOL = 1e-6


def _descend(x: np.ndarray, mask: np.ndarray, gtol: float, max_iter: int, shifted: bool = False):
    """Projected gradient with Barzilai-Borwein steps and Armijo backtracking."""
    objective_fn, gradient_fn = (shifted_objective, shifted_gradient) if shifted else (objective, objective_gradient)
    f = objective_fn(x)
    stalled = 0
    g = tangent(x, gradient_fn(x) * mask)
    step = 1.0
    prev_x = prev_g = None
    for it in range(max_iter):
        gnorm = float(np.linalg.norm(g))
        if gnorm < gtol:
            return x, f, True, it
        if prev_x is not None:
            s, y = x - prev_x, g - prev_g
            sy = float(np.dot(s, y))
            if sy > 0:
                step = float(np.dot(s, s)) / sy
        step = min(max(step, 1e-8), 1e4)
        while True:
            cand = x - step * g
            cand /= np.linalg.norm(cand)
            fc = objective_fn(cand)
            if fc <= f - 1e-4 * step * gnorm * gnorm or step < 1e-14:
                break
            step *= 0.5
        if fc > f:
            return x, f, gnorm < STALL_GTOL, it
        stalled = stalled + 1 if f - fc <= 1e-15 * f else 0
        if stalled >= 20:
            # no progress left at double precision
            return cand, fc, gnorm < STALL_GTOL, it
        prev_x, prev_g = x, g
        x, f = cand, fc
        g = tangent(x, gradient_fn(x) * mask)
    return x, f, float(np.linalg.norm(g)) < gtol, max_iter


def canonical_sign(a: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(np.abs(a) > 1e-15)
    return -a if len(nz) and a[nz[0]] < 0 else a


def local_minimize(a0, constraint: Constraint = "none", gtol: float = 1e-10, max_iter: int = 20000):
    """One sphere-constrained descent from ``a0``; returns ``(a, F(a), converged)``."""
    x = np.array(a0, dtype=float)
    mask = np.ones_like(x)
    if constraint == "zeroFirstCoeff":
        mask[0] = 0.0
        x[0] = 0.0
    elif constraint != "none":
        raise ValueError(f"unknown constraint {constraint!r}")
    x /= np.linalg.norm(x)
    # with a pinned coefficient the optimal shifts can no longer be absorbed
    x, f, ok, _ = _descend(x, mask, gtol, max_iter, shifted=constraint != "none")
    return x, f, ok


def minimize_uc(
    n: int,
    restarts: int = 200,
    seed: int = 0,
    constraint: Constraint = "none",
    gtol: float = 1e-10,
    max_iter: int = 20000,
) -> OptimizationResult:
    """Best local minimum of the objective over ``restarts`` seeded random starts."""
    if not 2 <= n <= 8:
        raise ValueError(f"n must lie in 2..8, got {n}")
    rng = np.random.default_rng(seed)
    starts = rng.standard_normal((restarts, 1 << n))
    best = None
    for i, start in enumerate(starts):
        x, f, ok = local_minimize(start, constraint, gtol, max_iter)
        if not ok:
            log.debug("restart %d did not converge (F=%.10g)", i, f)
        # converged restarts beat unconverged ones; ties keep the lower index
        key = (not ok, f)
        if best is None or key < best[0]:
            best = (key, x, ok)
    (_, f_best), x_best, ok = best
    x_best = canonical_sign(x_best)
    full = float(uc_walsh_poly(WalshPolynomial(tuple(x_best))).uc)
    return OptimizationResult(
        n=n,
        coefficients=x_best,
        objective=f_best,
        full_uc=full,
        restarts=restarts,
        seed=seed,
        converged=ok,
        constraint=constraint,
    )


def embed(a, n_new: int) -> np.ndarray:
    """Zero-pad a coefficient vector to length ``2^n_new`` (same function)."""
    a = np.asarray(a, dtype=float)
    out = np.zeros(1 << n_new)
    out[: a.shape[0]] = a
    return out
