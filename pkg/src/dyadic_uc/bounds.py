"""Lower bound for the dyadic uncertainty constant.

For ``0 < theta < 1/2`` the interpolation argument gives
``||x f|| ||t f^|| >= C(theta) ||f||^2`` with

    K1(theta) = (2 theta)^(-2 theta) (1 - 2 theta)^(theta - 1)
    C(theta)  = (2 K1(theta))^(-1 / theta)

and ``C(theta)^2`` is then a lower bound for UC_d. The maximum sits near
``theta ~ 0.4305`` with ``C^2 ~ 1.186e-4``; ``C(0.382)^2 ~ 8.46e-5``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar


@dataclass(frozen=True)
class ThetaBound:
    theta: float
    k1: float
    c: float
    c_squared: float


def _check_theta(theta: float) -> None:
    if not 0.0 < theta < 0.5:
        raise ValueError(f"theta must lie in (0, 1/2), got {theta}")


def k1_theta(theta: float) -> float:
    _check_theta(theta)
    return (2 * theta) ** (-2 * theta) * (1 - 2 * theta) ** (theta - 1)


def c_theta(theta: float) -> float:
    _check_theta(theta)
    return math.exp(-math.log(2 * k1_theta(theta)) / theta)


def _log_c_squared(theta):
    # vectorized log C(theta)^2, safe for tiny theta where C underflows
    theta = np.asarray(theta, dtype=float)
    log_k1 = -2 * theta * np.log(2 * theta) + (theta - 1) * np.log1p(-2 * theta)
    return -2.0 * (np.log(2.0) + log_k1) / theta


def theta_bound(theta: float) -> ThetaBound:
    c = c_theta(theta)
    return ThetaBound(theta, k1_theta(theta), c, c * c)


def optimize_theta(
    grid_start: float = 0.01,
    grid_end: float = 0.49,
    refinement: int = 1000,
    xtol: float = 1e-6,
) -> ThetaBound:
    """Maximize ``C(theta)^2``: coarse grid, then golden-section refinement."""
    if not 0.0 < grid_start < grid_end < 0.5:
        raise ValueError("need 0 < grid_start < grid_end < 1/2")
    grid = np.linspace(grid_start, grid_end, max(int(refinement), 3))
    i = int(np.argmax(_log_c_squared(grid)))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    objective = lambda t: -float(_log_c_squared(t))  # noqa: E731
    if 0 < i < len(grid) - 1:
        res = minimize_scalar(objective, bracket=(lo, grid[i], hi), method="golden", tol=xtol)
    else:
        # maximum on the edge of the requested range
        res = minimize_scalar(objective, bounds=(lo, hi), method="bounded", options={"xatol": xtol})
    return theta_bound(float(res.x))


# universal lower bound used as a safety check elsewhere
UC_LOWER_BOUND = optimize_theta().c_squared
