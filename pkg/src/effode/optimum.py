"""Profit evaluation and the ideal operating point.

Profit at output y is revenue minus the accumulated input bill,
``J(y) = price * y - sum_i x_i(y)``. With marginal cost strictly
increasing, the profit-maximizing output solves
``marginal_cost(x(y)) = price`` and is located by bisection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from effode.errors import (
    BracketError,
    NoInteriorOptimumError,
    NonMonotoneMarginalError,
    ParameterError,
)
from effode.model import InputSystem
from effode.trajectory import DEFAULT_STEP, Trajectory, marginal_cost, solve, state_at

BISECTION_BRACKET_TOLERANCE = 1e-10


@dataclass(frozen=True)
class ProfitSpec:
    """Output price (currency per unit of output)."""

    price: float

    def __post_init__(self):
        if not np.isfinite(self.price) or self.price <= 0:
            raise ParameterError(f"price must be positive and finite, got {self.price!r}")


@dataclass(frozen=True)
class OptimumResult:
    """Profit-maximizing output, its input bundle, and diagnostics."""

    y_star: float
    x_star: np.ndarray
    profit: float
    marginal_at_star: float


def profit(sys: InputSystem, spec: ProfitSpec, y: float, traj: Trajectory) -> float:
    """Profit at output ``y`` along the solved optimal path."""
    x = state_at(traj, y)
    return spec.price * y - float(np.sum(x))


def find_optimum(
    sys: InputSystem,
    spec: ProfitSpec,
    y_max: float,
    step: float = DEFAULT_STEP,
) -> OptimumResult:
    """Locate the output level where marginal cost meets the price.

    Solves the trajectory up to ``y_max``, verifies that marginal cost is
    strictly increasing on the grid (the single-optimum condition), then
    bisects ``marginal_cost(x(y)) = price``.

    Raises
    ------
    NoInteriorOptimumError
        If the price does not exceed the startup marginal cost at y = 0.
    NonMonotoneMarginalError
        If marginal cost is not strictly increasing on the grid.
    BracketError
        If marginal cost never exceeds the price by ``y_max``.
    """
    traj = solve(sys, y_max, step)
    m_grid = traj.derivatives.sum(axis=1)

    price = spec.price
    if price <= m_grid[0]:
        raise NoInteriorOptimumError(
            "no interior optimum (price below startup marginal cost): "
            f"price {price:.6g} <= marginal cost {m_grid[0]:.6g} at y = 0"
        )
    if not (np.diff(m_grid) > 0).all():
        raise NonMonotoneMarginalError(
            "non-monotone marginal cost: singleness assumption violated"
        )
    if m_grid[-1] <= price:
        raise BracketError(
            f"bracket exhausted: marginal cost {m_grid[-1]:.6g} at "
            f"y_max = {y_max:.6g} never exceeds price {price:.6g}"
        )

    j = int(np.searchsorted(m_grid, price, side="right"))
    lo = traj.grid[j - 1]
    hi = traj.grid[j]
    while hi - lo > BISECTION_BRACKET_TOLERANCE:
        mid = 0.5 * (lo + hi)
        if marginal_cost(sys, state_at(traj, mid)) < price:
            lo = mid
        else:
            hi = mid
    y_star = 0.5 * (lo + hi)
    x_star = state_at(traj, y_star)
    return OptimumResult(
        y_star=float(y_star),
        x_star=x_star,
        profit=profit(sys, spec, y_star, traj),
        marginal_at_star=marginal_cost(sys, x_star),
    )
