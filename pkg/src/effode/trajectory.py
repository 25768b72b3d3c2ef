"""Optimal input paths: integrate the system from zero inputs at zero output.

``solve`` produces the minimal input bundle x(y) on a uniform output grid
(classical fixed-step RK4, final partial step allowed). ``state_at`` reads
the path between grid points with cubic Hermite interpolation, which
matches the integrator's order without re-integrating.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from effode import _kernels
from effode.errors import DimensionError, DivergenceError, ParameterError, RangeError
from effode.model import InputSystem, derivative_field, require_valid

DEFAULT_STEP = 1e-3
DEFAULT_NONNEG_TOLERANCE = 1e-9


@dataclass(frozen=True)
class Trajectory:
    """Solved input path on an increasing output grid.

    ``states[k]`` is the input bundle at output ``grid[k]``;
    ``derivatives[k]`` is the field evaluated at that bundle. Immutable
    after construction.
    """

    grid: np.ndarray
    states: np.ndarray
    derivatives: np.ndarray
    system: InputSystem

    def __post_init__(self):
        for name in ("grid", "states", "derivatives"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        m = self.grid.shape[0]
        if self.states.shape[:1] != (m,) or self.derivatives.shape != self.states.shape:
            raise DimensionError(
                "grid, states and derivatives must have one row per grid point"
            )
        if m > 1 and not (np.diff(self.grid) > 0).all():
            raise ParameterError("trajectory grid must be strictly increasing")

    @property
    def y_max(self) -> float:
        return float(self.grid[-1])


def build_grid(y_max: float, step: float) -> np.ndarray:
    """Uniform grid over [0, y_max] with a final partial step when needed."""
    if not np.isfinite(y_max) or y_max <= 0:
        raise ParameterError(f"y_max must be positive and finite, got {y_max!r}")
    if not np.isfinite(step) or step <= 0 or step > y_max:
        raise ParameterError(f"step must satisfy 0 < step <= y_max, got {step!r}")
    n_full = int(np.floor(y_max / step + 1e-9))
    grid = step * np.arange(n_full + 1, dtype=np.float64)
    if y_max - grid[-1] > 1e-12 * max(1.0, abs(y_max)):
        grid = np.append(grid, y_max)
    else:
        grid[-1] = y_max
    return grid


def integrate(sys: InputSystem, x0, grid) -> tuple[np.ndarray, np.ndarray]:
    """Run the RK4 kernel from state ``x0`` along ``grid``.

    General engine behind ``solve``; also useful for generating
    multi-segment estimation data from arbitrary starting bundles.
    Returns (states, derivatives).
    """
    require_valid(sys)
    grid = np.ascontiguousarray(grid, dtype=np.float64)
    x0 = np.asarray(x0, dtype=np.float64)
    if x0.shape != (sys.dim,):
        raise DimensionError(f"x0 has shape {x0.shape}, expected ({sys.dim},)")
    states = np.empty((grid.shape[0], sys.dim), dtype=np.float64)
    derivatives = np.empty_like(states)
    status = _kernels.rk4_affine(
        sys.intercepts, sys.coefficients, x0, grid, states, derivatives
    )
    if status >= 0:
        raise DivergenceError(
            f"integration diverged near output level {grid[status]:.6g} "
            f"(grid index {status})"
        )
    return states, derivatives


def solve(sys: InputSystem, y_max: float, step: float = DEFAULT_STEP) -> Trajectory:
    """Integrate the system from zero inputs at zero output up to ``y_max``.

    Classical 4th-order Runge-Kutta with uniform steps; the last step is
    shortened so the grid ends exactly at ``y_max``.
    """
    grid = build_grid(y_max, step)
    states, derivatives = integrate(sys, np.zeros(sys.dim), grid)
    return Trajectory(grid=grid, states=states, derivatives=derivatives, system=sys)


def state_at(traj: Trajectory, y: float) -> np.ndarray:
    """Input bundle at output ``y``, cubic Hermite between grid points."""
    grid = traj.grid
    if grid.shape[0] == 0:
        raise RangeError("trajectory has an empty grid")
    scale = max(1.0, abs(traj.y_max))
    if y < grid[0] - 1e-12 * scale or y > grid[-1] + 1e-12 * scale:
        raise RangeError(
            f"output level {y!r} outside the solved interval "
            f"[{grid[0]:.6g}, {grid[-1]:.6g}]"
        )
    y = min(max(y, grid[0]), grid[-1])
    k = int(np.searchsorted(grid, y, side="right")) - 1
    k = min(max(k, 0), grid.shape[0] - 2)
    if y == grid[k]:
        return traj.states[k].copy()
    if y == grid[k + 1]:
        return traj.states[k + 1].copy()
    h = grid[k + 1] - grid[k]
    t = (y - grid[k]) / h
    t2 = t * t
    t3 = t2 * t
    h00 = 2.0 * t3 - 3.0 * t2 + 1.0
    h10 = t3 - 2.0 * t2 + t
    h01 = -2.0 * t3 + 3.0 * t2
    h11 = t3 - t2
    return (
        h00 * traj.states[k]
        + (h10 * h) * traj.derivatives[k]
        + h01 * traj.states[k + 1]
        + (h11 * h) * traj.derivatives[k + 1]
    )


def marginal_cost(sys: InputSystem, x) -> float:
    """Aggregate input growth rate at state ``x`` (currency per output unit)."""
    return float(np.sum(derivative_field(sys, x)))


def check_nonnegativity(
    traj: Trajectory, tolerance: float = DEFAULT_NONNEG_TOLERANCE
) -> list[tuple[int, int]]:
    """List (grid index, input index) pairs where a state drops below -tolerance."""
    if traj.states.size == 0:
        return []
    bad = np.argwhere(traj.states < -tolerance)
    return [(int(i), int(j)) for i, j in bad]


def trajectory_csv(traj: Trajectory) -> str:
    """CSV text with header ``y,x1,..,xn,dx1,..,dxn``, 17 significant digits."""
    n = traj.states.shape[1] if traj.states.ndim == 2 else 0
    header = (
        "y,"
        + ",".join(f"x{i + 1}" for i in range(n))
        + ","
        + ",".join(f"dx{i + 1}" for i in range(n))
    )
    lines = [header]
    for k in range(traj.grid.shape[0]):
        cells = [f"{traj.grid[k]:.17g}"]
        cells += [f"{v:.17g}" for v in traj.states[k]]
        cells += [f"{v:.17g}" for v in traj.derivatives[k]]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
