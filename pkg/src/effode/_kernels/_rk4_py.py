"""Pure-Python twin of the compiled RK4 kernel.

Used when the extension module is unavailable or when the environment
variable ``EFFODE_BACKEND=python`` forces it. Same signatures, same grid
semantics, same divergence reporting.
"""

import numpy as np


def affine_field(intercepts, coefficients, x):
    """Return ``intercepts + coefficients @ x`` for one state vector."""
    b = np.asarray(intercepts, dtype=np.float64)
    A = np.asarray(coefficients, dtype=np.float64)
    xv = np.asarray(x, dtype=np.float64)
    return b + A @ xv


def rk4_affine(intercepts, coefficients, x0, grid, states, derivatives):
    """Classical RK4 sweep along ``grid``; fills ``states`` and ``derivatives``.

    Returns -1 on success, otherwise the grid index at which the state
    stopped being finite. Row k of ``derivatives`` is computed with the
    exact expression used by ``affine_field`` so the two agree bitwise.
    """
    b = np.asarray(intercepts, dtype=np.float64)
    A = np.asarray(coefficients, dtype=np.float64)
    x = np.array(x0, dtype=np.float64)
    m = len(grid)
    if m == 0:
        return -1
    states[0] = x
    derivatives[0] = b + A @ x
    for k in range(m - 1):
        h = grid[k + 1] - grid[k]
        k1 = b + A @ x
        k2 = b + A @ (x + (0.5 * h) * k1)
        k3 = b + A @ (x + (0.5 * h) * k2)
        k4 = b + A @ (x + h * k3)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.isfinite(x).all():
            return k + 1
        states[k + 1] = x
        derivatives[k + 1] = b + A @ x
    return -1
