"""The affine input-demand system that drives everything else.

An ``InputSystem`` says how fast each input must grow per unit of extra
output, as an affine function of the current input bundle:

    rate_i(x) = intercepts[i] + sum_j coefficients[i, j] * x[j]

All inputs are denominated in one common currency unit, so there are no
per-input weights anywhere in the model.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from effode import _kernels
from effode.errors import DimensionError, NonFiniteError, ValidationError


def _as_readonly(a, dtype=np.float64):
    out = np.array(a, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class InputSystem:
    """Affine model of the productive technology.

    Parameters
    ----------
    dim : int
        Number of inputs n.
    intercepts : (n,) array
        Base growth rate of each input (currency per unit of output).
    coefficients : (n, n) array
        Cross-input trade-off rates (per currency unit).

    Instances are immutable after construction and safe to share across
    threads for read-only evaluation.
    """

    dim: int
    intercepts: np.ndarray
    coefficients: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "intercepts", _as_readonly(self.intercepts))
        object.__setattr__(self, "coefficients", _as_readonly(self.coefficients))


def validate(sys: InputSystem) -> list[str]:
    """Check the system invariants; return a list of violations (empty if valid)."""
    problems = []
    if not isinstance(sys.dim, (int, np.integer)) or sys.dim < 1:
        problems.append(f"dim must be a positive integer, got {sys.dim!r}")
        return problems
    n = int(sys.dim)
    if sys.intercepts.shape != (n,):
        problems.append(
            f"intercepts has shape {sys.intercepts.shape}, expected ({n},)"
        )
    elif not np.isfinite(sys.intercepts).all():
        problems.append("intercepts contain non-finite entries")
    if sys.coefficients.shape != (n, n):
        problems.append(
            f"coefficients has shape {sys.coefficients.shape}, expected ({n}, {n})"
        )
    elif not np.isfinite(sys.coefficients).all():
        problems.append("coefficients contain non-finite entries")
    return problems


def require_valid(sys: InputSystem) -> InputSystem:
    """Raise ``ValidationError`` if the system violates its invariants."""
    problems = validate(sys)
    if problems:
        raise ValidationError("invalid input system: " + "; ".join(problems))
    return sys


def derivative_field(sys: InputSystem, x) -> np.ndarray:
    """Evaluate the input growth rates at state ``x``.

    Parameters
    ----------
    sys : InputSystem
    x : (n,) array of current input levels.

    Returns
    -------
    (n,) array, entry i equal to ``intercepts[i] + coefficients[i] @ x``.
    """
    xv = np.asarray(x, dtype=np.float64)
    if xv.shape != (sys.dim,):
        raise DimensionError(
            f"state has shape {xv.shape}, expected ({sys.dim},)"
        )
    if not np.isfinite(xv).all():
        raise NonFiniteError("state contains non-finite entries")
    return _kernels.affine_field(sys.intercepts, sys.coefficients, xv)
