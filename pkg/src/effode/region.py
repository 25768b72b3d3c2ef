"""Feasible input regions and worst-point ray casting.

A region is an intersection of simple constraints:

* ``LowerBound(i, b)``     keeps ``x[i] >= b``;
* ``Ball(center, radius)`` keeps ``|x - center| <= radius``;
* ``MarginalCutoff(sys, eps)`` keeps every input growth rate positive and
  the summed reciprocal rates above ``eps`` (the marginal-productivity
  cutoff: points where extra input buys almost no extra output are
  excluded).

``ray_exit`` walks the ray from an interior anchor through a second point
until it leaves the region. Lower bounds and balls exit in closed form;
the cutoff is bracketed and bisected on the membership predicate. The
minimum of the per-constraint exit parameters is the exit, which is the
worst collinear input bundle used as the zero-efficiency reference.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from effode import _kernels
from effode.errors import (
    AnchoringError,
    DimensionError,
    DirectionError,
    ParameterError,
    RegionConstructionError,
    UnboundedRayError,
)
from effode.model import InputSystem, derivative_field

DEFAULT_EPSILON = 1e-6
_CUTOFF_BISECT_TOL = 1e-9
_DEGENERATE_DIRECTION = 1e-12


@dataclass(frozen=True)
class LowerBound:
    index: int
    bound: float

    def __post_init__(self):
        if self.index < 0:
            raise ParameterError(f"lower bound index must be >= 0, got {self.index}")


@dataclass(frozen=True)
class Ball:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.array(self.center, dtype=np.float64)
        c.setflags(write=False)
        object.__setattr__(self, "center", c)
        if not np.isfinite(self.radius) or self.radius <= 0:
            raise ParameterError(f"ball radius must be positive, got {self.radius!r}")


@dataclass(frozen=True)
class MarginalCutoff:
    system: InputSystem
    epsilon: float

    def __post_init__(self):
        if not np.isfinite(self.epsilon) or self.epsilon <= 0:
            raise ParameterError(f"epsilon must be positive, got {self.epsilon!r}")


Constraint = Union[LowerBound, Ball, MarginalCutoff]


@dataclass(frozen=True)
class FeasibleRegion:
    """Ordered intersection of constraints; immutable after construction."""

    constraints: tuple[Constraint, ...]

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        if not self.constraints:
            raise ParameterError("a feasible region needs at least one constraint")


@dataclass(frozen=True)
class RegionTemplate:
    """Outer constraints to combine with lower bounds anchored at a point.

    ``anchored_at(x)`` produces the region used for per-output-level
    scoring: one lower bound per input at the anchor bundle, plus the
    template's outer constraints (a ball, a cutoff, or both).
    """

    outer: tuple[Constraint, ...]

    def __post_init__(self):
        object.__setattr__(self, "outer", tuple(self.outer))

    def anchored_at(self, anchor) -> FeasibleRegion:
        anchor = np.asarray(anchor, dtype=np.float64)
        bounds = tuple(LowerBound(i, float(anchor[i])) for i in range(anchor.shape[0]))
        return FeasibleRegion(bounds + self.outer)


def _cutoff_ok(cut: MarginalCutoff, x: np.ndarray) -> bool:
    field = _kernels.affine_field(cut.system.intercepts, cut.system.coefficients, x)
    if not (field > 0).all():
        return False
    return float(np.sum(1.0 / field)) > cut.epsilon


def contains(region: FeasibleRegion, x) -> bool:
    """True iff every constraint holds at ``x`` (boundaries included)."""
    xv = np.asarray(x, dtype=np.float64)
    if xv.ndim != 1:
        raise DimensionError(f"point must be a vector, got shape {xv.shape}")
    n = xv.shape[0]
    for c in region.constraints:
        if isinstance(c, LowerBound):
            if c.index >= n:
                raise DimensionError(
                    f"lower bound references input {c.index + 1} but the point has {n}"
                )
            if xv[c.index] < c.bound:
                return False
        elif isinstance(c, Ball):
            if c.center.shape != (n,):
                raise DimensionError(
                    f"ball center has shape {c.center.shape}, point has shape ({n},)"
                )
            if float(np.linalg.norm(xv - c.center)) > c.radius:
                return False
        else:
            if c.system.dim != n:
                raise DimensionError(
                    f"cutoff system has dim {c.system.dim}, point has shape ({n},)"
                )
            if not _cutoff_ok(c, xv):
                return False
    return True


def _lower_bound_exit(c: LowerBound, origin, direction) -> float:
    d = direction[c.index]
    if d >= 0:
        return np.inf
    return max((c.bound - origin[c.index]) / d, 0.0)


def _ball_exit(c: Ball, origin, direction) -> float:
    # |origin + t*direction - center|^2 = radius^2, origin inside so the
    # constant term is <= 0 and the positive root always exists
    rel = origin - c.center
    a = float(direction @ direction)
    b = float(direction @ rel)
    g = float(rel @ rel) - c.radius * c.radius
    disc = b * b - a * g
    return (-b + np.sqrt(max(disc, 0.0))) / a


def _cutoff_exit(cut: MarginalCutoff, origin, direction, cap: float) -> float:
    def ok(t: float) -> bool:
        return _cutoff_ok(cut, origin + t * direction)

    if np.isfinite(cap):
        if ok(cap):
            return np.inf
        lo, hi = 0.0, cap
    else:
        scale = max(
            1.0,
            float(np.linalg.norm(origin)) / float(np.linalg.norm(direction)),
        )
        t = scale
        hi = None
        for _ in range(200):
            if not ok(t):
                hi = t
                break
            t *= 2.0
        if hi is None:
            return np.inf
        lo = 0.0 if hi == scale else hi / 2.0
    while hi - lo > _CUTOFF_BISECT_TOL * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class RayExit:
    point: np.ndarray
    t: float
    tight: tuple[int, ...]


def ray_exit_info(region: FeasibleRegion, origin, through) -> RayExit:
    """Exit point, parameter, and indices of the constraints that bind there."""
    origin = np.asarray(origin, dtype=np.float64)
    through = np.asarray(through, dtype=np.float64)
    if origin.shape != through.shape:
        raise DimensionError(
            f"origin shape {origin.shape} != through shape {through.shape}"
        )
    if not contains(region, origin):
        raise AnchoringError("ray origin lies outside the feasible region")
    direction = through - origin
    if float(np.abs(direction).max()) <= _DEGENERATE_DIRECTION:
        raise DirectionError("through-point coincides with the ray origin")

    exits = []
    closed_min = np.inf
    for c in region.constraints:
        if isinstance(c, LowerBound):
            t = _lower_bound_exit(c, origin, direction)
            closed_min = min(closed_min, t)
        elif isinstance(c, Ball):
            t = _ball_exit(c, origin, direction)
            closed_min = min(closed_min, t)
        else:
            t = None
        exits.append(t)
    for i, c in enumerate(region.constraints):
        if isinstance(c, MarginalCutoff):
            exits[i] = _cutoff_exit(c, origin, direction, closed_min)

    t_max = min(exits)
    if not np.isfinite(t_max):
        raise UnboundedRayError("ray never leaves the feasible region")
    point = origin + t_max * direction
    tol = 1e-7 * max(1.0, abs(t_max))
    tight = tuple(i for i, t in enumerate(exits) if np.isfinite(t) and t - t_max <= tol)
    return RayExit(point=point, t=float(t_max), tight=tight)


def ray_exit(region: FeasibleRegion, origin, through) -> np.ndarray:
    """Worst collinear point: where the ray from ``origin`` through
    ``through`` leaves the region."""
    return ray_exit_info(region, origin, through).point


def epsilon_region(sys: InputSystem, anchor, epsilon: float = DEFAULT_EPSILON) -> FeasibleRegion:
    """Model-derived region: lower bounds at the anchor plus the cutoff.

    The anchor itself must pass the cutoff (all growth rates positive,
    summed reciprocals above ``epsilon``), otherwise the region could not
    contain its own reference point.
    """
    anchor = np.asarray(anchor, dtype=np.float64)
    field = derivative_field(sys, anchor)
    cut = MarginalCutoff(sys, epsilon)
    if not (field > 0).all() or float(np.sum(1.0 / field)) <= epsilon:
        raise RegionConstructionError(
            "anchor violates the marginal-productivity cutoff: growth rates "
            f"{np.array2string(field, precision=6)} with epsilon {epsilon:.6g}"
        )
    bounds = tuple(LowerBound(i, float(anchor[i])) for i in range(sys.dim))
    return FeasibleRegion(bounds + (cut,))
