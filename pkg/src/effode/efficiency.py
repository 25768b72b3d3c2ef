"""Efficiency scores for observed input bundles.

Each observation is scored by where it sits on the ray from the ideal
bundle through itself: distance zero scores 1, reaching the worst
collinear feasible point scores 0, and everything in between scores

    efficiency = 1 - d_j / d_w

with ``d_j`` the observation's Euclidean distance to the ideal point and
``d_w`` the worst point's distance. Because all inputs share one currency
unit, equal distances mean equal improvement effort, so the score is
comparable across observations.

Observations farther out than the worst point have no defined score; in
``strict`` mode they raise, in ``clamp`` mode they score 0 and are
flagged. An observation exactly at the ideal point scores 1 without
casting a ray (the limit along every direction); its reported ``d_w`` is
the nearest axis-direction exit so the record stays finite.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from effode.errors import (
    AnchoringError,
    BeyondWorstPointError,
    DimensionError,
    EffodeError,
    MembershipError,
    NonFiniteError,
    ParameterError,
    RangeError,
    ValidationError,
)
from effode.model import InputSystem
from effode.region import FeasibleRegion, RegionTemplate, contains, ray_exit_info
from effode.trajectory import Trajectory, state_at

_SAME_POINT = 1e-12
_STRICT_SLACK = 1e-9

MODES = ("strict", "clamp")


@dataclass(frozen=True)
class Observation:
    """One decision-making unit: an output level and its input bundle."""

    output: float
    inputs: np.ndarray
    label: Optional[str] = None

    def __post_init__(self):
        inputs = np.array(self.inputs, dtype=np.float64)
        inputs.setflags(write=False)
        object.__setattr__(self, "inputs", inputs)
        if not np.isfinite(self.output) or self.output < 0:
            raise ValidationError(
                f"observation output must be finite and non-negative, got {self.output!r}"
            )
        if not np.isfinite(inputs).all():
            raise NonFiniteError("observation inputs contain non-finite entries")
        if (inputs < 0).any():
            raise ValidationError(
                "observation inputs must be non-negative (feasibility of sampled firms)"
            )


@dataclass(frozen=True)
class Sample:
    """Ordered collection of observations sharing one input dimension."""

    observations: tuple[Observation, ...]

    def __post_init__(self):
        object.__setattr__(self, "observations", tuple(self.observations))
        dims = {obs.inputs.shape[0] for obs in self.observations}
        if len(dims) > 1:
            raise DimensionError(f"observations mix input dimensions {sorted(dims)}")

    @property
    def dim(self) -> int:
        if not self.observations:
            return 0
        return self.observations[0].inputs.shape[0]

    def __len__(self) -> int:
        return len(self.observations)

    def __iter__(self):
        return iter(self.observations)


@dataclass(frozen=True)
class ScoreBreakdown:
    """Distances, worst point, and the resulting efficiency for one observation."""

    d_j: float
    d_w: float
    worst_point: np.ndarray
    efficiency: float
    anchor: np.ndarray
    clamped: bool = False


@dataclass(frozen=True)
class ScoreFailure:
    """Per-observation failure record from batch scoring."""

    kind: str
    message: str


ScoreOutcome = Union[ScoreBreakdown, ScoreFailure]


def distance(a, b) -> float:
    """Euclidean distance between two input bundles."""
    av = np.asarray(a, dtype=np.float64)
    bv = np.asarray(b, dtype=np.float64)
    if av.shape != bv.shape:
        raise DimensionError(f"shape mismatch {av.shape} vs {bv.shape}")
    return float(np.linalg.norm(av - bv))


def _check_mode(mode: str) -> str:
    if mode not in MODES:
        raise ParameterError(f"mode must be one of {MODES}, got {mode!r}")
    return mode


def _axis_fallback(region: FeasibleRegion, x_star: np.ndarray):
    """Nearest boundary hit along the coordinate axes, for the zero-direction case."""
    n = x_star.shape[0]
    best_d = np.inf
    best_point = x_star.copy()
    for i in range(n):
        for sign in (1.0, -1.0):
            probe = x_star.copy()
            probe[i] += sign
            try:
                info = ray_exit_info(region, x_star, probe)
            except EffodeError:
                continue
            d = distance(info.point, x_star)
            if 0.0 < d < best_d:
                best_d = d
                best_point = info.point
    if not np.isfinite(best_d):
        best_d = 0.0
    return best_d, best_point


def score(
    region: FeasibleRegion, x_star, obs: Observation, mode: str = "strict"
) -> ScoreBreakdown:
    """Score one observation against the ideal bundle ``x_star``.

    ``region`` must contain ``x_star``. In strict mode the observation
    must also lie inside the region and not beyond the worst collinear
    point; clamp mode scores such observations 0 and flags them.
    """
    _check_mode(mode)
    x_star = np.asarray(x_star, dtype=np.float64)
    if x_star.shape != obs.inputs.shape:
        raise DimensionError(
            f"anchor shape {x_star.shape} != observation shape {obs.inputs.shape}"
        )
    if not contains(region, x_star):
        raise AnchoringError("ideal point lies outside the feasible region")

    if float(np.abs(obs.inputs - x_star).max()) <= _SAME_POINT:
        d_w, worst = _axis_fallback(region, x_star)
        return ScoreBreakdown(
            d_j=0.0,
            d_w=d_w,
            worst_point=worst,
            efficiency=1.0,
            anchor=x_star.copy(),
        )

    if mode == "strict" and not contains(region, obs.inputs):
        raise MembershipError(
            "observation lies outside the feasible region (strict mode)"
        )

    info = ray_exit_info(region, x_star, obs.inputs)
    d_j = distance(obs.inputs, x_star)
    d_w = distance(info.point, x_star)

    if d_j <= d_w * (1.0 + _STRICT_SLACK):
        efficiency = max(0.0, 1.0 - d_j / d_w)
        return ScoreBreakdown(
            d_j=d_j,
            d_w=d_w,
            worst_point=info.point,
            efficiency=efficiency,
            anchor=x_star.copy(),
        )
    if mode == "strict":
        raise BeyondWorstPointError(
            f"observation beyond worst collinear point: d_j {d_j:.6g} > d_w {d_w:.6g}"
        )
    return ScoreBreakdown(
        d_j=d_j,
        d_w=d_w,
        worst_point=info.point,
        efficiency=0.0,
        anchor=x_star.copy(),
        clamped=True,
    )


def score_sample(
    region: FeasibleRegion, x_star, sample: Sample, mode: str = "strict"
) -> list[tuple[str, ScoreOutcome]]:
    """Score every observation, isolating per-row failures.

    Order is preserved; each element is (label, ScoreBreakdown) or
    (label, ScoreFailure). A row's failure never aborts the batch.
    """
    _check_mode(mode)
    results: list[tuple[str, ScoreOutcome]] = []
    for i, obs in enumerate(sample):
        label = obs.label if obs.label is not None else str(i + 1)
        try:
            results.append((label, score(region, x_star, obs, mode)))
        except EffodeError as exc:
            results.append((label, ScoreFailure(kind=type(exc).__name__, message=str(exc))))
    return results


def score_at_output_level(
    sys: InputSystem,
    traj: Trajectory,
    template: RegionTemplate,
    obs: Observation,
    mode: str = "strict",
) -> ScoreBreakdown:
    """Score against the ideal bundle for the observation's own output level.

    The anchor is the solved path read at ``obs.output``; the region is the
    template anchored there (lower bounds at the anchor plus the template's
    outer constraints).
    """
    _check_mode(mode)
    grid = traj.grid
    if obs.output < grid[0] or obs.output > grid[-1]:
        raise RangeError(
            f"observation output {obs.output!r} outside the solved interval "
            f"[{grid[0]:.6g}, {grid[-1]:.6g}]"
        )
    anchor = state_at(traj, obs.output)
    region = template.anchored_at(anchor)
    return score(region, anchor, obs, mode)
