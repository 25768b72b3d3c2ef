"""effode: productive-efficiency scoring without a sample benchmark.

The technology is modeled as an affine system of input growth rates per
unit of output. Solving it from zero inputs gives the cheapest input
bundle for every output level; a price picks the profit-maximizing
bundle; observed firms are scored by how far they sit from that ideal
bundle relative to the worst feasible point on the same ray.

The integration kernel is compiled (Cython) when available and falls
back to pure Python otherwise; ``effode.BACKEND`` names the active one.
"""

from effode._kernels import BACKEND
from effode.efficiency import (
    Observation,
    Sample,
    ScoreBreakdown,
    ScoreFailure,
    distance,
    score,
    score_at_output_level,
    score_sample,
)
from effode.errors import EffodeError, NumericalError, ValidationError
from effode.estimation import FitResult, estimate_derivatives, fit
from effode.model import InputSystem, derivative_field, validate
from effode.optimum import OptimumResult, ProfitSpec, find_optimum, profit
from effode.region import (
    Ball,
    FeasibleRegion,
    LowerBound,
    MarginalCutoff,
    RegionTemplate,
    contains,
    epsilon_region,
    ray_exit,
    ray_exit_info,
)
from effode.trajectory import (
    Trajectory,
    check_nonnegativity,
    integrate,
    marginal_cost,
    solve,
    state_at,
    trajectory_csv,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Ball",
    "EffodeError",
    "FeasibleRegion",
    "FitResult",
    "InputSystem",
    "LowerBound",
    "MarginalCutoff",
    "NumericalError",
    "Observation",
    "OptimumResult",
    "ProfitSpec",
    "RegionTemplate",
    "Sample",
    "ScoreBreakdown",
    "ScoreFailure",
    "Trajectory",
    "ValidationError",
    "check_nonnegativity",
    "contains",
    "derivative_field",
    "distance",
    "epsilon_region",
    "estimate_derivatives",
    "find_optimum",
    "fit",
    "integrate",
    "marginal_cost",
    "profit",
    "ray_exit",
    "ray_exit_info",
    "score",
    "score_at_output_level",
    "score_sample",
    "solve",
    "state_at",
    "trajectory_csv",
    "validate",
]
