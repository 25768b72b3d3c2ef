"""Exception hierarchy shared by all effode modules.

Two branches matter for exit-code mapping in the CLI: ``ValidationError``
(bad inputs, schemas, preconditions on arguments) and ``NumericalError``
(conditions discovered during computation, such as divergence or an
exhausted root bracket).
"""


class EffodeError(Exception):
    """Base class for all errors raised by effode."""


class ValidationError(EffodeError):
    """Invalid argument, file content, or violated call precondition."""


class DimensionError(ValidationError):
    """Vector or matrix shape does not match the system dimension."""


class NonFiniteError(ValidationError):
    """NaN or infinity where a finite real is required."""


class ParameterError(ValidationError):
    """Scalar parameter outside its admissible range."""


class RangeError(ValidationError):
    """Query point outside the solved output interval."""


class OrderingError(ValidationError):
    """Sample output levels are not strictly increasing."""


class SampleSizeError(ValidationError):
    """Too few observations for the requested operation."""


class SchemaError(ValidationError):
    """Model file or CSV content does not match the documented schema."""


class DirectionError(ValidationError):
    """Ray direction is degenerate (through-point coincides with origin)."""


class AnchoringError(ValidationError):
    """Scoring anchor lies outside the feasible region."""


class MembershipError(ValidationError):
    """Observation lies outside the feasible region in strict mode."""


class RegionConstructionError(ValidationError):
    """Requested feasible region cannot contain its own anchor."""


class NumericalError(EffodeError):
    """Condition detected during numerical computation."""


class DivergenceError(NumericalError):
    """State stopped being finite during integration."""


class UnboundedRayError(NumericalError):
    """Ray never leaves the feasible region."""


class NoInteriorOptimumError(NumericalError):
    """Price does not exceed the startup marginal cost."""


class NonMonotoneMarginalError(NumericalError):
    """Marginal cost is not strictly increasing on the solved grid."""


class BracketError(NumericalError):
    """Root bracket was exhausted before a sign change appeared."""


class BeyondWorstPointError(NumericalError):
    """Observation lies farther from the anchor than the worst collinear point."""


class CollinearityError(NumericalError):
    """Regression design matrix is rank deficient."""
