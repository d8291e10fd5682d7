"""Exception hierarchy shared across the toolkit.

Every failure mode raised by the numerical layers derives from
:class:`ComputationError`, so callers (CLI, service) can map any of them to
an "invalid input / failed computation" response in one place.
"""


class ComputationError(Exception):
    """Base class for all toolkit errors."""


class InvalidParam(ComputationError):
    """A parameter lies outside the admissible range of the operation."""


class InvalidDomain(ComputationError):
    """Integration domain is empty or reversed (a >= b)."""


class NonConvergent(ComputationError):
    """Adaptive integration exhausted its subdivision budget."""


class NonFinite(ComputationError):
    """An evaluation produced NaN or infinity."""


class BelowThreshold(ComputationError):
    """Decay-rate parameter at or below the value where the majorant integral diverges."""


class AboveThreshold(ComputationError):
    """Growth parameter at or above the value where the exponential bound diverges."""


class NegativeValues(ComputationError):
    """Input function has negative values; the inequality hypotheses require u >= 0."""


class DegenerateInput(ComputationError):
    """Input is numerically zero where a positive quantity is required."""


class NotConverged(ComputationError):
    """Iterative solver stopped before reaching its tolerances."""


class StepFailure(ComputationError):
    """Adaptive ODE integrator could not complete a step."""


class SlopeSingularity(ComputationError):
    """Trajectory slope reached zero where the equation degenerates (exponent below 2)."""


class Inadmissible(ComputationError):
    """Disk data violates the admissibility condition for the constrained problem."""


class PoleSingularity(ComputationError):
    """Stereographic projection evaluated at (or too close to) the north pole."""


class SupportViolation(ComputationError):
    """Function does not vanish on the spherical cap excluded by the chart."""
