"""Exception types shared across the package.

Each error marks a distinct failure mode that callers (and the CLI exit-code
mapping) need to tell apart; none of them should ever surface as a bare
NaN or a silent wrong answer.
"""


class ProbkinError(Exception):
    """Base class for all package-specific errors."""


class ZeroConditioningEvent(ProbkinError):
    """Conditioning on an event of probability zero."""


class InfeasibleWeight(ProbkinError):
    """A Jeffrey weight puts positive mass on a cell of prior probability zero."""


class BadPartition(ProbkinError):
    """Cells overlap or fail to cover the outcome space."""


class NotAbsolutelyContinuous(ProbkinError):
    """KL divergence requested for q not absolutely continuous w.r.t. p."""


class Infeasible(ProbkinError):
    """No distribution on the prior's support satisfies the constraints."""


class NotConverged(ProbkinError):
    """Iteration budget exhausted with the constraint residual above tolerance."""


class UndefinedConditional(ProbkinError):
    """Conditional probability with a zero-probability conditioning event."""


class NoAcceptedSamples(ProbkinError):
    """Rejection conditioning accepted no samples (band too narrow for the budget)."""
