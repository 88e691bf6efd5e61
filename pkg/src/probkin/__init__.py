"""probkin: probability kinematics with the Judy Benjamin benchmark.

Four update rules for the same piece of evidence, side by side:
strict conditioning, Jeffrey's rule, minimum cross-entropy projection,
and second-order band conditioning with the Trust principle.
"""

from .core import (
    Event,
    FiniteDistribution,
    OutcomeSpace,
    Partition,
    condition,
    conditional_probability,
    event_probability,
    jeffrey_update,
    kl_divergence,
)
from .ce import (
    CeSolution,
    ConditionalConstraint,
    ConstraintSet,
    LinearConstraint,
    binary_entropy,
    ce_update,
    compile_conditional,
    jb_ce_blue,
)
from .errors import (
    BadPartition,
    Infeasible,
    InfeasibleWeight,
    NoAcceptedSamples,
    NotAbsolutelyContinuous,
    NotConverged,
    ProbkinError,
    UndefinedConditional,
    ZeroConditioningEvent,
)
from .hier import (
    HQBelief,
    McConfig,
    McEstimate,
    MessageBand,
    SecondOrderPrior,
    blue_prob,
    cdf_blue,
    cdf_cond_red,
    cond_red,
    density_blue,
    exact_posterior_quadrants,
    expected_blue_given_message,
    independence_check,
    independence_deviation,
    joint_cdf,
    ks_statistic,
    mc_band_report,
    mc_posterior_quadrants,
    sample_prior,
    sample_prior_array,
    trust_expectation,
)

__version__ = "0.1.0"

__all__ = [
    "BadPartition",
    "CeSolution",
    "ConditionalConstraint",
    "ConstraintSet",
    "Event",
    "FiniteDistribution",
    "HQBelief",
    "Infeasible",
    "InfeasibleWeight",
    "LinearConstraint",
    "McConfig",
    "McEstimate",
    "MessageBand",
    "NoAcceptedSamples",
    "NotAbsolutelyContinuous",
    "NotConverged",
    "OutcomeSpace",
    "Partition",
    "ProbkinError",
    "SecondOrderPrior",
    "UndefinedConditional",
    "ZeroConditioningEvent",
    "binary_entropy",
    "blue_prob",
    "cdf_blue",
    "cdf_cond_red",
    "ce_update",
    "compile_conditional",
    "cond_red",
    "condition",
    "conditional_probability",
    "density_blue",
    "event_probability",
    "exact_posterior_quadrants",
    "expected_blue_given_message",
    "independence_check",
    "independence_deviation",
    "jb_ce_blue",
    "jeffrey_update",
    "joint_cdf",
    "kl_divergence",
    "ks_statistic",
    "mc_band_report",
    "mc_posterior_quadrants",
    "sample_prior",
    "sample_prior_array",
    "trust_expectation",
    "__version__",
]
