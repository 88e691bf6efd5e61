"""The Judy Benjamin scenario: fixtures for the built-in benchmark.

A crew is dropped somewhere on a map split into four equiprobable
quadrants: Red territory (R1 = Red second-company area, R2 = Red
headquarters area) and Blue territory (B1, B2).  The only message from
base is a conditional probability report about the Red half.
"""

from __future__ import annotations

from .ce import ConditionalConstraint, ConstraintSet
from .core import Event, FiniteDistribution
from .hier import QUADRANT_SPACE, QUADRANTS

SPACE = QUADRANT_SPACE

PRIOR = FiniteDistribution(SPACE, (0.25, 0.25, 0.25, 0.25))

R1 = Event.of("R1")
R2 = Event.of("R2")
B1 = Event.of("B1")
B2 = Event.of("B2")
RED = Event.of("R1", "R2")
BLUE = Event.of("B1", "B2")
NOT_R2 = Event.of("R1", "B1", "B2")
FULL = Event.of(*QUADRANTS)


def red_report(target: float) -> ConstraintSet:
    """The message Pr(R1 | R) = target as a constraint set."""
    return ConstraintSet(conditional=(ConditionalConstraint(R1, RED, target),))


def blue_of(dist: FiniteDistribution) -> float:
    """Probability of Blue territory under a quadrant distribution."""
    return dist.prob("B1") + dist.prob("B2")
