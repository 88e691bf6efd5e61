"""Finite probability distributions and the classical update rules.

Distributions live on a small labeled outcome space and are immutable;
every update rule is a pure function returning a fresh distribution.
Label order is significant and preserved by every operation so that
serialized output is deterministic.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    BadPartition,
    InfeasibleWeight,
    NotAbsolutelyContinuous,
    ZeroConditioningEvent,
)

#: tolerance for "weights sum to one" validity checks
PROB_TOL = 1e-12


@dataclass(frozen=True)
class OutcomeSpace:
    """An ordered, finite set of distinct outcome labels."""

    labels: tuple[str, ...]

    def __init__(self, labels: Iterable[str]):
        labels = tuple(labels)
        if not labels:
            raise ValueError("outcome space must be non-empty")
        if len(set(labels)) != len(labels):
            raise ValueError(f"outcome labels must be distinct, got {labels!r}")
        object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return len(self.labels)

    def __contains__(self, label: str) -> bool:
        return label in self.labels

    def index(self, label: str) -> int:
        return self.labels.index(label)


@dataclass(frozen=True)
class Event:
    """A subset of outcome labels.

    Events are not bound to a space; operations validate membership
    against the distribution's space at call time.
    """

    members: frozenset[str]

    def __init__(self, members: Iterable[str]):
        object.__setattr__(self, "members", frozenset(members))

    @classmethod
    def of(cls, *labels: str) -> "Event":
        return cls(labels)

    def complement(self, space: OutcomeSpace) -> "Event":
        return Event(l for l in space.labels if l not in self.members)

    def __contains__(self, label: str) -> bool:
        return label in self.members


@dataclass(frozen=True)
class Partition:
    """A sequence of events meant to tile an outcome space.

    Disjointness and coverage depend on the space, so they are checked by
    the operations that consume the partition, not at construction.
    """

    cells: tuple[Event, ...]

    def __init__(self, cells: Iterable[Event | Iterable[str]]):
        norm = tuple(c if isinstance(c, Event) else Event(c) for c in cells)
        object.__setattr__(self, "cells", norm)

    def validate_for(self, space: OutcomeSpace) -> None:
        """Raise BadPartition unless the cells tile ``space`` exactly."""
        seen: set[str] = set()
        for cell in self.cells:
            extra = cell.members - set(space.labels)
            if extra:
                raise BadPartition(f"cell members {sorted(extra)} not in space")
            if cell.members & seen:
                raise BadPartition("partition cells overlap")
            seen |= cell.members
        if seen != set(space.labels):
            raise BadPartition("partition cells do not cover the space")


@dataclass(frozen=True)
class FiniteDistribution:
    """Probabilities over a labeled finite outcome space."""

    space: OutcomeSpace
    probs: tuple[float, ...] = field(compare=False)

    def __init__(self, space: OutcomeSpace, probs: Sequence[float]):
        probs = tuple(float(p) for p in probs)
        if len(probs) != len(space):
            raise ValueError(
                f"{len(probs)} probabilities for {len(space)} outcomes"
            )
        if any(p < 0.0 for p in probs):
            raise ValueError(f"negative probability in {probs!r}")
        total = math.fsum(probs)
        if abs(total - 1.0) > PROB_TOL:
            raise ValueError(f"probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def uniform(cls, space: OutcomeSpace) -> "FiniteDistribution":
        n = len(space)
        return cls(space, (1.0 / n,) * n)

    @classmethod
    def from_dict(cls, mapping: dict[str, float]) -> "FiniteDistribution":
        space = OutcomeSpace(mapping.keys())
        return cls(space, tuple(mapping.values()))

    def prob(self, label: str) -> float:
        return self.probs[self.space.index(label)]

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.space.labels, self.probs))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.probs, dtype=np.float64)

    # --- JSON wire format: {"labels": [...], "probs": [...]} ---

    def to_json_obj(self) -> dict:
        return {"labels": list(self.space.labels), "probs": list(self.probs)}

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json_obj(cls, obj: dict) -> "FiniteDistribution":
        try:
            labels = obj["labels"]
            probs = obj["probs"]
        except (TypeError, KeyError) as exc:
            raise ValueError(f"distribution JSON needs 'labels' and 'probs': {exc}")
        return cls(OutcomeSpace(labels), probs)

    @classmethod
    def from_json(cls, text: str) -> "FiniteDistribution":
        return cls.from_json_obj(json.loads(text))


def _check_event(p: FiniteDistribution, T: Event) -> None:
    extra = T.members - set(p.space.labels)
    if extra:
        raise ValueError(f"event members {sorted(extra)} not in space")


def event_probability(p: FiniteDistribution, T: Event) -> float:
    """Total probability of the outcomes in ``T``."""
    _check_event(p, T)
    return math.fsum(
        prob for label, prob in zip(p.space.labels, p.probs) if label in T.members
    )


def conditional_probability(p: FiniteDistribution, A: Event, B: Event) -> float:
    """p(A | B) = p(A and B) / p(B).

    Raises ZeroConditioningEvent when p(B) = 0; conditioning on a
    measure-zero event has no answer and must not degrade into NaN.
    """
    _check_event(p, A)
    pb = event_probability(p, B)
    if pb == 0.0:
        raise ZeroConditioningEvent(f"conditioning event {sorted(B.members)} has probability 0")
    pab = event_probability(p, Event(A.members & B.members))
    return pab / pb


def condition(p: FiniteDistribution, T: Event) -> FiniteDistribution:
    """Bayesian update on the certain event ``T``.

    The result renormalizes p inside T and puts zero everywhere else.
    """
    pt = event_probability(p, T)
    if pt == 0.0:
        raise ZeroConditioningEvent(f"cannot condition on {sorted(T.members)}: probability 0")
    probs = tuple(
        prob / pt if label in T.members else 0.0
        for label, prob in zip(p.space.labels, p.probs)
    )
    return FiniteDistribution(p.space, probs)


def jeffrey_update(
    p: FiniteDistribution,
    part: Partition,
    weights: Sequence[float],
) -> FiniteDistribution:
    """Jeffrey's rule: set new cell probabilities, keep within-cell ratios.

    ``weights[i]`` becomes the posterior probability of ``part.cells[i]``;
    inside each cell the conditional probabilities of the prior are
    preserved.  A zero weight on a zero-probability cell is the harmless
    0/0 case and yields zero mass on that cell.
    """
    part.validate_for(p.space)
    weights = [float(w) for w in weights]
    if len(weights) != len(part.cells):
        raise ValueError(f"{len(weights)} weights for {len(part.cells)} cells")
    if any(w < 0.0 for w in weights):
        raise ValueError("Jeffrey weights must be nonnegative")
    if abs(math.fsum(weights) - 1.0) > PROB_TOL:
        raise ValueError(f"Jeffrey weights sum to {math.fsum(weights)!r}, not 1")

    cell_probs = [event_probability(p, cell) for cell in part.cells]
    for w, cp, cell in zip(weights, cell_probs, part.cells):
        if w > 0.0 and cp == 0.0:
            raise InfeasibleWeight(
                f"weight {w} on zero-probability cell {sorted(cell.members)}"
            )

    out = [0.0] * len(p.space)
    for w, cp, cell in zip(weights, cell_probs, part.cells):
        if w == 0.0:
            continue
        for label in cell.members:
            i = p.space.index(label)
            out[i] = w * p.probs[i] / cp
    return FiniteDistribution(p.space, out)


def kl_divergence(q: FiniteDistribution, p: FiniteDistribution) -> float:
    """Relative entropy sum q(x) ln(q(x)/p(x)), with 0 ln 0 = 0.

    Raises NotAbsolutelyContinuous when q puts mass where p has none
    (the divergence would be infinite).
    """
    if q.space != p.space:
        raise ValueError("KL divergence needs a common outcome space")
    terms = []
    for label, qx, px in zip(q.space.labels, q.probs, p.probs):
        if qx == 0.0:
            continue
        if px == 0.0:
            raise NotAbsolutelyContinuous(
                f"q({label}) = {qx} but p({label}) = 0"
            )
        terms.append(qx * math.log(qx / px))
    return math.fsum(terms)
