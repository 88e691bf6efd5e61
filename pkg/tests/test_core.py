import json
import math

import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from probkin import (
    BadPartition,
    Event,
    FiniteDistribution,
    InfeasibleWeight,
    NotAbsolutelyContinuous,
    OutcomeSpace,
    Partition,
    ZeroConditioningEvent,
    condition,
    conditional_probability,
    event_probability,
    jeffrey_update,
    kl_divergence,
)
from probkin import judy

# KL((1/2,1/2) || (1/4,3/4)) = 0.5 ln 2 + 0.5 ln(2/3), evaluated with fsum
KL_HALF_VS_QUARTER = 0.14384103622589042


def dist(**kv):
    return FiniteDistribution.from_dict(kv)


class TestValidation:
    def test_duplicate_labels_rejected(self):
        with pytest.raises(ValueError, match="distinct"):
            OutcomeSpace(["a", "a"])

    def test_empty_space_rejected(self):
        with pytest.raises(ValueError, match="non-empty"):
            OutcomeSpace([])

    def test_negative_prob_rejected(self):
        with pytest.raises(ValueError, match="negative"):
            FiniteDistribution(OutcomeSpace(["a", "b"]), [1.5, -0.5])

    def test_bad_sum_rejected(self):
        with pytest.raises(ValueError, match="sum"):
            FiniteDistribution(OutcomeSpace(["a", "b"]), [0.6, 0.5])

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            FiniteDistribution(OutcomeSpace(["a", "b"]), [1.0])

    def test_sum_tolerance_is_tight(self):
        # 1e-12 is the documented validity tolerance
        FiniteDistribution(OutcomeSpace(["a", "b"]), [0.5, 0.5 + 9e-13])
        with pytest.raises(ValueError):
            FiniteDistribution(OutcomeSpace(["a", "b"]), [0.5, 0.5 + 2e-12])


class TestEventProbability:
    def test_jb_blue_half(self):
        assert event_probability(judy.PRIOR, judy.BLUE) == 0.5

    def test_empty_event(self):
        assert event_probability(judy.PRIOR, Event([])) == 0.0

    def test_full_space(self):
        assert event_probability(judy.PRIOR, judy.FULL) == 1.0

    def test_foreign_label_rejected(self):
        with pytest.raises(ValueError, match="not in space"):
            event_probability(judy.PRIOR, Event.of("Z9"))


class TestConditionalProbability:
    def test_symmetric_prior(self):
        assert conditional_probability(judy.PRIOR, judy.R1, judy.RED) == 0.5

    def test_three_to_one_odds(self):
        p = dist(R1=0.375, R2=0.125, B1=0.25, B2=0.25)
        assert conditional_probability(p, judy.R1, judy.RED) == 0.75

    def test_zero_event_raises(self):
        p = dist(x=1.0, y=0.0)
        with pytest.raises(ZeroConditioningEvent):
            conditional_probability(p, Event.of("x"), Event.of("y"))


class TestCondition:
    def test_not_r2(self):
        post = condition(judy.PRIOR, judy.NOT_R2)
        npt.assert_allclose(post.as_array(), [1 / 3, 0.0, 1 / 3, 1 / 3], rtol=0, atol=0)
        assert event_probability(post, judy.BLUE) == pytest.approx(2 / 3, abs=1e-15)

    def test_full_space_identity(self):
        post = condition(judy.PRIOR, judy.FULL)
        assert post.probs == judy.PRIOR.probs

    def test_zero_event_raises(self):
        with pytest.raises(ZeroConditioningEvent):
            condition(dist(x=1.0, y=0.0), Event.of("y"))

    def test_idempotent(self):
        once = condition(judy.PRIOR, judy.NOT_R2)
        twice = condition(once, judy.NOT_R2)
        npt.assert_allclose(twice.as_array(), once.as_array(), rtol=0, atol=1e-15)

    def test_zero_outside_event(self):
        post = condition(judy.PRIOR, judy.RED)
        assert post.prob("B1") == 0.0 and post.prob("B2") == 0.0


class TestJeffrey:
    PART = Partition([["R1"], ["R2"], ["B1", "B2"]])

    def test_intuitive_answer(self):
        post = jeffrey_update(judy.PRIOR, self.PART, (0.375, 0.125, 0.5))
        npt.assert_allclose(post.as_array(), [0.375, 0.125, 0.25, 0.25], rtol=0, atol=0)

    def test_identity_weights(self):
        weights = [event_probability(judy.PRIOR, c) for c in self.PART.cells]
        post = jeffrey_update(judy.PRIOR, self.PART, weights)
        npt.assert_allclose(post.as_array(), judy.PRIOR.as_array(), rtol=0, atol=1e-15)

    def test_degenerate_equals_condition(self):
        post = jeffrey_update(judy.PRIOR, self.PART, (1.0, 0.0, 0.0))
        target = condition(judy.PRIOR, judy.R1)
        assert max(abs(a - b) for a, b in zip(post.probs, target.probs)) < 1e-12

    def test_single_cell_identity(self):
        part = Partition([judy.FULL])
        post = jeffrey_update(judy.PRIOR, part, [1.0])
        npt.assert_allclose(post.as_array(), judy.PRIOR.as_array(), rtol=0, atol=1e-15)

    def test_weight_on_null_cell_raises(self):
        p = dist(a=0.5, b=0.5, c=0.0)
        part = Partition([["a", "b"], ["c"]])
        with pytest.raises(InfeasibleWeight):
            jeffrey_update(p, part, (0.9, 0.1))

    def test_zero_weight_on_null_cell_ok(self):
        p = dist(a=0.5, b=0.5, c=0.0)
        part = Partition([["a", "b"], ["c"]])
        post = jeffrey_update(p, part, (1.0, 0.0))
        assert post.prob("c") == 0.0

    def test_overlapping_cells_rejected(self):
        part = Partition([["R1", "R2"], ["R2", "B1", "B2"]])
        with pytest.raises(BadPartition, match="overlap"):
            jeffrey_update(judy.PRIOR, part, (0.5, 0.5))

    def test_incomplete_cells_rejected(self):
        part = Partition([["R1"], ["R2"]])
        with pytest.raises(BadPartition, match="cover"):
            jeffrey_update(judy.PRIOR, part, (0.5, 0.5))

    def test_bad_weights_rejected(self):
        with pytest.raises(ValueError):
            jeffrey_update(judy.PRIOR, self.PART, (0.5, 0.5, 0.5))
        with pytest.raises(ValueError):
            jeffrey_update(judy.PRIOR, self.PART, (1.5, -0.5, 0.0))


class TestKl:
    def test_identical_is_zero(self):
        assert kl_divergence(judy.PRIOR, judy.PRIOR) == 0.0

    def test_frozen_value(self):
        q = dist(a=0.5, b=0.5)
        p = dist(a=0.25, b=0.75)
        assert kl_divergence(q, p) == pytest.approx(KL_HALF_VS_QUARTER, abs=1e-15)
        # dual route: the defining sum, term by term
        direct = 0.5 * math.log(0.5 / 0.25) + 0.5 * math.log(0.5 / 0.75)
        assert kl_divergence(q, p) == pytest.approx(direct, abs=1e-15)

    def test_not_absolutely_continuous(self):
        with pytest.raises(NotAbsolutelyContinuous):
            kl_divergence(dist(a=1.0, b=0.0), dist(a=0.0, b=1.0))

    def test_zero_times_log_zero(self):
        # q has a zero where p does not: the 0 ln 0 term drops out
        q = dist(a=1.0, b=0.0)
        p = dist(a=0.5, b=0.5)
        assert kl_divergence(q, p) == pytest.approx(math.log(2.0), abs=1e-15)

    def test_space_mismatch(self):
        with pytest.raises(ValueError):
            kl_divergence(dist(a=1.0), dist(b=1.0))


class TestJson:
    def test_round_trip(self):
        text = judy.PRIOR.to_json()
        back = FiniteDistribution.from_json(text)
        assert back.space == judy.PRIOR.space
        assert back.probs == judy.PRIOR.probs

    def test_wire_shape(self):
        obj = json.loads(judy.PRIOR.to_json())
        assert set(obj) == {"labels", "probs"}
        assert obj["labels"] == ["R1", "R2", "B1", "B2"]

    def test_missing_keys_rejected(self):
        with pytest.raises(ValueError, match="labels"):
            FiniteDistribution.from_json('{"probs": [1.0]}')


# --- randomized invariants ---

weight_lists = st.lists(st.integers(min_value=1, max_value=50), min_size=2, max_size=6)


def _to_dist(weights):
    total = sum(weights)
    labels = [f"x{i}" for i in range(len(weights))]
    return FiniteDistribution(OutcomeSpace(labels), [w / total for w in weights])


@given(weight_lists)
def test_condition_output_valid(weights):
    p = _to_dist(weights)
    T = Event(p.space.labels[: max(1, len(weights) // 2)])
    post = condition(p, T)
    assert all(v >= 0 for v in post.probs)
    assert abs(math.fsum(post.probs) - 1.0) <= 1e-12


@given(weight_lists, st.randoms(use_true_random=False))
def test_chain_rule(weights, rnd):
    # conditioning then conditional probability = conditional of the joint
    p = _to_dist(weights)
    labels = list(p.space.labels)
    B = Event(rnd.sample(labels, k=rnd.randint(1, len(labels))))
    A = Event(rnd.sample(labels, k=rnd.randint(1, len(labels))))
    full = Event(labels)
    lhs = conditional_probability(condition(p, B), A, full)
    rhs = conditional_probability(p, A, B)
    assert lhs == pytest.approx(rhs, abs=1e-12)


@given(weight_lists, weight_lists)
@settings(max_examples=60)
def test_kl_nonnegative_and_identity(w1, w2):
    n = min(len(w1), len(w2))
    q = _to_dist(w1[:n])
    p = _to_dist(w2[:n])
    d = kl_divergence(q, p)
    assert d >= -1e-15
    if max(abs(a - b) for a, b in zip(q.probs, p.probs)) < 1e-15:
        assert d <= 1e-12
    assert kl_divergence(q, q) == 0.0


@given(weight_lists)
def test_jeffrey_preserves_cell_conditionals(weights):
    p = _to_dist(weights)
    labels = list(p.space.labels)
    half = len(labels) // 2
    part = Partition([labels[:half] or [labels[0]], labels[half:] or [labels[-1]]])
    if half == 0 or half == len(labels):
        return
    post = jeffrey_update(p, part, (0.3, 0.7))
    for cell in part.cells:
        for label in cell.members:
            lhs = conditional_probability(post, Event.of(label), cell)
            rhs = conditional_probability(p, Event.of(label), cell)
            assert lhs == pytest.approx(rhs, abs=1e-12)
