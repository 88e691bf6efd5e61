import json
import math

import numpy as np
import numpy.testing as npt
import pytest

from probkin import (
    ConditionalConstraint,
    ConstraintSet,
    Event,
    FiniteDistribution,
    Infeasible,
    LinearConstraint,
    NotConverged,
    OutcomeSpace,
    binary_entropy,
    ce_update,
    compile_conditional,
    condition,
    jb_ce_blue,
    jeffrey_update,
    kl_divergence,
)
from probkin import judy
from probkin.core import Partition, event_probability

# CE-posterior Blue for the report Pr(R1|R)=3/4, frozen from two
# independent routes: the closed form 2k/(2k+1), k=exp(-H_b(3/4)), and a
# 10^6-point grid minimization of KL over the one-parameter family
# (c r, (1-c) r, (1-r)/2, (1-r)/2).
JB_BLUE_AT_3_4 = 0.5326564547312221


def _grid_blue(c: float, points: int = 400_001) -> float:
    """Brute-force oracle: minimize KL over r = q(Red) on a dense grid."""
    r = np.linspace(1e-9, 1.0 - 1e-9, points)
    kl = (1.0 - r) * np.log(2.0 * (1.0 - r))
    if c > 0.0:
        kl = kl + c * r * np.log(4.0 * c * r)
    if c < 1.0:
        kl = kl + (1.0 - c) * r * np.log(4.0 * (1.0 - c) * r)
    return float(1.0 - r[np.argmin(kl)])


class TestCompile:
    def test_three_quarters(self):
        lc = compile_conditional(ConditionalConstraint(judy.R1, judy.RED, 0.75))
        row = lc.dense(judy.SPACE)
        npt.assert_array_equal(row, [0.25, -0.75, 0.0, 0.0])
        assert lc.rhs == 0.0

    def test_target_zero_is_indicator(self):
        lc = compile_conditional(ConditionalConstraint(judy.R1, judy.RED, 0.0))
        npt.assert_array_equal(lc.dense(judy.SPACE), [1.0, 0.0, 0.0, 0.0])

    def test_target_one_negates_complement(self):
        lc = compile_conditional(ConditionalConstraint(judy.R1, judy.RED, 1.0))
        npt.assert_array_equal(lc.dense(judy.SPACE), [0.0, -1.0, 0.0, 0.0])

    def test_a_normalized_to_intersection(self):
        c = ConditionalConstraint(Event.of("R1", "B1"), judy.RED, 0.5)
        assert c.A.members == frozenset({"R1"})

    def test_vacuous_rejected(self):
        with pytest.raises(ValueError, match="0 = 0"):
            compile_conditional(ConditionalConstraint(judy.RED, judy.RED, 1.0))

    def test_bad_target_rejected(self):
        with pytest.raises(ValueError):
            ConditionalConstraint(judy.R1, judy.RED, 1.5)

    def test_empty_b_rejected(self):
        with pytest.raises(ValueError):
            ConditionalConstraint(judy.R1, Event([]), 0.5)


class TestLinearConstraint:
    def test_all_zero_rejected(self):
        with pytest.raises(ValueError, match="nonzero"):
            LinearConstraint({"a": 0.0}, 1.0)

    def test_foreign_label_rejected(self):
        lc = LinearConstraint({"zz": 1.0}, 0.5)
        with pytest.raises(ValueError, match="not in space"):
            lc.dense(judy.SPACE)

    def test_omitted_labels_are_zero(self):
        lc = LinearConstraint({"B1": 2.0}, 0.5)
        npt.assert_array_equal(lc.dense(judy.SPACE), [0.0, 0.0, 2.0, 0.0])


class TestClosedForm:
    def test_binary_entropy_endpoints(self):
        assert binary_entropy(0.0) == 0.0
        assert binary_entropy(1.0) == 0.0

    def test_binary_entropy_max(self):
        assert binary_entropy(0.5) == pytest.approx(math.log(2.0), abs=1e-16)

    def test_binary_entropy_symmetric(self):
        for t in (0.1, 0.25, 0.4):
            assert binary_entropy(t) == pytest.approx(binary_entropy(1.0 - t), abs=1e-15)

    def test_binary_entropy_domain(self):
        with pytest.raises(ValueError):
            binary_entropy(-0.1)
        with pytest.raises(ValueError):
            binary_entropy(1.1)

    def test_jb_ce_blue_half_exact(self):
        # H_b(1/2) = ln 2 and exp(-ln 2) = 0.5 exactly in floats
        assert jb_ce_blue(0.5) == 0.5

    def test_jb_ce_blue_endpoints(self):
        assert jb_ce_blue(0.0) == pytest.approx(2 / 3, abs=1e-16)
        assert jb_ce_blue(1.0) == pytest.approx(2 / 3, abs=1e-16)

    def test_frozen_value_at_three_quarters(self):
        assert jb_ce_blue(0.75) == pytest.approx(JB_BLUE_AT_3_4, abs=1e-15)

    def test_grid_oracle_agrees(self):
        # live re-derivation of the frozen value by brute force
        assert _grid_blue(0.75) == pytest.approx(JB_BLUE_AT_3_4, abs=1e-5)
        assert _grid_blue(0.25) == pytest.approx(jb_ce_blue(0.25), abs=1e-5)
        assert _grid_blue(0.9) == pytest.approx(jb_ce_blue(0.9), abs=1e-5)

    def test_anomaly_shape(self):
        grid = [round(0.01 * i, 2) for i in range(101)]
        for c in grid:
            blue = jb_ce_blue(c)
            if c == 0.5:
                assert abs(blue - 0.5) <= 1e-12
            else:
                assert blue > 0.5
            assert blue == pytest.approx(jb_ce_blue(1.0 - c), abs=1e-12)


class TestCeUpdate:
    def test_jb_three_quarters(self):
        sol = ce_update(judy.PRIOR, judy.red_report(0.75))
        assert sol.converged and sol.residual < 1e-10
        blue = judy.blue_of(sol.posterior)
        assert blue == pytest.approx(JB_BLUE_AT_3_4, abs=1e-10)
        assert blue > 0.5

    def test_jb_half_is_identity(self):
        sol = ce_update(judy.PRIOR, judy.red_report(0.5))
        assert sol.posterior.probs == judy.PRIOR.probs
        assert sol.iterations == 0
        assert judy.blue_of(sol.posterior) == 0.5

    def test_jb_target_one_matches_conditioning(self):
        sol = ce_update(judy.PRIOR, judy.red_report(1.0))
        target = condition(judy.PRIOR, judy.NOT_R2)
        npt.assert_allclose(sol.posterior.as_array(), target.as_array(), rtol=0, atol=1e-15)
        assert judy.blue_of(sol.posterior) == pytest.approx(2 / 3, abs=1e-15)
        # the boundary is handled by support reduction, not a huge multiplier
        assert sol.multipliers == (0.0,)

    def test_off_support_infeasible(self):
        prior = FiniteDistribution(OutcomeSpace(["x", "y"]), [1.0, 0.0])
        cs = ConstraintSet(linear=(LinearConstraint({"y": 1.0}, 1.0),))
        with pytest.raises(Infeasible):
            ce_update(prior, cs)

    def test_contradictory_constraints_infeasible(self):
        cs = ConstraintSet(
            linear=(
                LinearConstraint({"R1": 1.0}, 0.3),
                LinearConstraint({"R1": 1.0}, 0.6),
            )
        )
        with pytest.raises(Infeasible):
            ce_update(judy.PRIOR, cs)

    def test_unattainable_rhs_infeasible(self):
        cs = ConstraintSet(linear=(LinearConstraint({"R1": 1.0, "R2": 1.0}, 1.5),))
        with pytest.raises(Infeasible):
            ce_update(judy.PRIOR, cs)

    def test_not_converged_single_constraint(self):
        with pytest.raises(NotConverged):
            ce_update(judy.PRIOR, judy.red_report(0.75), max_iter=0)

    def test_not_converged_joint(self):
        cs = ConstraintSet(
            linear=(
                LinearConstraint({"R1": 1.0}, 0.4),
                LinearConstraint({"B1": 1.0}, 0.1),
            )
        )
        with pytest.raises(NotConverged):
            ce_update(judy.PRIOR, cs, max_iter=0)

    def test_no_constraints_is_identity(self):
        sol = ce_update(judy.PRIOR, ConstraintSet())
        assert sol.posterior.probs == judy.PRIOR.probs
        assert sol.multipliers == ()

    def test_forced_zero_needs_lp(self):
        # no single constraint binds at an extreme, yet z is pinned to 0
        prior = FiniteDistribution(OutcomeSpace(["x", "y", "z"]), [0.2, 0.3, 0.5])
        cs = ConstraintSet(
            linear=(
                LinearConstraint({"x": 1.0}, 0.5),
                LinearConstraint({"y": 1.0}, 0.5),
            )
        )
        sol = ce_update(prior, cs)
        npt.assert_allclose(sol.posterior.as_array(), [0.5, 0.5, 0.0], rtol=0, atol=1e-10)

    def test_exponential_family_form(self):
        sol = ce_update(judy.PRIOR, judy.red_report(0.6))
        row = compile_conditional(judy.red_report(0.6).conditional[0]).dense(judy.SPACE)
        weights = judy.PRIOR.as_array() * np.exp(sol.multipliers[0] * row)
        recon = weights / weights.sum()
        npt.assert_allclose(sol.posterior.as_array(), recon, rtol=0, atol=1e-12)

    def test_kl_value_consistent(self):
        sol = ce_update(judy.PRIOR, judy.red_report(0.8))
        assert sol.kl_value == pytest.approx(
            kl_divergence(sol.posterior, judy.PRIOR), abs=1e-9
        )

    def test_joint_constraints(self):
        space = OutcomeSpace(["a", "b", "c", "d", "e"])
        prior = FiniteDistribution(space, [0.1, 0.2, 0.3, 0.25, 0.15])
        cs = ConstraintSet(
            conditional=(ConditionalConstraint(Event.of("a"), Event.of("a", "b"), 0.3),),
            linear=(LinearConstraint({"a": 1.0, "b": 1.0}, 0.5),),
        )
        sol = ce_update(prior, cs)
        post = sol.posterior
        assert post.prob("a") + post.prob("b") == pytest.approx(0.5, abs=1e-9)
        assert post.prob("a") / (post.prob("a") + post.prob("b")) == pytest.approx(0.3, abs=1e-9)
        assert len(sol.multipliers) == 2

    def test_redundant_constraints_match_single(self):
        single = ce_update(judy.PRIOR, judy.red_report(0.7))
        doubled = ConstraintSet(
            conditional=(
                ConditionalConstraint(judy.R1, judy.RED, 0.7),
                ConditionalConstraint(judy.R1, judy.RED, 0.7),
            )
        )
        sol = ce_update(judy.PRIOR, doubled)
        npt.assert_allclose(
            sol.posterior.as_array(), single.posterior.as_array(), rtol=0, atol=1e-9
        )

    def test_numeric_matches_closed_form_on_grid(self):
        for i in range(0, 101, 5):
            c = round(0.01 * i, 2)
            sol = ce_update(judy.PRIOR, judy.red_report(c))
            assert judy.blue_of(sol.posterior) == pytest.approx(jb_ce_blue(c), abs=1e-8)


def _random_instance(rng, size):
    labels = tuple(f"s{i}" for i in range(size))
    space = OutcomeSpace(labels)
    prior = FiniteDistribution(space, rng.dirichlet(np.full(size, 2.0)))
    return space, prior


class TestOracleEquivalence:
    def test_conditioning(self):
        rng = np.random.default_rng(20_240_817)
        for _ in range(40):
            size = int(rng.integers(2, 9))
            space, prior = _random_instance(rng, size)
            k = int(rng.integers(1, size + 1))
            T = Event(rng.choice(space.labels, size=k, replace=False))
            cs = ConstraintSet(linear=(LinearConstraint({l: 1.0 for l in T.members}, 1.0),))
            sol = ce_update(prior, cs)
            target = condition(prior, T)
            err = np.abs(sol.posterior.as_array() - target.as_array()).max()
            assert err < 1e-9

    def test_jeffrey(self):
        rng = np.random.default_rng(20_240_818)
        for _ in range(40):
            size = int(rng.integers(2, 9))
            space, prior = _random_instance(rng, size)
            labels = list(space.labels)
            rng.shuffle(labels)
            n_cells = int(rng.integers(2, size + 1))
            bounds = sorted(rng.choice(range(1, size), size=n_cells - 1, replace=False))
            cells = [labels[i:j] for i, j in zip([0] + bounds, bounds + [size])]
            weights = rng.dirichlet(np.full(n_cells, 2.0))
            target = jeffrey_update(prior, Partition(cells), weights)
            cs = ConstraintSet(
                linear=tuple(
                    LinearConstraint({l: 1.0 for l in cell}, w)
                    for cell, w in zip(cells, weights)
                )
            )
            sol = ce_update(prior, cs)
            err = np.abs(sol.posterior.as_array() - target.as_array()).max()
            assert err < 1e-9


class TestOptimality:
    def _check(self, prior, cs, count=1000):
        sol = ce_update(prior, cs)
        A, r = cs.compile(prior.space)
        q = sol.posterior.as_array()
        idx = q > 0.0
        M = np.vstack([A[:, idx], np.ones(int(idx.sum()))])
        P = np.eye(int(idx.sum())) - np.linalg.pinv(M) @ M
        rng = np.random.default_rng(99)
        base = q[idx]
        for _ in range(count):
            dz = P @ rng.normal(size=base.size)
            denom = np.abs(dz).max()
            if denom == 0.0:
                continue
            scale = 0.25 * base.min() / denom
            out = q.copy()
            out[idx] = base + scale * dz
            perturbed = FiniteDistribution(prior.space, out)
            assert kl_divergence(perturbed, prior) >= sol.kl_value - 1e-9

    def test_jb_three_quarters(self):
        self._check(judy.PRIOR, judy.red_report(0.75))

    def test_joint(self):
        space = OutcomeSpace(["a", "b", "c", "d", "e"])
        prior = FiniteDistribution(space, [0.1, 0.2, 0.3, 0.25, 0.15])
        cs = ConstraintSet(
            conditional=(ConditionalConstraint(Event.of("a"), Event.of("a", "b"), 0.3),),
            linear=(LinearConstraint({"a": 1.0, "b": 1.0}, 0.5),),
        )
        self._check(prior, cs, count=300)


class TestConstraintSetJson:
    WIRE = {
        "conditional": [{"A": ["R1"], "B": ["R1", "R2"], "target": 0.75}],
        "linear": [{"coeffs": {"B1": 1.0}, "rhs": 0.3}],
    }

    def test_parse(self):
        cs = ConstraintSet.from_json(json.dumps(self.WIRE))
        assert len(cs) == 2
        assert cs.conditional[0].target == 0.75
        assert cs.linear[0].rhs == 0.3

    def test_round_trip(self):
        cs = ConstraintSet.from_json_obj(self.WIRE)
        again = ConstraintSet.from_json_obj(cs.to_json_obj())
        assert again == cs

    def test_missing_sections_default_empty(self):
        cs = ConstraintSet.from_json("{}")
        assert len(cs) == 0

    def test_multiplier_order_conditionals_first(self):
        cs = ConstraintSet.from_json_obj(self.WIRE)
        sol = ce_update(judy.PRIOR, cs)
        A, r = cs.compile(judy.SPACE)
        # row 0 is the conditional, row 1 the linear; residuals vanish
        resid = A @ sol.posterior.as_array() - r
        assert np.abs(resid).max() < 1e-10
        assert len(sol.multipliers) == 2
