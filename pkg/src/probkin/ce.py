"""Minimum cross-entropy updating (I-projection) under affine constraints.

Given a prior and equality constraints on the posterior, find the feasible
distribution minimizing KL divergence to the prior.  The solution has the
exponential-family form q(x) = p(x) exp(sum_k lambda_k A_k(x)) / Z, found by
solving the smooth convex dual in the multipliers lambda.

Boundary cases (constraints that pin mass to part of the support) are
resolved exactly by support reduction before any iteration, so targets 0
and 1 never send a multiplier off to infinity.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.optimize import linprog

from .core import Event, FiniteDistribution, OutcomeSpace, kl_divergence
from .errors import Infeasible, NotConverged

# rhs within BIND_TOL of a constraint's extreme value over the support pins
# all mass to the extremal outcomes; gaps beyond FEAS_TOL are infeasible
BIND_TOL = 1e-12
FEAS_TOL = 1e-9
# LP slack below which a coordinate counts as forced to zero
_LP_TOL = 1e-11


@dataclass(frozen=True)
class LinearConstraint:
    """Affine constraint sum_x coeffs[x] * q(x) = rhs.

    Coefficients are keyed by outcome label; omitted labels have
    coefficient zero.
    """

    coeffs: Mapping[str, float]
    rhs: float

    def __init__(self, coeffs: Mapping[str, float], rhs: float):
        coeffs = {str(k): float(v) for k, v in coeffs.items()}
        if not any(v != 0.0 for v in coeffs.values()):
            raise ValueError("constraint has no nonzero coefficient")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "rhs", float(rhs))

    def dense(self, space: OutcomeSpace) -> np.ndarray:
        extra = set(self.coeffs) - set(space.labels)
        if extra:
            raise ValueError(f"constraint labels {sorted(extra)} not in space")
        return np.array([self.coeffs.get(l, 0.0) for l in space.labels])


@dataclass(frozen=True)
class ConditionalConstraint:
    """Constraint q(A | B) = target, i.e. q(A) = target * q(B) with A ⊆ B."""

    A: Event
    B: Event
    target: float

    def __init__(self, A: Event | Iterable[str], B: Event | Iterable[str], target: float):
        A = A if isinstance(A, Event) else Event(A)
        B = B if isinstance(B, Event) else Event(B)
        target = float(target)
        if not B.members:
            raise ValueError("conditioning event B is empty")
        if not 0.0 <= target <= 1.0:
            raise ValueError(f"conditional target {target} outside [0, 1]")
        # normalize A to A ∩ B
        object.__setattr__(self, "A", Event(A.members & B.members))
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "target", target)


def compile_conditional(c: ConditionalConstraint) -> LinearConstraint:
    """Rewrite q(A|B) = t as the affine constraint q(A) - t*q(B) = 0.

    coeffs(x) = 1_{x in A} - t * 1_{x in B}, rhs 0.
    """
    coeffs = {}
    for x in c.B.members:
        coeffs[x] = (1.0 if x in c.A else 0.0) - c.target
    if not any(v != 0.0 for v in coeffs.values()):
        # A == B with target 1: q(B|B)=1 holds vacuously, nothing to impose
        raise ValueError("conditional constraint compiles to 0 = 0")
    return LinearConstraint(coeffs, 0.0)


@dataclass(frozen=True)
class ConstraintSet:
    """Ordered bundle of constraints: conditionals first, then linears.

    Multipliers in a CeSolution follow this order.
    """

    conditional: tuple[ConditionalConstraint, ...] = ()
    linear: tuple[LinearConstraint, ...] = ()

    def __init__(
        self,
        conditional: Iterable[ConditionalConstraint] = (),
        linear: Iterable[LinearConstraint] = (),
    ):
        object.__setattr__(self, "conditional", tuple(conditional))
        object.__setattr__(self, "linear", tuple(linear))

    def __len__(self) -> int:
        return len(self.conditional) + len(self.linear)

    def compile(self, space: OutcomeSpace) -> tuple[np.ndarray, np.ndarray]:
        """Dense (k, n) coefficient matrix and length-k rhs vector."""
        rows = [compile_conditional(c).dense(space) for c in self.conditional]
        rows += [lc.dense(space) for lc in self.linear]
        rhs = [0.0] * len(self.conditional) + [lc.rhs for lc in self.linear]
        if not rows:
            return np.zeros((0, len(space))), np.zeros(0)
        return np.vstack(rows), np.array(rhs)

    # --- JSON wire format ---
    # {"conditional": [{"A": [...], "B": [...], "target": t}],
    #  "linear": [{"coeffs": {...}, "rhs": r}]}

    @classmethod
    def from_json_obj(cls, obj: dict) -> "ConstraintSet":
        conds = [
            ConditionalConstraint(d["A"], d["B"], d["target"])
            for d in obj.get("conditional", [])
        ]
        lins = [LinearConstraint(d["coeffs"], d["rhs"]) for d in obj.get("linear", [])]
        return cls(conds, lins)

    @classmethod
    def from_json(cls, text: str) -> "ConstraintSet":
        return cls.from_json_obj(json.loads(text))

    def to_json_obj(self) -> dict:
        return {
            "conditional": [
                {"A": sorted(c.A.members), "B": sorted(c.B.members), "target": c.target}
                for c in self.conditional
            ],
            "linear": [{"coeffs": dict(lc.coeffs), "rhs": lc.rhs} for lc in self.linear],
        }


@dataclass(frozen=True)
class CeSolution:
    """Result of a cross-entropy update with solver diagnostics."""

    posterior: FiniteDistribution
    multipliers: tuple[float, ...]
    kl_value: float
    iterations: int
    converged: bool
    residual: float


def binary_entropy(t: float) -> float:
    """H_b(t) = -t ln t - (1-t) ln(1-t), natural log, H_b(0) = H_b(1) = 0."""
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"binary entropy argument {t} outside [0, 1]")
    if t == 0.0 or t == 1.0:
        return 0.0
    return -t * math.log(t) - (1.0 - t) * math.log1p(-t)


def jb_ce_blue(target: float) -> float:
    """CE-posterior Blue probability for the Judy Benjamin constraint.

    For the uniform prior (1/4, 1/4, 1/2) over (R1, R2, Blue) under the
    constraint Pr(R1|R) = target, the minimizing posterior has
    q(Blue) = 2k / (2k + 1) with k = exp(-H_b(target)).
    """
    k = math.exp(-binary_entropy(target))
    return 2.0 * k / (2.0 * k + 1.0)


def _bind_reduce(A: np.ndarray, r: np.ndarray, support: np.ndarray) -> np.ndarray:
    """Shrink the support where a constraint's rhs sits at its extreme value.

    If rhs equals the max (min) of a row over the support, every feasible
    distribution concentrates on the argmax (argmin) outcomes.  Loops to a
    fixed point; raises Infeasible when a rhs is outside the attainable
    range.
    """
    support = support.copy()
    changed = True
    while changed:
        changed = False
        if not support.any():
            raise Infeasible("constraints leave no outcome able to carry mass")
        for i in range(A.shape[0]):
            row = A[i, support]
            lo, hi = row.min(), row.max()
            if r[i] > hi + FEAS_TOL or r[i] < lo - FEAS_TOL:
                raise Infeasible(
                    f"constraint {i}: rhs {r[i]} outside attainable range [{lo}, {hi}]"
                )
            if hi == lo:
                continue
            if abs(r[i] - hi) <= BIND_TOL:
                keep = support & (A[i] >= hi - BIND_TOL)
            elif abs(r[i] - lo) <= BIND_TOL:
                keep = support & (A[i] <= lo + BIND_TOL)
            else:
                continue
            if keep.sum() < support.sum():
                support = keep
                changed = True
    return support


def _lp_forced_zeros(A: np.ndarray, r: np.ndarray, support: np.ndarray) -> np.ndarray:
    """LP feasibility certificate over the current support.

    Returns a mask (aligned with the full space) of coordinates that are
    zero in every feasible distribution; raises Infeasible when the affine
    system has no distribution solution on the support at all.
    """
    idx = np.flatnonzero(support)
    m = len(idx)
    A_s = A[:, idx]
    # variables (q_1..q_m, delta); maximize the minimum coordinate delta
    c = np.zeros(m + 1)
    c[-1] = -1.0
    A_eq = np.vstack([np.hstack([A_s, np.zeros((A.shape[0], 1))]),
                      np.append(np.ones(m), 0.0)])
    b_eq = np.append(r, 1.0)
    A_ub = np.hstack([-np.eye(m), np.ones((m, 1))])  # delta - q_i <= 0
    b_ub = np.zeros(m)
    bounds = [(0.0, 1.0)] * m + [(0.0, 1.0)]
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq,
                  bounds=bounds, method="highs")
    if res.status == 2:
        raise Infeasible("no distribution on the prior's support satisfies the constraints")
    if not res.success:
        raise Infeasible(f"feasibility check failed: {res.message}")
    if res.x[-1] > _LP_TOL:
        return np.zeros_like(support)  # interior point exists
    # boundary-only feasible set: find coordinates pinned to zero
    forced = np.zeros_like(support)
    eq = np.vstack([A_s, np.ones(m)])
    beq = np.append(r, 1.0)
    for j in range(m):
        cj = np.zeros(m)
        cj[j] = -1.0  # maximize q_j
        rj = linprog(cj, A_eq=eq, b_eq=beq, bounds=[(0.0, 1.0)] * m, method="highs")
        if rj.status == 2:
            raise Infeasible("no distribution on the prior's support satisfies the constraints")
        if rj.success and -rj.fun <= _LP_TOL:
            forced[idx[j]] = True
    return forced


def _log_partition(lnp: np.ndarray, At_lam: np.ndarray) -> float:
    w = lnp + At_lam
    mx = w.max()
    return mx + math.log(np.exp(w - mx).sum())


def _q_of(lnp: np.ndarray, At_lam: np.ndarray) -> np.ndarray:
    w = lnp + At_lam
    w -= w.max()
    e = np.exp(w)
    return e / e.sum()


def _solve_bisection(lnp, row, rhs, tol, max_iter):
    """Single-constraint dual solve: g(lam) = row·q(lam) - rhs is increasing."""

    def g(lam):
        return float(row @ _q_of(lnp, lam * row)) - rhs

    g0 = g(0.0)
    if abs(g0) <= tol:
        return 0.0, 0
    # expand a bracket away from zero in the needed direction
    if g0 < 0.0:
        lo, hi = 0.0, 1.0
        while g(hi) < 0.0:
            hi *= 2.0
            if hi > 1e18:
                raise NotConverged("bisection bracket expansion failed")
    else:
        lo, hi = -1.0, 0.0
        while g(lo) > 0.0:
            lo *= 2.0
            if lo < -1e18:
                raise NotConverged("bisection bracket expansion failed")
    for it in range(1, max_iter + 1):
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if abs(gm) <= tol:
            return mid, it
        if gm < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-16 * max(1.0, abs(mid)):
            if abs(gm) <= tol:
                return mid, it
            break
    raise NotConverged(f"bisection residual above {tol} after {max_iter} iterations")


def _solve_newton(lnp, rows, rhs, tol, max_iter):
    """Damped Newton on the dual D(lam) = ln Z(lam) - lam·rhs."""
    ka = rows.shape[0]
    lam = np.zeros(ka)

    def dual(l):
        return _log_partition(lnp, rows.T @ l) - float(l @ rhs)

    for it in range(max_iter + 1):
        q = _q_of(lnp, rows.T @ lam)
        grad = rows @ q - rhs
        if np.abs(grad).max() <= tol:
            return lam, it
        if it == max_iter:
            break
        mean = rows @ q
        hess = (rows * q) @ rows.T - np.outer(mean, mean)
        d, *_ = np.linalg.lstsq(hess, grad, rcond=None)
        descent = float(grad @ d)
        if not np.isfinite(descent) or descent <= 0.0:
            d = grad  # singular-Hessian fallback: plain gradient step
            descent = float(grad @ grad)
        # Armijo backtracking; near the optimum the true decrease drops
        # below the rounding noise of the dual evaluation, so relax the
        # test by that noise floor and let full Newton steps through
        d0 = dual(lam)
        noise = 4.0 * np.finfo(float).eps * (1.0 + abs(d0))
        t = 1.0
        while t >= 2.0 ** -60:
            trial = lam - t * d
            if dual(trial) <= d0 - 1e-4 * t * descent + noise:
                lam = trial
                break
            t *= 0.5
        else:
            raise NotConverged("line search stalled on the dual objective")
    raise NotConverged(f"residual above {tol} after {max_iter} Newton iterations")


def ce_update(
    prior: FiniteDistribution,
    constraints: ConstraintSet,
    tol: float = 1e-10,
    max_iter: int = 200,
) -> CeSolution:
    """I-projection of ``prior`` onto the affine set given by ``constraints``.

    Outcomes of prior probability zero stay at zero (finite KL forces
    absolute continuity).  Feasibility on that support is certified by a
    linear program before any iteration, so Infeasible and NotConverged
    are distinguished deterministically.  The dual is solved by damped
    Newton, or bisection when only one constraint is active.
    """
    space = prior.space
    p = prior.as_array()
    A, r = constraints.compile(space)
    k = A.shape[0]
    if k == 0:
        return CeSolution(prior, (), 0.0, 0, True, 0.0)

    # exact support reduction, then LP certificate; repeat until stable
    support = p > 0.0
    while True:
        support = _bind_reduce(A, r, support)
        forced = _lp_forced_zeros(A, r, support)
        if not forced.any():
            break
        support &= ~forced

    idx = np.flatnonzero(support)
    p_s = p[idx] / p[idx].sum()
    A_s = A[:, idx]

    # rows constant over the support impose nothing further; their rhs gap
    # is fixed and was already vetted by _bind_reduce
    spread = A_s.max(axis=1) - A_s.min(axis=1)
    active = spread > 0.0

    lam_full = np.zeros(k)
    iterations = 0
    if len(idx) > 1 and active.any():
        lnp = np.log(p_s)
        rows = A_s[active]
        rr = r[active]
        if active.sum() == 1:
            lam1, iterations = _solve_bisection(lnp, rows[0], float(rr[0]), tol, max_iter)
            lam_active = np.array([lam1])
        else:
            lam_active, iterations = _solve_newton(lnp, rows, rr, tol, max_iter)
        q_s = _q_of(lnp, rows.T @ lam_active)
        lam_full[active] = lam_active
    else:
        q_s = p_s

    q = np.zeros_like(p)
    q[idx] = q_s
    residual = float(np.abs(A @ q - r).max())
    if residual >= max(tol, 10 * FEAS_TOL):
        raise Infeasible(f"support reduction left residual {residual}")
    if residual >= tol:
        raise NotConverged(f"final residual {residual} at tolerance {tol}")
    posterior = FiniteDistribution(space, q)
    return CeSolution(
        posterior=posterior,
        multipliers=tuple(float(v) for v in lam_full),
        kl_value=kl_divergence(posterior, prior),
        iterations=iterations,
        converged=True,
        residual=residual,
    )
