"""Second-order beliefs over the 3-simplex and band conditioning.

A sender's possible belief over the four map quadrants (R1, R2, B1, B2)
is a point (a, b, c) of the 3-simplex, with the fourth coordinate
implicit.  A report "Pr(R1|R) = q" is treated as the positive-probability
event that the conditional probability a/(a+b) lies in [q-eps, q+eps].
Closed forms hold under the uniform simplex prior; Monte Carlo covers the
other priors and validates the closed forms.

All exact results are free of eps; the default eps = 0.01 only affects
Monte Carlo acceptance rates.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from . import backend
from .core import Event, FiniteDistribution, OutcomeSpace
from .errors import NoAcceptedSamples, UndefinedConditional

QUADRANTS = ("R1", "R2", "B1", "B2")
QUADRANT_SPACE = OutcomeSpace(QUADRANTS)

DEFAULT_EPSILON = 0.01

_TOL = 1e-12


@dataclass(frozen=True)
class HQBelief:
    """One possible sender belief: probabilities of R1, R2, B1.

    The B2 probability is implicit: d = 1 - a - b - c.
    """

    a: float
    b: float
    c: float

    def __post_init__(self):
        if self.a < 0.0 or self.b < 0.0 or self.c < 0.0:
            raise ValueError(f"negative belief coordinate in {(self.a, self.b, self.c)}")
        if self.a + self.b + self.c > 1.0 + _TOL:
            raise ValueError(f"belief coordinates sum past 1: {(self.a, self.b, self.c)}")

    @property
    def d(self) -> float:
        return 1.0 - ((self.a + self.b) + self.c)

    def quadrant_probs(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)


@dataclass(frozen=True)
class SecondOrderPrior:
    """Prior over sender beliefs: uniform simplex, Dirichlet, or the
    (r, x, y)-uniform conditional parameterization."""

    variant: str
    alpha: tuple[float, ...] | None = None

    _VARIANT_CODES = {
        "uniform": backend.VARIANT_UNIFORM,
        "dirichlet": backend.VARIANT_DIRICHLET,
        "conditional": backend.VARIANT_CONDITIONAL,
    }

    def __post_init__(self):
        if self.variant not in self._VARIANT_CODES:
            raise ValueError(f"unknown prior variant {self.variant!r}")
        if self.variant == "dirichlet":
            if self.alpha is None or len(self.alpha) != 4:
                raise ValueError("dirichlet prior needs four alpha parameters")
            alpha = tuple(float(v) for v in self.alpha)
            if any(v <= 0.0 for v in alpha):
                raise ValueError(f"dirichlet parameters must be positive, got {alpha}")
            object.__setattr__(self, "alpha", alpha)
        elif self.alpha is not None:
            raise ValueError(f"{self.variant} prior takes no alpha parameters")

    @classmethod
    def uniform(cls) -> "SecondOrderPrior":
        return cls("uniform")

    @classmethod
    def dirichlet(cls, *alpha: float) -> "SecondOrderPrior":
        return cls("dirichlet", tuple(alpha))

    @classmethod
    def conditional(cls) -> "SecondOrderPrior":
        return cls("conditional")

    @property
    def variant_code(self) -> int:
        return self._VARIANT_CODES[self.variant]

    def alpha_array(self) -> np.ndarray:
        if self.variant == "dirichlet":
            return np.asarray(self.alpha, dtype=np.float64)
        return np.ones(4)

    # --- JSON wire format: {"variant": "...", "alpha": [...]} ---

    def to_json_obj(self) -> dict:
        obj = {"variant": self.variant}
        if self.alpha is not None:
            obj["alpha"] = list(self.alpha)
        return obj

    @classmethod
    def from_json_obj(cls, obj: dict) -> "SecondOrderPrior":
        alpha = obj.get("alpha")
        return cls(obj["variant"], tuple(alpha) if alpha is not None else None)

    @classmethod
    def from_json(cls, text: str) -> "SecondOrderPrior":
        return cls.from_json_obj(json.loads(text))


@dataclass(frozen=True)
class MessageBand:
    """The report event: cond_red within [q - epsilon, q + epsilon] ∩ [0, 1]."""

    q: float
    epsilon: float

    def __post_init__(self):
        if not 0.0 <= self.q <= 1.0:
            raise ValueError(f"band center {self.q} outside [0, 1]")
        if self.epsilon <= 0.0:
            raise ValueError("band must have positive width")

    @property
    def lo(self) -> float:
        return max(0.0, self.q - self.epsilon)

    @property
    def hi(self) -> float:
        return min(1.0, self.q + self.epsilon)

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)


@dataclass(frozen=True)
class McConfig:
    samples: int
    seed: int = 42
    chunks: int = 1

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be at least 1")
        if self.chunks < 1:
            raise ValueError("chunks must be at least 1")


@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float
    n_total: int
    n_accepted: int

    def to_json_obj(self) -> dict:
        return {"mean": self.mean, "stderr": self.stderr, "n_accepted": self.n_accepted}


# --- pointwise operations on beliefs ---


def cond_red(h: HQBelief) -> float:
    """Pr(R1 | R) = a / (a + b) under the belief ``h``."""
    s = h.a + h.b
    if s == 0.0:
        raise UndefinedConditional("belief puts no probability on Red territory")
    return h.a / s


def blue_prob(h: HQBelief) -> float:
    """Pr(B1 or B2) = 1 - a - b under the belief ``h``."""
    return 1.0 - (h.a + h.b)


# --- closed forms under the uniform simplex prior ---


def cdf_cond_red(q):
    """CDF of cond_red under the uniform prior: identity on [0, 1]."""
    arr = np.asarray(q, dtype=np.float64)
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ValueError("cond_red CDF argument outside [0, 1]")
    return arr if arr.ndim else float(arr)


def cdf_blue(p):
    """CDF of blue_prob under the uniform prior: (3 - 2p) p^2."""
    arr = np.asarray(p, dtype=np.float64)
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ValueError("blue CDF argument outside [0, 1]")
    out = (3.0 - 2.0 * arr) * arr * arr
    return out if out.ndim else float(out)


def joint_cdf(q, p):
    """Joint CDF of (cond_red, blue_prob): q (3 - 2p) p^2.

    Algebraically this factorizes as cdf_cond_red(q) * cdf_blue(p): the
    two variables are independent.  Computed from its own formula so the
    factorization stays a checkable claim, not a definition.
    """
    arr_q = np.asarray(q, dtype=np.float64)
    arr_p = np.asarray(p, dtype=np.float64)
    for arr in (arr_q, arr_p):
        if np.any(arr < 0.0) or np.any(arr > 1.0):
            raise ValueError("joint CDF arguments outside [0, 1]")
    out = arr_q * ((3.0 - 2.0 * arr_p) * arr_p * arr_p)
    return out if out.ndim else float(out)


def density_blue(p):
    """Density of blue_prob under the uniform prior: 6p(1 - p)."""
    arr = np.asarray(p, dtype=np.float64)
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ValueError("blue density argument outside [0, 1]")
    out = 6.0 * arr * (1.0 - arr)
    return out if out.ndim else float(out)


def expected_blue_given_message(band: MessageBand) -> float:
    """E[Pr(Blue) | report band] = 1/2 for every band.

    The band event concerns cond_red only, and cond_red is independent of
    blue_prob under the uniform prior, so conditioning does not move the
    expectation: it stays at the prior value, the integral of
    p * density_blue(p) over [0, 1].  No epsilon enters.
    """
    if not isinstance(band, MessageBand):
        band = MessageBand(*band)
    return 0.5


def exact_posterior_quadrants(band: MessageBand) -> FiniteDistribution:
    """Receiver's posterior over quadrants after trusting the banded report.

    Under the uniform prior, cond_red is uniform on [0, 1], so its
    conditional mean within the clipped band is the band midpoint m.
    Independence from the Red/Blue split gives E[a | band] = m * E[a+b]
    = m/2, and the Blue half stays split evenly: (m/2, (1-m)/2, 1/4, 1/4).
    """
    m = band.midpoint
    return FiniteDistribution(QUADRANT_SPACE, (m / 2.0, (1.0 - m) / 2.0, 0.25, 0.25))


# --- Monte Carlo ---


def _chunk_sizes(samples: int, chunks: int) -> list[int]:
    base, extra = divmod(samples, chunks)
    return [base + (1 if i < extra else 0) for i in range(chunks)]


def _map_chunks(fn: Callable[[int, int], object], cfg: McConfig) -> list:
    """Apply fn(chunk_index, chunk_size) for every chunk, results in chunk
    order.  Parallel execution cannot change the output, only wall time."""
    sizes = _chunk_sizes(cfg.samples, cfg.chunks)
    if cfg.chunks == 1:
        return [fn(0, sizes[0])]
    workers = min(cfg.chunks, os.cpu_count() or 1)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(cfg.chunks), sizes))


def sample_prior_array(prior: SecondOrderPrior, cfg: McConfig) -> np.ndarray:
    """All samples as an (n, 3) array of (a, b, c), chunk order preserved."""
    code = prior.variant_code
    alpha = prior.alpha_array()
    parts = _map_chunks(
        lambda i, size: backend.sample_chunk(code, alpha, size, cfg.seed, i), cfg
    )
    return np.concatenate(parts, axis=0)


def sample_prior(prior: SecondOrderPrior, cfg: McConfig) -> Iterator[HQBelief]:
    """Stream of HQBelief samples; same stream as sample_prior_array."""
    code = prior.variant_code
    alpha = prior.alpha_array()
    for i, size in enumerate(_chunk_sizes(cfg.samples, cfg.chunks)):
        abc = backend.sample_chunk(code, alpha, size, cfg.seed, i)
        for row in abc:
            yield HQBelief(row[0], row[1], row[2])


def mc_band_report(
    prior: SecondOrderPrior, band: MessageBand, cfg: McConfig
) -> dict[str, McEstimate]:
    """Band-conditioned estimates for all five channels (quadrants + BLUE).

    Rejection conditioning: a sample is kept when its cond_red lies in the
    band (samples with a + b = 0 are never kept).  Channel means are over
    accepted samples; stderr uses the ddof-1 sample standard deviation.
    Chunk partials merge in chunk index order, so a parallel run matches a
    sequential one bit for bit.
    """
    code = prior.variant_code
    alpha = prior.alpha_array()
    lo, hi = band.lo, band.hi
    parts = _map_chunks(
        lambda i, size: backend.band_stats_chunk(code, alpha, size, cfg.seed, i, lo, hi),
        cfg,
    )
    n_acc = 0
    sums = np.zeros(len(backend.CHANNELS))
    sumsq = np.zeros(len(backend.CHANNELS))
    for part_n, part_sums, part_sumsq in parts:
        n_acc += part_n
        sums = sums + part_sums
        sumsq = sumsq + part_sumsq
    if n_acc == 0:
        raise NoAcceptedSamples(
            f"no samples fell in the band [{lo}, {hi}] out of {cfg.samples}"
        )
    means = sums / n_acc
    if n_acc >= 2:
        var = (sumsq - sums * sums / n_acc) / (n_acc - 1)
        stderr = np.sqrt(np.maximum(var, 0.0) / n_acc)
    else:
        stderr = np.zeros_like(means)  # one accepted sample: spread unknowable
    return {
        name: McEstimate(float(means[j]), float(stderr[j]), cfg.samples, n_acc)
        for j, name in enumerate(backend.CHANNELS)
    }


def mc_posterior_quadrants(
    prior: SecondOrderPrior, band: MessageBand, cfg: McConfig
) -> dict[str, McEstimate]:
    """Quadrant-only view of mc_band_report."""
    report = mc_band_report(prior, band, cfg)
    return {name: report[name] for name in QUADRANTS}


def trust_expectation(
    samples: Sequence[HQBelief] | np.ndarray,
    E: Event,
    weights: Sequence[float] | None = None,
) -> float:
    """Expectation of the sender's probability of event E over a weighted
    sample of beliefs: the trusting receiver's own probability of E.

    ``samples`` may be an (n, 3) array of (a, b, c) rows or a sequence of
    HQBelief.  Uniform weights when none are given.
    """
    extra = E.members - set(QUADRANTS)
    if extra:
        raise ValueError(f"event members {sorted(extra)} are not quadrants")
    if isinstance(samples, np.ndarray):
        abc = np.asarray(samples, dtype=np.float64)
    else:
        abc = np.array([(h.a, h.b, h.c) for h in samples])
    if abc.ndim != 2 or abc.shape[1] != 3 or abc.shape[0] == 0:
        raise ValueError("samples must be a non-empty (n, 3) collection")
    a = abc[:, 0]
    b = abc[:, 1]
    t = a + b
    parts = {"R1": a, "R2": b, "B1": abc[:, 2], "B2": 1.0 - (t + abc[:, 2])}
    vals = np.zeros(abc.shape[0])
    for name in QUADRANTS:  # left fold in quadrant order: full event is exactly 1
        if name in E.members:
            vals = vals + parts[name]
    if weights is None:
        return float(vals.mean())
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != vals.shape:
        raise ValueError(f"{w.shape} weights for {vals.shape} samples")
    if np.any(w < 0.0):
        raise ValueError("weights must be nonnegative")
    total = w.sum()
    if total <= 0.0:
        raise ValueError("weights must have positive total")
    return float((w * vals).sum() / total)


def ks_statistic(samples, cdf: Callable) -> float:
    """Two-sided Kolmogorov-Smirnov distance between a sample and a CDF."""
    xs = np.sort(np.asarray(samples, dtype=np.float64))
    n = xs.size
    if n == 0:
        raise ValueError("KS statistic needs a non-empty sample")
    f = np.asarray(cdf(xs), dtype=np.float64)
    if f.shape != xs.shape:
        f = np.array([cdf(x) for x in xs], dtype=np.float64)
    steps = np.arange(1, n + 1) / n
    return float(max((steps - f).max(), (f - (steps - 1.0 / n)).max()))


def independence_deviation(x: np.ndarray, y: np.ndarray, grid: int) -> float:
    """Max deviation between the empirical joint CDF of (x, y) and the
    product of the empirical marginal CDFs, over a grid x grid lattice of
    points (k/(grid+1), l/(grid+1)).  Uses counts only: degenerate
    (constant) marginals need no special casing."""
    if grid < 2:
        raise ValueError("lattice needs at least 2 points per axis")
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1 or x.size == 0:
        raise ValueError("x and y must be matching non-empty 1-d samples")
    n = x.size
    lattice = np.arange(1, grid + 1) / (grid + 1)
    edges = np.concatenate(([-np.inf], lattice, [np.inf]))
    counts, _, _ = np.histogram2d(x, y, bins=(edges, edges))
    cum = counts.cumsum(axis=0).cumsum(axis=1)
    joint = cum[:grid, :grid] / n
    fx = counts.sum(axis=1).cumsum()[:grid] / n
    fy = counts.sum(axis=0).cumsum()[:grid] / n
    return float(np.abs(joint - np.outer(fx, fy)).max())


def independence_check(prior: SecondOrderPrior, cfg: McConfig, grid: int = 20) -> float:
    """Monte Carlo check that cond_red and blue_prob are independent under
    ``prior``: max lattice deviation of joint CDF from product of marginals.
    Samples with a + b = 0 are dropped (cond_red undefined there)."""
    abc = sample_prior_array(prior, cfg)
    t = abc[:, 0] + abc[:, 1]
    keep = t > 0.0
    cr = abc[keep, 0] / t[keep]
    bl = 1.0 - t[keep]
    return independence_deviation(cr, bl, grid)
