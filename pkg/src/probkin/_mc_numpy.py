"""Pure-numpy Monte Carlo kernels for second-order sampling.

This is the fallback backend; probkin._mc_kernel is the compiled twin.
Both backends draw from the same underlying C samplers in the same order,
so for a fixed (seed, chunk_index) the returned sample arrays are
bit-identical across backends.  Accumulated moments may differ between
backends by summation order only (~1e-12 relative).

Draw-order contract (per chunk, generator PCG64(SeedSequence((seed, i)))):
  - uniform variant: 4 unit exponentials per sample, sample-major;
    s = (e0+e1)+(e2+e3), (a,b,c) = (e0,e1,e2)/s
  - dirichlet variant: n standard gammas for alpha_1, then n for alpha_2,
    etc. (column-major); normalize rows with the same grouping
  - conditional variant: 3 uniforms per sample, sample-major (r, x, y);
    a = r*x, b = r*(1-x), c = (1-r)*y
"""

from __future__ import annotations

import numpy as np

VARIANT_UNIFORM = 0
VARIANT_DIRICHLET = 1
VARIANT_CONDITIONAL = 2

# tracked channels for band conditioning; order is part of the contract
CHANNELS = ("R1", "R2", "B1", "B2", "BLUE")


def _generator(seed: int, chunk_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, chunk_index))))


def sample_chunk(
    variant: int,
    alpha: np.ndarray,
    n: int,
    seed: int,
    chunk_index: int,
) -> np.ndarray:
    """Draw ``n`` second-order beliefs; returns an (n, 3) array of (a, b, c)."""
    gen = _generator(seed, chunk_index)
    out = np.empty((n, 3))
    if n == 0:
        return out
    if variant == VARIANT_UNIFORM:
        e = gen.standard_exponential((n, 4))
        s = (e[:, 0] + e[:, 1]) + (e[:, 2] + e[:, 3])
        out[:, 0] = e[:, 0] / s
        out[:, 1] = e[:, 1] / s
        out[:, 2] = e[:, 2] / s
    elif variant == VARIANT_DIRICHLET:
        g = np.empty((n, 4))
        for j in range(4):
            g[:, j] = gen.standard_gamma(alpha[j], n)
        s = (g[:, 0] + g[:, 1]) + (g[:, 2] + g[:, 3])
        out[:, 0] = g[:, 0] / s
        out[:, 1] = g[:, 1] / s
        out[:, 2] = g[:, 2] / s
    elif variant == VARIANT_CONDITIONAL:
        u = gen.random((n, 3))
        r = u[:, 0]
        x = u[:, 1]
        y = u[:, 2]
        out[:, 0] = r * x
        out[:, 1] = r * (1.0 - x)
        out[:, 2] = (1.0 - r) * y
    else:
        raise ValueError(f"unknown prior variant code {variant}")
    return out


def band_stats_chunk(
    variant: int,
    alpha: np.ndarray,
    n: int,
    seed: int,
    chunk_index: int,
    lo: float,
    hi: float,
) -> tuple[int, np.ndarray, np.ndarray]:
    """Rejection-condition one chunk on cond_red in [lo, hi].

    Returns (n_accepted, per-channel sums, per-channel sums of squares)
    over the accepted samples, channels ordered as CHANNELS.  Samples with
    a+b = 0 never fall in the band.
    """
    abc = sample_chunk(variant, alpha, n, seed, chunk_index)
    a = abc[:, 0]
    b = abc[:, 1]
    c = abc[:, 2]
    t = a + b
    pos = np.flatnonzero(t > 0.0)
    x = a[pos] / t[pos]
    sel = pos[(x >= lo) & (x <= hi)]
    va = a[sel]
    vb = b[sel]
    vc = c[sel]
    vt = t[sel]
    vd = 1.0 - (vt + vc)
    vblue = 1.0 - vt
    sums = np.array([va.sum(), vb.sum(), vc.sum(), vd.sum(), vblue.sum()])
    sumsq = np.array(
        [(va * va).sum(), (vb * vb).sum(), (vc * vc).sum(),
         (vd * vd).sum(), (vblue * vblue).sum()]
    )
    return int(sel.size), sums, sumsq
