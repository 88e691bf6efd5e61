# cython: language_level=3
# cython: boundscheck=False
# cython: wraparound=False
# cython: cdivision=True
"""Compiled Monte Carlo kernels.

Twin of probkin._mc_numpy: same draw-order contract, same channel order,
bit-identical sample streams for a fixed (seed, chunk_index).  See that
module's docstring for the contract; this one only buys speed.
"""

import numpy as np

cimport numpy as cnp
from cpython.pycapsule cimport PyCapsule_GetPointer
from numpy.random cimport bitgen_t
from numpy.random.c_distributions cimport (
    random_standard_exponential,
    random_standard_gamma,
)

cnp.import_array()

VARIANT_UNIFORM = 0
VARIANT_DIRICHLET = 1
VARIANT_CONDITIONAL = 2

CHANNELS = ("R1", "R2", "B1", "B2", "BLUE")


cdef bitgen_t *_bitgen_ptr(object bit_generator) except NULL:
    return <bitgen_t *> PyCapsule_GetPointer(bit_generator.capsule, "BitGenerator")


def sample_chunk(int variant, double[::1] alpha, Py_ssize_t n, object seed,
                 Py_ssize_t chunk_index):
    """Draw ``n`` beliefs as an (n, 3) array of (a, b, c)."""
    bg = np.random.PCG64(np.random.SeedSequence((seed, chunk_index)))
    cdef bitgen_t *rng = _bitgen_ptr(bg)
    cdef cnp.ndarray out_arr = np.empty((n, 3), dtype=np.float64)
    cdef double[:, ::1] o = out_arr
    cdef double[:, ::1] g
    cdef Py_ssize_t i, j
    cdef double e0, e1, e2, e3, s, r, x, y, aj

    if variant == VARIANT_UNIFORM:
        with nogil:
            for i in range(n):
                e0 = random_standard_exponential(rng)
                e1 = random_standard_exponential(rng)
                e2 = random_standard_exponential(rng)
                e3 = random_standard_exponential(rng)
                s = (e0 + e1) + (e2 + e3)
                o[i, 0] = e0 / s
                o[i, 1] = e1 / s
                o[i, 2] = e2 / s
    elif variant == VARIANT_DIRICHLET:
        g = np.empty((n, 4), dtype=np.float64)
        with nogil:
            # column-major: all n draws for alpha_1, then alpha_2, ...
            for j in range(4):
                aj = alpha[j]
                for i in range(n):
                    g[i, j] = random_standard_gamma(rng, aj)
            for i in range(n):
                s = (g[i, 0] + g[i, 1]) + (g[i, 2] + g[i, 3])
                o[i, 0] = g[i, 0] / s
                o[i, 1] = g[i, 1] / s
                o[i, 2] = g[i, 2] / s
    elif variant == VARIANT_CONDITIONAL:
        with nogil:
            for i in range(n):
                r = rng.next_double(rng.state)
                x = rng.next_double(rng.state)
                y = rng.next_double(rng.state)
                o[i, 0] = r * x
                o[i, 1] = r * (1.0 - x)
                o[i, 2] = (1.0 - r) * y
    else:
        raise ValueError(f"unknown prior variant code {variant}")
    return out_arr


def band_stats_chunk(int variant, double[::1] alpha, Py_ssize_t n, object seed,
                     Py_ssize_t chunk_index, double lo, double hi):
    """Rejection-condition one chunk on cond_red in [lo, hi].

    Returns (n_accepted, channel sums, channel sums of squares); channel
    order as in CHANNELS.  Accumulation is a plain left fold, so means can
    differ from the numpy backend in the last couple of ulps.
    """
    bg = np.random.PCG64(np.random.SeedSequence((seed, chunk_index)))
    cdef bitgen_t *rng = _bitgen_ptr(bg)
    cdef double[:, ::1] g
    cdef Py_ssize_t i, j
    cdef Py_ssize_t acc = 0
    cdef double e0, e1, e2, e3, s, r, x, y, aj
    cdef double a, b, c, t, xr, d, blue
    cdef double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0
    cdef double q0 = 0.0, q1 = 0.0, q2 = 0.0, q3 = 0.0, q4 = 0.0

    if variant == VARIANT_UNIFORM:
        with nogil:
            for i in range(n):
                e0 = random_standard_exponential(rng)
                e1 = random_standard_exponential(rng)
                e2 = random_standard_exponential(rng)
                e3 = random_standard_exponential(rng)
                s = (e0 + e1) + (e2 + e3)
                a = e0 / s
                b = e1 / s
                c = e2 / s
                t = a + b
                if t > 0.0:
                    xr = a / t
                    if lo <= xr <= hi:
                        acc += 1
                        d = 1.0 - (t + c)
                        blue = 1.0 - t
                        s0 += a; q0 += a * a
                        s1 += b; q1 += b * b
                        s2 += c; q2 += c * c
                        s3 += d; q3 += d * d
                        s4 += blue; q4 += blue * blue
    elif variant == VARIANT_DIRICHLET:
        g = np.empty((n, 4), dtype=np.float64)
        with nogil:
            for j in range(4):
                aj = alpha[j]
                for i in range(n):
                    g[i, j] = random_standard_gamma(rng, aj)
            for i in range(n):
                s = (g[i, 0] + g[i, 1]) + (g[i, 2] + g[i, 3])
                a = g[i, 0] / s
                b = g[i, 1] / s
                c = g[i, 2] / s
                t = a + b
                if t > 0.0:
                    xr = a / t
                    if lo <= xr <= hi:
                        acc += 1
                        d = 1.0 - (t + c)
                        blue = 1.0 - t
                        s0 += a; q0 += a * a
                        s1 += b; q1 += b * b
                        s2 += c; q2 += c * c
                        s3 += d; q3 += d * d
                        s4 += blue; q4 += blue * blue
    elif variant == VARIANT_CONDITIONAL:
        with nogil:
            for i in range(n):
                r = rng.next_double(rng.state)
                x = rng.next_double(rng.state)
                y = rng.next_double(rng.state)
                a = r * x
                b = r * (1.0 - x)
                c = (1.0 - r) * y
                t = a + b
                if t > 0.0:
                    xr = a / t
                    if lo <= xr <= hi:
                        acc += 1
                        d = 1.0 - (t + c)
                        blue = 1.0 - t
                        s0 += a; q0 += a * a
                        s1 += b; q1 += b * b
                        s2 += c; q2 += c * c
                        s3 += d; q3 += d * d
                        s4 += blue; q4 += blue * blue
    else:
        raise ValueError(f"unknown prior variant code {variant}")

    sums = np.array([s0, s1, s2, s3, s4])
    sumsq = np.array([q0, q1, q2, q3, q4])
    return int(acc), sums, sumsq
