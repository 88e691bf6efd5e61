"""Monte Carlo backend selection.

Two interchangeable kernel implementations exist: probkin._mc_kernel (a
compiled Cython extension) and probkin._mc_numpy (pure numpy).  The
compiled one is preferred when importable; set PROBKIN_MC_BACKEND to
"cython" or "numpy" to force a choice before import.  Sample streams are
bit-identical across backends; aggregated moments may differ in the last
couple of ulps (summation order).
"""

from __future__ import annotations

import os

from . import _mc_numpy

try:
    from . import _mc_kernel
except ImportError:
    _mc_kernel = None

_MODULES = {"numpy": _mc_numpy}
if _mc_kernel is not None:
    _MODULES["cython"] = _mc_kernel

VARIANT_UNIFORM = _mc_numpy.VARIANT_UNIFORM
VARIANT_DIRICHLET = _mc_numpy.VARIANT_DIRICHLET
VARIANT_CONDITIONAL = _mc_numpy.VARIANT_CONDITIONAL
CHANNELS = _mc_numpy.CHANNELS


def available_backends() -> tuple[str, ...]:
    """Backends importable in this environment, preferred first."""
    return ("cython", "numpy") if "cython" in _MODULES else ("numpy",)


def _initial() -> str:
    requested = os.environ.get("PROBKIN_MC_BACKEND")
    if requested is not None:
        if requested not in _MODULES:
            raise ImportError(
                f"PROBKIN_MC_BACKEND={requested!r} not available; "
                f"choices: {', '.join(available_backends())}"
            )
        return requested
    return "cython" if "cython" in _MODULES else "numpy"


_active = _initial()


def use(name: str) -> None:
    """Switch the active backend (mainly a testing hook)."""
    global _active
    if name not in _MODULES:
        raise ValueError(
            f"backend {name!r} not available; choices: {', '.join(available_backends())}"
        )
    _active = name


def active_backend() -> str:
    return _active


def sample_chunk(variant, alpha, n, seed, chunk_index):
    return _MODULES[_active].sample_chunk(variant, alpha, n, seed, chunk_index)


def band_stats_chunk(variant, alpha, n, seed, chunk_index, lo, hi):
    return _MODULES[_active].band_stats_chunk(variant, alpha, n, seed, chunk_index, lo, hi)
