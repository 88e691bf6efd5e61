"""Head-to-head timing of the Monte Carlo backends.

Runs the sampling and band-conditioning kernels on every available
backend and prints a small table.  The compiled kernel exists because the
sampler is the package's only hot loop; this script is the evidence.

Usage: python benchmarks/bench_backends.py [--samples N] [--repeat K]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from probkin import backend

VARIANT_NAMES = {
    backend.VARIANT_UNIFORM: "uniform",
    backend.VARIANT_DIRICHLET: "dirichlet",
    backend.VARIANT_CONDITIONAL: "conditional",
}


def _time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--samples", type=int, default=2 * 10**6)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=42)
    args = parser.parse_args()

    n = args.samples
    alpha = np.array([2.0, 1.0, 1.0, 1.0])
    names = backend.available_backends()
    print(f"samples per call: {n:,}   best of {args.repeat}\n")
    header = f"{'kernel':<28}" + "".join(f"{name:>12}" for name in names)
    if len(names) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))

    rows = []
    for code, vname in VARIANT_NAMES.items():
        a = np.ones(4) if code != backend.VARIANT_DIRICHLET else alpha
        rows.append((f"sample_chunk/{vname}",
                     lambda mod, c=code, al=a: mod.sample_chunk(c, al, n, args.seed, 0)))
        rows.append((f"band_stats_chunk/{vname}",
                     lambda mod, c=code, al=a: mod.band_stats_chunk(c, al, n, args.seed, 0, 0.7, 0.8)))

    for label, call in rows:
        times = []
        for name in names:
            backend.use(name)
            mod = backend._MODULES[name]
            times.append(_time(lambda: call(mod), args.repeat))
        line = f"{label:<28}" + "".join(f"{t * 1e3:>10.1f}ms" for t in times)
        if len(times) == 2:
            line += f"{times[1] / times[0]:>9.2f}x"
        print(line)


if __name__ == "__main__":
    main()
