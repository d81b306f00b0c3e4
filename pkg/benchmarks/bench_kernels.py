"""Benchmark the jit-compiled kernels against the uncompiled fallback.

Runs the Moran replacement loop and the diffusion integrator under the
active backend.  Launch once normally and once with
``MORAN_ASSORT_DISABLE_NUMBA=1`` to compare; the fallback executes the same
code interpreted, so sizes are kept small enough to finish either way.

Usage:
    python benchmarks/bench_kernels.py [--moran-steps N] [--sde-steps N]
"""

from __future__ import annotations

import argparse
import time

import moran_assort as ma
from moran_assort import _kernels
from moran_assort.diffusion import DiffusionSpec, SdeConfig, sde_simulate


def bench_moran(steps: int) -> float:
    scheme = ma.AssortmentScheme.hamming([0.0, -2.0, -8.0])
    params = ma.ModelParams(scheme, ma.make_recombination(2, "free"), 1.0, 1.0, 500)
    init = ma.PopulationState.monomorphic(2, 500, 0)
    ma.simulate(params, init, 10, 10, seed=0)           # compile outside the clock
    start = time.perf_counter()
    ma.simulate(params, init, steps, steps, seed=1)
    return time.perf_counter() - start


def bench_sde(steps: int) -> float:
    spec = DiffusionSpec.from_scheme(
        ma.AssortmentScheme.hamming([0.0, -2.0, -8.0]), 0.6, 0.6)
    sde_simulate(spec, SdeConfig(dt=1e-4, steps=10, record_every=10, seed=0), [0.5, 0.5])
    start = time.perf_counter()
    sde_simulate(spec, SdeConfig(dt=1e-4, steps=steps, record_every=steps, seed=1),
                 [0.5, 0.5])
    return time.perf_counter() - start


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    default = 2_000_000 if _kernels.BACKEND == "numba" else 50_000
    parser.add_argument("--moran-steps", type=int, default=default)
    parser.add_argument("--sde-steps", type=int, default=default)
    args = parser.parse_args()

    t = bench_moran(args.moran_steps)
    print(f"[{_kernels.BACKEND}] moran: {args.moran_steps} events in {t:.3f}s "
          f"({args.moran_steps / t / 1e6:.2f} M events/s)")
    t = bench_sde(args.sde_steps)
    print(f"[{_kernels.BACKEND}] sde:   {args.sde_steps} steps in {t:.3f}s "
          f"({args.sde_steps / t / 1e6:.2f} M steps/s)")


if __name__ == "__main__":
    main()
