"""Backend parity: the jit kernels and the uncompiled fallback must agree bit for bit."""

import os
import subprocess
import sys
import textwrap

import numpy as np

from moran_assort import _kernels

SCRIPT = textwrap.dedent("""
    import numpy as np
    from moran_assort import (AssortmentScheme, ModelParams, PopulationState,
                              make_recombination, simulate)
    from moran_assort import _kernels
    from moran_assort.diffusion import DiffusionSpec, SdeConfig, sde_simulate

    scheme = AssortmentScheme.hamming([0.0, -2.0, -5.0])
    params = ModelParams(scheme, make_recombination(2, "free"), 1.0, 1.0, 40)
    init = PopulationState.monomorphic(2, 40, 0)
    traj = simulate(params, init, 4000, 400, seed=17)[0]

    spec = DiffusionSpec.from_scheme(scheme, 0.8, 0.8)
    out = sde_simulate(spec, SdeConfig(dt=1e-3, steps=3000, record_every=300, seed=4),
                       [0.4, 0.6])
    print(_kernels.BACKEND)
    print(traj.counts.tolist())
    print(out.path.tolist())
    print(out.clamp0, out.clamp1)
""")


def _run(disable: bool) -> list[str]:
    env = dict(os.environ)
    env["MORAN_ASSORT_DISABLE_NUMBA"] = "1" if disable else "0"
    proc = subprocess.run([sys.executable, "-c", SCRIPT], env=env,
                          capture_output=True, text=True, timeout=600)
    assert proc.returncode == 0, proc.stderr
    return proc.stdout.splitlines()


def test_numpy_fallback_matches_numba_exactly():
    jit_lines = _run(disable=False)
    plain_lines = _run(disable=True)
    assert jit_lines[0] == "numba"
    assert plain_lines[0] == "numpy"
    assert jit_lines[1:] == plain_lines[1:]


def test_lowbit_table():
    table = _kernels.lowbit_index_table(4)
    assert table[1] == 0 and table[2] == 1 and table[12] == 2 and table[8] == 3
