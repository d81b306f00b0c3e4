"""Hot inner loops: Moran chain stepping and SDE integration.

Every kernel is written in nopython-compatible Python and compiled with
numba when available.  Setting the environment variable
``MORAN_ASSORT_DISABLE_NUMBA=1`` (or a failed numba import) selects the
plain NumPy/Python fallback, which runs the *same* code uncompiled, so the
two backends consume identical random streams and produce bit-identical
results.  ``BACKEND`` records which one is active.

All kernels draw from a ``numpy.random.Generator`` passed in by the caller;
numba implements the same PCG64 streams, so results do not depend on the
backend.
"""

from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("MORAN_ASSORT_DISABLE_NUMBA", "").lower() in ("1", "true", "yes")

if not _DISABLED:
    try:
        import numba
    except ImportError:  # pragma: no cover - numba is a hard dependency
        numba = None
        _DISABLED = True

BACKEND = "numpy" if _DISABLED else "numba"


def _maybe_jit(fn):
    if _DISABLED:
        return fn
    return numba.njit(cache=True, nogil=True)(fn)


# ---------------------------------------------------------------------------
# Moran chain
# ---------------------------------------------------------------------------

@_maybe_jit
def _moran_step(counts, pair_w, rec_cdf, mu0n, mu1n, n_loci, pop_size, gen):
    """One replacement event; returns (first parent type, offspring type).

    First parent drawn by count, second parent by assortment-weighted count
    (self-fertilisation allowed), then recombination subset and per-locus
    mutation.
    """
    ntypes = counts.shape[0]
    # first parent ~ counts
    u = gen.random() * pop_size
    first = 0
    acc = 0.0
    for t in range(ntypes):
        acc += counts[t]
        if u < acc:
            first = t
            break
    # second parent ~ (1 + s/N) * counts, includes the first individual
    wsum = 0.0
    for t in range(ntypes):
        wsum += pair_w[first, t] * counts[t]
    u = gen.random() * wsum
    second = ntypes - 1
    acc = 0.0
    for t in range(ntypes):
        acc += pair_w[first, t] * counts[t]
        if u < acc:
            second = t
            break
    # recombination subset: offspring takes the first parent's alleles on L
    u = gen.random()
    mask = ntypes - 1
    for L in range(ntypes):
        if u < rec_cdf[L]:
            mask = L
            break
    child = (first & mask) | (second & ~mask & (ntypes - 1))
    # independent mutation per locus
    for locus in range(n_loci):
        bit = (child >> locus) & 1
        p = mu1n if bit == 1 else mu0n
        if p > 0.0 and gen.random() < p:
            child ^= 1 << locus
    return first, child


@_maybe_jit
def moran_run(counts, pair_w, rec_cdf, mu0n, mu1n, n_loci, steps, record_every, gen, out):
    """Advance the chain ``steps`` events, snapshotting counts every
    ``record_every`` events into ``out`` (shape (steps // record_every, 2**n)).
    ``counts`` is updated in place."""
    ntypes = counts.shape[0]
    pop_size = 0.0
    for t in range(ntypes):
        pop_size += counts[t]
    row = 0
    for step in range(steps):
        first, child = _moran_step(counts, pair_w, rec_cdf, mu0n, mu1n,
                                   n_loci, pop_size, gen)
        counts[first] -= 1
        counts[child] += 1
        if (step + 1) % record_every == 0 and row < out.shape[0]:
            for t in range(ntypes):
                out[row, t] = counts[t]
            row += 1
    return row


@_maybe_jit
def moran_tally(counts, pair_w, rec_cdf, mu0n, mu1n, n_loci, trials, gen, tally):
    """Sample ``trials`` single events from a fixed state; tally (first, child)."""
    ntypes = counts.shape[0]
    pop_size = 0.0
    for t in range(ntypes):
        pop_size += counts[t]
    for _ in range(trials):
        first, child = _moran_step(counts, pair_w, rec_cdf, mu0n, mu1n,
                                   n_loci, pop_size, gen)
        tally[first, child] += 1


# ---------------------------------------------------------------------------
# Diffusion paths
# ---------------------------------------------------------------------------

@_maybe_jit
def _drift_vector(x, coeff, lowbit_idx, prod, mu0, mu1, b_out):
    """b_i(x) for all i; ``prod`` is a 2**n workspace for subset products."""
    n = x.shape[0]
    size = prod.shape[0]
    prod[0] = 1.0
    for m in range(1, size):
        low = m & (-m)
        xi = x[lowbit_idx[m]]
        prod[m] = prod[m ^ low] * (xi * (1.0 - xi))
    for i in range(n):
        p = 0.0
        for m in range(size):
            c = coeff[i, m]
            if c != 0.0:
                p += c * prod[m]
        rho = x[i] * (1.0 - x[i])
        b_out[i] = mu1 * (1.0 - x[i]) - mu0 * x[i] + (0.5 - x[i]) * rho * p


@_maybe_jit
def sde_run(x, coeff, lowbit_idx, mu0, mu1, dt, steps, record_every, gen, out):
    """Clamped diffusion path with the variance-corrected square-root step.

    Per coordinate the update is
        x' = x + b dt + sqrt(x(1-x) dt) z + (1 - 2x)(z^2 - 1) dt / 4,
    clamped to [0, 1].  The quadratic term keeps the discrete chain away
    from an inaccessible boundary (mutation rate >= 1/2) while leaving the
    attainable regime (< 1/4 near the relevant boundary) free to hit it.
    Returns (rows written, clamps at 0, clamps at 1).
    """
    n = x.shape[0]
    size = lowbit_idx.shape[0]
    prod = np.empty(size)
    b = np.empty(n)
    sdt = np.sqrt(dt)
    clamp0 = 0
    clamp1 = 0
    row = 0
    for step in range(steps):
        _drift_vector(x, coeff, lowbit_idx, prod, mu0, mu1, b)
        for i in range(n):
            z = gen.standard_normal()
            rho = x[i] * (1.0 - x[i])
            xn = x[i] + b[i] * dt
            if rho > 0.0:
                # no noise reaches an exact vertex, so neither does its
                # quadratic correction: vertices stay absorbing when b = 0
                xn += (np.sqrt(rho) * sdt * z
                       + 0.25 * (1.0 - 2.0 * x[i]) * (z * z - 1.0) * dt)
            if xn < 0.0:
                xn = 0.0
                clamp0 += 1
            elif xn > 1.0:
                xn = 1.0
                clamp1 += 1
            x[i] = xn
        if (step + 1) % record_every == 0 and row < out.shape[0]:
            for i in range(n):
                out[row, i] = x[i]
            row += 1
    return row, clamp0, clamp1


@_maybe_jit
def _bounding_drift(u, mu0, mu1, m_lo, m_hi, upper):
    """Constant-coefficient one-locus drifts sandwiching b_i on [0, 1]."""
    factor = (0.5 - u) * u * (1.0 - u)
    if upper:
        m = m_hi if u < 0.5 else m_lo
    else:
        m = m_lo if u < 0.5 else m_hi
    return mu1 * (1.0 - u) - mu0 * u + factor * m


@_maybe_jit
def sde_sandwich(x, lo, hi, coeff, lowbit_idx, m_lo, m_hi, mu0, mu1, dt, steps, gen):
    """Couple the full path with its per-coordinate bounding one-locus paths.

    All three systems consume the same per-coordinate noise.  Returns the
    maximum pathwise ordering violation max(lo_i - x_i, x_i - hi_i).
    """
    n = x.shape[0]
    size = lowbit_idx.shape[0]
    prod = np.empty(size)
    b = np.empty(n)
    sdt = np.sqrt(dt)
    worst = 0.0
    for _ in range(steps):
        _drift_vector(x, coeff, lowbit_idx, prod, mu0, mu1, b)
        for i in range(n):
            z = gen.standard_normal()
            corr = 0.25 * (z * z - 1.0) * dt
            rho = x[i] * (1.0 - x[i])
            xn = x[i] + b[i] * dt
            if rho > 0.0:
                xn += np.sqrt(rho) * sdt * z + (1.0 - 2.0 * x[i]) * corr
            bl = _bounding_drift(lo[i], mu0, mu1, m_lo[i], m_hi[i], False)
            rho_l = lo[i] * (1.0 - lo[i])
            ln = lo[i] + bl * dt
            if rho_l > 0.0:
                ln += np.sqrt(rho_l) * sdt * z + (1.0 - 2.0 * lo[i]) * corr
            bh = _bounding_drift(hi[i], mu0, mu1, m_lo[i], m_hi[i], True)
            rho_h = hi[i] * (1.0 - hi[i])
            hn = hi[i] + bh * dt
            if rho_h > 0.0:
                hn += np.sqrt(rho_h) * sdt * z + (1.0 - 2.0 * hi[i]) * corr
            x[i] = min(max(xn, 0.0), 1.0)
            lo[i] = min(max(ln, 0.0), 1.0)
            hi[i] = min(max(hn, 0.0), 1.0)
            v = lo[i] - x[i]
            if v > worst:
                worst = v
            v = x[i] - hi[i]
            if v > worst:
                worst = v
    return worst


def lowbit_index_table(n: int) -> np.ndarray:
    """Index of the lowest set bit for every mask below 2**n (entry 0 unused)."""
    out = np.zeros(1 << n, dtype=np.int64)
    for m in range(1, 1 << n):
        out[m] = (m & -m).bit_length() - 1
    return out
