"""Finite-population Moran chain with assortative mating, recombination, mutation.

The population is stored as genotype counts (one integer per n-bit type):
every sampling law depends on the counts only, which bounds per-event work
at O(2**n).  One event replaces exactly one individual: a first parent is
drawn by count, a second by assortment-weighted count (self-fertilisation
allowed), the offspring takes the first parent's alleles on a random subset
of loci and the second's elsewhere, then each offspring locus mutates
independently.

Besides the stochastic chain this module carries the exact one-event law
and the expansion oracles built on it (drift of the type frequencies and of
the allelic frequencies, second/fourth moments, linkage-disequilibrium
relaxation), which the acceptance suite checks against the diffusion limit.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, reduce

import numpy as np

from . import _kernels
from .assortment import AssortmentScheme, MeanAssortTable, mean_assortment
from .combinatorics import popcount, submasks, subset_products, validate_locus_count
from .recombination import RecombinationDistribution

# Dense pair-weight tables are 4**n floats; beyond this the simulator refuses.
MAX_SIM_LOCI = 10

# Exhaustive-enumeration oracles walk 8**n tensors and all N-compositions.
ORACLE_MAX_LOCI = 4
ORACLE_MAX_POP = 64


class InfeasibleCoordinatesError(ValueError):
    """The requested (x, y) pair corresponds to no frequency vector."""


@dataclass(frozen=True)
class PopulationState:
    """Genotype counts of a population of fixed size."""

    n: int
    N: int
    counts: np.ndarray

    def __post_init__(self):
        validate_locus_count(self.n)
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.shape != (1 << self.n,):
            raise ValueError(f"need {1 << self.n} genotype counts, got {counts.shape}")
        if counts.min() < 0 or counts.sum() != self.N:
            raise ValueError("counts must be nonnegative and sum to the population size")
        object.__setattr__(self, "counts", counts)
        counts.setflags(write=False)

    @staticmethod
    def monomorphic(n: int, N: int, genotype: int = 0) -> "PopulationState":
        counts = np.zeros(1 << n, dtype=np.int64)
        counts[genotype] = N
        return PopulationState(n, N, counts)

    @staticmethod
    def from_dict(n: int, N: int, type_counts: dict) -> "PopulationState":
        counts = np.zeros(1 << n, dtype=np.int64)
        for genotype, c in type_counts.items():
            counts[int(genotype)] = int(c)
        return PopulationState(n, N, counts)

    def frequencies(self) -> np.ndarray:
        return self.counts / self.N


@dataclass(frozen=True)
class ModelParams:
    """Scheme, recombination law, rescaled mutation rates and population size.

    ``mu0``/``mu1`` are the diffusion-scale rates; the per-event flip
    probability at each locus is mu/N.
    """

    scheme: AssortmentScheme
    recomb: RecombinationDistribution
    mu0: float
    mu1: float
    N: int

    def __post_init__(self):
        if self.scheme.n != self.recomb.n:
            raise ValueError("assortment and recombination disagree on locus count")
        if self.scheme.n > MAX_SIM_LOCI:
            raise ValueError(f"simulation supports at most {MAX_SIM_LOCI} loci")
        if self.mu0 < 0 or self.mu1 < 0:
            raise ValueError("mutation rates must be nonnegative")
        if self.N < 1:
            raise ValueError("population size must be positive")
        if max(self.mu0, self.mu1) / self.N > 1.0:
            raise ValueError("per-event mutation probability mu/N exceeds 1")
        smin = self.scheme.min_pair_value()
        if 1.0 + smin / self.N <= 0.0:
            raise ValueError(
                f"assortment weight 1 + s/N = {1.0 + smin / self.N!r} is not positive")

    @property
    def n(self) -> int:
        return self.scheme.n

    @cached_property
    def pair_weights(self) -> np.ndarray:
        """1 + s_{i,j}/N for all genotype pairs."""
        w = 1.0 + self.scheme.pair_matrix() / self.N
        w.setflags(write=False)
        return w

    @cached_property
    def rec_cdf(self) -> np.ndarray:
        cdf = np.cumsum(self.recomb.r)
        cdf[-1] = 1.0
        cdf.setflags(write=False)
        return cdf

    @cached_property
    def table(self) -> MeanAssortTable:
        return mean_assortment(self.scheme)


# ---------------------------------------------------------------------------
# Stochastic stepping
# ---------------------------------------------------------------------------

def step(state: PopulationState, params: ModelParams, rng: np.random.Generator) -> PopulationState:
    """One replacement event (delegates to the bulk kernel with steps=1)."""
    counts = state.counts.copy()
    out = np.empty((1, counts.size), dtype=np.int64)
    _kernels.moran_run(counts, params.pair_weights, params.rec_cdf,
                       params.mu0 / params.N, params.mu1 / params.N,
                       params.n, 1, 1, rng, out)
    return PopulationState(state.n, state.N, out[0])


@dataclass(frozen=True)
class Trajectory:
    """Snapshots of one replica: counts at t = record_every, 2*record_every, ..."""

    times: np.ndarray
    counts: np.ndarray
    seed_key: tuple

    def x_path(self) -> np.ndarray:
        n = self.counts.shape[1].bit_length() - 1
        N = self.counts[0].sum()
        masks = np.arange(self.counts.shape[1])
        out = np.empty((self.counts.shape[0], n))
        for i in range(n):
            sel = (masks >> i & 1) == 0
            out[:, i] = self.counts[:, sel].sum(axis=1) / N
        return out

    def y_path(self, y_masks) -> np.ndarray:
        N = self.counts[0].sum()
        masks = np.arange(self.counts.shape[1])
        xs = self.x_path()
        out = np.empty((self.counts.shape[0], len(y_masks)))
        for col, L in enumerate(y_masks):
            sel = (masks & L) == 0
            xl = self.counts[:, sel].sum(axis=1) / N
            prod = np.ones(self.counts.shape[0])
            for i in range(self.counts.shape[1].bit_length() - 1):
                if L >> i & 1:
                    prod *= xs[:, i]
            out[:, col] = prod - xl
        return out


def simulate(params: ModelParams, init: PopulationState, steps: int,
             record_every: int, seed: int, replicas: int = 1) -> list[Trajectory]:
    """Run independent replicas; deterministic given the master seed.

    Replica streams are spawned from numpy's SeedSequence, so each replica
    is reproducible in isolation and results do not depend on scheduling.
    """
    if init.n != params.n or init.N != params.N:
        raise ValueError("initial state does not match the model parameters")
    if steps < 0 or record_every < 1:
        raise ValueError("steps must be >= 0 and record_every >= 1")
    master = np.random.SeedSequence(seed)
    children = master.spawn(replicas)
    out = []
    nrec = steps // record_every
    for rep in range(replicas):
        gen = np.random.Generator(np.random.PCG64(children[rep]))
        counts = init.counts.copy()
        snaps = np.empty((nrec, counts.size), dtype=np.int64)
        _kernels.moran_run(counts, params.pair_weights, params.rec_cdf,
                           params.mu0 / params.N, params.mu1 / params.N,
                           params.n, steps, record_every, gen, snaps)
        times = (np.arange(1, nrec + 1) * record_every).astype(np.int64)
        out.append(Trajectory(times, snaps, tuple(children[rep].spawn_key)))
    return out


def sample_events(state: PopulationState, params: ModelParams, trials: int,
                  rng: np.random.Generator) -> np.ndarray:
    """Frequencies of (first parent type, offspring type) over repeated
    single events from a fixed state; empirical counterpart of
    :func:`exact_event_distribution`."""
    tally = np.zeros((state.counts.size, state.counts.size), dtype=np.int64)
    _kernels.moran_tally(state.counts.copy(), params.pair_weights, params.rec_cdf,
                         params.mu0 / params.N, params.mu1 / params.N,
                         params.n, trials, rng, tally)
    return tally


# ---------------------------------------------------------------------------
# Exact one-event law
# ---------------------------------------------------------------------------

def _as_frequencies(state, params: ModelParams) -> np.ndarray:
    """Accept a PopulationState or a bare frequency vector on the simplex.

    The one-event law is algebraic in the type frequencies, so the oracles
    also run at off-lattice points (e.g. exact product states).
    """
    if isinstance(state, PopulationState):
        if state.n != params.n:
            raise ValueError("state does not match the model locus count")
        return state.frequencies()
    z = np.asarray(state, dtype=np.float64)
    if z.shape != (1 << params.n,):
        raise ValueError(f"need {1 << params.n} type frequencies")
    if z.min() < 0 or abs(z.sum() - 1.0) > 1e-12:
        raise ValueError("frequencies must be a probability vector")
    return z


def recombination_tensor(n: int, r: np.ndarray) -> np.ndarray:
    """q[(i, k); child] as a dense (2**n)**3 tensor (small n only)."""
    if n > 5:
        raise ValueError("recombination tensor limited to n <= 5")
    size = 1 << n
    full = size - 1
    q = np.zeros((size, size, size))
    i_grid, k_grid = np.meshgrid(np.arange(size), np.arange(size), indexing="ij")
    for L in range(size):
        child = (i_grid & L) | (k_grid & ~L & full)
        np.add.at(q, (i_grid, k_grid, child), r[L])
    return q


def mutation_matrix(n: int, mu0n: float, mu1n: float) -> np.ndarray:
    """Product mutation kernel M[pre, post] over genotypes."""
    k = np.array([[1.0 - mu0n, mu0n], [mu1n, 1.0 - mu1n]])
    return reduce(np.kron, [k] * n)


def exact_event_distribution(state, params: ModelParams) -> np.ndarray:
    """Joint law of (first parent type i, offspring type j) in one event.

    Entry (i, j) with i != j is the probability that type j gains one
    individual while type i loses one; the diagonal carries the stay-put
    mass.  The whole matrix sums to 1 and row i sums to z_i.
    ``state`` may be a PopulationState or a bare frequency vector.
    """
    z = _as_frequencies(state, params)
    n, size = params.n, z.size
    pw = params.pair_weights
    norm = pw @ z
    w = pw / norm[:, None]                       # W[i, k] second-parent law
    q = recombination_tensor(n, params.recomb.r)
    m = mutation_matrix(n, params.mu0 / params.N, params.mu1 / params.N)
    pre = np.einsum("k,ikl->il", z * 1.0, q * w[:, :, None])
    return z[:, None] * (pre @ m)


def exact_transition(state, params: ModelParams,
                     i: int, j: int) -> float:
    """Probability that one event moves an individual from type i to type j."""
    if int(i) == int(j):
        raise ValueError("transition probability is defined for distinct types only")
    return float(exact_event_distribution(state, params)[int(i), int(j)])


# ---------------------------------------------------------------------------
# Coordinates: allelic frequencies and linkage disequilibria
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CoordinateView:
    """0-allele frequency vector x and disequilibria y (indexed by mask)."""

    n: int
    x: np.ndarray
    y: np.ndarray

    def y_of(self, L: int) -> float:
        if popcount(L) < 2:
            raise ValueError("disequilibrium is defined for |L| >= 2")
        return float(self.y[L])


def marginals(counts_or_freq: np.ndarray) -> np.ndarray:
    """X(L) = share of individuals carrying allele 0 on every locus of L."""
    z = np.asarray(counts_or_freq, dtype=np.float64)
    total = z.sum()
    size = z.size
    masks = np.arange(size)
    out = np.empty(size)
    for L in range(size):
        out[L] = z[(masks & L) == 0].sum() / total
    return out


def coordinates(state: PopulationState) -> CoordinateView:
    xl = marginals(state.counts)
    n, size = state.n, state.counts.size
    x = np.array([xl[1 << i] for i in range(n)])
    y = np.zeros(size)
    prods = subset_products(x)
    for L in range(size):
        if popcount(L) >= 2:
            y[L] = prods[L] - xl[L]
    return CoordinateView(n, x, y)


def invert_coordinates(n: int, x, y, tol: float = 1e-9) -> np.ndarray:
    """Frequency vector with the given marginals and disequilibria.

    Inverts the change of variables exactly; raises
    :class:`InfeasibleCoordinatesError` if the result leaves the simplex,
    which means that (x, y) is not realisable.
    """
    n = validate_locus_count(n)
    xs = np.asarray(x, dtype=np.float64)
    ys = np.asarray(y, dtype=np.float64)
    size = 1 << n
    full = size - 1
    if xs.size != n or ys.size != size:
        raise ValueError("coordinate arrays have the wrong shape")
    z = np.empty(size)
    prod0 = subset_products(xs)
    prod1 = subset_products(1.0 - xs)
    for J in range(size):
        val = prod0[J] * prod1[full & ~J]
        comp = full & ~J
        for T in submasks(comp):
            I = J | T
            if popcount(I) >= 2:
                sign = -1.0 if popcount(T) & 1 else 1.0
                val -= sign * ys[I]
        z[full & ~J] = val
    if z.min() < -tol or z.max() > 1.0 + tol:
        raise InfeasibleCoordinatesError(
            f"coordinates are not realisable: frequencies in [{z.min()!r}, {z.max()!r}]")
    return z


# ---------------------------------------------------------------------------
# Expansion oracles (exact enumeration, small systems)
# ---------------------------------------------------------------------------

def _check_oracle_size(params: ModelParams):
    if params.n > ORACLE_MAX_LOCI or params.N > ORACLE_MAX_POP:
        raise ValueError(
            f"exhaustive oracle limited to n <= {ORACLE_MAX_LOCI}, N <= {ORACLE_MAX_POP}")


def drift_oracle_Z(state, params: ModelParams) -> dict:
    """Exact N^2 E[dZ] per type, split against its closed-form expansion.

    Returns the exact value, the leading (recombination-only) term B0, the
    next-order term B1 and the residual exact - N B0 - B1, which must
    shrink like 1/N.
    """
    _check_oracle_size(params)
    z = _as_frequencies(state, params)
    n, size, N = params.n, z.size, params.N
    f = exact_event_distribution(z, params)
    exact = N * (f.sum(axis=0) - f.sum(axis=1))   # N^2 * E[dZ_i]

    q = recombination_tensor(n, params.recomb.r)
    zz = np.outer(z, z)
    b0 = np.einsum("jk,jki->i", zz, q) - z

    s = params.scheme.pair_matrix()
    mu = np.array([params.mu0, params.mu1])
    b1 = np.zeros(size)
    sbar = s @ z
    for i in range(size):
        qi = q[:, :, i]
        # mutation flow in and out of type i
        mut = 0.0
        out_rate = sum(mu[(i >> u) & 1] for u in range(n))
        for u in range(n):
            mut += np.einsum("jk,jk->", zz, q[:, :, i ^ (1 << u)]) * mu[1 - ((i >> u) & 1)]
        mut -= np.einsum("jk,jk->", zz, qi) * out_rate
        # assortment tilt of the parent draw
        tilt = (np.einsum("jk,jk,jk->", s, zz, qi) - z[i] * sbar[i]
                - np.einsum("j,jk,jk->", sbar, zz, qi) + z[i] * sbar[i])
        b1[i] = mut + tilt
    return {"exact": exact, "B0": b0, "B1": b1,
            "residual": exact - N * b0 - b1}


def moment_oracle_X(state, params: ModelParams) -> dict:
    """Exact low-order moments of the one-event allelic-frequency increment.

    All values are scaled by N^2.  On the linkage-equilibrium manifold the
    first moment approaches the diffusion drift, the second x(1-x), the
    cross moment -2 (sum of non-splitting r) y, and the fourth is O(1/N^2).
    """
    _check_oracle_size(params)
    z = _as_frequencies(state, params)
    n, size, N = params.n, z.size, params.N
    f = exact_event_distribution(z, params)
    masks = np.arange(size)
    d = np.empty((n, size, size))
    for u in range(n):
        zero = ((masks >> u) & 1) == 0
        d[u] = zero[None, :].astype(float) - zero[:, None].astype(float)
    first = np.array([N * np.sum(f * d[u]) for u in range(n)])
    second = np.empty((n, n))
    for u in range(n):
        for v in range(n):
            second[u, v] = np.sum(f * d[u] * d[v])
    fourth = np.array([np.sum(f * d[u] ** 4) / N ** 2 for u in range(n)])
    return {"first": first, "second": second, "fourth": fourth}


# ---------------------------------------------------------------------------
# Linkage-disequilibrium relaxation (fast-timescale ODE system)
# ---------------------------------------------------------------------------

def _decay_terms(n: int, r: np.ndarray):
    """Per-subset coefficients of the relaxation system."""
    size = 1 << n
    full = size - 1
    rbar = np.zeros(size)
    quad: list[list[tuple[float, int, int]]] = [[] for _ in range(size)]
    cross: list[list[tuple[float, int, int]]] = [[] for _ in range(size)]
    for I in range(size):
        if popcount(I) < 2:
            continue
        for L in range(size):
            a, b = I & L, I & ~L & full
            if a and b:
                rbar[I] += r[L]
            if popcount(a) >= 2 and popcount(b) >= 2 and r[L] != 0.0:
                quad[I].append((float(r[L]), a, b))
            if popcount(a) >= 2 and popcount(b) >= 1:
                w = float(r[L] + r[full & ~L])
                if w != 0.0:
                    cross[I].append((w, a, b))
    return rbar, quad, cross


def linkage_decay_rhs(n: int, r: np.ndarray, x: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Right-hand side of the disequilibrium relaxation system at state v."""
    rbar, quad, cross = _decay_terms(n, r)
    return _decay_rhs(v, x, rbar, quad, cross)


def _decay_rhs(v, x, rbar, quad, cross):
    size = v.size
    prodx = subset_products(x)
    out = np.zeros(size)
    for I in range(size):
        if popcount(I) < 2:
            continue
        acc = -rbar[I] * v[I]
        for w, a, b in quad[I]:
            acc -= w * v[a] * v[b]
        for w, a, b in cross[I]:
            acc += w * v[a] * prodx[b]
        out[I] = acc
    return out


def linkage_decay_ode(recomb: RecombinationDistribution, x, y0, t: float,
                      tol: float = 1e-8) -> np.ndarray:
    """Integrate the disequilibrium relaxation from y0 to time t.

    Classical fixed-step fourth-order Runge-Kutta with the step refined by
    halving until two successive grids agree within ``tol``.  Requires a
    positive worst-pair split probability; without it the slowest component
    does not relax at all and the question is ill-posed.
    """
    if recomb.n < 2:
        raise ValueError("disequilibria need at least two loci")
    if not recomb.min_split > 0.0:
        raise ValueError(
            "relaxation requires every locus pair to split with positive "
            "probability; the slowest pair here never recombines")
    xs = np.asarray(x, dtype=np.float64)
    v0 = np.asarray(y0, dtype=np.float64).copy()
    size = 1 << recomb.n
    if xs.size != recomb.n or v0.size != size:
        raise ValueError("coordinate arrays have the wrong shape")
    for L in range(size):
        if popcount(L) < 2:
            v0[L] = 0.0
    rbar, quad, cross = _decay_terms(recomb.n, recomb.r)

    def integrate(num_steps: int) -> np.ndarray:
        h = t / num_steps
        v = v0.copy()
        for _ in range(num_steps):
            k1 = _decay_rhs(v, xs, rbar, quad, cross)
            k2 = _decay_rhs(v + 0.5 * h * k1, xs, rbar, quad, cross)
            k3 = _decay_rhs(v + 0.5 * h * k2, xs, rbar, quad, cross)
            k4 = _decay_rhs(v + h * k3, xs, rbar, quad, cross)
            v = v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        return v

    if t == 0.0:
        return v0
    steps = max(8, int(np.ceil(t / (1e-3 / recomb.min_split))))
    prev = integrate(steps)
    for _ in range(8):
        steps *= 2
        cur = integrate(steps)
        if np.max(np.abs(cur - prev)) < tol:
            return cur
        prev = cur
    return prev
