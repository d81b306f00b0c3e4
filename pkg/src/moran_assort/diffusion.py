"""The limiting allelic-frequency diffusion and its integrator.

The n coordinates share the square-root noise of a one-locus neutral model
and are coupled only through the drift polynomial derived from the
assortment scheme.  Paths are generated by an Euler-Maruyama step carrying
the diagonal variance-correction term (see ``_kernels.sde_run``) and are
clamped to the unit cube; the correction makes the discrete scheme respect
the boundary accessibility dichotomy of the continuous process.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _kernels
from .assortment import (
    AssortmentScheme,
    MeanAssortTable,
    alpha_coeffs,
    drift_bounds,
    drift_polynomial,
    mean_assortment,
)
from .combinatorics import subset_products

ABSORBING = "absorbing"
REGULAR = "regular"
ENTRANCE = "entrance"


@dataclass(frozen=True)
class DiffusionSpec:
    """Mutation rates plus the mean-assortment table driving the drift."""

    n: int
    mu0: float
    mu1: float
    table: MeanAssortTable

    def __post_init__(self):
        if self.table.n != self.n:
            raise ValueError("table does not match the locus count")
        if self.mu0 < 0 or self.mu1 < 0:
            raise ValueError("mutation rates must be nonnegative")

    @staticmethod
    def from_scheme(scheme: AssortmentScheme, mu0: float, mu1: float) -> "DiffusionSpec":
        return DiffusionSpec(scheme.n, float(mu0), float(mu1), mean_assortment(scheme))

    @cached_property
    def alpha(self) -> np.ndarray:
        a = alpha_coeffs(self.table)
        a.setflags(write=False)
        return a

    @cached_property
    def drift_coeff(self) -> np.ndarray:
        """coeff[i, L] = alpha_{i,L} for L not containing i (kernel layout)."""
        size = 1 << self.n
        coeff = np.zeros((self.n, size))
        for i in range(self.n):
            bit = 1 << i
            for L in range(size):
                if not L & bit:
                    coeff[i, L] = self.alpha[L | bit]
        coeff.setflags(write=False)
        return coeff

    @cached_property
    def polynomial_bounds(self) -> np.ndarray:
        """Row i holds (M_minus, M_plus) bounding the i-th drift polynomial."""
        out = np.array([drift_bounds(self.table, i) for i in range(self.n)])
        out.setflags(write=False)
        return out


@dataclass(frozen=True)
class SdeConfig:
    dt: float = 1e-4
    steps: int = 10_000
    record_every: int = 1
    seed: int = 0
    boundary_policy: str = "clamp"

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.steps < 0 or self.record_every < 1:
            raise ValueError("steps must be >= 0 and record_every >= 1")
        if self.boundary_policy != "clamp":
            raise ValueError("only the clamp boundary policy is implemented")


def drift(spec: DiffusionSpec, x) -> np.ndarray:
    """Drift vector b(x) of the limiting diffusion."""
    xs = np.asarray(x, dtype=np.float64)
    if xs.shape != (spec.n,):
        raise ValueError(f"need {spec.n} coordinates")
    rho = xs * (1.0 - xs)
    p = np.array([drift_polynomial(spec.table, i, xs) for i in range(spec.n)])
    return spec.mu1 * (1.0 - xs) - spec.mu0 * xs + (0.5 - xs) * rho * p


def drift_general_one_locus(s00: float, s01: float, s10: float, s11: float,
                            mu0: float, mu1: float, x: float) -> float:
    """One-locus drift without the difference-set symmetry assumption."""
    x = float(x)
    return (mu1 * (1.0 - x) - mu0 * x
            + 0.5 * x * (1.0 - x) * ((s10 - s11) * (1.0 - x) - (s01 - s00) * x))


@dataclass(frozen=True)
class SdeResult:
    times: np.ndarray
    path: np.ndarray
    final: np.ndarray
    clamp0: int
    clamp1: int


def sde_simulate(spec: DiffusionSpec, config: SdeConfig, x0,
                 rng: np.random.Generator | None = None) -> SdeResult:
    """Integrate one path from x0; deterministic given the seed.

    ``clamp0``/``clamp1`` count the steps whose pre-clamp value left the
    cube through 0 resp. 1 in any coordinate (the boundary-hit probes of
    the acceptance suite read these).
    """
    x = np.array(x0, dtype=np.float64).copy()
    if x.shape != (spec.n,) or x.min() < 0.0 or x.max() > 1.0:
        raise ValueError("x0 must lie in the unit cube")
    if rng is None:
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(config.seed)))
    nrec = config.steps // config.record_every
    out = np.empty((nrec, spec.n))
    lowbit = _kernels.lowbit_index_table(spec.n)
    _, clamp0, clamp1 = _kernels.sde_run(
        x, spec.drift_coeff, lowbit, spec.mu0, spec.mu1,
        config.dt, config.steps, config.record_every, rng, out)
    times = np.arange(1, nrec + 1) * config.record_every * config.dt
    return SdeResult(times, out, x, int(clamp0), int(clamp1))


def sandwich_max_violation(spec: DiffusionSpec, x0, dt: float, steps: int,
                           rng: np.random.Generator) -> float:
    """Couple the path with its bounding one-locus paths on one noise stream.

    Returns the largest pathwise ordering violation; the comparison bound
    predicts it stays at discretisation order.
    """
    x = np.array(x0, dtype=np.float64).copy()
    lo = x.copy()
    hi = x.copy()
    bounds = spec.polynomial_bounds
    lowbit = _kernels.lowbit_index_table(spec.n)
    return float(_kernels.sde_sandwich(
        x, lo, hi, spec.drift_coeff, lowbit,
        np.ascontiguousarray(bounds[:, 0]), np.ascontiguousarray(bounds[:, 1]),
        spec.mu0, spec.mu1, dt, steps, rng))


def boundary_classification(mu: float) -> str:
    """Feller class of the boundary adjacent to the allele with rate ``mu``.

    The point 0 for a coordinate is absorbing without mutation toward the
    interior (mu1 = 0), an entrance boundary for mu1 >= 1/2 and a regular
    (attainable) boundary in between; same classification at 1 with the
    roles of the rates exchanged.
    """
    if mu < 0:
        raise ValueError("mutation rate must be nonnegative")
    if mu == 0.0:
        return ABSORBING
    if mu >= 0.5:
        return ENTRANCE
    return REGULAR


# ---------------------------------------------------------------------------
# Two-locus Wright-Fisher comparison
# ---------------------------------------------------------------------------

def wf_two_locus_drift(sigma: np.ndarray, nu: np.ndarray, p1: float, q1: float) -> tuple[float, float]:
    """Drift of the diallelic two-locus Wright-Fisher diffusion.

    ``sigma[a, b, c, d]`` is the selection coefficient of the gamete pair
    ((a, b), (c, d)) with 0-based allele labels; ``nu[i, a]`` is the
    mutation rate away from allele ``a`` at locus ``i``.  ``p1``/``q1`` are
    the frequencies of allele 0 at the two loci.
    """
    sig = np.asarray(sigma, dtype=np.float64)
    nu = np.asarray(nu, dtype=np.float64)
    if sig.shape != (2, 2, 2, 2) or nu.shape != (2, 2):
        raise ValueError("sigma must be 2x2x2x2 and nu 2x2")
    p, q = float(p1), float(q1)
    rp, rq = p * (1.0 - p), q * (1.0 - q)
    b1 = (nu[0, 1] * (1.0 - p) - nu[0, 0] * p
          - rp * (1.0 - 2.0 * p) * ((sig[0, 1, 1, 0] + sig[0, 0, 1, 1]) * rq
                                    + sig[0, 0, 1, 0] * q * q
                                    + sig[0, 1, 1, 1] * (1.0 - q) ** 2)
          - 2.0 * rp * rq * (sig[0, 0, 0, 1] * p - sig[1, 0, 1, 1] * (1.0 - p)))
    b2 = (nu[1, 1] * (1.0 - q) - nu[1, 0] * q
          - rq * (1.0 - 2.0 * q) * ((sig[0, 1, 1, 0] + sig[0, 0, 1, 1]) * rp
                                    + sig[0, 0, 0, 1] * p * p
                                    + sig[1, 0, 1, 1] * (1.0 - p) ** 2)
          - 2.0 * rq * rp * (sig[0, 0, 1, 0] * q - sig[0, 1, 1, 1] * (1.0 - q)))
    return float(b1), float(b2)


def wf_mapping_from_scheme(scheme: AssortmentScheme, mu0: float, mu1: float):
    """(sigma, nu) realising a two-locus scheme as Wright-Fisher selection.

    Selection coefficients are minus half the assortment weights recentred
    so identical pairs carry zero (the Wright-Fisher model normalises
    viabilities that way; the diffusion drift only sees differences).
    Gamete (a, b) is the genotype with allele a at locus 1 and b at locus
    2, and both loci share the mutation rates.
    """
    if scheme.n != 2:
        raise ValueError("the comparison is a two-locus statement")
    base = scheme.pair_value(0, 0)
    sigma = np.empty((2, 2, 2, 2))
    for a in range(2):
        for b in range(2):
            for c in range(2):
                for d in range(2):
                    g = a | (b << 1)
                    h = c | (d << 1)
                    sigma[a, b, c, d] = -0.5 * (scheme.pair_value(g, h) - base)
    nu = np.array([[mu0, mu1], [mu0, mu1]])
    return sigma, nu


# ---------------------------------------------------------------------------
# Reversibility check
# ---------------------------------------------------------------------------

def grad_log_density(spec: DiffusionSpec, x) -> np.ndarray:
    """Analytic gradient of the log stationary density (no normalisation)."""
    xs = np.asarray(x, dtype=np.float64)
    p = np.array([drift_polynomial(spec.table, i, xs) for i in range(spec.n)])
    return ((2.0 * spec.mu1 - 1.0) / xs - (2.0 * spec.mu0 - 1.0) / (1.0 - xs)
            + (1.0 - 2.0 * xs) * p)


def reversibility_residual(spec: DiffusionSpec, x) -> np.ndarray:
    """Zero-flux defect b - (1/2) d[a]/dx - (1/2) a dlog(g): identically 0.

    Evaluated with the analytic density gradient, never finite differences;
    any nonzero value beyond roundoff signals an inconsistency between the
    drift and the claimed reversible density.
    """
    if spec.mu0 <= 0 or spec.mu1 <= 0:
        raise ValueError("reversibility requires strictly positive mutation rates")
    xs = np.asarray(x, dtype=np.float64)
    if xs.min() <= 0.0 or xs.max() >= 1.0:
        raise ValueError("the residual is defined on the open cube")
    rho = xs * (1.0 - xs)
    return drift(spec, xs) - 0.5 * (1.0 - 2.0 * xs) - 0.5 * rho * grad_log_density(spec, xs)


def independent_marginal_generators_match(spec: DiffusionSpec, tol: float = 1e-12) -> bool:
    """Whether the drift splits into n identical decoupled one-locus drifts."""
    from .assortment import independence_check

    return bool(independence_check(spec.table, tol)["independent"])
