"""Stationary density of the limiting diffusion and its critical points.

With positive mutation rates the diffusion is reversible with density
proportional to  prod_i x_i^(2*mu1-1) (1-x_i)^(2*mu0-1) exp(H(x)),  where H
is a polynomial in the per-locus heterozygosities rho_i = x_i (1 - x_i).
This module normalises that density, classifies the centre point, solves
the critical-point equations and assembles the full critical-point report
used by the command-line tool and the acceptance suite.

Two scalar conventions coexist for the log-density values reported at
critical points.  ``log-density`` values follow the density above (up to
the normalising constant).  ``figure`` values feed the polynomial part with
the doubled variables 2 rho_i instead of rho_i, which is the scale on which
the reference landscape plots report their level gaps; both are emitted so
either can be compared against.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, inf, log, sqrt

import numpy as np
from scipy.special import betaln, logsumexp, roots_jacobi

from .assortment import independence_check
from .combinatorics import b_polynomial, popcount, subset_products
from .diffusion import DiffusionSpec, grad_log_density

DENSE_QUADRATURE_MAX_LOCI = 3
_LEVEL_TOL = 1e-12


class HypothesisError(ValueError):
    """A requested statement needs symmetry hypotheses the spec fails."""


# ---------------------------------------------------------------------------
# Density evaluation and normalisation
# ---------------------------------------------------------------------------

@dataclass
class StationaryDensity:
    """Reversible stationary density of a diffusion spec.

    ``log_norm`` is None until :meth:`normalise` (or
    :meth:`normalise_monte_carlo`) has been run.
    """

    spec: DiffusionSpec
    log_norm: float | None = None

    def __post_init__(self):
        if self.spec.mu0 <= 0 or self.spec.mu1 <= 0:
            raise ValueError("a stationary density needs strictly positive mutation rates")

    @property
    def n(self) -> int:
        return self.spec.n

    # -- the polynomial exponent -------------------------------------------

    def poly_exponent(self, x) -> float:
        """H(x) = sum over nonempty L of alpha_L prod_{l in L} rho_l."""
        xs = np.asarray(x, dtype=np.float64)
        rho = xs * (1.0 - xs)
        return float(np.dot(self.spec.alpha, subset_products(rho)))

    def poly_exponent_factorised(self, x) -> float:
        """Equivalent product form: (1/2) sum_L (m_L - m_0) prod 2rho prod (1-2rho)."""
        xs = np.asarray(x, dtype=np.float64)
        rho = xs * (1.0 - xs)
        m = self.spec.table.m
        size = m.size
        full = size - 1
        total = 0.0
        for L in range(1, size):
            term = m[L] - m[0]
            for i in range(self.n):
                if L >> i & 1:
                    term *= 2.0 * rho[i]
                elif full >> i & 1:
                    term *= 1.0 - 2.0 * rho[i]
            total += term
        return 0.5 * total

    def log_density(self, x, normalised: bool = True) -> float:
        """Log of the stationary density at x.

        On the boundary the value is +inf where the density diverges
        (mutation rate below 1/2 on the touching side) and -inf where it
        vanishes.
        """
        xs = np.asarray(x, dtype=np.float64)
        if xs.shape != (self.n,) or xs.min() < 0.0 or xs.max() > 1.0:
            raise ValueError("x must lie in the unit cube")
        a1 = 2.0 * self.spec.mu1 - 1.0
        a0 = 2.0 * self.spec.mu0 - 1.0
        edge = 0.0
        for v in xs:
            for coord, expo in ((v, a1), (1.0 - v, a0)):
                if coord == 0.0:
                    if expo < 0.0:
                        return inf
                    if expo > 0.0:
                        edge = -inf
                else:
                    edge += expo * log(coord)
        if edge == -inf:
            return -inf
        value = edge + self.poly_exponent(xs)
        if normalised:
            if self.log_norm is None:
                raise ValueError("density not normalised yet; call normalise() first")
            value += self.log_norm
        return value

    # -- normalisation -------------------------------------------------------

    def normalise(self, grid_order: int = 64) -> float:
        """Dense tensor Gauss-Jacobi quadrature of the unnormalised mass.

        The per-axis weight absorbs the Beta factors exactly, so the
        quadrature only has to integrate exp(H), a smooth bounded function;
        doubling ``grid_order`` is a practical convergence check.  Refused
        beyond three loci (cost grows as grid_order**n): use
        :meth:`normalise_monte_carlo` there.
        """
        if self.n > DENSE_QUADRATURE_MAX_LOCI:
            raise ValueError(
                f"dense quadrature supports n <= {DENSE_QUADRATURE_MAX_LOCI}; "
                "use normalise_monte_carlo for larger systems")
        nodes, logw = _jacobi_axis(grid_order, self.spec.mu0, self.spec.mu1)
        grids = np.meshgrid(*([nodes] * self.n), indexing="ij")
        h = np.zeros_like(grids[0])
        rho = [g * (1.0 - g) for g in grids]
        for L in range(1, 1 << self.n):
            if self.spec.alpha[L] == 0.0:
                continue
            term = np.full_like(h, self.spec.alpha[L])
            for i in range(self.n):
                if L >> i & 1:
                    term = term * rho[i]
            h += term
        logw_nd = np.zeros_like(h)
        for i in range(self.n):
            shape = [1] * self.n
            shape[i] = -1
            logw_nd = logw_nd + logw.reshape(shape)
        log_mass = float(logsumexp(logw_nd + h))
        self.log_norm = -log_mass
        return self.log_norm

    def normalise_monte_carlo(self, samples: int = 200_000, seed: int = 0) -> tuple[float, float]:
        """Importance-sample the mass from the Beta-product base measure.

        Returns (log normalising constant, standard error of its log).
        """
        gen = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
        x = gen.beta(2.0 * self.spec.mu1, 2.0 * self.spec.mu0, size=(samples, self.n))
        rho = x * (1.0 - x)
        h = np.zeros(samples)
        for L in range(1, 1 << self.n):
            if self.spec.alpha[L] == 0.0:
                continue
            term = np.full(samples, self.spec.alpha[L])
            for i in range(self.n):
                if L >> i & 1:
                    term = term * rho[:, i]
            h += term
        w = np.exp(h - h.max())
        mean = w.mean()
        se = w.std(ddof=1) / (mean * sqrt(samples))
        log_base = self.n * betaln(2.0 * self.spec.mu1, 2.0 * self.spec.mu0)
        log_mass = log_base + h.max() + log(mean)
        self.log_norm = -float(log_mass)
        return self.log_norm, float(se)


def _jacobi_axis(order: int, mu0: float, mu1: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes on (0, 1) and log-weights absorbing x^(2mu1-1)(1-x)^(2mu0-1)."""
    a = 2.0 * mu0 - 1.0
    b = 2.0 * mu1 - 1.0
    t, w = roots_jacobi(order, a, b)
    nodes = 0.5 * (t + 1.0)
    logw = np.log(w) - (a + b + 1.0) * log(2.0)
    return nodes, logw


# ---------------------------------------------------------------------------
# Hypotheses for the critical-point analysis
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AnalysisHypotheses:
    """Computed (never asserted) flags gating the critical-point statements."""

    mutation_symmetric: bool          # both mutation rates equal
    level_symmetric: bool             # m_L depends on |L| only
    monotone_differences: bool        # ordered, single-signed level increments
    strict: bool                      # strictly signed at level n-2 (no continuum)
    favours: str | None               # "similar" (nu > 0 case) or "dissimilar"
    m_levels: np.ndarray | None
    d_levels: np.ndarray | None

    @property
    def all_hold(self) -> bool:
        return (self.mutation_symmetric and self.level_symmetric
                and self.monotone_differences and self.strict)


@dataclass(frozen=True)
class LevelProfile:
    """Level-symmetric analysis inputs without any 2**n table.

    Carries only the locus count, the common mutation rate and the per-level
    mean weights m(0..n), which is all the critical-level machinery needs;
    use it for large n where subset tables are out of reach.
    """

    n: int
    mu: float
    m_levels: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.m_levels, dtype=np.float64)
        if m.shape != (self.n + 1,):
            raise ValueError(f"need {self.n + 1} level values")
        object.__setattr__(self, "m_levels", m)

    @staticmethod
    def from_distance_sequence(s, mu: float) -> "LevelProfile":
        """Profile of a distance-keyed (Hamming-type) weight sequence."""
        s = np.asarray(s, dtype=np.float64)
        return LevelProfile(s.size - 1, float(mu), s)


def _level_data(obj) -> tuple[int, float, np.ndarray]:
    """(n, nu, level increments) of a StationaryDensity or LevelProfile."""
    if isinstance(obj, LevelProfile):
        return obj.n, 2.0 * obj.mu - 1.0, np.diff(obj.m_levels)
    hyp = hypotheses(obj)
    if not hyp.mutation_symmetric or not hyp.level_symmetric:
        raise HypothesisError(
            "level analysis needs equal mutation rates and level-symmetric weights")
    return obj.n, 2.0 * obj.spec.mu0 - 1.0, hyp.d_levels


def hypotheses(sd) -> AnalysisHypotheses:
    if isinstance(sd, LevelProfile):
        levels = sd.m_levels
        h5, h6, n, nu = True, True, sd.n, 2.0 * sd.mu - 1.0
        scale = max(1.0, float(np.max(np.abs(levels))))
    else:
        spec = sd.spec
        n = spec.n
        nu = 2.0 * spec.mu0 - 1.0
        h5 = abs(spec.mu0 - spec.mu1) <= _LEVEL_TOL
        m = spec.table.m
        scale = max(1.0, float(np.max(np.abs(m))))
        levels = np.empty(n + 1)
        h6 = True
        for ell in range(n + 1):
            vals = [m[L] for L in range(m.size) if popcount(L) == ell]
            levels[ell] = float(np.mean(vals))
            if max(vals) - min(vals) > _LEVEL_TOL * scale:
                h6 = False
        if not h6:
            return AnalysisHypotheses(h5, False, False, False, None, None, None)
    d = np.diff(levels)
    tol = _LEVEL_TOL * scale
    if nu > 0:
        monotone = bool(np.all(d <= tol) and np.all(np.diff(d) <= tol))
        strict = bool(d[n - 2 if n >= 2 else 0] < -tol)
        favours = "similar"
    elif nu < 0:
        monotone = bool(np.all(d >= -tol) and np.all(np.diff(d) >= -tol))
        strict = bool(d[n - 2 if n >= 2 else 0] > tol)
        favours = "dissimilar"
    else:
        monotone = strict = False
        favours = None
    return AnalysisHypotheses(h5, True, monotone and h5, strict, favours, levels, d)


def v_n(sd) -> float:
    """Centre classifier: its sign decides whether (1/2, ..., 1/2) is a max.

    Needs equal mutation rates and level symmetry (raises HypothesisError
    otherwise; see :func:`v_n_general` for the per-locus variant).  Accepts
    a StationaryDensity or a LevelProfile.
    """
    n, nu, d = _level_data(sd)
    if n <= 60:
        total = sum(comb(n - 1, k) * d[k] for k in range(n)) / 2.0 ** (n + 1)
    else:
        # binomial weights in log space to stay finite at large n
        from scipy.special import gammaln

        ks = np.arange(n)
        logs = (gammaln(n) - gammaln(ks + 1) - gammaln(n - ks)
                - (n + 1) * np.log(2.0))
        total = float(np.sum(np.exp(logs) * d))
    return nu + total


def v_n_general(sd: StationaryDensity, i: int) -> float:
    """Per-locus centre classifier without level symmetry."""
    if abs(sd.spec.mu0 - sd.spec.mu1) > _LEVEL_TOL:
        raise HypothesisError("the centre classification assumes equal mutation rates")
    n = sd.n
    nu = 2.0 * sd.spec.mu0 - 1.0
    total = sum(sd.spec.table.deltas[i, B] for B in range(1 << n) if not B >> i & 1)
    return nu + total / 2.0 ** (n + 1)


# ---------------------------------------------------------------------------
# Critical-point equations
# ---------------------------------------------------------------------------

def phi(sd, ell: int, y: float, form: str = "b") -> float:
    """Left-hand side of the level-ell critical-point equation at y.

    ``b`` evaluates through the mixed-binomial basis, ``e`` through
    elementary symmetric polynomials with the expansion coefficients; the
    two routes agree identically.  Accepts a StationaryDensity or a
    LevelProfile.
    """
    n, nu, d = _level_data(sd)
    if not 0 <= ell <= n - 1:
        raise ValueError(f"level must lie in [0, {n - 1}]")
    if form == "b":
        total = sum(b_polynomial(n - 1, ell, i, 2.0 * y) * d[i] for i in range(n))
        return nu + y * total
    if form == "e":
        alpha = _level_alphas(d)
        total = 0.0
        for k in range(n):
            total += alpha[k] * _esym_mixed(ell, 0.25, n - 1 - ell, y, k)
        return nu + y * total
    raise ValueError(f"unknown form {form!r}")


def _level_alphas(d_levels: np.ndarray) -> np.ndarray:
    """alpha_k = 2^k * (k-th forward difference of the level increments at 0)."""
    n = d_levels.size
    out = np.empty(n)
    cur = np.asarray(d_levels, dtype=np.float64)
    for k in range(n):
        out[k] = 2.0 ** k * cur[0] if cur[0] != 0.0 else 0.0
        cur = np.diff(cur)
    return out


def _esym_mixed(p: int, a: float, q: int, b: float, k: int) -> float:
    """e_k of the multiset {a repeated p times, b repeated q times}."""
    return sum(comb(p, j) * a ** j * comb(q, k - j) * b ** (k - j)
               for j in range(max(0, k - q), min(p, k) + 1))


def solve_lambda(sd, ell: int) -> float | None:
    """Root of the level-ell critical-point equation in (0, 1/4), or None.

    Under the monotone-differences hypothesis the equation has at most one
    root there, located by bisection; the endpoints evaluate to 2mu-1 and
    v_n, so a root exists exactly when those differ in sign.  Without the
    hypothesis the same search runs but is not guaranteed exhaustive
    (multiple roots are possible); check :func:`hypotheses` for rigour.
    """
    _, nu, _ = _level_data(sd)
    vn = v_n(sd)
    if nu == 0.0 or vn == 0.0 or (nu > 0) == (vn > 0):
        return None
    lo, hi = 1e-15, 0.25 - 1e-15
    flo = phi(sd, ell, lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fmid = phi(sd, ell, mid)
        if (fmid > 0) == (flo > 0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def xi_from_lambda(lam: float) -> float:
    """Lower coordinate value with heterozygosity lam: 1/2 - sqrt(1-4 lam)/2."""
    return 0.5 - 0.5 * sqrt(max(0.0, 1.0 - 4.0 * lam))


# ---------------------------------------------------------------------------
# Log-density values at critical points (two conventions)
# ---------------------------------------------------------------------------

def _h_level_point(sd, n_half: int, lam: float, doubled: bool) -> float:
    """h at a point with n_half coordinates at 1/2 and the rest at
    heterozygosity lam.  ``doubled`` selects the figure convention (the
    polynomial part reads 2*rho instead of rho)."""
    n, nu, d = _level_data(sd)
    alpha = _level_alphas(d)
    if doubled:
        # the published landscapes read lam as the doubled heterozygosity
        # 2x(1-x), so the log term sees lam/2 and the polynomial lam itself
        log_arg, args = 0.5 * lam, (0.5, lam)
    else:
        log_arg, args = lam, (0.25, lam)
    value = nu * (n_half * log(0.25)
                  + (n - n_half) * (log(log_arg) if n_half < n else 0.0))
    for k in range(n):
        if alpha[k] != 0.0:
            value += alpha[k] * _esym_mixed(n_half, args[0], n - n_half, args[1], k + 1)
    return value


def figure_h_value(sd, n_half: int, lam: float) -> float:
    """Critical value on the published-figure scale (doubled-variable H)."""
    return _h_level_point(sd, n_half, lam, doubled=True)


def log_density_h_value(sd, n_half: int, lam: float) -> float:
    """Critical value of the actual log-density (up to normalisation)."""
    return _h_level_point(sd, n_half, lam, doubled=False)


# ---------------------------------------------------------------------------
# Full critical-point report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CriticalPoint:
    coords: tuple
    n_half: int
    predicted_index: int | None
    observed_index: int | None
    kind: str
    grad_norm: float
    degenerate: bool


@dataclass(frozen=True)
class CriticalPointReport:
    n: int
    hypotheses_hold: bool
    claims_withheld: bool
    v_n: float | None
    center_type: str
    lambdas: tuple | None
    xis: tuple | None
    points: tuple
    h_values: tuple | None          # figure scale, indexed by number of halves
    h_log_values: tuple | None      # log-density scale
    mode_count: int | None
    saddle_ordering_ok: bool | None
    notes: tuple

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "hypotheses_hold": self.hypotheses_hold,
            "claims_withheld": self.claims_withheld,
            "v_n": self.v_n,
            "center_type": self.center_type,
            "lambdas": list(self.lambdas) if self.lambdas is not None else None,
            "xis": list(self.xis) if self.xis is not None else None,
            "points": [
                {"coords": list(p.coords), "n_half": p.n_half,
                 "predicted_index": p.predicted_index,
                 "observed_index": p.observed_index, "kind": p.kind,
                 "grad_norm": p.grad_norm, "degenerate": p.degenerate}
                for p in self.points
            ],
            "h_values": list(self.h_values) if self.h_values is not None else None,
            "h_log_values": (list(self.h_log_values)
                             if self.h_log_values is not None else None),
            "mode_count": self.mode_count,
            "saddle_ordering_ok": self.saddle_ordering_ok,
            "notes": list(self.notes),
        }


def _hessian(sd: StationaryDensity, x: np.ndarray, step: float = 1e-5) -> np.ndarray:
    """Richardson-extrapolated central differences of the analytic gradient."""
    def jac(h):
        n = x.size
        out = np.empty((n, n))
        for j in range(n):
            xp = x.copy(); xp[j] += h
            xm = x.copy(); xm[j] -= h
            out[:, j] = (grad_log_density(sd.spec, xp) - grad_log_density(sd.spec, xm)) / (2 * h)
        return out

    full = jac(step)
    half = jac(0.5 * step)
    hess = (4.0 * half - full) / 3.0
    return 0.5 * (hess + hess.T)


def _classify(sd: StationaryDensity, coords: np.ndarray,
              predicted_index: int | None, n_half: int) -> CriticalPoint:
    grad = grad_log_density(sd.spec, coords)
    gnorm = float(np.max(np.abs(grad)))
    eig = np.linalg.eigvalsh(_hessian(sd, coords))
    scale = max(1.0, float(np.max(np.abs(eig))))
    degenerate = bool(np.min(np.abs(eig)) < 1e-8 * scale)
    observed = None if degenerate else int(np.sum(eig < 0.0))
    if degenerate:
        kind = "degenerate"
    elif observed == coords.size:
        kind = "maximum"
    elif observed == 0:
        kind = "minimum"
    else:
        kind = "saddle"
    return CriticalPoint(tuple(float(v) for v in coords), n_half,
                         predicted_index, observed, kind, gnorm, degenerate)


ENUMERATION_MAX_LOCI = 6


def critical_points(sd: StationaryDensity) -> CriticalPointReport:
    """Enumerate and classify all critical points of the stationary density.

    Requires the computed hypothesis flags to hold; otherwise the report is
    emitted with every structural claim withheld (the density itself stays
    available for landscape plots).  When solvable, the points with a given
    number of halved coordinates share one coordinate value, one predicted
    Morse index and one critical value, and the level values must be
    strictly ordered.
    """
    hyp = hypotheses(sd)
    n = sd.n
    nu = 2.0 * sd.spec.mu0 - 1.0
    notes: list[str] = []
    center = np.full(n, 0.5)
    if not hyp.all_hold:
        if hyp.mutation_symmetric and hyp.level_symmetric and hyp.monotone_differences:
            notes.append(
                "flat level increment at the top: a continuum of critical points "
                "is possible; no classification attempted")
        else:
            notes.append("hypothesis flags failed; structural claims withheld")
        vn = None
        if hyp.mutation_symmetric and hyp.level_symmetric:
            vn = v_n(sd)
        return CriticalPointReport(
            n, False, True, vn, "unclassified", None, None, (), None, None,
            None, None, tuple(notes))

    vn = v_n(sd)
    if vn == 0.0:
        return CriticalPointReport(
            n, True, True, vn, "degenerate", None, None, (), None, None, None,
            None, ("centre classifier vanishes; degenerate case",))

    center_is_max = vn > 0.0
    center_type = "max" if center_is_max else "min"
    if (nu > 0) == (vn > 0):
        # single critical point at the centre
        pt = _classify(sd, center, n if center_is_max else 0, n)
        mode_count = 1 if nu > 0 else None
        return CriticalPointReport(
            n, True, False, vn, center_type, (), (),
            (pt,), None, None, mode_count, None, tuple(notes))

    maybe = [solve_lambda(sd, ell) for ell in range(n)]
    if any(lam is None for lam in maybe):
        notes.append("a critical level is missing despite the sign change; withheld")
        return CriticalPointReport(
            n, True, True, vn, center_type, None, None, (), None, None,
            None, None, tuple(notes))
    lambdas: list[float] = [float(lam) for lam in maybe]
    xis = [xi_from_lambda(lam) for lam in lambdas]
    points: list[CriticalPoint] = []
    if n <= ENUMERATION_MAX_LOCI:
        for I in range(1 << n):
            ell = popcount(I)
            if ell == n:
                idx = 0 if nu > 0 else n
                points.append(_classify(sd, center, idx, n))
                continue
            rest = [i for i in range(n) if not I >> i & 1]
            for JS in range(1 << len(rest)):
                coords = np.full(n, 0.5)
                for pos, i in enumerate(rest):
                    coords[i] = (1.0 - xis[ell]) if JS >> pos & 1 else xis[ell]
                idx = (n - ell) if nu > 0 else ell
                points.append(_classify(sd, coords, idx, ell))
    else:
        notes.append("full enumeration capped; classifying one representative per level")
        for ell in range(len(lambdas)):
            coords = np.full(n, xis[ell])
            coords[:ell] = 0.5
            idx = (n - ell) if nu > 0 else ell
            points.append(_classify(sd, coords, idx, ell))
        points.append(_classify(sd, center, 0 if nu > 0 else n, n))

    h_fig = [figure_h_value(sd, ell, lambdas[ell]) for ell in range(len(lambdas))]
    h_log = [log_density_h_value(sd, ell, lambdas[ell]) for ell in range(len(lambdas))]
    h_fig.append(figure_h_value(sd, n, 0.25))
    h_log.append(log_density_h_value(sd, n, 0.25))
    diffs = np.diff(h_log)
    ordering_ok = bool(np.all(diffs < 0.0)) if nu > 0 else bool(np.all(diffs > 0.0))
    mode_count = 2 ** n if nu > 0 else None
    return CriticalPointReport(
        n, True, False, vn, center_type, tuple(lambdas), tuple(xis),
        tuple(points), tuple(h_fig), tuple(h_log), mode_count, ordering_ok,
        tuple(notes))


# ---------------------------------------------------------------------------
# Quadratic-weight asymptotics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadraticAsymptotics:
    n: int
    b: float
    c: float
    mu: float
    has_full_lattice: bool        # 3**n critical points present
    lam0: float | None
    lam1: float | None
    h_gap_total: float | None     # max level minus centre level
    h_gap_top: float | None       # max level minus first saddle level
    lam0_scaling_ratio: float | None
    h_gap_total_ratio: float | None
    h_gap_top_ratio: float | None


def quadratic_asymptotics(n: int, b: float, c: float, mu: float) -> QuadraticAsymptotics:
    """Closed forms for distance-based weights with quadratic level profile.

    The level means are m(l) = m(0) - (b l + c l^2), so the level increments
    are -(b + c + 2 l c) and only the first two expansion coefficients
    survive: the critical-level equations collapse to quadratics.  All
    critical values are on the log-density scale.
    """
    if c <= 0 or b + c < 0 or mu <= 0.5:
        raise ValueError("requires c > 0, b + c >= 0 and mu > 1/2")
    n = int(n)
    if n < 1:
        raise ValueError("n must be positive")
    nu = 2.0 * mu - 1.0
    has_full = b + n * c > 8.0 * mu - 4.0
    a0 = -(b + c)
    a1 = -4.0 * c

    def quad_root(lin: float, quad: float) -> float | None:
        # root of nu - lin*y - quad*y^2 = 0 in (0, 1/4)
        if quad == 0.0:
            if lin <= 0.0:
                return None
            y = nu / lin
        else:
            disc = lin * lin + 4.0 * quad * nu
            y = (-lin + sqrt(disc)) / (2.0 * quad)
        return y if 0.0 < y < 0.25 else None

    lam0 = quad_root(b + c, 4.0 * c * (n - 1))
    lam1 = quad_root(b + 2.0 * c, 4.0 * c * (n - 2)) if n >= 2 else None
    gap_total = gap_top = None
    ratio0 = ratio_total = ratio_top = None
    if lam0 is not None:
        gap_total = (nu * n * log(4.0 * lam0)
                     + a0 * n * (lam0 - 0.25)
                     + a1 * comb(n, 2) * (lam0 ** 2 - 0.0625))
        ratio0 = lam0 * sqrt(n) / sqrt(nu / (4.0 * c))
        ratio_total = gap_total / ((c / 8.0) * n * n)
    if lam0 is not None and lam1 is not None:
        gap_top = nu * (n * log(lam0 / lam1) + log(4.0 * lam1))
        for k, ak in ((0, a0), (1, a1)):
            term = comb(n - 1, k) * (lam0 ** (k + 1) - 0.25 * lam1 ** k)
            if k <= n - 2:
                term += comb(n - 1, k + 1) * (lam0 ** (k + 1) - lam1 ** (k + 1))
            gap_top += ak * term
        ratio_top = gap_top / (sqrt(n) * 0.5 * sqrt(c * nu))
    return QuadraticAsymptotics(n, b, c, mu, has_full, lam0, lam1,
                                gap_total, gap_top, ratio0, ratio_total, ratio_top)


def is_independent(sd: StationaryDensity, tol: float = 1e-12) -> bool:
    """Whether the coordinates decouple (constant difference table)."""
    return bool(independence_check(sd.spec.table, tol)["independent"])
