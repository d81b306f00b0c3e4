"""Self-contained verification suites behind ``moran-assort verify``.

Each suite re-derives a family of identities or expansion orders with an
independent method (brute-force enumeration, dual formulas, reference
integration) and reports one pass/fail line per check.  Seeds are fixed:
the suites are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations
from math import comb, exp, inf, log, sqrt

import numpy as np

from . import combinatorics as cb
from .assortment import AssortmentScheme, drift_bounds, mean_assortment
from .diffusion import (
    DiffusionSpec,
    drift,
    grad_log_density,
    reversibility_residual,
    wf_mapping_from_scheme,
    wf_two_locus_drift,
)
from .moran import ModelParams, drift_oracle_Z, linkage_decay_ode, moment_oracle_X
from .recombination import make_recombination


@dataclass
class SuiteResult:
    suite: str
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    def add(self, name: str, passed: bool, detail: str = "") -> None:
        self.checks.append({"name": name, "passed": bool(passed), "detail": detail})

    def to_dict(self) -> dict:
        return {"suite": self.suite, "passed": self.passed, "checks": self.checks}


def _random_scheme(rng: np.random.Generator, n: int, scale: float = 2.0) -> AssortmentScheme:
    entries = {}
    for L in range(1, 1 << n):
        for D in cb.submasks(L):
            entries[(D, L ^ D)] = float(rng.uniform(-scale, scale))
    entries[(0, 0)] = 0.0
    return AssortmentScheme.custom_pairwise(n, entries)


# ---------------------------------------------------------------------------
# combinatorics
# ---------------------------------------------------------------------------

def run_combinatorics(seed: int = 20240) -> SuiteResult:
    rng = np.random.default_rng(seed)
    res = SuiteResult("combinatorics")

    worst = 0.0
    for n in range(1, 9):
        f = rng.uniform(-10, 10, 1 << n)
        for t in (0.7, -1.3, 0.25):
            back = cb.s_t_transform(cb.s_t_transform(f, t), -t)
            worst = max(worst, float(np.max(np.abs(back - f))))
    res.add("s_t_inversion", worst <= 1e-11, f"max roundtrip error {worst:.3e}")

    worst = 0.0
    for n in range(2, 6):
        f = rng.uniform(-10, 10, 1 << n)
        full = (1 << n) - 1
        for _ in range(10):
            B = int(rng.integers(1, full + 1))
            A = int(rng.integers(0, full + 1)) & ~B
            closed = cb.delta_set(f, B, A)
            elems = [i for i in range(n) if B >> i & 1]
            for order in list(permutations(elems))[:6]:
                g = f
                for i in order:
                    size = g.size
                    g = np.array([g[(a | (1 << i))] - g[a] if not a >> i & 1 else 0.0
                                  for a in range(size)])
                worst = max(worst, abs(g[A] - closed))
    res.add("delta_iterated_vs_closed", worst <= 1e-11, f"max deviation {worst:.3e}")

    worst = 0.0
    for n in range(1, 9):
        f = rng.uniform(-10, 10, 1 << n)
        worst = max(worst, float(np.max(np.abs(cb.subset_inversion(f) - f))))
    res.add("subset_inversion", worst <= 1e-11, f"max deviation {worst:.3e}")

    worst = 0.0
    for n in range(1, 9):
        f = rng.uniform(-10, 10, n + 1)
        diffs = [cb.forward_diff(f, k)[0] for k in range(n + 1)]
        for k in range(n + 1):
            recon = sum(comb(k, j) * diffs[j] for j in range(k + 1))
            worst = max(worst, abs(recon - f[k]))
    res.add("binomial_inversion", worst <= 1e-11, f"max deviation {worst:.3e}")

    ok = True
    for n in range(1, 6):
        for _ in range(5):
            f = rng.uniform(-5, 5, 1 << n)
            x = rng.uniform(-2, 2, n)
            t = float(rng.uniform(-2, 2))
            ok = ok and cb.multivariate_identity_check(f, x, t, tol=1e-10)
    res.add("product_expansion_identity", ok)

    worst = 0.0
    for n in range(2, 7):
        x = rng.uniform(-3, 3, n)
        for k in range(n - 1):
            for i in range(n):
                for j in range(i + 1, n):
                    xi = np.delete(x, i)
                    xj = np.delete(x, j)
                    xij = np.delete(x, (i, j))
                    lhs = (x[i] * cb.elementary_symmetric(xi, k)
                           - x[j] * cb.elementary_symmetric(xj, k))
                    rhs = (x[i] - x[j]) * cb.elementary_symmetric(xij, k)
                    worst = max(worst, abs(lhs - rhs))
    res.add("symmetric_polynomial_exchange", worst <= 1e-11, f"max deviation {worst:.3e}")

    worst = 0.0
    for n in range(1, 6):
        for ell in range(n + 1):
            a = rng.uniform(-4, 4, n + 1)
            y = float(rng.uniform(0.0, 0.5))
            diffs = [cb.forward_diff(a, k)[0] for k in range(n + 1)]
            lhs = sum(2.0 ** k * diffs[k]
                      * cb.elementary_symmetric([0.25] * ell + [y] * (n - ell), k)
                      for k in range(n + 1))
            rhs = sum(a[i] * cb.b_polynomial(n, ell, i, 2.0 * y) for i in range(n + 1))
            worst = max(worst, abs(lhs - rhs))
    res.add("mixed_basis_identity", worst <= 1e-11, f"max deviation {worst:.3e}")

    ok = True
    for n in range(1, 7):
        for ell in range(n + 1):
            for y in (0.05, 0.3, 0.77):
                vals = [cb.b_polynomial(n, ell, i, y) for i in range(n + 1)]
                ok = ok and all(v >= 0.0 for v in vals)
                ok = ok and abs(sum(vals) - 1.0) <= 1e-12
    res.add("mixed_basis_partition_of_unity", ok)

    ok = True
    for a in (0.0, 0.25, 0.5, 0.9, 0.99):
        for n in range(1, 9):
            for k in range(n + 1):
                ok = ok and cb.block_matrix_posdef(n, k, a)
    ok = ok and not cb.block_matrix_posdef(2, 1, 1.0)
    res.add("block_matrix_positive_definite", ok)
    return res


# ---------------------------------------------------------------------------
# drift oracle
# ---------------------------------------------------------------------------

def _manifold_freqs(x: np.ndarray) -> np.ndarray:
    n = x.size
    z = np.empty(1 << n)
    for g in range(1 << n):
        v = 1.0
        for i in range(n):
            v *= (1.0 - x[i]) if g >> i & 1 else x[i]
        z[g] = v
    return z


def run_drift_oracle(seed: int = 20241) -> SuiteResult:
    rng = np.random.default_rng(seed)
    res = SuiteResult("drift-oracle")
    rec = make_recombination(2, "free")
    sizes = (16, 32, 64)

    ratios_ok = True
    details = []
    for trial in range(3):
        scheme = _random_scheme(rng, 2)
        x = np.array([rng.choice([0.25, 0.5, 0.75]), rng.choice([0.25, 0.5, 0.75])])
        z = _manifold_freqs(x)
        spec = DiffusionSpec(2, 0.7, 0.4, mean_assortment(scheme))
        b = drift(spec, x)
        errs = []
        for N in sizes:
            params = ModelParams(scheme, rec, 0.7, 0.4, N)
            mom = moment_oracle_X(z, params)
            errs.append(float(np.max(np.abs(mom["first"] - b))))
        r1, r2 = errs[0] / errs[1], errs[1] / errs[2]
        details.append(f"trial {trial}: errors {errs[0]:.2e}/{errs[1]:.2e}/{errs[2]:.2e}")
        ratios_ok = ratios_ok and 1.4 <= r1 <= 2.6 and 1.4 <= r2 <= 2.6
    res.add("allelic_drift_residual_halves", ratios_ok, "; ".join(details))

    worst = 0.0
    worst_res = inf
    for trial in range(3):
        scheme = _random_scheme(rng, 2)
        z = rng.dirichlet(np.ones(4))
        ratios = []
        prev = None
        for N in sizes:
            params = ModelParams(scheme, rec, 0.7, 0.4, N)
            d = drift_oracle_Z(z, params)
            for u in range(2):
                s = sum(d["B0"][i] for i in range(4) if not i >> u & 1)
                worst = max(worst, abs(s))
            r = float(np.max(np.abs(d["residual"])))
            if prev is not None:
                ratios.append(prev / r)
            prev = r
        worst_res = min(worst_res, min(ratios))
    res.add("type_marginal_leading_term_vanishes", worst <= 1e-12,
            f"max locus sum {worst:.3e}")
    res.add("type_drift_residual_halves", 1.4 <= worst_res,
            f"smallest halving ratio {worst_res:.2f}")

    neutral = AssortmentScheme.hamming([0.0, 0.0, 0.0])
    params = ModelParams(neutral, rec, 0.0, 0.0, 24)
    z = rng.dirichlet(np.ones(4))
    mom = moment_oracle_X(z, params)
    res.add("neutral_martingale", float(np.max(np.abs(mom["first"]))) <= 1e-12,
            f"max |E dX| = {np.max(np.abs(mom['first'])):.2e}")
    return res


# ---------------------------------------------------------------------------
# moments
# ---------------------------------------------------------------------------

def run_moments(seed: int = 20242) -> SuiteResult:
    rng = np.random.default_rng(seed)
    res = SuiteResult("moments")
    rec = make_recombination(2, "free")
    scheme = _random_scheme(rng, 2)
    x = np.array([0.25, 0.5])
    z = _manifold_freqs(x)

    errs2, errs4 = [], []
    for N in (16, 32):
        params = ModelParams(scheme, rec, 0.8, 0.8, N)
        mom = moment_oracle_X(z, params)
        errs2.append(float(np.max(np.abs(mom["second"].diagonal() - x * (1 - x)))))
        errs4.append(float(np.max(mom["fourth"])))
    r2 = errs2[0] / errs2[1]
    res.add("second_moment_order", 1.4 <= r2 <= 2.6,
            f"errors {errs2[0]:.2e} -> {errs2[1]:.2e}, ratio {r2:.2f}")
    r4 = errs4[0] / errs4[1]
    res.add("fourth_moment_order", 2.4 <= r4 <= 5.6,
            f"values {errs4[0]:.2e} -> {errs4[1]:.2e}, ratio {r4:.2f}")

    # off-manifold cross moment: half the population all-0, half all-1,
    # so y({1,2}) = 1/4 - 1/2; the coefficient sums r_I over subsets of the
    # complement of the pair, which for n = 2 is just the empty set
    zoff = np.array([0.5, 0.0, 0.0, 0.5])
    y12 = 0.25 - 0.5
    target = -2.0 * rec.r[0] * y12
    errsx = []
    for N in (16, 32):
        params = ModelParams(scheme, rec, 0.8, 0.8, N)
        mom = moment_oracle_X(zoff, params)
        errsx.append(abs(float(mom["second"][0, 1]) - target))
    rx = errsx[0] / errsx[1]
    res.add("cross_moment_order", 1.4 <= rx <= 2.6,
            f"target {target:.4f}, errors {errsx[0]:.2e} -> {errsx[1]:.2e}")
    return res


# ---------------------------------------------------------------------------
# linkage decay
# ---------------------------------------------------------------------------

def run_linkage_decay(seed: int = 20243) -> SuiteResult:
    rng = np.random.default_rng(seed)
    res = SuiteResult("linkage-decay")

    rec2 = make_recombination(2, "free")
    x = np.array([0.5, 0.5])
    y0 = np.zeros(4)
    y0[3] = -0.25
    worst = 0.0
    for t in (0.5, 1.0, 2.0):
        v = linkage_decay_ode(rec2, x, y0, t)
        exact = y0[3] * exp(-rec2.pair_split[0, 1] * t)
        worst = max(worst, abs(v[3] - exact))
    res.add("pair_component_exact_decay", worst <= 1e-8, f"max deviation {worst:.2e}")

    ok = True
    for t in (0.5, 1.0, 2.0, 5.0):
        v = linkage_decay_ode(rec2, x, y0, t)
        bound = np.max(np.abs(y0)) * exp(-rec2.min_split * t)
        ok = ok and np.max(np.abs(v)) <= bound * (1.0 + 1e-9)
    res.add("pair_envelope", ok)

    rec3 = make_recombination(3, "free")
    x3 = np.array([0.4, 0.5, 0.6])
    y3 = np.zeros(8)
    for L in (0b011, 0b101, 0b110):
        y3[L] = rng.uniform(-0.2, 0.2)
    y3[0b111] = rng.uniform(-0.1, 0.1)
    ok = True
    details = []
    for t in (1.0, 2.0, 5.0):
        v = linkage_decay_ode(rec3, x3, y3, t)
        bound = 2.0 * np.max(np.abs(y3)) * exp(-rec3.min_split * t)
        details.append(f"t={t}: |v|={np.max(np.abs(v)):.3e} vs {bound:.3e}")
        ok = ok and np.max(np.abs(v)) <= bound
    res.add("triple_envelope_with_constant", ok, "; ".join(details))

    v = linkage_decay_ode(rec3, x3, np.zeros(8), 3.0)
    res.add("zero_initial_state_stays_zero", float(np.max(np.abs(v))) == 0.0)

    try:
        linkage_decay_ode(make_recombination(2, "none"), x, y0, 1.0)
    except ValueError:
        res.add("refuses_nonmixing_distribution", True)
    else:
        res.add("refuses_nonmixing_distribution", False)
    return res


# ---------------------------------------------------------------------------
# reversibility
# ---------------------------------------------------------------------------

def run_reversibility(seed: int = 20244) -> SuiteResult:
    rng = np.random.default_rng(seed)
    res = SuiteResult("reversibility")

    worst = 0.0
    for trial in range(3):
        scheme = _random_scheme(rng, 3)
        spec = DiffusionSpec(3, float(rng.uniform(0.3, 1.5)), float(rng.uniform(0.3, 1.5)),
                             mean_assortment(scheme))
        pts = rng.uniform(0.02, 0.98, size=(340, 3))
        for p in pts:
            worst = max(worst, float(np.max(np.abs(reversibility_residual(spec, p)))))
    res.add("interior_zero_flux", worst <= 1e-10, f"max residual {worst:.2e}")

    spec = DiffusionSpec(3, 0.9, 0.8, mean_assortment(_random_scheme(rng, 3)))
    p = np.array([1e-6, 0.4, 0.7])
    worst = float(np.max(np.abs(reversibility_residual(spec, p))))
    res.add("near_boundary_conditioning", worst <= 1e-6, f"residual {worst:.2e}")

    # independent finite-difference check of the analytic density gradient
    worst = 0.0
    h = 1e-6
    for p in rng.uniform(0.1, 0.9, size=(20, 3)):
        g = grad_log_density(spec, p)
        for i in range(3):
            pp, pm = p.copy(), p.copy()
            pp[i] += h
            pm[i] -= h
            sd_like = lambda q: (
                (2 * spec.mu1 - 1) * np.log(q).sum()
                + (2 * spec.mu0 - 1) * np.log(1 - q).sum()
                + float(np.dot(spec.alpha, cb.subset_products(q * (1 - q)))))
            fd = (sd_like(pp) - sd_like(pm)) / (2 * h)
            worst = max(worst, abs(fd - g[i]))
    res.add("gradient_matches_finite_differences", worst <= 1e-5,
            f"max deviation {worst:.2e}")
    return res


# ---------------------------------------------------------------------------
# Wright-Fisher comparison
# ---------------------------------------------------------------------------

def run_wf_comparison(seed: int = 20245) -> SuiteResult:
    rng = np.random.default_rng(seed)
    res = SuiteResult("wf-comparison")

    worst = 0.0
    for trial in range(4):
        scheme = _random_scheme(rng, 2)
        mu0, mu1 = float(rng.uniform(0.2, 1.2)), float(rng.uniform(0.2, 1.2))
        spec = DiffusionSpec(2, mu0, mu1, mean_assortment(scheme))
        sigma, nu = wf_mapping_from_scheme(scheme, mu0, mu1)
        for _ in range(25):
            p, q = rng.uniform(0, 1, 2)
            b1, b2 = wf_two_locus_drift(sigma, nu, p, q)
            b = drift(spec, np.array([p, q]))
            worst = max(worst, abs(b1 - b[0]), abs(b2 - b[1]))
    res.add("selection_mapping_matches_drift", worst <= 1e-12,
            f"max deviation {worst:.2e}")

    sigma = np.zeros((2, 2, 2, 2))
    sigma[0, 0, 1, 0] = sigma[1, 0, 0, 0] = -0.3
    sigma[0, 1, 1, 1] = sigma[1, 1, 0, 1] = -0.7   # violates the pair condition
    applicable = abs(sigma[0, 0, 1, 0] - sigma[0, 1, 1, 1]) <= 1e-15
    res.add("incompatible_selection_is_flagged", not applicable,
            "comparison precondition correctly fails")
    return res


SUITES = {
    "combinatorics": run_combinatorics,
    "drift-oracle": run_drift_oracle,
    "moments": run_moments,
    "linkage-decay": run_linkage_decay,
    "reversibility": run_reversibility,
    "wf-comparison": run_wf_comparison,
}


def run_suite(name: str) -> SuiteResult:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; available: {', '.join(sorted(SUITES))}")
    return SUITES[name]()
