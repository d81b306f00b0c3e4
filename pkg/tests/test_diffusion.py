"""Limiting diffusion: drift, integrator, boundaries, WF comparison."""

import numpy as np
import pytest

from moran_assort import (
    AssortmentScheme,
    DiffusionSpec,
    SdeConfig,
    boundary_classification,
    drift,
    drift_general_one_locus,
    mean_assortment,
    reversibility_residual,
    sde_simulate,
    wf_two_locus_drift,
)
from moran_assort.assortment import drift_bounds
from moran_assort.diffusion import (
    grad_log_density,
    sandwich_max_violation,
    wf_mapping_from_scheme,
)
from tests.test_assortment import random_scheme


def hamming_spec(s, mu0, mu1):
    return DiffusionSpec.from_scheme(AssortmentScheme.hamming(s), mu0, mu1)


# ---------------------------------------------------------------------------
# drift
# ---------------------------------------------------------------------------

def test_drift_vanishes_at_symmetric_centre():
    spec = hamming_spec([0.0, -2.0, -8.0], 0.7, 0.7)
    np.testing.assert_allclose(drift(spec, [0.5, 0.5]), 0.0, atol=1e-15)


def test_drift_one_locus_closed_form():
    s0, s1, mu0, mu1 = 1.0, -4.0, 0.3, 0.8
    spec = hamming_spec([s0, s1], mu0, mu1)
    for x in np.linspace(0.0, 1.0, 13):
        expect = mu1 * (1 - x) - mu0 * x + (s1 - s0) * (0.5 - x) * x * (1 - x)
        assert drift(spec, [x])[0] == pytest.approx(expect, abs=1e-14)


def test_drift_within_constant_bounds():
    rng = np.random.default_rng(21)
    scheme = random_scheme(rng, 3)
    spec = DiffusionSpec(3, 0.4, 0.9, mean_assortment(scheme))
    for _ in range(10_000):
        x = rng.uniform(0, 1, 3)
        b = drift(spec, x)
        for i in range(3):
            lo, hi = drift_bounds(spec.table, i)
            factor = (0.5 - x[i]) * x[i] * (1 - x[i])
            base = spec.mu1 * (1 - x[i]) - spec.mu0 * x[i]
            b_lo = base + factor * (hi if x[i] > 0.5 else lo)
            b_hi = base + factor * (lo if x[i] > 0.5 else hi)
            assert b_lo - 1e-12 <= b[i] <= b_hi + 1e-12


def test_independent_case_reduces_to_one_locus_drifts():
    d = -2.2
    spec = hamming_spec([0.0, d, 2 * d, 3 * d], 0.9, 0.9)
    one = hamming_spec([0.0, d], 0.9, 0.9)
    rng = np.random.default_rng(22)
    for _ in range(50):
        x = rng.uniform(0, 1, 3)
        b = drift(spec, x)
        for i in range(3):
            assert b[i] == pytest.approx(drift(one, [x[i]])[0], abs=1e-12)


def test_general_one_locus_drift():
    assert drift_general_one_locus(2.0, 2.0, 2.0, 2.0, 0.3, 0.7, 0.4) == pytest.approx(
        0.7 * 0.6 - 0.3 * 0.4)
    # symmetric weights reduce to the distance form
    for x in np.linspace(0, 1, 7):
        sym = drift_general_one_locus(1.0, -3.0, -3.0, 1.0, 0.2, 0.5, x)
        spec = hamming_spec([1.0, -3.0], 0.2, 0.5)
        assert sym == pytest.approx(drift(spec, [x])[0], abs=1e-14)
    assert drift_general_one_locus(0.0, 1.0, 2.0, 0.0, 0.0, 0.0, 0.5) == pytest.approx(1 / 16)


# ---------------------------------------------------------------------------
# integrator
# ---------------------------------------------------------------------------

def test_sde_deterministic_given_seed():
    spec = hamming_spec([0.0, -2.0, -8.0], 0.6, 0.6)
    config = SdeConfig(dt=1e-3, steps=2000, record_every=100, seed=99)
    a = sde_simulate(spec, config, [0.5, 0.5])
    b = sde_simulate(spec, config, [0.5, 0.5])
    np.testing.assert_array_equal(a.path, b.path)
    assert a.path.shape == (20, 2)
    assert np.all(a.path >= 0.0) and np.all(a.path <= 1.0)


def test_vertex_is_absorbing_without_mutation():
    spec = hamming_spec([0.0, 0.0], 0.0, 0.0)
    config = SdeConfig(dt=1e-3, steps=500, record_every=50, seed=1)
    out = sde_simulate(spec, config, [0.0])
    assert np.all(out.path == 0.0)
    out = sde_simulate(spec, config, [1.0])
    assert np.all(out.path == 1.0)


def test_sandwich_coupling_stays_within_step_tolerance():
    rng = np.random.default_rng(23)
    scheme = random_scheme(rng, 2)
    spec = DiffusionSpec(2, 0.8, 0.8, mean_assortment(scheme))
    dt = 1e-4
    worst = sandwich_max_violation(spec, [0.4, 0.6], dt, 50_000,
                                   np.random.Generator(np.random.PCG64(5)))
    assert worst <= 5 * dt, f"violation {worst:.2e}"


def test_boundary_classification():
    assert boundary_classification(0.0) == "absorbing"
    assert boundary_classification(0.25) == "regular"
    assert boundary_classification(0.5) == "entrance"
    assert boundary_classification(2.0) == "entrance"
    with pytest.raises(ValueError):
        boundary_classification(-0.1)


# ---------------------------------------------------------------------------
# Wright-Fisher comparison
# ---------------------------------------------------------------------------

def test_wf_drift_neutral_selection_is_pure_mutation():
    nu = np.array([[0.2, 0.7], [0.4, 0.1]])
    b1, b2 = wf_two_locus_drift(np.zeros((2, 2, 2, 2)), nu, 0.3, 0.8)
    assert b1 == pytest.approx(0.7 * 0.7 - 0.2 * 0.3)
    assert b2 == pytest.approx(0.1 * 0.2 - 0.4 * 0.8)


def test_wf_selection_mapping_matches_diffusion_drift():
    rng = np.random.default_rng(24)
    for _ in range(4):
        scheme = random_scheme(rng, 2)
        mu0, mu1 = rng.uniform(0.2, 1.0, 2)
        spec = DiffusionSpec(2, mu0, mu1, mean_assortment(scheme))
        sigma, nu = wf_mapping_from_scheme(scheme, mu0, mu1)
        assert sigma[0, 0, 0, 0] == 0.0
        for _ in range(25):
            p, q = rng.uniform(0, 1, 2)
            b1, b2 = wf_two_locus_drift(sigma, nu, p, q)
            b = drift(spec, np.array([p, q]))
            assert b1 == pytest.approx(b[0], abs=1e-12)
            assert b2 == pytest.approx(b[1], abs=1e-12)


# ---------------------------------------------------------------------------
# reversibility
# ---------------------------------------------------------------------------

def test_reversibility_residual_neutral_case():
    spec = hamming_spec([0.0, 0.0, 0.0], 0.8, 0.5)
    rng = np.random.default_rng(25)
    for _ in range(20):
        x = rng.uniform(0.05, 0.95, 2)
        np.testing.assert_allclose(reversibility_residual(spec, x), 0.0, atol=1e-14)


def test_reversibility_residual_random_specs():
    rng = np.random.default_rng(26)
    spec = hamming_spec(rng.uniform(-3, 3, 4), 0.9, 1.2)
    worst = 0.0
    for _ in range(1000):
        x = rng.uniform(0.02, 0.98, 3)
        worst = max(worst, np.max(np.abs(reversibility_residual(spec, x))))
    assert worst < 1e-10


def test_reversibility_residual_near_boundary():
    spec = hamming_spec([0.0, -1.0, -2.0, 1.0], 0.8, 0.9)
    x = np.array([1e-6, 0.3, 0.6])
    assert np.max(np.abs(reversibility_residual(spec, x))) < 1e-6


def test_gradient_matches_finite_differences():
    spec = hamming_spec([0.0, -2.0, -8.0], 0.6, 0.6)
    rng = np.random.default_rng(27)

    def logg(x):
        rho = x * (1 - x)
        val = (2 * 0.6 - 1) * np.log(rho).sum()
        a = spec.alpha
        from moran_assort.combinatorics import subset_products
        return val + float(np.dot(a, subset_products(rho)))

    h = 1e-6
    for _ in range(10):
        x = rng.uniform(0.1, 0.9, 2)
        g = grad_log_density(spec, x)
        for i in range(2):
            xp, xm = x.copy(), x.copy()
            xp[i] += h
            xm[i] -= h
            fd = (logg(xp) - logg(xm)) / (2 * h)
            assert g[i] == pytest.approx(fd, abs=1e-5)
