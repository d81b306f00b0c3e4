"""Exact chain law, coordinates, expansion oracles, relaxation ODE."""

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from moran_assort import (
    AssortmentScheme,
    ModelParams,
    PopulationState,
    coordinates,
    exact_transition,
    invert_coordinates,
    linkage_decay_ode,
    make_recombination,
    simulate,
    step,
)
from moran_assort.combinatorics import popcount
from moran_assort.moran import (
    InfeasibleCoordinatesError,
    drift_oracle_Z,
    exact_event_distribution,
    linkage_decay_rhs,
    moment_oracle_X,
    sample_events,
)


def neutral_params(n, N, mu=0.0, rec_kind="free"):
    scheme = AssortmentScheme.hamming([0.0] * (n + 1))
    return ModelParams(scheme, make_recombination(n, rec_kind), mu, mu, N)


# ---------------------------------------------------------------------------
# recombination distributions
# ---------------------------------------------------------------------------

def test_free_recombination_is_uniform():
    rec = make_recombination(3, "free")
    np.testing.assert_allclose(rec.r, 1.0 / 8.0)
    assert rec.min_split == pytest.approx(0.5)


def test_no_recombination_never_splits():
    rec = make_recombination(3, "none")
    assert rec.r[0] == rec.r[7] == 0.5
    assert rec.min_split == 0.0


def test_single_crossover_values():
    rec = make_recombination(3, "single_crossover", rate=0.5)
    assert rec.r[0b001] == pytest.approx(0.125)
    assert rec.r[0b110] == pytest.approx(0.125)
    assert rec.r[0b000] == pytest.approx(0.25)
    assert rec.r[0b111] == pytest.approx(0.25)
    assert rec.r.sum() == pytest.approx(1.0)
    with pytest.raises(ValueError):
        make_recombination(1, "single_crossover", rate=0.5)


def test_custom_recombination_validation():
    good = np.array([0.3, 0.2, 0.2, 0.3])
    rec = make_recombination(2, "custom", weights=good)
    assert rec.min_split == pytest.approx(0.4)
    with pytest.raises(ValueError):
        make_recombination(2, "custom", weights=[0.4, 0.2, 0.2, 0.3])
    with pytest.raises(ValueError):
        make_recombination(2, "custom", weights=[0.4, 0.1, 0.2, 0.3])
    with pytest.raises(ValueError):
        make_recombination(2, "custom", weights=[0.6, 0.2, 0.2, -0.2])


# ---------------------------------------------------------------------------
# states and parameters
# ---------------------------------------------------------------------------

def test_population_state_validation():
    with pytest.raises(ValueError):
        PopulationState(2, 10, np.array([5, 5, 5, 5]))
    with pytest.raises(ValueError):
        PopulationState(2, 10, np.array([11, -1, 0, 0]))


def test_model_params_validation():
    scheme = AssortmentScheme.hamming([0.0, -6.0])
    rec = make_recombination(1, "free")
    with pytest.raises(ValueError):
        ModelParams(scheme, rec, 10.0, 0.0, 5)       # mu/N > 1
    with pytest.raises(ValueError):
        ModelParams(scheme, rec, 0.1, 0.1, 4)        # 1 + s/N <= 0
    with pytest.raises(ValueError):
        ModelParams(scheme, make_recombination(2, "free"), 0.1, 0.1, 50)


# ---------------------------------------------------------------------------
# stepping
# ---------------------------------------------------------------------------

def test_single_individual_selfing_is_stable():
    params = neutral_params(2, 1)
    state = PopulationState.monomorphic(2, 1, genotype=0b01)
    rng = np.random.default_rng(0)
    for _ in range(20):
        state = step(state, params, rng)
        assert state.counts[0b01] == 1


def test_monomorphic_without_mutation_is_absorbing():
    params = neutral_params(3, 30)
    state = PopulationState.monomorphic(3, 30, genotype=0b101)
    out = simulate(params, state, steps=500, record_every=500, seed=1)[0]
    assert out.counts[-1, 0b101] == 30


def test_population_size_conserved():
    rng = np.random.default_rng(2)
    scheme = AssortmentScheme.hamming([0.0, -1.0, 2.0])
    params = ModelParams(scheme, make_recombination(2, "free"), 0.5, 0.5, 40)
    state = PopulationState.from_dict(2, 40, {0: 10, 1: 10, 2: 10, 3: 10})
    for _ in range(50):
        state = step(state, params, rng)
    assert state.counts.sum() == 40


# ---------------------------------------------------------------------------
# exact one-event law
# ---------------------------------------------------------------------------

def test_transition_zero_without_first_parent():
    params = neutral_params(2, 10, mu=0.2)
    state = PopulationState.from_dict(2, 10, {3: 10})
    assert exact_transition(state, params, 0b00, 0b11) == 0.0


def test_transition_requires_distinct_types():
    params = neutral_params(2, 10)
    state = PopulationState.from_dict(2, 10, {0: 5, 3: 5})
    with pytest.raises(ValueError):
        exact_transition(state, params, 2, 2)


def test_one_locus_neutral_transition_by_enumeration():
    # two individuals, one of each type; enumerate the draw by hand:
    # first parent type 0 (prob 1/2), second type 1 (prob 1/2), offspring
    # keeps the second parent's allele when the inherited subset is empty
    # (prob 1/2): total 1/8
    params = neutral_params(1, 2)
    state = PopulationState.from_dict(1, 2, {0: 1, 1: 1})
    assert exact_transition(state, params, 0, 1) == pytest.approx(1.0 / 8.0)


def test_event_distribution_is_a_probability_with_correct_margins():
    rng = np.random.default_rng(3)
    scheme = AssortmentScheme.hamming([0.0, -1.5, 0.5])
    params = ModelParams(scheme, make_recombination(2, "single_crossover", rate=0.7),
                         0.4, 0.9, 20)
    counts = rng.multinomial(20, [0.3, 0.3, 0.2, 0.2])
    state = PopulationState(2, 20, counts)
    f = exact_event_distribution(state, params)
    assert f.sum() == pytest.approx(1.0, abs=1e-13)
    z = state.frequencies()
    np.testing.assert_allclose(f.sum(axis=1), z, atol=1e-13)
    outflow = f.sum(axis=1) - np.diag(f)
    assert np.all(outflow <= z + 1e-13)


def test_empirical_steps_match_exact_law():
    scheme = AssortmentScheme.hamming([0.0, -2.0, -5.0])
    params = ModelParams(scheme, make_recombination(2, "free"), 1.0, 1.0, 10)
    state = PopulationState.from_dict(2, 10, {0: 4, 1: 3, 2: 2, 3: 1})
    trials = 1_000_000
    tally = sample_events(state, params, trials, np.random.default_rng(4))
    f = exact_event_distribution(state, params)
    worst = 0.0
    for i in range(4):
        for j in range(4):
            p = f[i, j]
            se = np.sqrt(max(p * (1 - p), 1e-12) / trials)
            dev = abs(tally[i, j] / trials - p) / se
            worst = max(worst, dev)
    assert worst < 4.0, f"worst deviation {worst:.2f} sigma"


# ---------------------------------------------------------------------------
# coordinates
# ---------------------------------------------------------------------------

def test_coordinates_of_monomorphic_zero_population():
    state = PopulationState.monomorphic(3, 12, genotype=0)
    cv = coordinates(state)
    np.testing.assert_allclose(cv.x, 1.0)
    np.testing.assert_allclose(cv.y, 0.0)


def test_coordinates_of_product_state_have_zero_disequilibrium():
    # counts proportional to an exact product measure
    state = PopulationState.from_dict(2, 16, {0: 2, 1: 6, 2: 2, 3: 6})
    cv = coordinates(state)
    np.testing.assert_allclose(cv.x, [0.25, 0.5])
    np.testing.assert_allclose(cv.y, 0.0, atol=1e-15)


def test_coordinates_of_maximal_disequilibrium_state():
    state = PopulationState.from_dict(2, 4, {0: 2, 3: 2})
    cv = coordinates(state)
    np.testing.assert_allclose(cv.x, [0.5, 0.5])
    assert cv.y_of(0b11) == pytest.approx(-0.25)


def test_invert_coordinates_product_case():
    x = np.array([0.3, 0.8, 0.6])
    z = invert_coordinates(3, x, np.zeros(8))
    expect = np.empty(8)
    for g in range(8):
        v = 1.0
        for i in range(3):
            v *= (1 - x[i]) if g >> i & 1 else x[i]
        expect[g] = v
    np.testing.assert_allclose(z, expect, atol=1e-14)


def test_invert_coordinates_roundtrip():
    rng = np.random.default_rng(5)
    for n in (2, 3, 4):
        for _ in range(25):
            counts = rng.multinomial(60, rng.dirichlet(np.ones(1 << n)))
            state = PopulationState(n, 60, counts)
            cv = coordinates(state)
            z = invert_coordinates(n, cv.x, cv.y)
            np.testing.assert_allclose(z, state.frequencies(), atol=1e-12)


def test_invert_coordinates_hand_case_and_infeasible():
    z = invert_coordinates(2, [0.5, 0.5], [0.0, 0.0, 0.0, -0.25])
    np.testing.assert_allclose(z, [0.5, 0.0, 0.0, 0.5], atol=1e-15)
    with pytest.raises(InfeasibleCoordinatesError):
        invert_coordinates(2, [0.9, 0.9], [0.0, 0.0, 0.0, 0.5])


# ---------------------------------------------------------------------------
# expansion oracles
# ---------------------------------------------------------------------------

def test_drift_oracle_leading_term_marginals_vanish():
    rng = np.random.default_rng(6)
    scheme = AssortmentScheme.hamming([0.0, -2.0, 3.0])
    params = ModelParams(scheme, make_recombination(2, "free"), 0.7, 0.3, 32)
    d = drift_oracle_Z(rng.dirichlet(np.ones(4)), params)
    for u in range(2):
        total = sum(d["B0"][i] for i in range(4) if not i >> u & 1)
        assert total == pytest.approx(0.0, abs=1e-13)


def test_drift_oracle_residual_shrinks_like_one_over_N():
    rng = np.random.default_rng(7)
    scheme = AssortmentScheme.hamming([0.0, -2.0, 3.0])
    z = rng.dirichlet(np.ones(4))
    residuals = []
    for N in (16, 32):
        params = ModelParams(scheme, make_recombination(2, "free"), 0.7, 0.3, N)
        residuals.append(np.max(np.abs(drift_oracle_Z(z, params)["residual"])))
    ratio = residuals[0] / residuals[1]
    assert 1.4 <= ratio <= 2.6, f"ratio {ratio:.2f}"


def test_neutral_chain_first_moments_vanish():
    rng = np.random.default_rng(8)
    params = neutral_params(2, 24)
    z = rng.dirichlet(np.ones(4))
    d = drift_oracle_Z(z, params)
    for u in range(2):
        b1 = sum(d["B1"][i] for i in range(4) if not i >> u & 1)
        assert b1 == pytest.approx(0.0, abs=1e-13)
    mom = moment_oracle_X(z, params)
    np.testing.assert_allclose(mom["first"], 0.0, atol=1e-13)


def test_one_locus_second_moment():
    params = neutral_params(1, 40, mu=0.5)
    state = PopulationState.from_dict(1, 40, {0: 25, 1: 15})
    mom = moment_oracle_X(state, params)
    z = 25 / 40
    assert mom["second"][0, 0] == pytest.approx(z * (1 - z), abs=0.6 / 40)


def test_cross_moment_tracks_disequilibrium():
    params = neutral_params(2, 64, mu=0.2)
    state = PopulationState.from_dict(2, 64, {0: 32, 3: 32})
    mom = moment_oracle_X(state, params)
    target = -2.0 * 0.25 * (-0.25)
    assert mom["second"][0, 1] == pytest.approx(target, abs=2.5 / 64)


def test_oracle_size_limits():
    params = neutral_params(2, 128)
    with pytest.raises(ValueError):
        drift_oracle_Z(np.full(4, 0.25), params)


# ---------------------------------------------------------------------------
# linkage relaxation
# ---------------------------------------------------------------------------

def test_pair_disequilibrium_decays_exactly():
    rec = make_recombination(2, "single_crossover", rate=0.6)
    x = np.array([0.4, 0.7])
    y0 = np.zeros(4)
    y0[3] = 0.18
    for t in (0.3, 1.0, 4.0):
        v = linkage_decay_ode(rec, x, y0, t)
        assert v[3] == pytest.approx(y0[3] * np.exp(-rec.pair_split[0, 1] * t), abs=1e-8)


def test_relaxation_matches_reference_integrator():
    rng = np.random.default_rng(9)
    rec = make_recombination(3, "free")
    x = rng.uniform(0.2, 0.8, 3)
    y0 = np.zeros(8)
    for L in range(8):
        if popcount(L) >= 2:
            y0[L] = rng.uniform(-0.1, 0.1)

    sol = solve_ivp(lambda _, v: linkage_decay_rhs(3, rec.r, x, v),
                    (0.0, 2.5), y0, rtol=1e-11, atol=1e-12, dense_output=True)
    ours = linkage_decay_ode(rec, x, y0, 2.5)
    np.testing.assert_allclose(ours, sol.y[:, -1], atol=1e-8)


def test_relaxation_trivial_and_refused_cases():
    rec = make_recombination(3, "free")
    x = np.full(3, 0.5)
    v = linkage_decay_ode(rec, x, np.zeros(8), 2.0)
    assert np.all(v == 0.0)
    with pytest.raises(ValueError):
        linkage_decay_ode(make_recombination(2, "none"), x[:2], np.zeros(4), 1.0)


# ---------------------------------------------------------------------------
# bulk simulation
# ---------------------------------------------------------------------------

def test_simulate_is_deterministic_and_replicas_differ():
    scheme = AssortmentScheme.hamming([0.0, -2.0, -5.0])
    params = ModelParams(scheme, make_recombination(2, "free"), 1.0, 1.0, 60)
    init = PopulationState.monomorphic(2, 60, 0)
    a = simulate(params, init, 3000, 300, seed=11, replicas=2)
    b = simulate(params, init, 3000, 300, seed=11, replicas=2)
    np.testing.assert_array_equal(a[0].counts, b[0].counts)
    np.testing.assert_array_equal(a[1].counts, b[1].counts)
    assert not np.array_equal(a[0].counts, a[1].counts)
    assert np.all(a[0].counts.sum(axis=1) == 60)


def test_zero_rate_single_individual_trajectory_is_constant():
    params = neutral_params(1, 1)
    init = PopulationState.monomorphic(1, 1, 0)
    out = simulate(params, init, 100, 10, seed=3)[0]
    assert np.all(out.counts[:, 0] == 1)


def test_trajectory_coordinate_paths():
    params = neutral_params(2, 8, mu=0.3)
    init = PopulationState.from_dict(2, 8, {0: 4, 3: 4})
    out = simulate(params, init, 40, 40, seed=5)[0]
    xs = out.x_path()
    ys = out.y_path([0b11])
    assert xs.shape == (1, 2) and ys.shape == (1, 1)
    state = PopulationState(2, 8, out.counts[0])
    cv = coordinates(state)
    np.testing.assert_allclose(xs[0], cv.x)
    assert ys[0, 0] == pytest.approx(cv.y_of(0b11))
