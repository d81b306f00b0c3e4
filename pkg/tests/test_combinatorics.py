"""Subset-operator and polynomial identity tests."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from moran_assort import combinatorics as cb


def test_delta_empty_is_identity():
    rng = np.random.default_rng(1)
    f = rng.uniform(-10, 10, 16)
    for A in range(16):
        assert cb.delta_set(f, 0, A) == f[A]


def test_delta_second_difference_of_linear_set_function_vanishes():
    f = np.array([cb.popcount(a) for a in range(16)], dtype=float)
    assert cb.delta_set(f, 0b011, 0) == pytest.approx(0.0, abs=1e-15)


def test_delta_exponential_set_function():
    f = np.array([2.0 ** cb.popcount(a) for a in range(4)])
    assert cb.delta_set(f, 0b01, 0b10) == pytest.approx(2.0)


def test_delta_rejects_overlap():
    f = np.zeros(8)
    with pytest.raises(ValueError):
        cb.delta_set(f, 0b011, 0b001)


def test_delta_matches_iterated_single_differences():
    rng = np.random.default_rng(2)
    for n in (3, 4, 6):
        f = rng.uniform(-5, 5, 1 << n)
        full = (1 << n) - 1
        for _ in range(8):
            B = int(rng.integers(1, full + 1))
            A = int(rng.integers(0, full + 1)) & ~B
            elems = [i for i in range(n) if B >> i & 1]
            rng.shuffle(elems)
            g = f
            for i in elems:
                g = np.array([g[a | (1 << i)] - g[a] for a in range(g.size)])
            assert cb.delta_set(f, B, A) == pytest.approx(g[A], abs=1e-11)


def test_forward_diff_examples():
    assert np.all(cb.forward_diff([3.0, 3.0, 3.0, 3.0], 1) == 0.0)
    sq = np.array([float(k * k) for k in range(6)])
    assert np.all(cb.forward_diff(sq, 2) == 2.0)
    np.testing.assert_allclose(cb.forward_diff([0.0, 1.0, 4.0, 9.0], 1), [1, 3, 5])
    with pytest.raises(ValueError):
        cb.forward_diff([1.0, 2.0], 2)


def test_s_t_zero_is_identity():
    rng = np.random.default_rng(3)
    f = rng.uniform(-10, 10, 32)
    np.testing.assert_array_equal(cb.s_t_transform(f, 0.0), f)


def test_s_minus_one_equals_delta_at_empty_base():
    rng = np.random.default_rng(4)
    for n in range(1, 6):
        f = rng.uniform(-10, 10, 1 << n)
        g = cb.s_t_transform(f, -1.0)
        for A in range(1 << n):
            assert g[A] == pytest.approx(cb.delta_set(f, A, 0), abs=1e-11)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.floats(-2, 2), st.integers(0, 2 ** 32 - 1))
def test_s_t_roundtrip_property(n, t, seed):
    f = np.random.default_rng(seed).uniform(-10, 10, 1 << n)
    back = cb.s_t_transform(cb.s_t_transform(f, t), -t)
    assert np.max(np.abs(back - f)) <= 1e-11 * max(1.0, abs(t)) ** n


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2 ** 32 - 1))
def test_subset_inversion_property(n, seed):
    f = np.random.default_rng(seed).uniform(-10, 10, 1 << n)
    assert np.max(np.abs(cb.subset_inversion(f) - f)) <= 1e-11


def test_binomial_inversion_of_forward_differences():
    from math import comb

    rng = np.random.default_rng(5)
    for n in (2, 5, 8):
        f = rng.uniform(-10, 10, n + 1)
        diffs = [cb.forward_diff(f, k)[0] for k in range(n + 1)]
        for k in range(n + 1):
            recon = sum(comb(k, j) * diffs[j] for j in range(k + 1))
            assert recon == pytest.approx(f[k], abs=1e-11)


def test_elementary_symmetric_values():
    assert cb.elementary_symmetric([2.0, 5.0], 2) == pytest.approx(10.0)
    assert cb.elementary_symmetric([1.0, 2.0, 3.0], 2) == pytest.approx(11.0)
    assert cb.elementary_symmetric([1.0, 2.0, 3.0], 0) == 1.0
    with pytest.raises(ValueError):
        cb.elementary_symmetric([1.0], 2)


def test_symmetric_polynomial_exchange_identity():
    rng = np.random.default_rng(6)
    for n in (3, 5, 6):
        x = rng.uniform(-3, 3, n)
        for k in range(n - 1):
            for i in range(n):
                for j in range(i + 1, n):
                    lhs = (x[i] * cb.elementary_symmetric(np.delete(x, i), k)
                           - x[j] * cb.elementary_symmetric(np.delete(x, j), k))
                    rhs = (x[i] - x[j]) * cb.elementary_symmetric(np.delete(x, (i, j)), k)
                    assert lhs == pytest.approx(rhs, abs=1e-12 * max(1, abs(rhs)))


def test_b_polynomial_reduces_to_bernstein():
    from math import comb

    for n in (1, 3, 5):
        for i in range(n + 1):
            for y in (0.0, 0.2, 0.9, 1.0):
                expect = comb(n, i) * y ** i * (1 - y) ** (n - i) if i else (1 - y) ** n
                assert cb.b_polynomial(n, 0, i, y) == pytest.approx(expect)


def test_b_polynomial_partition_of_unity_and_positivity():
    rng = np.random.default_rng(7)
    for _ in range(20):
        n = int(rng.integers(1, 7))
        ell = int(rng.integers(0, n + 1))
        y = float(rng.uniform(0, 1))
        vals = [cb.b_polynomial(n, ell, i, y) for i in range(n + 1)]
        assert all(v >= 0 for v in vals)
        assert sum(vals) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        cb.b_polynomial(3, 4, 0, 0.5)
    with pytest.raises(ValueError):
        cb.b_polynomial(3, 0, 5, 0.5)


def test_b_polynomial_mixed_basis_identity():
    rng = np.random.default_rng(8)
    for n in (2, 3, 5):
        for ell in range(n + 1):
            a = rng.uniform(-4, 4, n + 1)
            y = float(rng.uniform(0, 0.5))
            diffs = [cb.forward_diff(a, k)[0] for k in range(n + 1)]
            lhs = sum(2.0 ** k * diffs[k]
                      * cb.elementary_symmetric([0.25] * ell + [y] * (n - ell), k)
                      for k in range(n + 1))
            rhs = sum(a[i] * cb.b_polynomial(n, ell, i, 2 * y) for i in range(n + 1))
            assert lhs == pytest.approx(rhs, abs=1e-12)


def test_multivariate_identity():
    rng = np.random.default_rng(9)
    assert cb.multivariate_identity_check(np.zeros(8), [1.0, 2.0, 3.0], 0.7)
    f = rng.uniform(-5, 5, 8)
    assert cb.multivariate_identity_check(f, rng.uniform(-2, 2, 3), 0.0)
    for n in (2, 4, 5):
        f = rng.uniform(-5, 5, 1 << n)
        assert cb.multivariate_identity_check(f, rng.uniform(-2, 2, n), float(rng.uniform(-2, 2)))


def test_block_matrix_definiteness():
    assert np.array_equal(cb.block_matrix(3, 1, 0.0), np.eye(3))
    assert cb.block_matrix_posdef(6, 2, 0.99)
    assert not cb.block_matrix_posdef(2, 1, 1.0)
    for a in (0.0, 0.25, 0.5, 0.9, 0.99):
        for n in range(1, 9):
            for k in (0, n // 2, n):
                assert cb.block_matrix_posdef(n, k, a)


def test_locus_cap_is_enforced():
    with pytest.raises(ValueError):
        cb.as_subset_fn(np.zeros(1 << 13))
    with pytest.raises(ValueError):
        cb.validate_locus_count(13)
