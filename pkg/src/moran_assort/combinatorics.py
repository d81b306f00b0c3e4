"""Subset-indexed difference operators and symmetric-polynomial identities.

Loci subsets and genotypes are machine integers used as bitmasks: bit ``u``
of a mask corresponds to locus ``u`` (0-based).  A function on subsets of an
n-element set ("subset function") is stored as a flat float64 array of
length ``2**n`` indexed by bitmask.

Everything here is pure and operates on immutable inputs, so it is safe for
concurrent use.
"""

from __future__ import annotations

from math import comb

import numpy as np

# Hard cap for any 2**n-indexed table.  Enumeration cost and memory grow as
# 2**n (and 3**n for sub-subset scans), so larger n is refused outright.
MAX_LOCI = 12


def validate_locus_count(n: int) -> int:
    """Check that ``n`` is a usable locus count and return it as ``int``."""
    n = int(n)
    if not 1 <= n <= MAX_LOCI:
        raise ValueError(f"locus count must be in [1, {MAX_LOCI}], got {n}")
    return n


def as_subset_fn(values) -> np.ndarray:
    """Validate and return a subset function (2**n finite values) as float64."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0 or arr.size & (arr.size - 1):
        raise ValueError(f"subset function must have 2**n entries, got shape {arr.shape}")
    n = arr.size.bit_length() - 1
    validate_locus_count(max(n, 1))
    if not np.all(np.isfinite(arr)):
        raise ValueError("subset function entries must be finite")
    return arr


def locus_count_of(values: np.ndarray) -> int:
    """n such that ``values`` has 2**n entries."""
    return int(np.asarray(values).size.bit_length() - 1)


def popcount(mask: int) -> int:
    return int(mask).bit_count()


def submasks(mask: int):
    """Iterate over all submasks of ``mask`` (including 0 and ``mask``)."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def delta_set(f, B: int, A: int) -> float:
    """Alternating-sum difference of a subset function over sub-subsets of B.

    Returns sum over J subset of B of (-1)^(|B|-|J|) f(A | J).  ``A`` and
    ``B`` must be disjoint bitmasks.  With B = 0 this is the identity.
    """
    arr = as_subset_fn(f)
    A, B = int(A), int(B)
    if A & B:
        raise ValueError(f"difference subset B={B:#x} overlaps base subset A={A:#x}")
    if A >= arr.size or B >= arr.size:
        raise ValueError("mask out of range for this subset function")
    nb = popcount(B)
    total = 0.0
    for J in submasks(B):
        sign = -1.0 if (nb - popcount(J)) & 1 else 1.0
        total += sign * arr[A | J]
    return total


def delta_element(f, i: int, A: int) -> float:
    """Single-element difference f(A + {i}) - f(A)."""
    return delta_set(f, 1 << i, A)


def forward_diff(s, k: int) -> np.ndarray:
    """k-th forward difference of a sequence; result has length len(s) - k."""
    arr = np.asarray(s, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError("sequence must be one-dimensional")
    k = int(k)
    if not 0 <= k <= arr.size - 1:
        raise ValueError(f"difference order {k} out of range for length {arr.size}")
    return np.diff(arr, k) if k else arr.copy()


def s_t_transform(f, t: float) -> np.ndarray:
    """Weighted sub-subset sum (S_t f)(A) = sum_{B subset A} t^(|A|-|B|) f(B).

    The inverse transform is obtained by applying with ``-t``.  t = 0 is the
    identity, t = -1 gives A -> delta_set(f, A, 0).
    """
    arr = as_subset_fn(f)
    t = float(t)
    out = np.empty_like(arr)
    for A in range(arr.size):
        acc = 0.0
        na = popcount(A)
        for B in submasks(A):
            acc += t ** (na - popcount(B)) * arr[B]
        out[A] = acc
    return out


def subset_inversion(f) -> np.ndarray:
    """Reconstruct f(A) = sum_{B subset A} delta_B[f](0) (inversion identity)."""
    arr = as_subset_fn(f)
    deltas = s_t_transform(arr, -1.0)   # delta_A[f](0) for every A
    return s_t_transform(deltas, 1.0)   # S_1 undoes S_{-1}


def elementary_symmetric(x, k: int) -> float:
    """Elementary symmetric polynomial e_k of the entries of ``x`` (e_0 = 1)."""
    arr = np.asarray(x, dtype=np.float64)
    k = int(k)
    if not 0 <= k <= arr.size:
        raise ValueError(f"degree {k} out of range for {arr.size} variables")
    return float(elementary_symmetric_all(arr, k)[k])


def elementary_symmetric_all(x, kmax: int | None = None) -> np.ndarray:
    """All e_0..e_kmax of ``x`` via the stable one-variable-at-a-time recurrence."""
    arr = np.asarray(x, dtype=np.float64)
    kmax = arr.size if kmax is None else int(kmax)
    e = np.zeros(kmax + 1)
    e[0] = 1.0
    for v in arr:
        upper = min(kmax, arr.size)
        for j in range(upper, 0, -1):
            e[j] += v * e[j - 1]
    return e


def b_polynomial(n: int, ell: int, i: int, y: float) -> float:
    """Mixed-binomial basis polynomial B_{n,ell,i}(y).

    B_{n,ell,i}(y) = 2^-ell * sum_j C(ell,j) C(n-ell,i-j) y^(i-j) (1-y)^(n-ell-(i-j)),
    j ranging over max(0, i-n+ell)..min(i, ell).  For fixed (n, ell, y) the
    values over i are nonnegative on [0, 1] and sum to 1; ell = 0 reduces to
    the Bernstein basis.
    """
    n, ell, i = int(n), int(ell), int(i)
    if n < 0 or not 0 <= ell <= n or not 0 <= i <= n:
        raise ValueError(f"b_polynomial indices out of range: n={n}, ell={ell}, i={i}")
    y = float(y)
    total = 0.0
    for j in range(max(0, i - n + ell), min(i, ell) + 1):
        a, b = i - j, n - ell - (i - j)
        term = comb(ell, j) * comb(n - ell, a)
        # 0**0 = 1 convention at the interval endpoints
        if a:
            term *= y ** a
        if b:
            term *= (1.0 - y) ** b
        total += term
    return total / 2.0 ** ell


def multivariate_identity_check(f, x, t: float, tol: float = 1e-12) -> bool:
    """Evaluate both sides of the weighted product-expansion identity.

    Left: sum_{A subset U} (S_t f)(A) prod_{i in A} x_i.
    Right: sum_{B subset U} f(B) prod_{i in B} x_i prod_{j in U\\B} (1 + t x_j).
    Returns whether they agree within ``tol``.  Test utility only.
    """
    arr = as_subset_fn(f)
    n = locus_count_of(arr)
    xs = np.asarray(x, dtype=np.float64)
    if xs.size != n:
        raise ValueError(f"need {n} variables, got {xs.size}")
    full = arr.size - 1
    stf = s_t_transform(arr, t)
    prods = subset_products(xs)
    lhs = float(np.dot(stf, prods))
    rhs = 0.0
    for B in range(arr.size):
        term = arr[B] * prods[B]
        rest = full & ~B
        for j in range(n):
            if rest >> j & 1:
                term *= 1.0 + t * xs[j]
        rhs += term
    return abs(lhs - rhs) <= tol


def subset_products(x) -> np.ndarray:
    """prod_{i in A} x_i for every bitmask A (empty product = 1)."""
    xs = np.asarray(x, dtype=np.float64)
    size = 1 << xs.size
    out = np.empty(size)
    out[0] = 1.0
    for mask in range(1, size):
        low = mask & -mask
        out[mask] = out[mask ^ low] * xs[low.bit_length() - 1]
    return out


def block_matrix(n: int, k: int, a: float) -> np.ndarray:
    """Unit-diagonal matrix with +a inside the k / n-k blocks and -a across them."""
    n, k = int(n), int(k)
    if n < 1 or not 0 <= k <= n:
        raise ValueError(f"invalid block sizes n={n}, k={k}")
    eps = np.ones(n)
    eps[k:] = -1.0
    m = a * np.outer(eps, eps)
    np.fill_diagonal(m, 1.0)
    return m


def block_matrix_posdef(n: int, k: int, a: float) -> bool:
    """Whether the +a/-a block matrix is positive definite (Cholesky succeeds)."""
    try:
        np.linalg.cholesky(block_matrix(n, k, a))
    except np.linalg.LinAlgError:
        return False
    return True
