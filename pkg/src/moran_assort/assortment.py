"""Assortment-parameter families and the drift polynomial they induce.

A scheme assigns a real mating weight to every unordered pair of genotypes,
subject to the structural constraints that the weight is symmetric and
depends only on the pair of difference sets (the loci where the first
genotype carries 0 and the second 1, and vice versa).  Custom schemes are
keyed directly by that unordered pair of bitmasks, which makes the
constraints hold by construction; a separate importer accepts a raw
2**n x 2**n matrix and rejects it if either constraint fails anywhere.

From a scheme we derive the per-subset mean weights m_L, their difference
tables, the expansion coefficients alpha, and the polynomial part of the
diffusion drift in its two equivalent forms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

from .combinatorics import (
    MAX_LOCI,
    delta_set,
    popcount,
    submasks,
    subset_products,
    validate_locus_count,
)

HAMMING = "hamming"
ADDITIVE = "additive"
CUSTOM_PAIRWISE = "custom-pairwise"
ALPHA_SPECIFIED = "alpha-specified"
GROUPED_SUM = "grouped-sum"


def _pair_key(d01: int, d10: int) -> tuple[int, int]:
    if d01 & d10:
        raise ValueError(f"difference sets overlap: {d01:#x} & {d10:#x}")
    return (d01, d10) if d01 <= d10 else (d10, d01)


@dataclass(frozen=True)
class AssortmentScheme:
    """A family of pairwise mating weights over n-locus genotypes.

    ``payload`` depends on ``kind``:
      - hamming / additive: tuple of n+1 reals s_0..s_n (indexed by the
        Hamming distance, resp. the absolute additive-trait difference);
      - custom-pairwise: mapping from unordered pairs of disjoint difference
        masks to reals (missing keys read as 0);
      - alpha-specified: tuple of 2**n expansion coefficients (entry 0 unused);
      - grouped-sum: two child schemes plus the tuple of loci assigned to the
        first child (weights add across the two groups).
    """

    n: int
    kind: str
    payload: object = field(repr=False)

    # -- constructors ------------------------------------------------------

    @staticmethod
    def hamming(s) -> "AssortmentScheme":
        s = tuple(float(v) for v in s)
        n = validate_locus_count(len(s) - 1)
        return AssortmentScheme(n, HAMMING, s)

    @staticmethod
    def additive(s) -> "AssortmentScheme":
        s = tuple(float(v) for v in s)
        n = validate_locus_count(len(s) - 1)
        return AssortmentScheme(n, ADDITIVE, s)

    @staticmethod
    def custom_pairwise(n: int, entries) -> "AssortmentScheme":
        n = validate_locus_count(n)
        full = (1 << n) - 1
        table = {}
        for (d01, d10), value in dict(entries).items():
            d01, d10 = int(d01), int(d10)
            if d01 > full or d10 > full:
                raise ValueError("difference mask out of range")
            table[_pair_key(d01, d10)] = float(value)
        return AssortmentScheme(n, CUSTOM_PAIRWISE, table)

    @staticmethod
    def from_alpha(alpha) -> "AssortmentScheme":
        """Scheme with s_{i,i} = 0 whose expansion coefficients are ``alpha``."""
        alpha = np.asarray(alpha, dtype=np.float64)
        if alpha.size & (alpha.size - 1):
            raise ValueError("alpha must have 2**n entries")
        n = validate_locus_count(alpha.size.bit_length() - 1)
        return AssortmentScheme(n, ALPHA_SPECIFIED, tuple(alpha))

    @staticmethod
    def grouped_sum(first: "AssortmentScheme", second: "AssortmentScheme",
                    first_loci) -> "AssortmentScheme":
        first_loci = tuple(sorted(int(u) for u in first_loci))
        n = first.n + second.n
        validate_locus_count(n)
        if len(first_loci) != first.n:
            raise ValueError("first_loci must list one locus per first-group locus")
        if any(not 0 <= u < n for u in first_loci) or len(set(first_loci)) != first.n:
            raise ValueError("first_loci must be distinct loci of the combined scheme")
        return AssortmentScheme(n, GROUPED_SUM, (first, second, first_loci))

    @staticmethod
    def from_matrix(matrix) -> "AssortmentScheme":
        """Import a raw 2**n x 2**n weight matrix, enforcing the pair structure.

        Rejects the matrix (exact equality required) unless it is symmetric
        and constant on classes with equal difference-set pairs.
        """
        m = np.asarray(matrix, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] & (m.shape[0] - 1):
            raise ValueError("matrix must be square with 2**n rows")
        n = validate_locus_count(m.shape[0].bit_length() - 1)
        table: dict[tuple[int, int], float] = {}
        for i in range(m.shape[0]):
            for j in range(m.shape[0]):
                if m[i, j] != m[j, i]:
                    raise ValueError(f"matrix not symmetric at ({i}, {j})")
                key = _pair_key(~i & j & (m.shape[0] - 1), i & ~j & (m.shape[0] - 1))
                if key in table:
                    if m[i, j] != table[key]:
                        raise ValueError(
                            f"matrix value at ({i}, {j}) conflicts with its difference class")
                else:
                    table[key] = float(m[i, j])
        return AssortmentScheme(n, CUSTOM_PAIRWISE, table)

    # -- evaluation --------------------------------------------------------

    def pair_value(self, i: int, j: int) -> float:
        """Mating weight s for the ordered genotype pair (i, j)."""
        full = (1 << self.n) - 1
        i, j = int(i) & full, int(j) & full
        if self.kind == HAMMING:
            return self.payload[popcount(i ^ j)]
        if self.kind == ADDITIVE:
            return self.payload[abs(popcount(~i & j & full) - popcount(i & ~j & full))]
        if self.kind == CUSTOM_PAIRWISE:
            return self.payload.get(_pair_key(~i & j & full, i & ~j & full), 0.0)
        if self.kind == ALPHA_SPECIFIED:
            diff = i ^ j
            return sum(2.0 ** (1 - popcount(b)) * self.payload[b]
                       for b in submasks(diff) if b)
        first, second, first_loci = self.payload
        i1 = _restrict(i, first_loci)
        j1 = _restrict(j, first_loci)
        rest = tuple(u for u in range(self.n) if u not in first_loci)
        return first.pair_value(i1, j1) + second.pair_value(_restrict(i, rest), _restrict(j, rest))

    def pair_matrix(self) -> np.ndarray:
        """Dense s_{i,j} matrix (2**n x 2**n); used by the simulator."""
        size = 1 << self.n
        out = np.empty((size, size))
        for i in range(size):
            for j in range(size):
                out[i, j] = self.pair_value(i, j)
        return out

    def min_pair_value(self) -> float:
        if self.kind in (HAMMING, ADDITIVE):
            return min(self.payload)
        return float(self.pair_matrix().min())

    def nonnegativity_report(self, N: int | None = None) -> dict:
        """Which weight convention the scheme satisfies.

        The analysis only uses differences of the weights, so simulation
        accepts any scheme with 1 + s/N > 0 at the configured N even though
        the strict convention asks for nonnegative s.
        """
        smin = self.min_pair_value()
        report = {"min_pair_value": smin, "all_nonnegative": bool(smin >= 0.0)}
        if N is not None:
            report["population_size"] = int(N)
            report["weights_positive_at_N"] = bool(1.0 + smin / N > 0.0)
        return report


def _restrict(mask: int, loci) -> int:
    out = 0
    for pos, u in enumerate(loci):
        out |= (mask >> u & 1) << pos
    return out


@dataclass(frozen=True)
class MeanAssortTable:
    """Per-subset mean weights m_L and their single-locus difference table.

    ``deltas[i, A]`` holds m_{A+{i}} - m_A for A not containing i (other
    entries are 0).  Both arrays are immutable after construction; every
    drift evaluation reuses them.
    """

    n: int
    m: np.ndarray
    deltas: np.ndarray

    def __post_init__(self):
        self.m.setflags(write=False)
        self.deltas.setflags(write=False)

    def delta_i(self, i: int, A: int) -> float:
        if A >> i & 1:
            raise ValueError(f"subset {A:#x} must not contain locus {i}")
        return float(self.deltas[i, A])


def mean_assortment(scheme: AssortmentScheme) -> MeanAssortTable:
    """Mean weight over all genotype pairs differing exactly on each subset L."""
    n = scheme.n
    size = 1 << n
    m = np.empty(size)
    if scheme.kind == HAMMING:
        for L in range(size):
            m[L] = scheme.payload[popcount(L)]
    elif scheme.kind == ADDITIVE:
        for L in range(size):
            ell = popcount(L)
            m[L] = sum(comb(ell, k) * scheme.payload[abs(2 * k - ell)]
                       for k in range(ell + 1)) / 2.0 ** ell
    elif scheme.kind == CUSTOM_PAIRWISE:
        for L in range(size):
            m[L] = sum(scheme.payload.get(_pair_key(D, L ^ D), 0.0)
                       for D in submasks(L)) / 2.0 ** popcount(L)
    elif scheme.kind == ALPHA_SPECIFIED:
        for L in range(size):
            m[L] = sum(2.0 ** (1 - popcount(b)) * scheme.payload[b]
                       for b in submasks(L) if b)
    else:
        first, second, first_loci = scheme.payload
        rest = tuple(u for u in range(n) if u not in first_loci)
        m1 = mean_assortment(first).m
        m2 = mean_assortment(second).m
        for L in range(size):
            m[L] = m1[_restrict(L, first_loci)] + m2[_restrict(L, rest)]
    deltas = np.zeros((n, size))
    for i in range(n):
        bit = 1 << i
        for A in range(size):
            if not A & bit:
                deltas[i, A] = m[A | bit] - m[A]
    return MeanAssortTable(n, m, deltas)


def mean_assortment_brute(scheme: AssortmentScheme) -> np.ndarray:
    """Oracle: m_L as the direct 2**-n sum over all pairs in the class F_L."""
    size = 1 << scheme.n
    return np.array([
        sum(scheme.pair_value(i, i ^ L) for i in range(size)) / size
        for L in range(size)
    ])


def alpha_coeffs(table: MeanAssortTable) -> np.ndarray:
    """Expansion coefficients alpha_L = 2^(|L|-1) delta_L[m](0), all L >= 1.

    Consistent with the per-locus form 2^|A| delta_{A+{i}}[m](0) for every
    choice of distinguished element i in L (entry 0 of the result is 0).
    """
    size = 1 << table.n
    alpha = np.zeros(size)
    for L in range(1, size):
        alpha[L] = 2.0 ** (popcount(L) - 1) * delta_set(table.m, L, 0)
    return alpha


def alpha_from_pairs(scheme: AssortmentScheme, i: int, L: int) -> float:
    """Oracle route for alpha_{i,L}: nested alternating sum over raw weights.

    sum_{T subset L} (-2)^(|L|-|T|) sum_{A subset T} (s_{A+{i},T\\A} - s_{A,T\\A}),
    with s_{I,J} the weight of the genotype pair (0 on I / 1 elsewhere,
    0 on J / 1 elsewhere).
    """
    if L >> i & 1:
        raise ValueError("L must not contain i")
    full = (1 << scheme.n) - 1
    bit = 1 << i
    total = 0.0
    nl = popcount(L)
    for T in submasks(L):
        inner = 0.0
        for A in submasks(T):
            gi = full & ~(A | bit)
            g0 = full & ~A
            other = full & ~(T ^ A)
            inner += scheme.pair_value(gi, other) - scheme.pair_value(g0, other)
        total += (-2.0) ** (nl - popcount(T)) * inner
    return total


def drift_polynomial(table: MeanAssortTable, i: int, x, form: str = "factorised") -> float:
    """Polynomial factor of the i-th drift coordinate at the point x.

    ``factorised`` weights the difference table by products of 2x(1-x) and
    1 - 2x(1-x); ``expanded`` is the plain polynomial in the x_k(1-x_k) with
    the alpha coefficients.  Both forms agree identically.
    """
    n = table.n
    xs = np.asarray(x, dtype=np.float64)
    if xs.size != n:
        raise ValueError(f"need {n} coordinates, got {xs.size}")
    rho = xs * (1.0 - xs)
    others = [k for k in range(n) if k != i]
    if form == "factorised":
        total = 0.0
        for A_rel in range(1 << (n - 1)):
            term = 1.0
            A = 0
            for pos, k in enumerate(others):
                if A_rel >> pos & 1:
                    term *= 2.0 * rho[k]
                    A |= 1 << k
                else:
                    term *= 1.0 - 2.0 * rho[k]
            total += table.deltas[i, A] * term
        return total
    if form == "expanded":
        total = 0.0
        bit = 1 << i
        for A_rel in range(1 << (n - 1)):
            term = 1.0
            A = 0
            for pos, k in enumerate(others):
                if A_rel >> pos & 1:
                    term *= rho[k]
                    A |= 1 << k
            total += 2.0 ** popcount(A) * delta_set(table.m, A | bit, 0) * term
        return total
    raise ValueError(f"unknown form {form!r}")


def drift_polynomial_raw(scheme: AssortmentScheme, i: int, x) -> float:
    """Oracle route for the drift polynomial: double sum over raw weights."""
    n = scheme.n
    xs = np.asarray(x, dtype=np.float64)
    full = (1 << n) - 1
    bit = 1 << i
    others_mask = full & ~bit
    prod0 = subset_products(xs)
    prod1 = subset_products(1.0 - xs)
    total = 0.0
    for J in submasks(others_mask):
        wj = prod0[J] * prod1[others_mask & ~J]
        for H in submasks(others_mask):
            wh = prod0[H] * prod1[full & ~(H | bit)]
            gJi = full & ~(J | bit)
            gJ = full & ~J
            gH = full & ~H
            total += wj * wh * (scheme.pair_value(gJi, gH) - scheme.pair_value(gJ, gH))
    return total


def independence_check(table: MeanAssortTable, tol: float = 1e-12) -> dict:
    """Whether the difference m_{L+{i}} - m_L is constant in L for every i.

    When true the n diffusion coordinates decouple and the i-th behaves as a
    one-locus process with effective strength delta_i[m](0), reported per
    locus.
    """
    n = table.n
    strengths = np.empty(n)
    independent = True
    for i in range(n):
        vals = [table.deltas[i, A] for A in range(1 << n) if not A >> i & 1]
        strengths[i] = vals[0]
        if max(vals) - min(vals) > tol:
            independent = False
    return {"independent": independent, "per_locus_strength": strengths}


def realize_from_alpha(alpha) -> AssortmentScheme:
    """Custom scheme with s_{i,i} = 0 realizing the given alpha coefficients.

    For a pair differing exactly on L the weight is
    sum over nonempty B subset L of 2^(1-|B|) alpha_B, which round-trips
    through alpha_coeffs exactly.
    """
    alpha = np.asarray(alpha, dtype=np.float64)
    n = validate_locus_count(alpha.size.bit_length() - 1)
    entries = {}
    for L in range(1, 1 << n):
        value = sum(2.0 ** (1 - popcount(B)) * alpha[B] for B in submasks(L) if B)
        for D in submasks(L):
            entries[_pair_key(D, L ^ D)] = value
    entries[(0, 0)] = 0.0
    return AssortmentScheme.custom_pairwise(n, entries)


def drift_bounds(table: MeanAssortTable, i: int) -> tuple[float, float]:
    """(M_minus, M_plus): sharp constant bounds of the drift polynomial on the cube.

    M_plus = sum_A 2^-|A| max(delta_i[m](A), 0) and M_minus the mirrored
    negative-part sum.
    """
    n = table.n
    m_plus = 0.0
    m_minus = 0.0
    for A in range(1 << n):
        if A >> i & 1:
            continue
        w = 2.0 ** (-popcount(A))
        d = table.deltas[i, A]
        m_plus += w * max(d, 0.0)
        m_minus -= w * max(-d, 0.0)
    return m_minus, m_plus
