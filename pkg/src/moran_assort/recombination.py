"""Recombination distributions over loci subsets.

The offspring inherits the first parent's alleles on a random subset L and
the second parent's elsewhere; r_L is the law of that subset.  The two
parents contribute symmetrically, so r_L = r_{complement of L} always.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .combinatorics import popcount, validate_locus_count

NONE = "none"
FREE = "free"
SINGLE_CROSSOVER = "single_crossover"
CUSTOM = "custom"

_TOL = 1e-12


@dataclass(frozen=True)
class RecombinationDistribution:
    """Probability weights r over all subsets of the n loci.

    ``pair_split[k, h]`` is the probability that loci k and h are inherited
    from different parents; ``min_split`` is its minimum over pairs (the
    decay rate of the slowest linkage component).  For a single locus there
    is no pair to split, so ``min_split`` is +inf.
    """

    n: int
    kind: str
    r: np.ndarray
    pair_split: np.ndarray
    min_split: float

    def __post_init__(self):
        self.r.setflags(write=False)
        self.pair_split.setflags(write=False)


def _finish(n: int, kind: str, r: np.ndarray) -> RecombinationDistribution:
    pair = np.zeros((n, n))
    full = (1 << n) - 1
    for k in range(n):
        for h in range(n):
            if k == h:
                continue
            pair[k, h] = sum(
                r[L] + r[full & ~L]
                for L in range(1 << n)
                if (L >> k & 1) and not (L >> h & 1)
            )
    min_split = math.inf if n < 2 else float(min(pair[k, h] for k in range(n)
                                                 for h in range(n) if k != h))
    return RecombinationDistribution(n, kind, r, pair, min_split)


def make_recombination(n: int, kind: str, rate: float | None = None,
                       weights=None) -> RecombinationDistribution:
    """Build one of the stock distributions or validate a custom one.

    - ``none``: all-or-nothing inheritance (absolute linkage),
    - ``free``: every subset equally likely,
    - ``single_crossover``: at most one exchange point, at position chosen
      uniformly, with total crossover probability ``rate``;
    - ``custom``: arbitrary ``weights`` (2**n values), checked for
      nonnegativity, normalisation and the parent-symmetry constraint.
    """
    n = validate_locus_count(n)
    size = 1 << n
    full = size - 1
    if kind == NONE:
        r = np.zeros(size)
        r[0] = r[full] = 0.5
    elif kind == FREE:
        r = np.full(size, 1.0 / size)
    elif kind == SINGLE_CROSSOVER:
        if n < 2:
            raise ValueError("single_crossover needs at least two loci")
        if rate is None or not 0.0 < rate <= 1.0:
            raise ValueError(f"crossover rate must lie in (0, 1], got {rate}")
        r = np.zeros(size)
        r[0] = r[full] = 0.5 * (1.0 - rate)
        for x in range(1, n):
            prefix = (1 << x) - 1
            r[prefix] += rate / (2.0 * (n - 1))
            r[full & ~prefix] += rate / (2.0 * (n - 1))
    elif kind == CUSTOM:
        r = np.asarray(weights, dtype=np.float64).copy()
        if r.shape != (size,):
            raise ValueError(f"custom weights must have {size} entries")
        if np.any(r < -_TOL):
            raise ValueError("custom weights must be nonnegative")
        if abs(r.sum() - 1.0) > _TOL:
            raise ValueError(f"custom weights must sum to 1, got {r.sum()!r}")
        for L in range(size):
            if abs(r[L] - r[full & ~L]) > _TOL:
                raise ValueError(
                    f"weights violate parent symmetry at subset {L:#x}")
        r = np.clip(r, 0.0, None)
        r /= r.sum()
    else:
        raise ValueError(f"unknown recombination kind {kind!r}")
    return _finish(n, kind, r)
