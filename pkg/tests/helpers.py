"""Shared generators and independent oracles for the test suite.

Oracles here deliberately avoid the library's own algorithms: the chain
enumerator walks every simple chain explicitly, and the comonotone
generator builds monotone structure by construction rather than by
checking it.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from monosplit.core import GammaSet, PairwiseCost, Vec, as_vec

COARSE_GRID = (-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0)


def make_comonotone_gamma(rng: np.random.Generator, n_marginals: int = 3,
                          size: int = 4) -> GammaSet:
    """1-D set whose coordinates move together: x_i^(k) nondecreasing in k
    for every marginal, hence all pair projections are monotone."""
    rows = []
    current = rng.uniform(-2.0, 0.0, size=n_marginals)
    for _ in range(size):
        rows.append([float(v) for v in current])
        current = current + rng.uniform(0.0, 1.0, size=n_marginals)
    return GammaSet.from_points(rows)


def make_random_gamma(rng: np.random.Generator, n_marginals: int = 3,
                      size: int = 4) -> GammaSet:
    """1-D set with coordinates drawn from a coarse grid (ties are likely,
    which exercises the multiset and dedup paths)."""
    rows = [
        [float(rng.choice(COARSE_GRID)) for _ in range(n_marginals)]
        for _ in range(size)
    ]
    return GammaSet.from_points(rows)


def make_random_pairs(rng: np.random.Generator, m: int = 4,
                      monotone: bool = False) -> list[tuple[Vec, Vec]]:
    """Scalar (x, y) pairs; monotone=True sorts both coordinates so the
    relation is comonotone."""
    xs = [float(rng.choice(COARSE_GRID)) for _ in range(m)]
    ys = [float(rng.choice(COARSE_GRID)) for _ in range(m)]
    if monotone:
        xs.sort()
        ys.sort()
    return [(as_vec(x), as_vec(y)) for x, y in zip(xs, ys)]


def chain_enumeration_oracle(cost: PairwiseCost, pairs: list[tuple[Vec, Vec]],
                             base: Vec, x: Vec) -> float:
    """R(x) by brute enumeration of every simple chain from the base.

    Chains are ordered tuples of distinct pair indices whose first pair has
    first coordinate equal to the base; the value telescopes the gains and
    ends with the step to x.  With no positive cycles, restricting to simple
    chains loses nothing, so this equals the chain supremum.
    """
    m = len(pairs)
    sources = [k for k in range(m) if pairs[k][0] == base]
    if x == base:
        return 0.0
    best = -math.inf
    for k in range(1, m + 1):
        for chain in itertools.permutations(range(m), k):
            if chain[0] not in sources:
                continue
            total = 0.0
            for a, b in zip(chain, chain[1:]):
                total += cost.value(pairs[b][0], pairs[a][1]) - cost.value(
                    pairs[a][0], pairs[a][1]
                )
            last = chain[-1]
            total += cost.value(x, pairs[last][1]) - cost.value(
                pairs[last][0], pairs[last][1]
            )
            best = max(best, total)
    return best


def bruteforce_cycle_gain(cost: PairwiseCost, pairs: list[tuple[Vec, Vec]]) -> float:
    """Largest gain over all cycles through distinct pairs (>= 2 long);
    positive means the relation is not cyclically monotone."""
    m = len(pairs)
    best = -math.inf
    for k in range(2, m + 1):
        for cyc in itertools.permutations(range(m), k):
            if cyc[0] != min(cyc):
                continue
            total = 0.0
            loop = cyc + (cyc[0],)
            for a, b in zip(loop, loop[1:]):
                total += cost.value(pairs[b][0], pairs[a][1]) - cost.value(
                    pairs[a][0], pairs[a][1]
                )
            best = max(best, total)
    return best
