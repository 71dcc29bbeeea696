"""Random market generation.

Student preferences come from the Mallows distribution around a shared
center (one center per instance); college preferences are independent
uniform permutations.  Two market families mirror the experimental setup:
regions with a cross-cutting non-rural cap, and two large blocs sharing a
flexible quota.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .constraints import And, CollegeCap, Constraint, LinearCap, regional_cap
from .market import Market, default_weights, make_market
from .mechanisms import DisjunctiveCommit, LinearCapMax, flexible_quota_spec


@dataclass(frozen=True)
class MallowsParams:
    phi: float
    center: tuple          # strict order over colleges, best first
    seed: int = 0

    def __post_init__(self):
        if self.phi < 0:
            raise ValueError("spread parameter must be non-negative")
        object.__setattr__(self, "center", tuple(self.center))


def kendall_tau(a: Sequence[int], b: Sequence[int]) -> int:
    """Number of discordant pairs between two strict orders."""
    pos = {x: i for i, x in enumerate(b)}
    seq = [pos[x] for x in a]
    return sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq))
               if seq[i] > seq[j])


def mallows_probability(order: Sequence[int], params: MallowsParams) -> float:
    """Closed-form probability of one order; O(m!) normalization, tests only."""
    import itertools
    m = len(params.center)
    z = sum(math.exp(-params.phi * kendall_tau(p, params.center))
            for p in itertools.permutations(params.center))
    return math.exp(-params.phi * kendall_tau(order, params.center)) / z


def mallows_sample(params: MallowsParams,
                   rng: Optional[np.random.Generator] = None) -> Tuple[int, ...]:
    """Exact Mallows draw by repeated insertion.

    The i-th center item (0-based) is inserted at position j of the
    current ranking with probability proportional to exp(-phi * (i - j)),
    which produces exactly exp(-phi * kendall_tau) overall.
    """
    if rng is None:
        rng = np.random.default_rng(params.seed)
    return _rim_sample_batch(params.center, params.phi, 1, rng)[0]


def _rim_sample_batch(center: Sequence[int], phi: float, count: int,
                      rng: np.random.Generator) -> List[Tuple[int, ...]]:
    """Vectorized repeated-insertion sampling of many rankings at once."""
    m = len(center)
    positions = np.empty((count, m), dtype=np.int64)
    positions[:, 0] = 0
    for i in range(1, m):
        # insertion at slot j in a ranking of length i costs i - j inversions
        w = np.exp(-phi * (i - np.arange(i + 1)))
        cdf = np.cumsum(w)
        cdf /= cdf[-1]
        positions[:, i] = np.searchsorted(cdf, rng.random(count), side="right")
    out = []
    for k in range(count):
        ranking: List[int] = []
        row = positions[k]
        for i, item in enumerate(center):
            ranking.insert(row[i], item)
        out.append(tuple(ranking))
    return out


def sample_preference_profile(n: int, m: int, phi: float,
                              rng: np.random.Generator) -> Tuple[tuple, list]:
    """Shared uniformly-random center, then n Mallows draws around it."""
    center = tuple(int(x) for x in rng.permutation(m))
    prefs = _rim_sample_batch(center, phi, n, rng)
    return center, prefs


def uniform_college_prefs(n: int, m: int, rng: np.random.Generator) -> list:
    perms = np.tile(np.arange(n), (m, 1))
    perms = rng.permuted(perms, axis=1)
    return [tuple(int(x) for x in row) for row in perms]


def instance_rng(master_seed: int, instance: int) -> np.random.Generator:
    """Independent, individually reproducible per-instance stream."""
    return np.random.default_rng(
        np.random.SeedSequence(master_seed, spawn_key=(instance,)))


# ---------------------------------------------------------------------------
# market families


@dataclass(frozen=True)
class MarketConfig:
    n: int = 1000
    m: int = 100
    phi: float = 0.7
    q: int = 800              # market 1: non-rural cap; market 2: baseline bloc quota
    flex: int = 100           # market 2 only: extra seats for one bloc
    seed: int = 0
    instance: int = 0


def _build(n, m, phi, rng) -> Market:
    _, student_prefs = sample_preference_profile(n, m, phi, rng)
    college_prefs = uniform_college_prefs(n, m, rng)
    weights = default_weights(n, m, college_prefs)
    # generated profiles are complete and uniform college orders cover all
    # students, so skip the O(n*m) cross-validation of make_market
    return Market(n, m, tuple(student_prefs), tuple(college_prefs), weights)


def build_market1(config: MarketConfig
                  ) -> Tuple[Market, Constraint, LinearCapMax]:
    """Regions of five colleges (one rural, four non-rural), regional caps,
    and one cap over all non-rural colleges.

    Returns (market, constraints, d-selection strategy).
    """
    n, m = config.n, config.m
    if m % 5 != 0:
        raise ValueError("market 1 needs a multiple of 5 colleges")
    rng = instance_rng(config.seed, config.instance)
    market = _build(n, m, config.phi, rng)
    regions = [tuple(range(r * 5, r * 5 + 5)) for r in range(m // 5)]
    non_rural = tuple(c for reg in regions for c in reg[1:])   # first is rural
    g = And([regional_cap(reg, 50, label=f"r{i+1}")
             for i, reg in enumerate(regions)])
    h = LinearCap(non_rural, config.q, label="non-rural")
    spec = And(g, h)
    strategy = LinearCapMax(g, [h], m)
    return market, spec, strategy


def build_market2(config: MarketConfig
                  ) -> Tuple[Market, Constraint, DisjunctiveCommit]:
    """Twenty regions of ten colleges with college caps of 10 and regional
    caps of 60; the first half of the regions forms one bloc and the rest
    the other, sharing a flexible quota on top of the common baseline.

    Returns (market, constraints, d-selection strategy).
    """
    n, m = config.n, config.m
    if m % 10 != 0:
        raise ValueError("market 2 needs a multiple of 10 colleges")
    rng = instance_rng(config.seed, config.instance)
    market = _build(n, m, config.phi, rng)
    regions = [tuple(range(r * 10, r * 10 + 10)) for r in range(m // 10)]
    half = len(regions) // 2
    east = tuple(c for reg in regions[:half] for c in reg)
    west = tuple(c for reg in regions[half:] for c in reg)
    base_spec = And([CollegeCap(c, 10) for c in range(m)] +
                    [regional_cap(reg, 60, label=f"r{i+1}")
                     for i, reg in enumerate(regions)])
    spec = flexible_quota_spec(base_spec, east, west, config.q, config.flex)
    strategy = DisjunctiveCommit(base_spec, east, west, config.q, config.flex, m)
    return market, spec, strategy
