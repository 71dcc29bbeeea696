"""Shared generators and independent oracles for the test suite.

Everything here is deliberately naive: exhaustive enumeration, from
scratch re-computation, closed forms.  The library is tested against
these, never against itself.
"""
import itertools
import random

from conmatch import (And, LinearCap, hm_stable, make_market,
                      matched_college, nu_of, prefers)
from conmatch.mechanisms import da


def rand_market(rng: random.Random, n_max: int = 5, m_max: int = 4,
                complete: bool = False):
    """Random small market; student lists are random ordered subsets."""
    n = rng.randint(1, n_max)
    m = rng.randint(1, m_max)
    student_prefs = []
    for _ in range(n):
        if complete:
            cols = list(range(m))
        else:
            cols = rng.sample(range(m), rng.randint(0, m))
        rng.shuffle(cols)
        student_prefs.append(tuple(cols))
    college_prefs = []
    for c in range(m):
        studs = [s for s in range(n) if c in student_prefs[s]]
        rng.shuffle(studs)
        college_prefs.append(tuple(studs))
    return make_market(student_prefs, college_prefs)


def rand_laminar_spec(rng: random.Random, m: int):
    """Caps over a random laminar family: hereditary and M-natural-convex."""
    caps = []

    def rec(cols):
        if rng.random() < 0.7:
            caps.append(LinearCap(tuple(cols), rng.randint(0, 2 * len(cols))))
        if len(cols) > 1 and rng.random() < 0.8:
            k = rng.randint(1, len(cols) - 1)
            rec(cols[:k])
            rec(cols[k:])

    rec(list(range(m)))
    if not caps:
        caps.append(LinearCap(tuple(range(m)), rng.randint(1, m + 2)))
    return And(caps)


def rand_cap_spec(rng: random.Random, m: int, k_max: int = 3):
    """Caps over arbitrary random subsets: hereditary, convexity unknown."""
    caps = []
    for _ in range(rng.randint(1, k_max)):
        size = rng.randint(1, m)
        cols = tuple(sorted(rng.sample(range(m), size)))
        caps.append(LinearCap(cols, rng.randint(0, 2 * size)))
    return And(caps)


def rand_pool(rng: random.Random, size: int, m: int):
    """Random contract pool with unique random weights."""
    pool = set()
    while len(pool) < size:
        pool.add((rng.randrange(50), rng.randrange(m)))
    weights = dict(zip(pool, rng.sample(range(1, 10 * size + 1), len(pool))))
    return pool, weights


def all_matchings(market):
    """Every assignment of each student to an acceptable college or nothing."""
    options = [[None] + [(s, c) for c in market.student_prefs[s]]
               for s in range(market.n)]
    for combo in itertools.product(*options):
        yield frozenset(x for x in combo if x is not None)


def weakly_prefers_everywhere(market, Y_star, Y) -> bool:
    """Every student weakly prefers her seat in Y_star to her seat in Y."""
    for s in range(market.n):
        a = matched_college(Y_star, s)
        b = matched_college(Y, s)
        if a == b:
            continue
        xa = (s, a) if a is not None else None
        xb = (s, b) if b is not None else None
        if not prefers(market, s, xa, xb):
            return False
    return True


def stable_matchings(market, spec):
    out = []
    for Y in all_matchings(market):
        if not spec.evaluate(nu_of(Y, market.m)):
            continue
        if hm_stable(market, Y, market.weights, spec)[0]:
            out.append(Y)
    return out


def student_optimal_stable(market, spec):
    """The stable matching every student weakly prefers, or None."""
    stable = stable_matchings(market, spec)
    for Y_star in stable:
        if all(weakly_prefers_everywhere(market, Y_star, Y) for Y in stable):
            return Y_star
    return None


def ada_reference(market, master_list, spec, quotas):
    """Literal round-by-round adaptive DA re-running standard DA from
    scratch each round; oracle for the incremental implementation."""
    m = market.m
    qk = list(quotas)
    remaining = list(master_list)
    Y = set()
    nu_fixed = [0] * m
    while remaining:
        for t in range(1, len(remaining) + 1):
            Yp = da(market, qk, students=remaining[:t])
            counts = nu_of(Yp, m)
            if t == len(remaining):
                return frozenset(Y | set(Yp))
            total = [a + b for a, b in zip(nu_fixed, counts)]
            forbidden = []
            for i in range(m):
                if counts[i] < qk[i]:
                    total[i] += 1
                    if not spec.evaluate(total):
                        forbidden.append(i)
                    total[i] -= 1
            if forbidden:
                Y |= set(Yp)
                nu_fixed = total
                remaining = remaining[t:]
                for i in range(m):
                    qk[i] = 0 if i in forbidden else qk[i] - counts[i]
                break
    return frozenset(Y)
