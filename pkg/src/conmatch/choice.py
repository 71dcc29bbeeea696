"""Student-side and college-side choice functions.

The college-side choice maximizes total contract weight over feasible
subsets.  Under hereditary M-natural-convex constraints the descending
weight greedy attains the maximum; a brute-force argmax over all subsets
serves as the test oracle.
"""
from __future__ import annotations

from typing import Iterable, Optional, Set, Tuple

from .constraints import Constraint, certify_mnatural, checker_for
from .market import Contract, Market


class ChoiceError(ValueError):
    pass


def ch_student(market: Market, s: int, pool) -> Set[Contract]:
    """Most preferred contract of s in the pool, as a set of size <= 1."""
    best = None
    best_rank = None
    prefs = market.student_prefs[s]
    for (si, c) in pool:
        if si != s or c not in prefs:
            continue
        r = prefs.index(c)
        if best_rank is None or r < best_rank:
            best, best_rank = (si, c), r
    return {best} if best is not None else set()


def ch_students(market: Market, pool) -> Set[Contract]:
    by_student = {}
    for (s, c) in pool:
        by_student.setdefault(s, []).append((s, c))
    out = set()
    for s, contracts in by_student.items():
        out |= ch_student(market, s, contracts)
    return out


def ch_colleges_greedy(pool, weights: dict, spec: Constraint, m: int,
                       checker=None) -> Set[Contract]:
    """Descending-weight greedy selection subject to feasibility.

    A contract whose addition is infeasible is skipped and the scan
    continues (matroid greedy).  Optimal whenever the constraints are
    hereditary and M-natural-convex; use certify_mnatural or brute-force
    checks to establish that, the greedy itself does not.
    """
    chk = checker_for(spec, m) if checker is None else checker
    chk.reset()
    chosen = set()
    for x in sorted(pool, key=weights.__getitem__, reverse=True):
        c = x[1]
        if chk.can_add(c):
            chk.add(c)
            chosen.add(x)
    return chosen


def ch_colleges_bruteforce(pool, weights: dict, spec: Constraint, m: int,
                           cap: int = 16) -> Set[Contract]:
    """Exact argmax of total weight over feasible subsets of the pool.

    Test oracle only; enumerates feasible subsets by depth-first search
    with heredity pruning disabled (arbitrary specs allowed).
    """
    pool = list(pool)
    if len(pool) > cap:
        raise ChoiceError(f"pool of {len(pool)} exceeds brute-force cap {cap}")
    from .market import nu_of
    best_w = 0
    best: Tuple[Contract, ...] = ()
    for mask in range(1 << len(pool)):
        subset = [pool[i] for i in range(len(pool)) if mask >> i & 1]
        if not spec.evaluate(nu_of(subset, m)):
            continue
        w = sum(weights[x] for x in subset)
        if w > best_w:
            best_w = w
            best = tuple(subset)
    return set(best)


def single_rejection_step(Z, x: Contract, weights: dict, spec: Constraint,
                          m: int) -> Tuple[Set[Contract], Optional[Contract]]:
    """Choice over Z plus one new contract, assuming Z is a fixed point.

    Returns (accepted set, rejected contract or None).  Under hereditary
    M-natural-convex constraints at most one contract is rejected; more
    than one rejection signals the constraints are not convex in the
    exercised region.
    """
    accepted = ch_colleges_greedy(set(Z) | {x}, weights, spec, m)
    rejected = (set(Z) | {x}) - accepted
    if len(rejected) > 1:
        raise ChoiceError(
            f"multiple rejections {sorted(rejected)}: constraints not "
            "M-natural-convex in this region")
    return accepted, next(iter(rejected)) if rejected else None
