"""Domain types for two-sided matching markets with count constraints.

Students and colleges are dense integer indices; display names are
metadata.  A contract is a (student, college) pair.  Preferences are strict
orders: a student's list holds the colleges she finds acceptable, best
first (being unmatched ranks just below the last entry); a college's list
holds students, best first, and every listed contract is acceptable for the
college by construction.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .constraints import And, Constraint, LinearCap, regional_cap

Contract = Tuple[int, int]
Matching = FrozenSet[Contract]


class MarketError(ValueError):
    """Invalid market construction input."""


@dataclass(frozen=True)
class Market:
    n: int
    m: int
    student_prefs: tuple      # per student: tuple of college indices, best first
    college_prefs: tuple      # per college: tuple of student indices, best first
    weights: dict             # contract -> unique positive weight
    student_names: tuple = ()
    college_names: tuple = ()

    @property
    def contracts(self) -> FrozenSet[Contract]:
        return frozenset((s, c) for s in range(self.n)
                         for c in self.student_prefs[s])

    def contracts_of_student(self, s: int) -> List[Contract]:
        return [(s, c) for c in self.student_prefs[s]]

    def rank(self, s: int, c: int) -> int:
        """Position of college c in s's list (0 = best)."""
        return self.student_prefs[s].index(c)

    def college_rank(self, c: int, s: int) -> int:
        return self.college_prefs[c].index(s)

    def name_of_student(self, s: int) -> str:
        return self.student_names[s] if self.student_names else f"s{s + 1}"

    def name_of_college(self, c: int) -> str:
        return self.college_names[c] if self.college_names else f"c{c + 1}"


def default_weights(n: int, m: int, college_prefs: Sequence[Sequence[int]]) -> dict:
    """Deterministic weight table respecting every college's preference.

    Contracts are ranked in layers: first every college's top contract (in
    college order), then every second contract, and so on.  Weight is
    n*m minus the global rank, so all weights are positive and unique.
    """
    weights = {}
    rank = 0
    depth = max((len(p) for p in college_prefs), default=0)
    for k in range(depth):
        for c, prefs in enumerate(college_prefs):
            if k < len(prefs):
                weights[(prefs[k], c)] = n * m - rank
                rank += 1
    return weights


def make_market(student_prefs: Sequence[Sequence[int]],
                college_prefs: Sequence[Sequence[int]],
                weights: Optional[dict] = None,
                student_names: Sequence[str] = (),
                college_names: Sequence[str] = (),
                m: Optional[int] = None) -> Market:
    """Validate and build a market.

    Raises MarketError on duplicate preference entries, contracts missing
    from either side, or weights that break a college's order.
    """
    n = len(student_prefs)
    if m is None:
        m = len(college_prefs)
    if len(college_prefs) != m:
        raise MarketError("college preference profile has wrong length")

    student_prefs = tuple(tuple(p) for p in student_prefs)
    college_prefs = tuple(tuple(p) for p in college_prefs)

    for s, prefs in enumerate(student_prefs):
        if len(set(prefs)) != len(prefs):
            raise MarketError(f"student {s} has a repeated college")
        if any(c < 0 or c >= m for c in prefs):
            raise MarketError(f"student {s} ranks an unknown college")
    for c, prefs in enumerate(college_prefs):
        if len(set(prefs)) != len(prefs):
            raise MarketError(f"college {c} has a repeated student")
        if any(s < 0 or s >= n for s in prefs):
            raise MarketError(f"college {c} ranks an unknown student")

    # every contract must appear on both sides
    from_students = {(s, c) for s, prefs in enumerate(student_prefs) for c in prefs}
    from_colleges = {(s, c) for c, prefs in enumerate(college_prefs) for s in prefs}
    if from_students != from_colleges:
        diff = from_students.symmetric_difference(from_colleges)
        raise MarketError(f"one-sided contracts: {sorted(diff)[:5]}")

    if weights is None:
        weights = default_weights(n, m, college_prefs)
    else:
        weights = dict(weights)
        if set(weights) != from_students:
            raise MarketError("weights must cover exactly the contract set")
        if any(w <= 0 for w in weights.values()):
            raise MarketError("weights must be strictly positive")
        if len(set(weights.values())) != len(weights):
            raise MarketError("weights must be unique")
        for c, prefs in enumerate(college_prefs):
            for a, b in zip(prefs, prefs[1:]):
                if weights[(a, c)] <= weights[(b, c)]:
                    raise MarketError(
                        f"weights disagree with college {c}'s preference")

    return Market(n, m, student_prefs, college_prefs, weights,
                  tuple(student_names), tuple(college_names))


def nu_of(Y, m: int) -> Tuple[int, ...]:
    """Per-college assignment counts of a contract set."""
    counts = [0] * m
    for _, c in Y:
        if c < 0 or c >= m:
            raise MarketError(f"college index {c} out of range")
        counts[c] += 1
    return tuple(counts)


def prefers(market: Market, s: int, a: Optional[Contract],
            b: Optional[Contract]) -> bool:
    """True iff s strictly prefers a to b; None means being unmatched."""
    def key(x):
        if x is None:
            return len(market.student_prefs[s])
        if x[0] != s:
            raise MarketError(f"contract {x} does not belong to student {s}")
        if x[1] not in market.student_prefs[s]:
            raise MarketError(f"contract {x} not in student {s}'s domain")
        return market.student_prefs[s].index(x[1])
    return key(a) < key(b)


def matched_college(Y, s: int) -> Optional[int]:
    for (si, c) in Y:
        if si == s:
            return c
    return None


def is_matching(market: Market, Y) -> bool:
    """At most one contract per student, all acceptable."""
    seen = set()
    for (s, c) in Y:
        if s in seen:
            return False
        seen.add(s)
        if c not in market.student_prefs[s]:
            return False
    return True


def replace_student_prefs(market: Market, s: int,
                          new_prefs: Sequence[int]) -> Market:
    """Market where student s reports ``new_prefs`` (a strict order over a
    subset of her original acceptable colleges).  Dropped contracts are
    pruned from college preferences; remaining weights are kept.
    """
    old = set(market.student_prefs[s])
    if not set(new_prefs) <= old:
        raise MarketError("misreport may only rank originally acceptable colleges")
    sp = list(market.student_prefs)
    sp[s] = tuple(new_prefs)
    dropped = old - set(new_prefs)
    cp = [tuple(x for x in prefs if not (x == s and c in dropped))
          for c, prefs in enumerate(market.college_prefs)]
    weights = {(si, c): w for (si, c), w in market.weights.items()
               if not (si == s and c in dropped)}
    return make_market(sp, cp, weights, market.student_names,
                       market.college_names, m=market.m)


def restrict_students(market: Market, students: Sequence[int]) -> Market:
    """Sub-market containing only the given students (indices unchanged).

    Excluded students keep empty preference lists so contract tuples stay
    comparable across the restriction.
    """
    keep = set(students)
    sp = [prefs if s in keep else () for s, prefs in enumerate(market.student_prefs)]
    cp = [tuple(s for s in prefs if s in keep) for prefs in market.college_prefs]
    weights = {(s, c): w for (s, c), w in market.weights.items() if s in keep}
    return Market(market.n, market.m, tuple(sp), tuple(cp), weights,
                  market.student_names, market.college_names)


def example1_market():
    """The six-student, six-college worked market used throughout.

    Two regions {c1,c2,c3} and {c4,c5,c6} capped at 3 each, plus a cap of 4
    over the non-rural colleges {c1,c2,c4,c5}.  All students share the order
    c1 > c2 > c4 > c5 > c3 > c6; all colleges share s6 > s5 > ... > s1.

    Returns (market, spec, master_list).
    """
    n = m = 6
    pref = (0, 1, 3, 4, 2, 5)
    student_prefs = [pref] * n
    college_pref = tuple(range(n - 1, -1, -1))   # s6 best ... s1 worst
    college_prefs = [college_pref] * m
    market = make_market(student_prefs, college_prefs,
                         student_names=[f"s{i+1}" for i in range(n)],
                         college_names=[f"c{i+1}" for i in range(m)])
    spec = And(regional_cap((0, 1, 2), 3, label="r1"),
               regional_cap((3, 4, 5), 3, label="r2"),
               LinearCap((0, 1, 3, 4), 4, label="non-rural"))
    master_list = tuple(range(n))
    return market, spec, master_list
