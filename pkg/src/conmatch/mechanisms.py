"""Matching mechanisms: GDA, standard DA, SD, ACDA, ADA, and MS-GDA.

All mechanisms are deterministic functions of (market, constraints,
weights, master list, d-selection strategy).  MS-GDA runs GDA stage by
stage under a size-truncated, shifted copy of the constraints; the
d-selection strategies guarantee each stage's constraints induce an
M-natural-convex set.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Set, Tuple

from .constraints import (And, CollegeCap, Constraint, LinearCap, Or,
                          Truncate, UpperBound, certify_mnatural, checker_for,
                          is_mnatural_convex, max_quota, shift, truncate,
                          EnumerationCapExceeded)
from .market import Market, Matching, nu_of


class MechanismError(RuntimeError):
    pass


class NonConvexSpecError(MechanismError):
    """GDA refused to run: constraints not certified M-natural-convex."""


class UncertifiedDError(MechanismError):
    """A d-selection strategy produced a stage size it cannot certify."""


class QuotaError(MechanismError):
    """ACDA reduced-quota vector is infeasible."""


# ---------------------------------------------------------------------------
# GDA


def _gda_core(market: Market, spec: Constraint, weights: dict,
              students: Optional[Sequence[int]] = None):
    """Student-proposing deferred acceptance with a weighted greedy
    college-side choice.  Returns (matching, offers, rounds).
    """
    m = market.m
    if students is None:
        students = range(market.n)
    chk = checker_for(spec, m)
    ptr = {s: 0 for s in students}
    total_offers = 0
    rounds = 0
    rejected_set: Set = set()
    while True:
        rounds += 1
        offers = []
        for s in ptr:
            prefs = market.student_prefs[s]
            if ptr[s] < len(prefs):
                offers.append((s, prefs[ptr[s]]))
        total_offers += len(offers)
        offers.sort(key=weights.__getitem__, reverse=True)
        chk.reset()
        accepted = []
        rejected = []
        for x in offers:
            if chk.can_add(x[1]):
                chk.add(x[1])
                accepted.append(x)
            else:
                rejected.append(x)
        if not rejected:
            return frozenset(accepted), rejected_set, total_offers, rounds
        for x in rejected:
            ptr[x[0]] += 1
            rejected_set.add(x)


def gda(market: Market, spec: Constraint, weights: Optional[dict] = None,
        students: Optional[Sequence[int]] = None,
        require_convex: bool = True) -> Matching:
    """Generalized deferred acceptance.

    Requires hereditary M-natural-convex constraints for its guarantees
    (HM-stability, student-optimality).  With require_convex the
    structural certificate must succeed; callers that certify convexity
    another way (MS-GDA stages, audits) pass require_convex=False.
    """
    if weights is None:
        weights = market.weights
    if require_convex and not certify_mnatural(spec, market.m):
        raise NonConvexSpecError(
            "constraints not structurally certified M-natural-convex; "
            "use MS-GDA, or pass require_convex=False if certified externally")
    Y, _, _, _ = _gda_core(market, spec, weights, students)
    return Y


def gda_alt(market: Market, spec: Constraint, held_out: int,
            weights: Optional[dict] = None,
            students: Optional[Sequence[int]] = None,
            require_convex: bool = True) -> Matching:
    """Sequential re-proposal description of GDA.

    Settles everyone except ``held_out`` with GDA first, then lets the
    held-out student propose; each proposal displaces at most one contract
    whose student proposes next.  Returns the same matching as ``gda`` for
    every choice of held-out student.
    """
    from .choice import single_rejection_step
    if weights is None:
        weights = market.weights
    if require_convex and not certify_mnatural(spec, market.m):
        raise NonConvexSpecError("constraints not certified M-natural-convex")
    if students is None:
        students = list(range(market.n))
    others = [s for s in students if s != held_out]
    Z, rejected, _, _ = _gda_core(market, spec, weights, others)
    Z = set(Z)
    s_hat = held_out
    while True:
        prefs = market.student_prefs[s_hat]
        offer = None
        for c in prefs:
            if (s_hat, c) not in rejected:
                offer = (s_hat, c)
                break
        if offer is None:
            return frozenset(Z)     # s_hat exhausted her list, stays unmatched
        accepted, rej = single_rejection_step(Z, offer, weights, spec, market.m)
        if rej is None:
            return frozenset(Z | {offer})
        Z = set(accepted)
        rejected.add(rej)
        s_hat = rej[0]


# ---------------------------------------------------------------------------
# DA / SD / ACDA


def da(market: Market, quotas: Sequence[int],
       students: Optional[Sequence[int]] = None) -> Matching:
    """Student-proposing deferred acceptance under individual caps only."""
    if any(q < 0 for q in quotas):
        raise QuotaError("quotas must be non-negative")
    return gda(market, UpperBound(tuple(quotas)), students=students)


def sd(market: Market, master_list: Sequence[int], spec: Constraint) -> Matching:
    """Serial dictatorship: each student takes her best college whose
    addition keeps the running counts feasible."""
    chk = checker_for(spec, market.m)
    chk.reset()
    Y = []
    for s in master_list:
        for c in market.student_prefs[s]:
            if chk.can_add(c):
                chk.add(c)
                Y.append((s, c))
                break
    return frozenset(Y)


def acda(market: Market, reduced_quotas: Sequence[int],
         spec: Constraint) -> Matching:
    """Artificial-cap DA: standard DA under reduced per-college quotas whose
    full vector is feasible (so any matching within them is feasible)."""
    if not spec.evaluate(tuple(reduced_quotas)):
        raise QuotaError(f"reduced quota vector {tuple(reduced_quotas)} "
                         "is infeasible")
    return da(market, reduced_quotas)


def uniform_feasible_quotas(spec: Constraint, m: int, bound: int) -> Tuple[int, ...]:
    """Largest uniform per-college quota whose full vector is feasible.

    Default ACDA quota generator; configurable quotas can be passed to
    acda directly.
    """
    best = 0
    for t in range(1, bound + 1):
        if not spec.evaluate((t,) * m):
            break
        best = t
    return (best,) * m


# ---------------------------------------------------------------------------
# ADA


def _da_insert(market, s: int, start: int, qk, crank, spos, held, counts,
               assigned, chk) -> None:
    """Add one student to a running capped DA state via the displacement
    chain.  Valid because the DA outcome is independent of proposal order,
    so round t's from-scratch DA equals round t-1's plus one insertion.
    """
    pos = start
    while True:
        prefs = market.student_prefs[s]
        moved = False
        while pos < len(prefs):
            c = prefs[pos]
            if counts[c] < qk[c]:
                heapq.heappush(held[c], (-crank[c][s], s))
                counts[c] += 1
                chk.add(c)
                assigned[s] = c
                return
            if qk[c] > 0:
                worst_key, worst = held[c][0]
                if -worst_key > crank[c][s]:
                    heapq.heapreplace(held[c], (-crank[c][s], s))
                    assigned[s] = c
                    del assigned[worst]
                    # seat count at c unchanged; the displaced student
                    # resumes below her lost seat
                    s, pos = worst, spos[worst][c] + 1
                    moved = True
                    break
            pos += 1
        if not moved:
            return                  # current student exhausted her list


def ada(market: Market, master_list: Sequence[int], spec: Constraint,
        quotas: Optional[Sequence[int]] = None) -> Matching:
    """Adaptive deferred acceptance.

    Rounds grow a prefix of the master list and run standard DA for the
    prefix under the stage quotas.  A college is forbidden when it is
    below its stage quota yet cannot take one more student without
    breaking feasibility; the stage's matching is then fixed, forbidden
    colleges are closed, and remaining quotas shrink by the seats used.
    """
    n, m = market.n, market.m
    if quotas is None:
        quotas = [max_quota(spec, i, m, market.n) for i in range(m)]
    if any(q < 0 for q in quotas):
        raise QuotaError("quotas must be non-negative")
    crank = [[n] * n for _ in range(m)]
    for c in range(m):
        for i, s in enumerate(market.college_prefs[c]):
            crank[c][s] = i
    spos = [[0] * m for _ in range(n)]
    for s in range(n):
        for i, c in enumerate(market.student_prefs[s]):
            spos[s][c] = i
    qk = list(quotas)
    remaining = list(master_list)
    Y: Set = set()
    chk = checker_for(spec, m)
    chk.reset()                     # tracks nu(Y) + stage counts throughout
    while remaining:
        held = [[] for _ in range(m)]
        counts = [0] * m
        assigned: dict = {}
        stage_over = False
        for t, s in enumerate(remaining, start=1):
            _da_insert(market, s, 0, qk, crank, spos, held, counts,
                       assigned, chk)
            if t == len(remaining):
                return frozenset(Y | set((x, c) for x, c in assigned.items()))
            forbidden = [i for i in range(m)
                         if counts[i] < qk[i] and not chk.can_add(i)]
            if forbidden:
                Y |= set((x, c) for x, c in assigned.items())
                remaining = remaining[t:]
                closed = set(forbidden)
                for i in range(m):
                    qk[i] = 0 if i in closed else qk[i] - counts[i]
                stage_over = True
                break
        if not stage_over:          # pragma: no cover - loop returns above
            return frozenset(Y)
    return frozenset(Y)


# ---------------------------------------------------------------------------
# MS-GDA


@dataclass
class StageDecision:
    d: int
    commit_spec: Optional[Constraint] = None


@dataclass
class StageRecord:
    stage: int
    d: int
    students: tuple
    matching: frozenset
    base_before: tuple
    spec_note: str = ""


@dataclass
class MechanismTrace:
    stages: List[StageRecord] = field(default_factory=list)
    total_offers: int = 0       # offers summed over rounds (held ones recur)
    total_proposals: int = 0    # distinct (student, college) proposals
    total_rounds: int = 0


class DSelectionStrategy:
    """Picks each stage's batch size d so the size-truncated, shifted
    constraints induce an M-natural-convex set."""

    def reset(self) -> None:
        pass

    def choose(self, base: Sequence[int], remaining: int) -> StageDecision:
        raise NotImplementedError


class AlwaysOne(DSelectionStrategy):
    """d = 1 every stage; always valid, reduces MS-GDA to SD."""

    def choose(self, base, remaining):
        return StageDecision(1)


class Fixed(DSelectionStrategy):
    """A constant d, certified by brute force each stage (desk scale only)."""

    def __init__(self, d: int, spec: Constraint, m: int, enum_cap: int = 200_000):
        if d < 1:
            raise UncertifiedDError("d must be at least 1")
        self.d = d
        self.spec = spec
        self.m = m
        self.enum_cap = enum_cap

    def choose(self, base, remaining):
        d = min(self.d, remaining)
        if d > 1:
            stage_spec = truncate(shift(self.spec, base), d)
            try:
                res = is_mnatural_convex(stage_spec, (d,) * self.m,
                                         enum_cap=self.enum_cap)
            except EnumerationCapExceeded as e:
                raise UncertifiedDError(f"cannot certify d={d}: {e}") from e
            if not res:
                raise UncertifiedDError(
                    f"truncation at d={d} is not M-natural-convex, "
                    f"witness {res.witness}")
        return StageDecision(d)


class LinearCapMax(DSelectionStrategy):
    """Largest d below the residual slack of every binding extra cap.

    The constraints split into a laminar (hence M-natural-convex) part and
    extra linear caps.  Within a ball of size d no extra cap with slack
    >= d can be violated, so the truncated stage constraints are convex.
    A cap whose member colleges are all individually closed is vacuous and
    ignored; a tight non-vacuous cap forces d = 1.
    """

    def __init__(self, convex_part: Constraint, extra_caps: Sequence[LinearCap],
                 m: int):
        if not certify_mnatural(convex_part, m):
            raise UncertifiedDError(
                "base constraints are not structurally laminar")
        self.convex_part = convex_part
        self.extra_caps = list(extra_caps)
        self.m = m
        self.full_spec = And([convex_part] + list(extra_caps))

    def choose(self, base, remaining):
        f_k = shift(self.full_spec, base)
        slack = None
        for cap in self.extra_caps:
            used = sum(base[i] for i in cap.colleges)
            s = cap.limit - used
            if s >= remaining:
                continue
            probe = [0] * self.m
            vacuous = True
            for i in cap.colleges:
                probe[i] = 1
                if f_k.evaluate(probe):
                    vacuous = False
                probe[i] = 0
                if not vacuous:
                    break
            if vacuous:
                continue
            slack = s if slack is None else min(slack, s)
        if slack is None:
            return StageDecision(remaining)
        if slack < 1:
            return StageDecision(1)
        return StageDecision(min(slack, remaining))


class DisjunctiveCommit(DSelectionStrategy):
    """d-selection for flexible quotas: two cap groups share one slack pool.

    Both groups are capped at the baseline, except one group (either) may
    exceed it by the flexible amount.  While both groups are within the
    baseline, d keeps the next batch inside the strict caps; once a group
    exceeds the baseline the strategy commits to the branch granting that
    group the flexible amount and assigns everyone remaining.
    """

    def __init__(self, base_spec: Constraint, group_a: Sequence[int],
                 group_b: Sequence[int], baseline: int, flex: int, m: int):
        self.base_spec = base_spec
        self.group_a = tuple(group_a)
        self.group_b = tuple(group_b)
        self.baseline = baseline
        self.flex = flex
        self.m = m
        self.committed: Optional[Constraint] = None
        if not certify_mnatural(
                And(base_spec, LinearCap(self.group_a, baseline),
                    LinearCap(self.group_b, baseline)), m):
            raise UncertifiedDError("strict branch is not structurally laminar")

    def reset(self):
        self.committed = None

    def full_spec(self) -> Constraint:
        return flexible_quota_spec(self.base_spec, self.group_a, self.group_b,
                                   self.baseline, self.flex)

    def choose(self, base, remaining):
        if self.committed is not None:
            return StageDecision(remaining)
        used_a = sum(base[i] for i in self.group_a)
        used_b = sum(base[i] for i in self.group_b)
        over_a = used_a > self.baseline
        over_b = used_b > self.baseline
        if over_a and over_b:
            raise MechanismError("both branches exceed the baseline; "
                                 "constraints were violated earlier")
        if over_a or over_b:
            relaxed, strict = ((self.group_a, self.group_b) if over_a
                               else (self.group_b, self.group_a))
            self.committed = And(self.base_spec,
                                 LinearCap(relaxed, self.baseline + self.flex),
                                 LinearCap(strict, self.baseline))
            return StageDecision(remaining, commit_spec=self.committed)
        d_star = min(self.baseline - used_a, self.baseline - used_b)
        if d_star < 1:
            return StageDecision(1)
        return StageDecision(min(d_star, remaining))


def flexible_quota_spec(base_spec: Constraint, group_a: Sequence[int],
                        group_b: Sequence[int], baseline: int,
                        flex: int) -> Constraint:
    """Constraints where one of two groups may exceed the common baseline
    by the flexible amount."""
    a, b = tuple(group_a), tuple(group_b)
    return And(base_spec,
               Or(And(LinearCap(a, baseline + flex), LinearCap(b, baseline)),
                  And(LinearCap(a, baseline), LinearCap(b, baseline + flex))))


def _flatten_and(spec: Constraint):
    if isinstance(spec, And):
        out = []
        for p in spec.parts:
            out.extend(_flatten_and(p))
        return out
    return [spec]


def default_strategy_for(spec: Constraint, m: int) -> DSelectionStrategy:
    """Pick a d-selection strategy from the shape of the constraint tree.

    Conjunctions of caps split into a maximal laminar part plus leftover
    linear caps; a single two-branch disjunction of cap conjunctions is
    matched against the flexible-quota pattern.  Anything else falls back
    to single-student stages.
    """
    parts = _flatten_and(spec)
    ors = [p for p in parts if isinstance(p, Or)]
    caps = [p for p in parts if isinstance(p, (CollegeCap, LinearCap, UpperBound))]
    if len(ors) + len(caps) != len(parts):
        return AlwaysOne()

    if not ors:
        # greedy laminar split: caps compatible with the family so far go to
        # the convex part, the rest become the extra caps
        fam: list = []
        g_parts: list = []
        h_caps: list = []
        for cap in caps:
            if isinstance(cap, UpperBound):
                sets = [frozenset([i]) for i in range(m)]
            elif isinstance(cap, CollegeCap):
                sets = [frozenset([cap.college])]
            else:
                sets = [frozenset(cap.colleges)]
            compatible = all(a & b == frozenset() or a <= b or b <= a
                             for a in sets for b in fam)
            if compatible:
                fam.extend(sets)
                g_parts.append(cap)
            elif isinstance(cap, LinearCap):
                h_caps.append(cap)
            else:
                return AlwaysOne()
        return LinearCapMax(And(g_parts) if g_parts else And([]), h_caps, m)

    if len(ors) == 1 and len(ors[0].parts) == 2:
        base = And(caps) if caps else And([])
        b1 = [p for p in _flatten_and(ors[0].parts[0])
              if isinstance(p, LinearCap)]
        b2 = [p for p in _flatten_and(ors[0].parts[1])
              if isinstance(p, LinearCap)]
        if len(b1) == 2 and len(b2) == 2:
            by_set1 = {frozenset(c.colleges): c.limit for c in b1}
            by_set2 = {frozenset(c.colleges): c.limit for c in b2}
            if set(by_set1) == set(by_set2) and len(by_set1) == 2:
                sa, sb = sorted(by_set1, key=sorted)
                q1a, q1b = by_set1[sa], by_set1[sb]
                q2a, q2b = by_set2[sa], by_set2[sb]
                if q1a > q2a and q1b < q2b and q1a - q2a == q2b - q1b \
                        and q1b == q2a:
                    try:
                        return DisjunctiveCommit(base, tuple(sorted(sa)),
                                                 tuple(sorted(sb)),
                                                 baseline=q1b,
                                                 flex=q1a - q2a, m=m)
                    except UncertifiedDError:
                        return AlwaysOne()
    return AlwaysOne()


def msgda(market: Market, master_list: Sequence[int], spec: Constraint,
          strategy: DSelectionStrategy,
          weights: Optional[dict] = None) -> Tuple[Matching, MechanismTrace]:
    """Multi-stage GDA.

    Each stage takes the top d students from the master list, matches them
    with GDA under the current constraints truncated to size d, then
    shifts the constraints by the seats used.
    """
    if weights is None:
        weights = market.weights
    m = market.m
    strategy.reset()
    base = [0] * m
    remaining = list(master_list)
    Y: Set = set()
    trace = MechanismTrace()
    stage = 0
    current_spec = spec
    while remaining:
        stage += 1
        decision = strategy.choose(tuple(base), len(remaining))
        if decision.d < 1:
            raise UncertifiedDError(f"strategy returned d={decision.d}")
        if decision.commit_spec is not None:
            current_spec = decision.commit_spec
        d = min(decision.d, len(remaining))
        batch = remaining[:d]
        remaining = remaining[d:]
        stage_spec = truncate(shift(current_spec, base), d)
        Yk, rejected, offers, rounds = _gda_core(market, stage_spec, weights,
                                                 batch)
        trace.stages.append(StageRecord(
            stage, d, tuple(batch), Yk, tuple(base),
            spec_note="committed" if decision.commit_spec is not None else ""))
        trace.total_offers += offers
        trace.total_proposals += len(rejected) + len(Yk)
        trace.total_rounds += rounds
        Y |= set(Yk)
        for (_, c) in Yk:
            base[c] += 1
    return frozenset(Y), trace
