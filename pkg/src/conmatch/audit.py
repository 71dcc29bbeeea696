"""Executable axioms: wastefulness, envy, stability, Pareto-frontier and
strategyproofness checks, plus the Borda/envy-ratio experiment metrics.

Auditors are mechanism-agnostic: they look only at (market, matching,
constraints), never at traces.  The exhaustive checks (Pareto frontier,
strategyproofness) are for desk-scale instances; the ratio metrics scale
to the experiment markets.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Set, Tuple

import numpy as np

from .choice import ch_colleges_greedy
from .constraints import Constraint
from .market import Contract, Market, matched_college, nu_of, prefers


class AuditError(RuntimeError):
    pass


def _assignment(market: Market, Y) -> Dict[int, int]:
    out = {}
    for (s, c) in Y:
        if s in out:
            raise AuditError(f"student {s} holds two contracts")
        out[s] = c
    return out


def claims_empty_seat(market: Market, Y, spec: Constraint) -> List[Tuple[int, int]]:
    """Students who could move to a strictly better college feasibly.

    (s, c) is listed when s prefers c to her assignment and swapping her
    current seat for one at c keeps the counts feasible.  Empty list means
    the matching is nonwasteful.
    """
    assigned = _assignment(market, Y)
    claims = []
    for s in range(market.n):
        cur = assigned.get(s)
        prefs = market.student_prefs[s]
        better = prefs if cur is None else prefs[:prefs.index(cur)]
        for c in better:
            moved = [x for x in Y if x[0] != s] + [(s, c)]
            if spec.evaluate(nu_of(moved, market.m)):
                claims.append((s, c))
    return claims


def strongly_claims(market: Market, Y, spec: Constraint) -> List[Tuple[int, int]]:
    """Like claims_empty_seat but the student is added on top of Y.

    Empty list means the matching is weakly nonwasteful.
    """
    assigned = _assignment(market, Y)
    claims = []
    counts = list(nu_of(Y, market.m))
    for s in range(market.n):
        cur = assigned.get(s)
        prefs = market.student_prefs[s]
        better = prefs if cur is None else prefs[:prefs.index(cur)]
        for c in better:
            counts[c] += 1
            if spec.evaluate(counts):
                claims.append((s, c))
            counts[c] -= 1
    return claims


def justified_envy(market: Market, Y) -> Set[Tuple[int, int, int]]:
    """Triples (s, s', c): s prefers c to her seat, s' sits at c, and c
    ranks s above s'.  Empty set means the matching is fair."""
    assigned = _assignment(market, Y)
    out = set()
    for (sp, c) in Y:
        rank_sp = market.college_rank(c, sp)
        for s in range(market.n):
            if s == sp or c not in market.student_prefs[s]:
                continue
            cur = assigned.get(s)
            if cur is not None and market.rank(s, c) >= market.rank(s, cur):
                continue
            if market.college_rank(c, s) < rank_sp:
                out.add((s, sp, c))
    return out


def generalized_envy(market: Market, Y, weights: dict,
                     spec: Constraint) -> Set[Tuple[int, int]]:
    """Pairs (s, s') where s could feasibly take a better seat in exchange
    for s' losing hers, with a heavier contract.  s = s' is allowed."""
    assigned = _assignment(market, Y)
    out = set()
    Y = set(Y)
    for s in range(market.n):
        cur = assigned.get(s)
        prefs = market.student_prefs[s]
        better = prefs if cur is None else prefs[:prefs.index(cur)]
        for c in better:
            x = (s, c)
            if x in Y:
                continue
            for (sp, cp) in Y:
                if weights[x] <= weights[(sp, cp)]:
                    continue
                swapped = (Y - {(sp, cp)}) | {x}
                if spec.evaluate(nu_of(swapped, market.m)):
                    out.add((s, sp))
    return out


def ml_fair(market: Market, Y, master_list: Sequence[int]
            ) -> List[Tuple[int, int, int]]:
    """Envy triples where the envier is ranked above the envied in the
    master list; empty means ML-fair."""
    pos = {s: i for i, s in enumerate(master_list)}
    return [t for t in justified_envy(market, Y) if pos[t[0]] < pos[t[1]]]


def hm_stable(market: Market, Y, weights: dict, spec: Constraint
              ) -> Tuple[bool, Optional[Contract]]:
    """Fixed-point plus no-blocking-contract check.

    Returns (stable, witness): the witness is a contract the colleges
    would take and its student prefers, or a contract of Y dropped by the
    college-side choice.
    """
    Y = set(Y)
    assigned = _assignment(market, Y)
    chosen = ch_colleges_greedy(Y, weights, spec, market.m)
    if chosen != Y:
        missing = Y - chosen
        return False, next(iter(missing))
    for s in range(market.n):
        cur = assigned.get(s)
        prefs = market.student_prefs[s]
        better = prefs if cur is None else prefs[:prefs.index(cur)]
        for c in better:
            x = (s, c)
            if x in Y:
                continue
            if x in ch_colleges_greedy(Y | {x}, weights, spec, market.m):
                return False, x
    return True, None


def _weakly_dominating_candidates(market: Market, Y):
    """All matchings where every student is weakly better off than in Y."""
    assigned = _assignment(market, Y)
    options = []
    for s in range(market.n):
        cur = assigned.get(s)
        prefs = market.student_prefs[s]
        better = list(prefs) if cur is None else list(prefs[:prefs.index(cur) + 1])
        opts = [(s, c) for c in better]
        if cur is None:
            opts.append(None)
        options.append(opts)
    for combo in itertools.product(*options):
        yield frozenset(x for x in combo if x is not None)


def pareto_frontier_check(market: Market, Y, weights: dict, spec: Constraint,
                          cap: int = 1_000_000
                          ) -> Tuple[bool, Optional[frozenset]]:
    """True iff no feasible matching both weakly dominates Y and has a
    subset of Y's generalized-envy pairs.  Returns a dominating witness
    otherwise.  Exhaustive: desk-scale markets only."""
    count = 1
    assigned = _assignment(market, Y)
    for s in range(market.n):
        cur = assigned.get(s)
        prefs = market.student_prefs[s]
        count *= (len(prefs) + 1 if cur is None
                  else prefs.index(cur) + 2)
        if count > cap:
            raise AuditError(f"candidate space exceeds cap {cap}")
    ev_y = generalized_envy(market, Y, weights, spec)
    Y = frozenset(Y)
    for cand in _weakly_dominating_candidates(market, Y):
        if cand == Y:
            continue
        strict = any(
            (matched_college(cand, s) != matched_college(Y, s)) and
            prefers(market, s,
                    (s, matched_college(cand, s)) if matched_college(cand, s) is not None else None,
                    (s, matched_college(Y, s)) if matched_college(Y, s) is not None else None)
            for s in range(market.n))
        if not strict:
            continue
        if not spec.evaluate(nu_of(cand, market.m)):
            continue
        if generalized_envy(market, cand, weights, spec) <= ev_y:
            return False, cand
    return True, None


def all_preference_reports(colleges: Sequence[int], cap: int = 5):
    """Every strict order over every subset of the given colleges."""
    colleges = list(colleges)
    if len(colleges) > cap:
        raise AuditError(f"preference domain of {len(colleges)} exceeds cap {cap}")
    for k in range(len(colleges) + 1):
        for subset in itertools.permutations(colleges, k):
            yield subset


def strategyproofness_audit(mechanism: Callable[[Market], frozenset],
                            market: Market,
                            cap: int = 5) -> List[Tuple[int, tuple]]:
    """All (student, misreport) pairs that strictly improve her outcome.

    Enumerates every strict order over every subset of each student's true
    acceptable set.  Empty list certifies no beneficial misreport exists
    within that domain.
    """
    from .market import replace_student_prefs
    truth = mechanism(market)
    violations = []
    for s in range(market.n):
        true_prefs = market.student_prefs[s]
        if not true_prefs:
            continue
        base = matched_college(truth, s)
        for report in all_preference_reports(true_prefs, cap):
            if report == true_prefs:
                continue
            alt_market = replace_student_prefs(market, s, report)
            outcome = mechanism(alt_market)
            alt = matched_college(outcome, s)
            if alt == base:
                continue
            # compare under the TRUE preference
            if prefers(market, s,
                       (s, alt) if alt is not None else None,
                       (s, base) if base is not None else None):
                violations.append((s, report))
    return violations


# ---------------------------------------------------------------------------
# experiment metrics


def borda_scores(market: Market, Y) -> Tuple[Dict[int, int], float]:
    """Per-student Borda scores and their average.

    A student at her i-th ranked college (1-based) scores m - i + 1;
    unmatched students score 0.
    """
    assigned = _assignment(market, Y)
    scores = {}
    for s in range(market.n):
        c = assigned.get(s)
        scores[s] = 0 if c is None else market.m - market.rank(s, c)
    avg = sum(scores.values()) / market.n if market.n else 0.0
    return scores, avg


def envy_matrix(market: Market, Y) -> np.ndarray:
    """Boolean matrix E with E[s, s'] true iff s has justified envy toward
    s'.  Vectorized per college for experiment-scale markets."""
    n, m = market.n, market.m
    assigned = _assignment(market, Y)
    # rank of each college in each student's list; missing = m (worse than all)
    srank = np.full((n, m), m, dtype=np.int32)
    for s in range(n):
        for i, c in enumerate(market.student_prefs[s]):
            srank[s, c] = i
    cur_rank = np.array([m if assigned.get(s) is None
                         else srank[s, assigned[s]] for s in range(n)])
    crank = np.full((m, n), n, dtype=np.int32)
    for c in range(m):
        for i, s in enumerate(market.college_prefs[c]):
            crank[c, s] = i
    E = np.zeros((n, n), dtype=bool)
    by_college: Dict[int, List[int]] = {}
    for (s, c) in Y:
        by_college.setdefault(c, []).append(s)
    for c, holders in by_college.items():
        wants = srank[:, c] < cur_rank            # prefers c to own seat
        for sp in holders:
            enviers = wants & (crank[c] < crank[c, sp])
            enviers[sp] = False
            E[enviers, sp] = True
    return E


def envy_ratios(market: Market, Y) -> Tuple[float, float]:
    """(students without envy / n, unordered pairs without envy / C(n,2)).

    A pair counts as envious if either direction has justified envy.
    """
    n = market.n
    if n == 0:
        return 1.0, 1.0
    E = envy_matrix(market, Y)
    has_envy = E.any(axis=1)
    students_ok = 1.0 - has_envy.sum() / n
    if n < 2:
        return students_ok, 1.0
    pair_bad = np.triu(E | E.T, k=1).sum()
    pairs_ok = 1.0 - pair_bad / (n * (n - 1) / 2)
    return float(students_ok), float(pairs_ok)


# ---------------------------------------------------------------------------
# combined report


@dataclass
class AuditReport:
    feasible: bool
    claims: list
    strong_claims: list
    envy_pairs: set
    generalized_envy_pairs: set
    ml_fair_violations: list
    hm_stable: Optional[bool] = None
    hm_witness: Optional[tuple] = None

    @property
    def fair(self) -> bool:
        return not self.envy_pairs

    @property
    def nonwasteful(self) -> bool:
        return not self.claims

    @property
    def weakly_nonwasteful(self) -> bool:
        return not self.strong_claims

    @property
    def is_ml_fair(self) -> bool:
        return not self.ml_fair_violations

    def to_dict(self) -> dict:
        return {
            "feasible": self.feasible,
            "fair": self.fair,
            "nonwasteful": self.nonwasteful,
            "weakly_nonwasteful": self.weakly_nonwasteful,
            "ml_fair": self.is_ml_fair,
            "hm_stable": self.hm_stable,
            "claims": sorted(self.claims),
            "strong_claims": sorted(self.strong_claims),
            "envy": sorted(self.envy_pairs),
            "generalized_envy": sorted(self.generalized_envy_pairs),
            "ml_fair_violations": sorted(self.ml_fair_violations),
            "hm_witness": self.hm_witness,
        }


def audit(market: Market, Y, spec: Constraint,
          master_list: Optional[Sequence[int]] = None,
          weights: Optional[dict] = None,
          check_hm: bool = False) -> AuditReport:
    """Run every per-matching axiom check and collect witnesses."""
    if weights is None:
        weights = market.weights
    if master_list is None:
        master_list = list(range(market.n))
    feasible = spec.evaluate(nu_of(Y, market.m))
    envy = justified_envy(market, Y)
    report = AuditReport(
        feasible=feasible,
        claims=claims_empty_seat(market, Y, spec),
        strong_claims=strongly_claims(market, Y, spec),
        envy_pairs=envy,
        generalized_envy_pairs=generalized_envy(market, Y, weights, spec),
        ml_fair_violations=ml_fair(market, Y, master_list),
    )
    if check_hm:
        report.hm_stable, report.hm_witness = hm_stable(market, Y, weights, spec)
    return report
