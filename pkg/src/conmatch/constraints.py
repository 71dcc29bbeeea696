"""Feasibility constraints over per-college assignment-count vectors.

A constraint is a predicate on vectors of non-negative integers (one entry
per college).  Constraints are built from cap primitives combined with
conjunction and disjunction, plus shift and truncate wrappers.  Brute-force
checkers verify heredity and the M-natural exchange property on bounded
regions, and a compiler turns cap-structured trees into fast incremental
checkers used by the mechanisms.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence


class SpecError(ValueError):
    """Malformed constraint or mismatched vector dimension."""


class EnumerationCapExceeded(RuntimeError):
    """The brute-force region is too large to enumerate."""


DEFAULT_ENUM_CAP = 2_000_000


# ---------------------------------------------------------------------------
# constraint tree


class Constraint:
    """Base class; subclasses implement ``evaluate``."""

    def evaluate(self, nu: Sequence[int]) -> bool:
        raise NotImplementedError

    def __call__(self, nu: Sequence[int]) -> bool:
        return self.evaluate(nu)


@dataclass(frozen=True)
class CollegeCap(Constraint):
    college: int
    limit: int

    def __post_init__(self):
        if self.limit < 0:
            raise SpecError("cap must be non-negative")

    def evaluate(self, nu):
        if self.college >= len(nu):
            raise SpecError(f"vector too short for college {self.college}")
        return nu[self.college] <= self.limit


@dataclass(frozen=True)
class LinearCap(Constraint):
    """Sum of counts over a college set is capped.

    Regional quotas are the special case where the set is one region.
    """

    colleges: tuple
    limit: int
    label: str = ""

    def __post_init__(self):
        if not self.colleges:
            raise SpecError("college set must be non-empty")
        if self.limit < 0:
            raise SpecError("cap must be non-negative")
        object.__setattr__(self, "colleges", tuple(self.colleges))

    def evaluate(self, nu):
        if max(self.colleges) >= len(nu):
            raise SpecError("vector too short for cap member set")
        return sum(nu[i] for i in self.colleges) <= self.limit


def regional_cap(colleges: Iterable[int], limit: int, label: str = "") -> LinearCap:
    return LinearCap(tuple(colleges), limit, label=label)


@dataclass(frozen=True)
class UpperBound(Constraint):
    """Componentwise upper bound, i.e. an individual cap per college."""

    limits: tuple

    def __post_init__(self):
        if any(q < 0 for q in self.limits):
            raise SpecError("caps must be non-negative")
        object.__setattr__(self, "limits", tuple(self.limits))

    def evaluate(self, nu):
        if len(nu) != len(self.limits):
            raise SpecError("dimension mismatch")
        return all(v <= q for v, q in zip(nu, self.limits))


@dataclass(frozen=True)
class And(Constraint):
    parts: tuple

    def __init__(self, *parts):
        if len(parts) == 1 and isinstance(parts[0], (list, tuple)):
            parts = tuple(parts[0])
        object.__setattr__(self, "parts", tuple(parts))

    def evaluate(self, nu):
        return all(p.evaluate(nu) for p in self.parts)


@dataclass(frozen=True)
class Or(Constraint):
    parts: tuple

    def __init__(self, *parts):
        if len(parts) == 1 and isinstance(parts[0], (list, tuple)):
            parts = tuple(parts[0])
        if not parts:
            raise SpecError("disjunction needs at least one branch")
        object.__setattr__(self, "parts", tuple(parts))

    def evaluate(self, nu):
        return any(p.evaluate(nu) for p in self.parts)


@dataclass(frozen=True)
class Shift(Constraint):
    """Evaluates the inner constraint at ``nu + base``."""

    inner: Constraint
    base: tuple

    def __post_init__(self):
        object.__setattr__(self, "base", tuple(self.base))

    def evaluate(self, nu):
        if len(nu) != len(self.base):
            raise SpecError("dimension mismatch")
        return self.inner.evaluate(tuple(v + b for v, b in zip(nu, self.base)))


@dataclass(frozen=True)
class Truncate(Constraint):
    """Infeasible whenever the total count exceeds ``size``."""

    inner: Constraint
    size: int

    def __post_init__(self):
        if self.size < 1:
            raise SpecError("truncation size must be at least 1")

    def evaluate(self, nu):
        return sum(nu) <= self.size and self.inner.evaluate(nu)


@dataclass(frozen=True)
class BlackBox(Constraint):
    """Arbitrary user predicate; excluded from structural reasoning."""

    fn: Callable[[Sequence[int]], bool]

    def evaluate(self, nu):
        return bool(self.fn(nu))


def shift(spec: Constraint, base: Sequence[int]) -> Constraint:
    base = tuple(base)
    if isinstance(spec, Shift):
        if len(base) != len(spec.base):
            raise SpecError("dimension mismatch")
        return Shift(spec.inner, tuple(a + b for a, b in zip(spec.base, base)))
    return Shift(spec, base)


def truncate(spec: Constraint, size: int) -> Constraint:
    return Truncate(spec, size)


# ---------------------------------------------------------------------------
# brute-force checkers


@dataclass(frozen=True)
class CheckResult:
    """Verdict of a brute-force checker.

    ``ok`` is True/False for a conclusive answer and None when the
    enumeration cap was exceeded.  ``witness`` carries a counterexample on
    failure.
    """

    ok: Optional[bool]
    witness: Optional[tuple] = None

    def __bool__(self):
        return self.ok is True


def _region_size(box):
    size = 1
    for b in box:
        size *= b + 1
    return size


def _vectors(box):
    return itertools.product(*(range(b + 1) for b in box))


def is_hereditary(spec: Constraint, box: Sequence[int],
                  enum_cap: int = DEFAULT_ENUM_CAP) -> CheckResult:
    """Check downward closure of the feasible set within ``box``.

    The zero vector must be feasible and removing one student from any
    feasible vector must stay feasible.  The witness on failure is the pair
    (feasible vector, its infeasible sub-vector), or (None, zero vector)
    when the zero vector itself is infeasible.
    """
    box = tuple(box)
    if _region_size(box) > enum_cap:
        raise EnumerationCapExceeded(f"region {box} exceeds cap {enum_cap}")
    if not spec.evaluate((0,) * len(box)):
        return CheckResult(False, (None, (0,) * len(box)))
    for nu in _vectors(box):
        if not spec.evaluate(nu):
            continue
        for i, v in enumerate(nu):
            if v == 0:
                continue
            sub = nu[:i] + (v - 1,) + nu[i + 1:]
            if not spec.evaluate(sub):
                return CheckResult(False, (nu, sub))
    return CheckResult(True)


def is_mnatural_convex(spec: Constraint, box: Sequence[int],
                       enum_cap: int = DEFAULT_ENUM_CAP) -> CheckResult:
    """Exhaustively verify the exchange property within ``box``.

    For feasible nu, nu' and every i with nu_i > nu'_i there must be a
    j in {0} or with nu_j < nu'_j such that both nu - e_i + e_j and
    nu' + e_i - e_j are feasible.  The witness is a violating (nu, nu', i).
    """
    box = tuple(box)
    m = len(box)
    if _region_size(box) > enum_cap:
        raise EnumerationCapExceeded(f"region {box} exceeds cap {enum_cap}")
    feasible = {nu for nu in _vectors(box) if spec.evaluate(nu)}
    for nu in feasible:
        for nup in feasible:
            for i in range(m):
                if nu[i] <= nup[i]:
                    continue
                js = [j for j in range(m) if nu[j] < nup[j]]
                ok = False
                # j = 0 case: pure removal / pure addition.
                down = nu[:i] + (nu[i] - 1,) + nu[i + 1:]
                up = nup[:i] + (nup[i] + 1,) + nup[i + 1:]
                if down in feasible and (up in feasible if up[i] <= box[i]
                                         else spec.evaluate(up)):
                    ok = True
                if not ok:
                    for j in js:
                        a = list(nu)
                        a[i] -= 1
                        a[j] += 1
                        b = list(nup)
                        b[i] += 1
                        b[j] -= 1
                        if tuple(a) in feasible and tuple(b) in feasible:
                            ok = True
                            break
                if not ok:
                    return CheckResult(False, (nu, nup, i))
    return CheckResult(True)


def max_quota(spec: Constraint, college: int, m: int, bound: int) -> int:
    """Largest t with t students at ``college`` alone feasible.

    Valid as the per-college maximum quota for hereditary constraints.
    """
    def ok(t):
        nu = [0] * m
        nu[college] = t
        return spec.evaluate(nu)

    # feasibility along one axis is monotone for hereditary constraints
    lo, hi = 0, bound
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if ok(mid):
            lo = mid
        else:
            hi = mid - 1
    return lo


# ---------------------------------------------------------------------------
# compiled incremental checker


class CannotCompile(Exception):
    pass


@dataclass
class _Branch:
    limits: list            # cap limits
    used: list              # current usage including shift contribution
    per_college: list       # per college: list of cap indices containing it
    violated: int = 0       # number of caps currently over their limit


class CompiledSpec:
    """Disjunctive-normal-form cap checker with O(caps-per-college) adds.

    Each branch is a conjunction of caps over college subsets (a size cap
    from truncation covers all colleges).  The vector is shared across
    branches; feasibility means some branch has no cap exceeded.
    """

    def __init__(self, m: int, branches):
        self.m = m
        self._template = branches
        self.branches: list = []
        self.reset()

    def reset(self):
        self.branches = []
        for limits, init_used, per_college in self._template:
            used = list(init_used)
            violated = sum(1 for u, q in zip(used, limits) if u > q)
            self.branches.append(_Branch(list(limits), used, per_college, violated))

    def feasible_now(self) -> bool:
        return any(b.violated == 0 for b in self.branches)

    def can_add(self, college: int) -> bool:
        for b in self.branches:
            if b.violated:
                continue
            if all(b.used[k] < b.limits[k] for k in b.per_college[college]):
                return True
        return False

    def add(self, college: int) -> None:
        for b in self.branches:
            for k in b.per_college[college]:
                b.used[k] += 1
                if b.used[k] == b.limits[k] + 1:
                    b.violated += 1

    def remove(self, college: int) -> None:
        for b in self.branches:
            for k in b.per_college[college]:
                if b.used[k] == b.limits[k] + 1:
                    b.violated -= 1
                b.used[k] -= 1


def _leaf_caps(node: Constraint, m: int):
    """Caps of a primitive node as (members-or-None, limit) pairs."""
    if isinstance(node, CollegeCap):
        return [((node.college,), node.limit)]
    if isinstance(node, LinearCap):
        return [(tuple(node.colleges), node.limit)]
    if isinstance(node, UpperBound):
        if len(node.limits) != m:
            raise SpecError("dimension mismatch")
        return [((i,), q) for i, q in enumerate(node.limits)]
    raise CannotCompile(f"cannot compile {type(node).__name__}")


def _normalize_with_shift(node: Constraint, m: int, base: list):
    """DNF branches of (members-or-None, limit, initial-usage) caps.

    ``members`` of None means the cap counts every college (truncation).
    ``base`` is the accumulated shift above this node; each cap's initial
    usage is the base summed over its members.
    """
    if isinstance(node, Shift):
        if len(node.base) != m:
            raise SpecError("dimension mismatch")
        new_base = [a + b for a, b in zip(base, node.base)]
        return _normalize_with_shift(node.inner, m, new_base)
    if isinstance(node, And):
        branch_lists = [_normalize_with_shift(p, m, base) for p in node.parts]
        out = [[]]
        for bl in branch_lists:
            out = [a + b for a in out for b in bl]
        return out
    if isinstance(node, Or):
        out = []
        for p in node.parts:
            out.extend(_normalize_with_shift(p, m, base))
        return out
    if isinstance(node, Truncate):
        inner = _normalize_with_shift(node.inner, m, base)
        return [br + [(None, node.size, sum(base))] for br in inner]
    return [[(members, limit,
              sum(base) if members is None
              else sum(base[i] for i in members))
             for members, limit in _leaf_caps(node, m)]]


def compile_spec(spec: Constraint, m: int) -> CompiledSpec:
    """Compile a cap-structured tree into an incremental checker.

    Raises CannotCompile for trees containing black-box nodes.
    """
    branches = _normalize_with_shift(spec, m, [0] * m)
    template = []
    for br in branches:
        limits = [limit for _, limit, _ in br]
        init_used = [init for _, _, init in br]
        per_college = [[] for _ in range(m)]
        for k, (members, _, _) in enumerate(br):
            cols = range(m) if members is None else members
            for c in cols:
                per_college[c].append(k)
        template.append((limits, init_used, per_college))
    return CompiledSpec(m, template)


class GenericChecker:
    """Fallback incremental interface backed by full tree evaluation."""

    def __init__(self, spec: Constraint, m: int):
        self.spec = spec
        self.m = m
        self.counts = [0] * m

    def reset(self):
        self.counts = [0] * self.m

    def feasible_now(self):
        return self.spec.evaluate(self.counts)

    def can_add(self, college: int) -> bool:
        self.counts[college] += 1
        ok = self.spec.evaluate(self.counts)
        self.counts[college] -= 1
        return ok

    def add(self, college: int) -> None:
        self.counts[college] += 1

    def remove(self, college: int) -> None:
        self.counts[college] -= 1


def checker_for(spec: Constraint, m: int):
    try:
        return compile_spec(spec, m)
    except CannotCompile:
        return GenericChecker(spec, m)


# ---------------------------------------------------------------------------
# structural certification


def _cap_sets(spec: Constraint, m: int):
    """Member sets of all caps if the tree is a pure conjunction of caps."""
    if isinstance(spec, CollegeCap):
        return [frozenset([spec.college])]
    if isinstance(spec, LinearCap):
        return [frozenset(spec.colleges)]
    if isinstance(spec, UpperBound):
        return [frozenset([i]) for i in range(len(spec.limits))]
    if isinstance(spec, Truncate):
        return _cap_sets(spec.inner, m) + [frozenset(range(m))]
    if isinstance(spec, Shift):
        return _cap_sets(spec.inner, m)
    if isinstance(spec, And):
        out = []
        for p in spec.parts:
            out.extend(_cap_sets(p, m))
        return out
    raise CannotCompile(f"not a cap conjunction: {type(spec).__name__}")


def _is_laminar(sets) -> bool:
    for a, b in itertools.combinations(sets, 2):
        if a & b and not (a <= b or b <= a):
            return False
    return True


def certify_mnatural(spec: Constraint, m: int) -> bool:
    """Structural certificate: conjunctions of caps over a laminar family
    induce a hereditary M-natural-convex set.  False means "unknown", not
    "non-convex".
    """
    try:
        sets = _cap_sets(spec, m)
    except CannotCompile:
        return False
    return _is_laminar(sets)
