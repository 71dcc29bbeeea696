"""JSON serialization for markets, constraint trees, and matchings.

Market files carry {students, colleges, contracts, student_prefs,
college_prefs, weights?, master_list?, constraints}; omitted weights fall
back to the default scheme.  Constraint trees are nested nodes keyed by
"type": cap | regional | linear | bounds | and | or | shift | truncate.
"""
from __future__ import annotations

import json
from typing import Optional, Sequence, Tuple

from .constraints import (And, CollegeCap, Constraint, LinearCap, Or, Shift,
                          SpecError, Truncate, UpperBound)
from .market import Market, MarketError, make_market


def constraint_to_dict(spec: Constraint, college_names: Sequence[str]) -> dict:
    name = list(college_names)
    if isinstance(spec, CollegeCap):
        return {"type": "cap", "college": name[spec.college], "limit": spec.limit}
    if isinstance(spec, LinearCap):
        kind = "regional" if spec.label.startswith("r") else "linear"
        return {"type": kind, "colleges": [name[c] for c in spec.colleges],
                "limit": spec.limit, "label": spec.label}
    if isinstance(spec, UpperBound):
        return {"type": "bounds", "limits": list(spec.limits)}
    if isinstance(spec, And):
        return {"type": "and",
                "parts": [constraint_to_dict(p, name) for p in spec.parts]}
    if isinstance(spec, Or):
        return {"type": "or",
                "parts": [constraint_to_dict(p, name) for p in spec.parts]}
    if isinstance(spec, Shift):
        return {"type": "shift", "base": list(spec.base),
                "inner": constraint_to_dict(spec.inner, name)}
    if isinstance(spec, Truncate):
        return {"type": "truncate", "size": spec.size,
                "inner": constraint_to_dict(spec.inner, name)}
    raise SpecError(f"cannot serialize {type(spec).__name__}")


def constraint_from_dict(node: dict, college_index: dict) -> Constraint:
    kind = node["type"]
    if kind == "cap":
        return CollegeCap(college_index[node["college"]], node["limit"])
    if kind in ("regional", "linear"):
        return LinearCap(tuple(college_index[c] for c in node["colleges"]),
                         node["limit"], label=node.get("label", ""))
    if kind == "bounds":
        return UpperBound(tuple(node["limits"]))
    if kind == "and":
        return And([constraint_from_dict(p, college_index)
                    for p in node["parts"]])
    if kind == "or":
        return Or([constraint_from_dict(p, college_index)
                   for p in node["parts"]])
    if kind == "shift":
        return Shift(constraint_from_dict(node["inner"], college_index),
                     tuple(node["base"]))
    if kind == "truncate":
        return Truncate(constraint_from_dict(node["inner"], college_index),
                        node["size"])
    raise SpecError(f"unknown constraint node type {kind!r}")


def market_to_dict(market: Market, spec: Optional[Constraint] = None,
                   master_list: Optional[Sequence[int]] = None) -> dict:
    sname = [market.name_of_student(s) for s in range(market.n)]
    cname = [market.name_of_college(c) for c in range(market.m)]
    doc = {
        "students": sname,
        "colleges": cname,
        "contracts": sorted([sname[s], cname[c]] for (s, c) in market.contracts),
        "student_prefs": {sname[s]: [cname[c] for c in prefs]
                          for s, prefs in enumerate(market.student_prefs)},
        "college_prefs": {cname[c]: [sname[s] for s in prefs]
                          for c, prefs in enumerate(market.college_prefs)},
        "weights": {f"{sname[s]},{cname[c]}": w
                    for (s, c), w in market.weights.items()},
    }
    if master_list is not None:
        doc["master_list"] = [sname[s] for s in master_list]
    if spec is not None:
        doc["constraints"] = constraint_to_dict(spec, cname)
    return doc


def market_from_dict(doc: dict) -> Tuple[Market, Optional[Constraint], list]:
    """Returns (market, constraints-or-None, master_list)."""
    sname = list(doc["students"])
    cname = list(doc["colleges"])
    sidx = {x: i for i, x in enumerate(sname)}
    cidx = {x: i for i, x in enumerate(cname)}
    student_prefs = [[cidx[c] for c in doc["student_prefs"].get(s, [])]
                     for s in sname]
    college_prefs = [[sidx[s] for s in doc["college_prefs"].get(c, [])]
                     for c in cname]
    weights = None
    if doc.get("weights"):
        weights = {}
        for key, w in doc["weights"].items():
            s, c = key.split(",")
            weights[(sidx[s], cidx[c])] = w
    market = make_market(student_prefs, college_prefs, weights,
                         student_names=sname, college_names=cname)
    if "contracts" in doc:
        declared = {(sidx[s], cidx[c]) for s, c in doc["contracts"]}
        if declared != set(market.contracts):
            raise MarketError("contracts field disagrees with preferences")
    spec = None
    if "constraints" in doc:
        spec = constraint_from_dict(doc["constraints"], cidx)
    master = [sidx[s] for s in doc.get("master_list", sname)]
    return market, spec, master


def save_market(path, market: Market, spec: Optional[Constraint] = None,
                master_list: Optional[Sequence[int]] = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(market_to_dict(market, spec, master_list), fh, indent=1)
        fh.write("\n")


def load_market(path):
    with open(path, encoding="utf-8") as fh:
        return market_from_dict(json.load(fh))


def matching_to_dict(market: Market, Y) -> dict:
    return {"matching": sorted(
        [market.name_of_student(s), market.name_of_college(c)]
        for (s, c) in Y)}


def matching_from_dict(market: Market, doc: dict) -> frozenset:
    sidx = {market.name_of_student(s): s for s in range(market.n)}
    cidx = {market.name_of_college(c): c for c in range(market.m)}
    return frozenset((sidx[s], cidx[c]) for s, c in doc["matching"])
