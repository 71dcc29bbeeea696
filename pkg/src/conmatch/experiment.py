"""Efficiency/fairness sweep harness.

Runs a grid of (phi, q, flex) points over one of the generated market
families, applies each requested mechanism to every instance, audits
feasibility, and aggregates mean Borda score and envy ratios into CSV
rows.  All randomness flows from the plan seed; result columns are
byte-identical across runs, runtime columns naturally are not.
"""
from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass
from multiprocessing import Pool
from typing import Dict, List, Optional, Sequence, Tuple

from .audit import borda_scores, envy_ratios
from .constraints import Constraint
from .genmarket import MarketConfig, build_market1, build_market2
from .market import Market, nu_of
from .mechanisms import (DSelectionStrategy, ada, acda, default_strategy_for,
                         gda, msgda, sd, uniform_feasible_quotas)

CSV_COLUMNS = ("market", "phi", "q", "flex", "mechanism", "meanBorda",
               "studentsNoEnvyRatio", "pairsNoEnvyRatio", "meanRuntimeMs",
               "instances")

KNOWN_MECHANISMS = ("sd", "acda", "ada", "msgda", "gda")


class ExperimentError(RuntimeError):
    pass


@dataclass(frozen=True)
class ExperimentPlan:
    market: str = "1"                     # "1" | "2" | path to a market file
    phis: Tuple[float, ...] = (0.7,)
    qs: Tuple[int, ...] = (800,)
    flexes: Tuple[int, ...] = (100,)
    mechanisms: Tuple[str, ...] = ("sd", "acda", "ada", "msgda")
    instances: int = 100
    seed: int = 0
    n: Optional[int] = None
    m: Optional[int] = None
    jobs: int = 1

    def __post_init__(self):
        if not self.phis or not self.qs or not self.flexes:
            raise ExperimentError("parameter grid must be non-empty")
        if self.instances < 1:
            raise ExperimentError("need at least one instance")
        bad = [x for x in self.mechanisms if x not in KNOWN_MECHANISMS]
        if bad:
            raise ExperimentError(f"unknown mechanisms: {bad}")


def _family_defaults(market: str) -> Tuple[int, int]:
    return (1000, 100) if market == "1" else (1000, 200)


def _build_point(plan: ExperimentPlan, phi: float, q: int, flex: int,
                 instance: int):
    n, m = _family_defaults(plan.market)
    if plan.n is not None:
        n = plan.n
    if plan.m is not None:
        m = plan.m
    config = MarketConfig(n=n, m=m, phi=phi, q=q, flex=flex,
                          seed=plan.seed, instance=instance)
    if plan.market == "1":
        return build_market1(config)
    if plan.market == "2":
        return build_market2(config)
    raise ExperimentError(f"unknown market family {plan.market!r}")


def run_mechanism(name: str, market: Market, spec: Constraint,
                  strategy: Optional[DSelectionStrategy] = None,
                  master_list: Optional[Sequence[int]] = None) -> frozenset:
    """Dispatch one mechanism by name; the default master list is the
    student index order."""
    if master_list is None:
        master_list = range(market.n)
    if name == "sd":
        return sd(market, master_list, spec)
    if name == "acda":
        quotas = uniform_feasible_quotas(spec, market.m, market.n)
        return acda(market, quotas, spec)
    if name == "ada":
        return ada(market, master_list, spec)
    if name == "msgda":
        if strategy is None:
            strategy = default_strategy_for(spec, market.m)
        matching, _ = msgda(market, master_list, spec, strategy)
        return matching
    if name == "gda":
        return gda(market, spec)
    raise ExperimentError(f"unknown mechanism {name!r}")


def run_instance(plan: ExperimentPlan, phi: float, q: int, flex: int,
                 instance: int) -> Dict[str, Tuple[float, float, float, float]]:
    """One instance at one grid point.

    Returns {mechanism: (meanBorda, studentsNoEnvy, pairsNoEnvy, ms)}.
    """
    market, spec, strategy = _build_point(plan, phi, q, flex, instance)
    out = {}
    for name in plan.mechanisms:
        t0 = time.perf_counter()
        Y = run_mechanism(name, market, spec, strategy)
        ms = (time.perf_counter() - t0) * 1000.0
        if not spec.evaluate(nu_of(Y, market.m)):
            raise ExperimentError(
                f"{name} produced an infeasible matching "
                f"(market {plan.market}, phi={phi}, q={q}, flex={flex}, "
                f"instance {instance})")
        _, mean_borda = borda_scores(market, Y)
        s_ok, p_ok = envy_ratios(market, Y)
        out[name] = (mean_borda, s_ok, p_ok, ms)
    return out


def _worker(args):
    plan, phi, q, flex, instance = args
    return instance, run_instance(plan, phi, q, flex, instance)


def run_point(plan: ExperimentPlan, phi: float, q: int, flex: int,
              pool: Optional[Pool] = None) -> List[dict]:
    """All instances at one grid point, aggregated to one row per
    mechanism.  Aggregation is keyed by instance index, so parallel
    completion order cannot change the result."""
    tasks = [(plan, phi, q, flex, k) for k in range(plan.instances)]
    if pool is None:
        results = list(map(_worker, tasks))
    else:
        results = pool.map(_worker, tasks)
    results.sort(key=lambda item: item[0])
    rows = []
    for name in plan.mechanisms:
        per = [metrics[name] for _, metrics in results]
        k = len(per)
        rows.append({
            "market": plan.market,
            "phi": phi,
            "q": q,
            "flex": flex,
            "mechanism": name,
            "meanBorda": sum(x[0] for x in per) / k,
            "studentsNoEnvyRatio": sum(x[1] for x in per) / k,
            "pairsNoEnvyRatio": sum(x[2] for x in per) / k,
            "meanRuntimeMs": sum(x[3] for x in per) / k,
            "instances": k,
        })
    return rows


def run_plan(plan: ExperimentPlan) -> List[dict]:
    points = [(phi, q, flex) for phi in plan.phis for q in plan.qs
              for flex in plan.flexes]
    if plan.jobs > 1:
        with Pool(plan.jobs) as pool:
            rows = []
            for phi, q, flex in points:
                rows.extend(run_point(plan, phi, q, flex, pool))
            return rows
    rows = []
    for phi, q, flex in points:
        rows.extend(run_point(plan, phi, q, flex))
    return rows


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def rows_to_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([_fmt(row[col]) for col in CSV_COLUMNS])
    return buf.getvalue()


def write_csv(path, rows: Sequence[dict]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(rows_to_csv(rows))
