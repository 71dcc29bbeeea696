"""Command-line front end.

Subcommands: run (one mechanism on a market file), audit (check a
matching), gen (sample a market instance to JSON), experiment (sweep a
parameter grid to CSV), convexity (hereditary / M-natural-convexity
report for a market's constraints).
"""
from __future__ import annotations

import json
import sys

import click

from .audit import audit
from .constraints import (EnumerationCapExceeded, is_hereditary,
                          is_mnatural_convex)
from .experiment import (KNOWN_MECHANISMS, ExperimentPlan, rows_to_csv,
                         run_mechanism, run_plan, write_csv)
from .genmarket import MarketConfig, build_market1, build_market2
from .market import nu_of
from .marketio import (load_market, matching_from_dict, matching_to_dict,
                       save_market)
from .mechanisms import MechanismError


@click.group()
def main():
    """Matching mechanisms under hereditary distributional constraints."""


def _load(path):
    market, spec, master = load_market(path)
    if spec is None:
        raise click.ClickException(f"{path} has no constraints field")
    return market, spec, master


def _print_audit(report):
    for key, value in report.to_dict().items():
        if isinstance(value, list):
            shown = value[:5]
            tail = f" (+{len(value) - 5} more)" if len(value) > 5 else ""
            value = f"{len(value)} witness(es) {shown}{tail}" if value else "none"
        click.echo(f"{key:22s} {value}")


@main.command()
@click.option("--market", "market_path", required=True,
              type=click.Path(exists=True))
@click.option("--mechanism", required=True,
              type=click.Choice(KNOWN_MECHANISMS))
@click.option("--out", type=click.Path(), default=None,
              help="Write the matching as JSON.")
def run(market_path, mechanism, out):
    """Run one mechanism on a market file and print the audit summary."""
    market, spec, master = _load(market_path)
    try:
        Y = run_mechanism(mechanism, market, spec, master_list=master)
    except MechanismError as exc:
        raise click.ClickException(str(exc))
    if not spec.evaluate(nu_of(Y, market.m)):
        raise click.ClickException("mechanism produced an infeasible matching")
    for s, c in sorted(Y):
        click.echo(f"{market.name_of_student(s)} -> {market.name_of_college(c)}")
    _print_audit(audit(market, Y, spec, master_list=master))
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            json.dump(matching_to_dict(market, Y), fh, indent=1)
            fh.write("\n")


@main.command(name="audit")
@click.option("--market", "market_path", required=True,
              type=click.Path(exists=True))
@click.option("--matching", "matching_path", required=True,
              type=click.Path(exists=True))
def audit_cmd(market_path, matching_path):
    """Audit a matching file against a market's axioms."""
    market, spec, master = _load(market_path)
    with open(matching_path, encoding="utf-8") as fh:
        Y = matching_from_dict(market, json.load(fh))
    _print_audit(audit(market, Y, spec, master_list=master))


@main.command()
@click.option("--family", type=click.Choice(["1", "2"]), default="1")
@click.option("--n", type=int, default=None)
@click.option("--m", type=int, default=None)
@click.option("--phi", type=float, default=0.7)
@click.option("--q", type=int, default=None)
@click.option("--flex", type=int, default=100)
@click.option("--seed", type=int, default=0)
@click.option("--instance", type=int, default=0)
@click.option("--out", required=True, type=click.Path())
def gen(family, n, m, phi, q, flex, seed, instance, out):
    """Sample one market instance and write it to a JSON file."""
    defaults = {"1": (1000, 100, 800), "2": (1000, 200, 450)}
    dn, dm, dq = defaults[family]
    config = MarketConfig(n=n or dn, m=m or dm, phi=phi, q=q or dq,
                          flex=flex, seed=seed, instance=instance)
    builder = build_market1 if family == "1" else build_market2
    market, spec, _ = builder(config)
    save_market(out, market, spec, master_list=range(market.n))
    click.echo(f"wrote {out}")


@main.command()
@click.option("--market", default="1", help="Market family: 1 or 2.")
@click.option("--phi", multiple=True, type=float, default=(0.7,))
@click.option("--q", multiple=True, type=int, default=None)
@click.option("--flex", multiple=True, type=int, default=(100,))
@click.option("--mechanism", multiple=True,
              type=click.Choice(KNOWN_MECHANISMS),
              default=("sd", "acda", "ada", "msgda"))
@click.option("--instances", type=int, default=100)
@click.option("--n", type=int, default=None)
@click.option("--m", type=int, default=None)
@click.option("--seed", type=int, default=0)
@click.option("--jobs", type=int, default=1)
@click.option("--out", type=click.Path(), default=None,
              help="CSV path; stdout when omitted.")
def experiment(market, phi, q, flex, mechanism, instances, n, m, seed, jobs,
               out):
    """Run the efficiency/fairness sweep and emit one CSV row per
    (grid point, mechanism)."""
    if not q:
        q = (800,) if market == "1" else (450,)
    plan = ExperimentPlan(market=market, phis=tuple(phi), qs=tuple(q),
                          flexes=tuple(flex), mechanisms=tuple(mechanism),
                          instances=instances, seed=seed, n=n, m=m, jobs=jobs)
    rows = run_plan(plan)
    if out:
        write_csv(out, rows)
        click.echo(f"wrote {out}")
    else:
        sys.stdout.write(rows_to_csv(rows))


@main.command()
@click.option("--market", "market_path", required=True,
              type=click.Path(exists=True))
@click.option("--box", type=int, default=None,
              help="Per-college enumeration bound; default n.")
@click.option("--enum-cap", type=int, default=2_000_000)
def convexity(market_path, box, enum_cap):
    """Report whether the market's constraints are hereditary and
    M-natural-convex, with witnesses."""
    market, spec, _ = _load(market_path)
    bounds = [box if box is not None else market.n] * market.m
    try:
        h = is_hereditary(spec, bounds, enum_cap=enum_cap)
        c = is_mnatural_convex(spec, bounds, enum_cap=enum_cap)
    except EnumerationCapExceeded as exc:
        raise click.ClickException(f"inconclusive: {exc}")
    for label, res in (("hereditary", h), ("M-natural-convex", c)):
        verdict = {True: "yes", False: "no", None: "inconclusive"}[res.ok]
        line = f"{label}: {verdict}"
        if res.ok is False and res.witness is not None:
            line += f"  witness: {res.witness}"
        click.echo(line)


if __name__ == "__main__":
    main()
