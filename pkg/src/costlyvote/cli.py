"""Command-line interface: ``costlyvote <subcommand> [options]``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import reference
from .behavioral import (
    MissingKey,
    category_summary,
    deviation_table,
    embedded_observed,
    embedded_theory,
)
from .equilibrium import InvalidOptions, NonConvergence, SolverOptions, find_all_fixed_points, solve
from .io import ParseError, format_value, load_config, read_cutpoint_samples, read_observed_turnout, write_records
from .model import CANDIDATES, GROUPS, GroupTie, Rule, StrategyProfile, ValidationError, categorize
from .montecarlo import CostModel, SimOptions, default_workers, estimate
from .pivot import pivot_vector, win_probability_a
from .reproduction import category_welfare, equilibrium_welfare, reproduce_table4
from .welfare import EmptySample, expected_welfare, point_mass_samples, welfare_from_sample

TABLE4_TOLERANCE = 0.01


class CLIError(Exception):
    pass


def _resolve_config(source: str):
    """Embedded id 1-18 or a path to a JSON configuration file."""
    if source.isdigit():
        cid = int(source)
        if cid not in reference.CONFIG_IDS:
            raise CLIError(f"no embedded configuration {cid} (expected 1-18)")
        return reference.config(cid), cid
    path = Path(source)
    if not path.exists():
        raise CLIError(f"configuration file not found: {source}")
    return load_config(path), None


def _rules(value: str) -> list[Rule]:
    if value.lower() == "both":
        return [Rule.WTA, Rule.PR]
    return [Rule.parse(value)]


def _profile(values: Optional[Sequence[float]]) -> Optional[StrategyProfile]:
    return None if values is None else StrategyProfile.from_flat(values)


def _solver_options(args) -> SolverOptions:
    return SolverOptions(
        damping=args.damping,
        tolerance=args.tolerance,
        max_iterations=args.max_iterations,
        group_tie=GroupTie.parse(args.group_tie),
        prune=args.prune,
    )


def _emit(args, rows: list[dict], columns: Sequence[str], summary: Optional[dict] = None) -> None:
    out = open(args.output, "w", encoding="utf-8", newline="") if args.output else sys.stdout
    try:
        if args.format == "json":
            payload = {"rows": [{c: _jsonable(r.get(c)) for c in columns} for r in rows]}
            if summary:
                payload["summary"] = {k: _jsonable(v) for k, v in summary.items()}
            out.write(json.dumps(payload, indent=2) + "\n")
        elif args.format == "csv":
            write_records(rows, columns, out)
            if summary:
                for k, v in summary.items():
                    print(f"# {k}={format_value(v)}", file=sys.stderr)
        else:
            cells = [[format_value(r.get(c)) for c in columns] for r in rows]
            cells = [[_short(x) for x in row] for row in cells]
            widths = [max(len(c), *(len(row[i]) for row in cells)) if cells else len(c) for i, c in enumerate(columns)]
            out.write("  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip() + "\n")
            for row in cells:
                out.write("  ".join(x.ljust(w) for x, w in zip(row, widths)).rstrip() + "\n")
            for k, v in (summary or {}).items():
                out.write(f"{k}: {format_value(v)}\n")
    finally:
        if out is not sys.stdout:
            out.close()


def _short(s: str) -> str:
    try:
        x = float(s)
    except ValueError:
        return s
    if "." in s or "e" in s:
        return f"{x:.4f}"
    return s


def _jsonable(v):
    if hasattr(v, "value") and not isinstance(v, (int, float)):
        return v.value
    return v


def cmd_solve(args) -> int:
    config, _ = _resolve_config(args.config)
    opts = _solver_options(args)
    rows = []
    for rule in _rules(args.rule):
        if args.multi_start:
            results = find_all_fixed_points(config, rule, [0.1, 0.5, 0.9], opts)
        else:
            results = [solve(config, rule, opts)]
        for k, res in enumerate(results):
            for g in GROUPS:
                for cand in CANDIDATES:
                    rows.append(
                        {
                            "rule": rule,
                            "solution": k,
                            "group": g,
                            "candidate": cand,
                            "t": res.profile.get(g, cand),
                            "cutpoint": res.profile.get(g, cand) * config.cost_cap,
                            "corner": res.corner(g, cand),
                            "residual": res.residual,
                            "iterations": res.iterations,
                            "converged": res.converged,
                        }
                    )
    cols = ["rule", "solution", "group", "candidate", "t", "cutpoint", "corner", "residual", "iterations", "converged"]
    _emit(args, rows, cols)
    return 0 if all(r["converged"] for r in rows) else 2


def cmd_table4(args) -> int:
    opts = _solver_options(args)
    table = reproduce_table4(_rules(args.rule), opts, workers=args.workers or default_workers())
    rows = [
        {
            "config_id": r.config_id,
            "category": r.category,
            "rule": r.rule,
            "t1A": r.t_a,
            "t1B": r.t_b,
            "published_t1A": r.published_a,
            "published_t1B": r.published_b,
            "gap_t1A": r.gap_a,
            "gap_t1B": r.gap_b,
            "residual": r.result.residual,
            "converged": r.result.converged,
        }
        for r in table
    ]
    worst = max(r.max_gap for r in table)
    _emit(args, rows, list(rows[0]), {"max_abs_gap": worst, "tolerance": args.gap_tolerance})
    return 0 if worst <= args.gap_tolerance and all(r.result.converged for r in table) else 1


def _equilibrium_profile(config, rule, args) -> StrategyProfile:
    res = solve(config, rule, _solver_options(args))
    if not res.converged:
        raise NonConvergence(res)
    return res.profile


def cmd_simulate(args) -> int:
    config, _ = _resolve_config(args.config)
    rows = []
    sim = SimOptions(
        trials=args.trials,
        seed=args.seed,
        cost_model=CostModel(args.cost_model),
        group_tie=GroupTie.parse(args.group_tie),
        workers=args.workers,
    )
    for rule in _rules(args.rule):
        prof = _profile(args.profile) or _equilibrium_profile(config, rule, args)
        rep = estimate(config, rule, prof, sim)
        rows.append({"rule": rule, "quantity": "win_prob_a", "group": "", "candidate": "",
                     "estimate": rep.win_prob_a.value, "se": rep.win_prob_a.se})
        for g in GROUPS:
            for k, cand in enumerate(CANDIDATES):
                for name, table in (("turnout", rep.turnout), ("welfare", rep.welfare),
                                    ("realized_welfare", rep.realized_welfare)):
                    est = table[g - 1][k]
                    rows.append({"rule": rule, "quantity": name, "group": g, "candidate": cand,
                                 "estimate": None if est is None else est.value,
                                 "se": None if est is None else est.se})
    _emit(args, rows, ["rule", "quantity", "group", "candidate", "estimate", "se"],
          {"trials": args.trials, "seed": args.seed})
    return 0


def cmd_welfare(args) -> int:
    config, cid = _resolve_config(args.config)
    rows = []
    samples = read_cutpoint_samples(args.samples) if args.samples else None
    for rule in _rules(args.rule):
        eq = _equilibrium_profile(config, rule, args)
        if samples is not None:
            if cid is None and args.sample_config is None:
                raise CLIError("--samples with a configuration file needs --sample-config to select rows")
            key = (args.sample_config or cid, rule)
            if key not in samples:
                raise EmptySample(f"no samples for config {key[0]} under {rule.value}", "samples")
            rep = welfare_from_sample(config, rule, samples[key], eq)
        elif args.experiment:
            if cid is None:
                raise CLIError("--experiment requires an embedded configuration id")
            rep = welfare_from_sample(
                config, rule, point_mass_samples(config, *reference.experiment_turnout(cid, rule)), eq
            )
        else:
            rep = expected_welfare(config, rule, _profile(args.profile) or eq)
        for g in GROUPS:
            for k, cand in enumerate(CANDIDATES):
                rows.append({"rule": rule, "quantity": "welfare", "group": g, "candidate": cand,
                             "value": rep.welfare[g - 1][k]})
                rows.append({"rule": rule, "quantity": "interim_welfare", "group": g, "candidate": cand,
                             "value": rep.interim[g - 1][k]})
        for name in ("win_prob_a", "majority", "minority", "gini"):
            rows.append({"rule": rule, "quantity": name, "group": "", "candidate": "",
                         "value": getattr(rep, name)})
    _emit(args, rows, ["rule", "quantity", "group", "candidate", "value"])
    return 0


def cmd_table6(args) -> int:
    rows = []
    for rule in _rules(args.rule):
        reports = {}
        for cid in reference.CONFIG_IDS:
            if reference.category(cid).value == "IC":
                continue
            reports[cid] = equilibrium_welfare(cid, rule, GroupTie.parse(args.group_tie))[1]
        for cw in category_welfare(rule, reports):
            published = reference.welfare_theory(cw.category.value, rule)
            for name in ("majority", "minority", "gini"):
                rows.append({"category": cw.category, "rule": rule, "quantity": name,
                             "value": getattr(cw, name), "published": published[name],
                             "gap": getattr(cw, name) - published[name]})
    _emit(args, rows, ["category", "rule", "quantity", "value", "published", "gap"])
    return 0


def cmd_deviations(args) -> int:
    if args.observed:
        observed = read_observed_turnout(args.observed)
    else:
        observed = embedded_observed()
    records = deviation_table(embedded_theory(), observed)
    if args.summary:
        summary = category_summary(records)
        rows = [{"category": c, "rule": r, "camp": camp, "mean_deviation": v} for (c, r, camp), v in summary.items()]
        _emit(args, rows, ["category", "rule", "camp", "mean_deviation"])
        return 0
    rows = []
    for rec in records:
        row = {"config_id": rec.config_id, "category": reference.category(rec.config_id), "rule": rec.rule,
               "camp": rec.camp, "deviation": rec.deviation, "effect": rec.effect}
        if not args.observed:
            row["published"] = reference.printed_deviation(rec.config_id, rec.rule, rec.camp.value)
        rows.append(row)
    cols = ["config_id", "category", "rule", "camp", "deviation", "effect"] + ([] if args.observed else ["published"])
    _emit(args, rows, cols)
    return 0


def cmd_pivot(args) -> int:
    config, _ = _resolve_config(args.config)
    rows = []
    for rule in _rules(args.rule):
        prof = _profile(args.profile) or _equilibrium_profile(config, rule, args)
        pv = pivot_vector(config, rule, prof, prune=args.prune, group_tie=args.group_tie)
        for g in GROUPS:
            for cand in CANDIDATES:
                pi = pv.get(g, cand)
                rows.append({"rule": rule, "group": g, "candidate": cand, "pi": pi,
                             "best_response": min(1.0, max(0.0, config.benefit * pi / config.cost_cap))})
        rows.append({"rule": rule, "group": "", "candidate": "win_prob_a",
                     "pi": win_probability_a(config, rule, prof, args.prune, args.group_tie)})
    _emit(args, rows, ["rule", "group", "candidate", "pi", "best_response"])
    return 0


def cmd_configs(args) -> int:
    rows = []
    for cid in reference.CONFIG_IDS:
        cfg = reference.config(cid)
        rows.append({"config_id": cid, "category": categorize(cfg), "n1": cfg.group_sizes[0],
                     "n2": cfg.group_sizes[1], "n3": cfg.group_sizes[2], "p1": cfg.support_rates[0],
                     "p2": cfg.support_rates[1], "p3": cfg.support_rates[2],
                     "pbar": reference.printed_pbar(cid)})
    _emit(args, rows, list(rows[0]))
    return 0
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json", "table"), default="table")
    common.add_argument("--output", "-o", help="write to this file instead of stdout")

    solver = argparse.ArgumentParser(add_help=False)
    solver.add_argument("--damping", type=float, default=0.5)
    solver.add_argument("--tolerance", type=float, default=1e-7)
    solver.add_argument("--max-iterations", type=int, default=10_000)
    solver.add_argument("--group-tie", choices=("coin", "split"), default="coin",
                        help="award of a tied WTA group (default: coin)")
    solver.add_argument("--prune", type=float, default=0.0,
                        help="drop tally outcomes with probability below this (default: exact)")

    def rule_arg(p, default="both"):
        p.add_argument("--rule", default=default, help="wta, pr or both")

    def profile_arg(p):
        p.add_argument("--profile", type=float, nargs=6, metavar="T",
                       help="cutpoints t1A t1B t2A t2B t3A t3B (default: equilibrium)")

    parser = argparse.ArgumentParser(prog="costlyvote", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common, solver], help="equilibrium cutpoints")
    p.add_argument("--config", required=True, help="embedded id 1-18 or JSON file")
    rule_arg(p)
    p.add_argument("--multi-start", action="store_true", help="report every fixed point found from a start grid")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("reproduce-table4", parents=[common, solver], help="solve all 18 configurations")
    rule_arg(p)
    p.add_argument("--gap-tolerance", type=float, default=TABLE4_TOLERANCE)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_table4)

    p = sub.add_parser("simulate", parents=[common, solver], help="Monte Carlo report")
    p.add_argument("--config", required=True)
    rule_arg(p)
    profile_arg(p)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cost-model", choices=("continuous", "discrete"), default="continuous")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("welfare", parents=[common, solver], help="expected welfare and Gini")
    p.add_argument("--config", required=True)
    rule_arg(p)
    profile_arg(p)
    p.add_argument("--samples", help="cutpoint sample CSV (config_id,rule,group,candidate,value)")
    p.add_argument("--sample-config", type=int, help="config_id to select from --samples")
    p.add_argument("--experiment", action="store_true",
                   help="group 1 at the published experimental averages")
    p.set_defaults(func=cmd_welfare)

    p = sub.add_parser("reproduce-table6", parents=[common, solver], help="category-average equilibrium welfare")
    rule_arg(p)
    p.set_defaults(func=cmd_table6)

    p = sub.add_parser("deviations", parents=[common], help="observed minus equilibrium turnout")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--embedded", action="store_true", help="use the published experimental averages (default)")
    src.add_argument("--observed", help="observed turnout CSV (config_id,rule,group,candidate,value)")
    p.add_argument("--summary", action="store_true", help="category means instead of per-configuration rows")
    p.set_defaults(func=cmd_deviations)

    p = sub.add_parser("pivot", parents=[common, solver], help="pivot probabilities at a profile")
    p.add_argument("--config", required=True)
    rule_arg(p)
    profile_arg(p)
    p.set_defaults(func=cmd_pivot)

    p = sub.add_parser("configs", parents=[common], help="list embedded configurations")
    p.set_defaults(func=cmd_configs)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CLIError, ValidationError, ParseError, MissingKey, NonConvergence, InvalidOptions, KeyError,
            OSError) as exc:
        record = {"error": type(exc).__name__, "message": str(exc).strip("'\"")}
        if getattr(exc, "field", None):
            record["field"] = exc.field
        print(json.dumps(record), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
