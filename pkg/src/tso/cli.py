"""Command-line front end: generate, solve, bound, simulate, benchmark.

Exit codes: 0 success, 2 infeasible instance, 3 size-guard violation,
1 any other error. All outputs are deterministic for fixed flags and seeds;
the optional --timing flag on bench is the single documented exception.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from .exact import solve_exact_tso
from .graph import (
    InfeasibleInstanceError,
    SizeGuardError,
    brute_force_feasibility,
    feasibility_check,
    instance_to_dict,
    load_instance,
    save_instance,
    validate_instance,
)
from .greedy import (
    GreedyConfig,
    GreedyResult,
    bounds_to_dict,
    compute_bounds,
    greedy_survivors,
)
from .instances import feasible_random_instance, hex_instance, random_complete_instance
from .objective import paths_from_plan_dict, plan_to_dict, simulate_team, team_plan

RATIO_PS_GRID = (0.5, 0.6, 0.7, 0.8, 0.85, 0.9, 0.95)
RATIO_SEEDS = 10
RATIO_NODES = 20
RATIO_MAX_TEAM = 5
HEX_MAX_TEAM = 6
OVERSIZE_PER_TEAM = 6  # bound runs use L = 6K extra paths

CSV_HEADER = "instance,V,K,p_s,oracle,J,U,ratio,ms"


def fmt(x) -> str:
    return format(float(x), ".9g")


def thread_count() -> int:
    n = int(os.environ.get("TSO_THREADS", "0"))
    if n <= 0:
        n = os.cpu_count() or 1
    return n


def _write_text(out, text):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_json(out, doc):
    _write_text(out, json.dumps(doc, indent=2) + "\n")


def _load_checked(path):
    g = load_instance(path)
    problems = validate_instance(g)
    if problems:
        raise ValueError("invalid instance: " + "; ".join(problems))
    return g


# ---------------------------------------------------------------------------
# Subcommands

def cmd_gen(args) -> int:
    if args.preset == "hex":
        g = hex_instance(p_s=args.p_s, team_size=args.team)
    elif args.complete:
        g = random_complete_instance(
            args.nodes, args.weight_min, args.weight_max, args.p_s,
            seed=args.seed, team_size=args.team,
        )
    else:
        raise ValueError("choose --complete or --preset hex")
    if args.out:
        save_instance(g, args.out)
    else:
        _write_json(None, instance_to_dict(g))
    return 0


def cmd_solve(args) -> int:
    g = _load_checked(args.instance)
    cfg = GreedyConfig(
        team_size=args.team if args.team else g.team_size,
        oversize=args.oversize,
        oracle=args.oracle,
        variant=args.variant,
        seed=args.seed,
    )
    result = greedy_survivors(g, cfg)
    cert = compute_bounds(g, cfg, result)
    doc = plan_to_dict(g, result.plan)
    doc["marginal_gains"] = result.team_gains
    doc["bounds"] = bounds_to_dict(cert)
    if cfg.variant != "node":
        doc["variant"] = cfg.variant
        doc["variant_objective"] = result.variant_value
    _write_json(args.out, doc)
    if args.out:
        print(f"J={fmt(result.plan.objective)} U={fmt(cert.upper)} certified={str(cert.certified).lower()}")
    return 0


def cmd_exact(args) -> int:
    g = _load_checked(args.instance)
    plan = solve_exact_tso(g, args.team if args.team else g.team_size)
    doc = plan_to_dict(g, plan)
    doc["exact"] = True
    _write_json(args.out, doc)
    if args.out:
        print(f"J={fmt(plan.objective)}")
    return 0


def cmd_simulate(args) -> int:
    g = _load_checked(args.instance)
    with open(args.plan, "r", encoding="utf-8") as fh:
        paths = paths_from_plan_dict(json.load(fh))
    res = simulate_team(g, paths, args.trials, seed=args.seed)
    if args.out:
        _write_json(args.out, {
            "estimate": res.estimate,
            "std_error": res.std_error,
            "survival_freq": res.survival_freq,
            "trials": res.trials,
        })
    lines = [f"estimate {fmt(res.estimate)}", f"std_error {fmt(res.std_error)}"]
    for k, f in enumerate(res.survival_freq):
        lines.append(f"survival robot_{k} {fmt(f)}")
    print("\n".join(lines))
    return 0


def cmd_feasible(args) -> int:
    g = _load_checked(args.instance)
    rep = feasibility_check(g)
    print(f"X nonempty: {str(rep.x_nonempty).lower()}")
    if args.brute_force:
        print("node reachable brute agree")
        for v in g.node_ids:
            truth = brute_force_feasibility(g, v)
            mark = "yes" if rep.reachable[v] == truth else "NO"
            print(f"{v} {str(rep.reachable[v]).lower()} {str(truth).lower()} {mark}")
    else:
        print("node reachable")
        for v in g.node_ids:
            print(f"{v} {str(rep.reachable[v]).lower()}")
    return 0


# ---------------------------------------------------------------------------
# Benchmark suites

def _bound_for_prefix(g, run, team_size):
    """Certificate for the first team_size paths of an oversized greedy run."""
    oversize = min(OVERSIZE_PER_TEAM * team_size, len(run.paths))
    cfg = GreedyConfig(team_size=team_size, oversize=oversize, oracle="exact")
    partial = GreedyResult(
        config=cfg,
        paths=run.paths[:oversize],
        gains=run.gains[:oversize],
        plan=team_plan(g, run.paths[:team_size]),
        oversize_plan=None,
    )
    return partial.plan.objective, compute_bounds(g, cfg, partial)


def _ratio_cell(task):
    master, rep, p_s, timing = task
    g = feasible_random_instance(RATIO_NODES, 0.3, 1.0, p_s, seed=(master, rep))
    t0 = time.perf_counter()
    cfg = GreedyConfig(
        team_size=RATIO_MAX_TEAM,
        oversize=OVERSIZE_PER_TEAM * RATIO_MAX_TEAM,
        oracle="exact",
        seed=0,
    )
    run = greedy_survivors(g, cfg)
    elapsed = (time.perf_counter() - t0) * 1000.0
    rows = []
    for team in range(1, RATIO_MAX_TEAM + 1):
        j, cert = _bound_for_prefix(g, run, team)
        u = cert.upper
        ms = elapsed if timing else 0.0
        rows.append((f"ratio-v{RATIO_NODES}-s{rep}", RATIO_NODES, team, p_s, "exact", j, u, j / u, ms))
    return rows


def _hex_cell(task):
    p_s, timing = task
    g = hex_instance(p_s=p_s)
    t0 = time.perf_counter()
    cfg = GreedyConfig(
        team_size=HEX_MAX_TEAM,
        oversize=OVERSIZE_PER_TEAM * HEX_MAX_TEAM,
        oracle="exact",
        seed=0,
    )
    run = greedy_survivors(g, cfg)
    elapsed = (time.perf_counter() - t0) * 1000.0
    rows = []
    for team in range(1, HEX_MAX_TEAM + 1):
        j, cert = _bound_for_prefix(g, run, team)
        u = cert.upper
        ms = elapsed if timing else 0.0
        rows.append(("hex", 19, team, p_s, "exact", j, u, j / u, ms))
    return rows


def _run_tasks(worker, tasks):
    workers = min(thread_count(), len(tasks))
    if workers <= 1:
        return [worker(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(worker, tasks))


def bench_rows(suite: str, master_seed: int = 0, timing: bool = False):
    if suite == "ratio":
        tasks = [(master_seed, rep, p_s, timing) for rep in range(RATIO_SEEDS) for p_s in RATIO_PS_GRID]
        chunks = _run_tasks(_ratio_cell, tasks)
    elif suite == "hex":
        chunks = _run_tasks(_hex_cell, [(0.70, timing)])
    else:
        raise ValueError(f"unknown suite {suite!r}")
    return [row for chunk in chunks for row in chunk]


def cmd_bench(args) -> int:
    rows = bench_rows(args.suite, master_seed=args.seed, timing=args.timing)
    lines = [CSV_HEADER]
    for inst, v, team, p_s, oracle, j, u, ratio, ms in rows:
        lines.append(
            f"{inst},{v},{team},{fmt(p_s)},{oracle},{fmt(j)},{fmt(u)},{fmt(ratio)},{fmt(ms)}"
        )
    _write_text(args.out, "\n".join(lines) + "\n")
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tso", description="Survival-constrained team path planning.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an instance file")
    g.add_argument("--nodes", type=int, default=10)
    g.add_argument("--weight-min", type=float, default=0.3)
    g.add_argument("--weight-max", type=float, default=1.0)
    g.add_argument("--p-s", dest="p_s", type=float, default=0.7)
    g.add_argument("--complete", action="store_true", help="complete digraph with uniform weights")
    g.add_argument("--preset", choices=["hex"], help="named benchmark graph")
    g.add_argument("--team", type=int, default=1)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="greedy team plan with bound certificate")
    s.add_argument("instance")
    s.add_argument("--oracle", choices=["exact", "heuristic"], default="exact")
    s.add_argument("--team", type=int, default=0, help="defaults to the instance team size")
    s.add_argument("--oversize", type=int, default=None)
    s.add_argument("--variant", choices=["node", "edge", "multi_visit"], default="node")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_solve)

    e = sub.add_parser("exact", help="exhaustive optimum (small instances only)")
    e.add_argument("instance")
    e.add_argument("--team", type=int, default=0)
    e.add_argument("--out")
    e.set_defaults(func=cmd_exact)

    m = sub.add_parser("simulate", help="Monte-Carlo check of a plan file")
    m.add_argument("instance")
    m.add_argument("--plan", required=True)
    m.add_argument("--trials", type=int, default=10000)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--out")
    m.set_defaults(func=cmd_simulate)

    f = sub.add_parser("feasible", help="per-node reachability report")
    f.add_argument("instance")
    f.add_argument("--brute-force", action="store_true")
    f.set_defaults(func=cmd_feasible)

    b = sub.add_parser("bench", help="benchmark suite, CSV output")
    b.add_argument("--suite", choices=["ratio", "hex"], required=True)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--timing", action="store_true", help="record wall times (breaks byte-identical output)")
    b.add_argument("--out")
    b.set_defaults(func=cmd_bench)

    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InfeasibleInstanceError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 2
    except SizeGuardError as exc:
        print(f"guard violation: {exc}", file=sys.stderr)
        return 3
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
