"""Command-line front end.

Subcommands: ``gen``, ``solve``, ``analyze``, ``bruteforce``, ``bench`` and
``validate``.  Instances and reports are UTF-8 JSON without NaN or
infinities.  Every random choice derives from ``--seed`` through
``SeedSequence([seed, instance_index, repetition])``.  ``FMSM_THREADS`` caps
the worker pool; results are always reduced in input order.

Exit codes: 0 success, 2 unreadable or invalid input, 3 infeasible
instance, 4 configuration error (including an unknown solver), 5 size
beyond an enumeration cap.
"""

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from fmsm import instance as fi
from fmsm.analysis import brute_force_opt, excess_ratio, norm_report
from fmsm.continuous import ContinuousConfig
from fmsm.errors import ConfigurationError, InfeasibleError, UnsupportedSizeError, ValidationError
from fmsm.rounding import IntersectionRounder
from fmsm import solvers as sv

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_INFEASIBLE = 3
EXIT_CONFIG = 4
EXIT_SIZE = 5

BRUTE_FORCE_CAP = 16


class CLIError(Exception):
    def __init__(self, code, message):
        self.code = code
        super().__init__(message)


def derive_seed(seed, index, rep):
    return int(np.random.SeedSequence([int(seed), int(index), int(rep)]).generate_state(1)[0])


def worker_count(tasks):
    env = os.environ.get("FMSM_THREADS")
    cap = os.cpu_count() or 1
    if env:
        try:
            cap = max(1, int(env))
        except ValueError as exc:
            raise CLIError(EXIT_CONFIG, f"FMSM_THREADS must be an integer, got {env!r}") from exc
    return max(1, min(cap, tasks))


def ordered_map(fn, items):
    """``map`` over a process pool sized by ``FMSM_THREADS``; input order kept."""
    items = list(items)
    workers = worker_count(len(items))
    if workers == 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


def load_instance(path):
    try:
        return fi.load(path)
    except (OSError, json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise CLIError(EXIT_PARSE, f"cannot read instance {path}: {exc}") from exc
    except (ValidationError, ValueError, TypeError) as exc:
        raise CLIError(EXIT_PARSE, f"invalid instance {path}: {exc}") from exc


def write_json(payload, out):
    text = json.dumps(payload, indent=2, sort_keys=True, allow_nan=False, ensure_ascii=False)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        sys.stdout.write(text + "\n")


# ---------------------------------------------------------------------------
# solving


def _params(args):
    return {
        "beta": args.beta,
        "epsilon": args.epsilon,
        "swap_size": args.swap_size,
        "samples": args.samples,
    }


def check_solver(name):
    if name not in sv.SOLVERS:
        raise CLIError(EXIT_CONFIG, f"unknown solver {name!r}; choose from {', '.join(sv.SOLVERS)}")


def prepare(inst, solver, params, seed):
    """Work shared by all repetitions on one instance (the relaxation)."""
    cfg = ContinuousConfig(epsilon=params["epsilon"], num_samples=params["samples"], seed=seed)
    if solver == "relax-round":
        return sv.relax(inst, cfg)
    if solver == "decomposable":
        return sv.decomposable_relaxation(inst, cfg)
    if solver == "uniform-nonmonotone":
        return sv.min_inf_norm_uniform(inst) if isinstance(inst.matroid, fi.UniformSpec) else None
    return None


def run_solver(inst, solver, params, seed, shared=None, rounder=None):
    sub_nm = sv.SubSolver(swap_size=params["swap_size"], epsilon=params["epsilon"])
    if solver == "two-pass-nonmonotone":
        return sv.two_pass_nonmonotone(inst, params["beta"], sub_nm, seed)
    if solver == "two-pass-monotone":
        sub = sv.SubSolver(swap_size=params["swap_size"], epsilon=params["epsilon"], monotone=True)
        return sv.two_pass_monotone(inst, sub, seed)
    if solver == "relax-round":
        return sv.relax_round_expected(inst, seed=seed, relaxation=shared)
    if solver == "uniform-nonmonotone":
        return sv.uniform_nonmonotone(inst, sv.SubSolver(kind="random_greedy"), seed, norms=shared)
    if solver == "decomposable":
        return sv.decomposable_solve(inst, seed=seed, relaxation=shared, rounder=rounder)
    raise CLIError(EXIT_CONFIG, f"unknown solver {solver!r}")


def _solve_chunk(task):
    """Runs every repetition of one instance (shares the relaxation)."""
    inst, solver, params, seeds, relax_seed, opt, timing = task
    try:
        shared = prepare(inst, solver, params, relax_seed)
        rounder = None
        if solver == "decomposable":
            rounder = IntersectionRounder(inst, shared.combination, inst.objective_oracle())
        out = []
        for s in seeds:
            rep = run_solver(inst, solver, params, s, shared, rounder)
            rep.opt = opt
            out.append(rep.to_dict(timing))
        return {"ok": True, "runs": out}
    except ConfigurationError as exc:
        return {"ok": False, "code": EXIT_CONFIG, "error": str(exc)}
    except InfeasibleError as exc:
        return {"ok": False, "code": EXIT_INFEASIBLE, "error": str(exc)}


def _chunks(seeds, parts):
    size = max(1, math.ceil(len(seeds) / parts))
    return [seeds[i : i + size] for i in range(0, len(seeds), size)]


def solve_instance(inst, solver, params, seed, reps, index=0, timing=False):
    """All repetitions for one instance, in repetition order."""
    opt = None
    if inst.n <= BRUTE_FORCE_CAP:
        opt, _ = brute_force_opt(inst)
    seeds = [derive_seed(seed, index, r) for r in range(reps)]
    relax_seed = derive_seed(seed, index, reps)
    tasks = [(inst, solver, params, c, relax_seed, opt, timing) for c in _chunks(seeds, worker_count(reps))]
    results = ordered_map(_solve_chunk, tasks)
    runs = []
    for res in results:
        if not res["ok"]:
            raise CLIError(res["code"], res["error"])
        runs.extend(res["runs"])
    return opt, runs


def summarize(runs, num_colors):
    """Mean/min ratio, per-color violation counts and a histogram of how
    many colors each run violates."""
    below = [0] * num_colors
    above = [0] * num_colors
    outside = [0] * num_colors
    histogram = {}
    for run in runs:
        bad = 0
        within = run["extra"].get("interval_lower")
        for c, (cnt, lo, hi) in enumerate(zip(run["counts"], run["lower"], run["upper"])):
            b, a = cnt < lo, cnt > hi
            below[c] += b
            above[c] += a
            bad += b or a
            if within is not None:
                il, iu = run["extra"]["interval_lower"][c], run["extra"]["interval_upper"][c]
                outside[c] += not (il - 1e-12 <= cnt <= iu + 1e-12)
        histogram[str(bad)] = histogram.get(str(bad), 0) + 1
    ratios = [r["ratio"] for r in runs if r["ratio"] is not None]
    values = [r["value"] for r in runs]
    out = {
        "runs": len(runs),
        "value_sum": float(sum(values)),
        "mean_value": float(np.mean(values)) if values else 0.0,
        "mean_ratio": float(np.mean(ratios)) if ratios else None,
        "min_ratio": float(min(ratios)) if ratios else None,
        "independent_runs": sum(bool(r["independent"]) for r in runs),
        "fair_runs": sum(bool(r["fair"]) for r in runs),
        "below_lower": below,
        "above_upper": above,
        "violation_histogram": dict(sorted(histogram.items(), key=lambda kv: int(kv[0]))),
        "guarantee": runs[0]["guarantee"] if runs else None,
    }
    if runs and runs[0]["extra"].get("interval_lower") is not None:
        out["outside_interval"] = outside
        out["within_interval_runs"] = sum(bool(r["extra"]["within_interval"]) for r in runs)
    return out


def cmd_solve(args):
    check_solver(args.solver)
    inst = load_instance(args.instance)
    params = _params(args)
    opt, runs = solve_instance(inst, args.solver, params, args.seed, args.reps, timing=args.timing)
    report = {
        "command": "solve",
        "instance": str(args.instance),
        "solver": args.solver,
        "seed": args.seed,
        "reps": args.reps,
        "params": params,
        "opt": opt,
        "summary": summarize(runs, inst.num_colors),
        "runs": runs,
    }
    write_json(report, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# other commands


def cmd_gen(args):
    try:
        if args.kind == "random":
            inst = fi.gen_random(args.n, args.colors, args.matroid, args.objective, args.seed)
        elif args.kind == "gap":
            inst = fi.gen_integrality_gap(args.t, args.s)
        else:
            agent_colors = [int(c) for c in args.agent_colors.split(",")]
            inst = fi.gen_welfare(args.agents, args.items, agent_colors, args.seed)
    except fi.GenerationError as exc:
        raise CLIError(EXIT_INFEASIBLE, str(exc)) from exc
    except ValueError as exc:
        raise CLIError(EXIT_CONFIG, str(exc)) from exc
    write_json(fi.to_dict(inst), args.out)
    return EXIT_OK


def cmd_analyze(args):
    inst = load_instance(args.instance)
    if fi.feasible_witness(inst) is None:
        raise CLIError(EXIT_INFEASIBLE, "instance has no feasible set")
    rep = norm_report(inst).to_dict()
    rep.update({"command": "analyze", "instance": str(args.instance), "excess_ratio": excess_ratio(inst)})
    write_json(rep, args.out)
    return EXIT_OK


def cmd_bruteforce(args):
    inst = load_instance(args.instance)
    opt, best = brute_force_opt(inst, max_n=BRUTE_FORCE_CAP)
    write_json({"command": "bruteforce", "instance": str(args.instance), "opt": opt, "solution": sorted(best)}, args.out)
    return EXIT_OK


def cmd_validate(args):
    inst = load_instance(args.instance)
    witness = fi.feasible_witness(inst)
    payload = {
        "command": "validate",
        "instance": str(args.instance),
        "n": inst.n,
        "num_colors": inst.num_colors,
        "feasible": witness is not None,
        "witness": None if witness is None else sorted(witness),
    }
    write_json(payload, args.out)
    return EXIT_OK if witness is not None else EXIT_INFEASIBLE


def corpus_paths(args):
    paths = list(args.instance or [])
    if args.corpus:
        root = Path(args.corpus)
        if not root.is_dir():
            raise CLIError(EXIT_PARSE, f"corpus {root} is not a directory")
        paths += sorted(str(p) for p in root.glob("*.json"))
    if not paths:
        raise CLIError(EXIT_CONFIG, "bench needs --corpus or at least one --instance")
    return paths


def cmd_bench(args):
    solvers = args.solver or list(sv.SOLVERS)
    for name in solvers:
        check_solver(name)
    paths = corpus_paths(args)
    instances = [load_instance(p) for p in paths]
    params = _params(args)
    per_solver = {}
    for name in solvers:
        entries = []
        all_runs = []
        for idx, (path, inst) in enumerate(zip(paths, instances)):
            try:
                opt, runs = solve_instance(inst, name, params, args.seed, args.reps, index=idx, timing=args.timing)
            except CLIError as exc:
                if exc.code not in (EXIT_CONFIG,):
                    raise
                entries.append({"instance": path, "skipped": str(exc)})
                continue
            s = summarize(runs, inst.num_colors)
            viol = sum(s["below_lower"]) + sum(s["above_upper"])
            entries.append(
                {
                    "instance": path,
                    "opt": opt,
                    "runs": s["runs"],
                    "value_sum": s["value_sum"],
                    "mean_ratio": s["mean_ratio"],
                    "min_ratio": s["min_ratio"],
                    "color_checks": s["runs"] * inst.num_colors,
                    "color_violations": viol,
                }
            )
            all_runs.extend(runs)
        done = [e for e in entries if "skipped" not in e]
        ratios = [r["ratio"] for r in all_runs if r["ratio"] is not None]
        checks = sum(e["color_checks"] for e in done)
        viols = sum(e["color_violations"] for e in done)
        per_solver[name] = {
            "instances": entries,
            "total_runs": sum(e["runs"] for e in done),
            "total_value": float(sum(e["value_sum"] for e in done)),
            "mean_ratio": float(np.mean(ratios)) if ratios else None,
            "min_ratio": float(min(ratios)) if ratios else None,
            "color_violation_rate": viols / checks if checks else 0.0,
        }
    write_json({"command": "bench", "seed": args.seed, "reps": args.reps, "params": params, "solvers": per_solver}, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _common(p, instance=True):
    if instance:
        p.add_argument("--instance", required=True, help="instance JSON file")
    p.add_argument("--out", help="write the JSON report here instead of stdout")


def _solve_options(p):
    p.add_argument("--beta", type=float, default=0.5, help="protected fraction for two-pass-nonmonotone")
    p.add_argument("--epsilon", type=float, default=0.05, help="continuous step size and local search threshold")
    p.add_argument("--swap-size", type=int, default=1, help="local search swap size t")
    p.add_argument("--samples", type=int, default=None, help="multilinear samples per estimate (default: exact when small)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--reps", type=int, default=1, help="repetitions per instance")
    p.add_argument("--timing", action="store_true", help="include wall times (reports stop being bit-identical)")


def build_parser():
    parser = argparse.ArgumentParser(prog="fmsm", description="Fair submodular maximization under a matroid.")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an instance")
    g.add_argument("--kind", choices=("random", "gap", "welfare"), default="random")
    g.add_argument("--n", type=int, default=10)
    g.add_argument("--colors", type=int, default=2)
    g.add_argument("--matroid", choices=fi.MATROID_KINDS, default="uniform")
    g.add_argument("--objective", choices=fi.OBJECTIVE_KINDS, default="coverage")
    g.add_argument("--t", type=int, default=2, help="paths in the gap instance")
    g.add_argument("--s", type=int, default=1, help="path half-length in the gap instance")
    g.add_argument("--agents", type=int, default=3)
    g.add_argument("--items", type=int, default=3)
    g.add_argument("--agent-colors", default="0,0,1", help="comma-separated color per agent")
    g.add_argument("--seed", type=int, default=0)
    _common(g, instance=False)
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="run a solver, optionally repeated over seeds")
    _common(s)
    s.add_argument("--solver", required=True, help=f"one of {', '.join(sv.SOLVERS)}")
    _solve_options(s)
    s.set_defaults(func=cmd_solve)

    a = sub.add_parser("analyze", help="smallest infinity norms and excess ratio")
    _common(a)
    a.set_defaults(func=cmd_analyze)

    b = sub.add_parser("bruteforce", help=f"exact optimum (n <= {BRUTE_FORCE_CAP})")
    _common(b)
    b.set_defaults(func=cmd_bruteforce)

    v = sub.add_parser("validate", help="schema and feasibility check")
    _common(v)
    v.set_defaults(func=cmd_validate)

    k = sub.add_parser("bench", help="aggregate solvers over a corpus")
    k.add_argument("--corpus", help="directory of instance JSON files")
    k.add_argument("--instance", action="append", help="instance file (repeatable)")
    k.add_argument("--solver", action="append", help="solver to include (repeatable; default all)")
    k.add_argument("--out")
    _solve_options(k)
    k.set_defaults(func=cmd_bench)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_PARSE
    try:
        if getattr(args, "reps", 1) < 1:
            raise CLIError(EXIT_CONFIG, "--reps must be at least 1")
        if getattr(args, "beta", 0.0) is not None and not 0.0 <= getattr(args, "beta", 0.0) <= 0.5:
            raise CLIError(EXIT_CONFIG, "--beta must lie in [0, 0.5]")
        if getattr(args, "epsilon", 1.0) <= 0:
            raise CLIError(EXIT_CONFIG, "--epsilon must be positive")
        return args.func(args)
    except CLIError as exc:
        print(f"fmsm: error: {exc}", file=sys.stderr)
        return exc.code
    except InfeasibleError as exc:
        print(f"fmsm: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except UnsupportedSizeError as exc:
        print(f"fmsm: too large: {exc}", file=sys.stderr)
        return EXIT_SIZE
    except ConfigurationError as exc:
        print(f"fmsm: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
