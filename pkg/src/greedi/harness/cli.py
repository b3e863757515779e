"""Command line entry point: ``greedi <subcommand> ...``."""
from __future__ import annotations

import argparse
import sys

from ..checks import SUITES, run_suite
from ..constraints import parse_constraint
from ..core import GreediError
from ..distributed import BASELINES, GreediConfig, baseline, greedi
from ..engines import ENGINES, get_engine
from ..partition import stream
from . import io as dio
from .experiment import OBJECTIVES, build_objective, load_config, run_experiment
from .synthetic import KINDS, gen_synthetic, parse_params

PAYLOAD = {"exemplar": "vectors", "infogain": "vectors", "dpp": "vectors", "cut": "graph",
           "coverage": "sets"}


def _data_args(p):
    p.add_argument("--objective", required=True, choices=OBJECTIVES)
    p.add_argument("--data", required=True, help="vectors, edge list or set file")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", default="csv", choices=dio.VECTOR_FORMATS)
    p.add_argument("--normalize", action="store_true", help="center and scale vectors to unit norm")
    p.add_argument("--undirected", action="store_true", help="add reverse arcs to edge lists")
    p.add_argument("--alpha-exp", type=float, default=2.0)
    p.add_argument("--h", type=float, default=0.75)
    p.add_argument("--sigma", type=float, default=1.0)


def _machine_args(p):
    p.add_argument("--machines", type=int, required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--engine", default="lazy", choices=sorted(ENGINES))


def _objective(a):
    kind = PAYLOAD[a.objective]
    if kind == "vectors":
        data = dio.load_vectors(a.data, a.format, a.normalize)
    elif kind == "graph":
        data = dio.load_graph(a.data, a.undirected)
    else:
        data = dio.load_sets(a.data)
    return build_objective(a.objective, data,
                           {"alpha_exp": a.alpha_exp, "h": a.h, "sigma": a.sigma})


def _print_solution(sol):
    print(f"value={sol.value!r} size={len(sol)} oracle_calls={sol.oracle_calls}")
    print("ids=" + ",".join(map(str, sol.elements)))


def cmd_solve(a):
    f = _objective(a)
    c = parse_constraint(a.constraint, f.n) if a.constraint else None
    budget = None if c is not None and a.engine in ("constrained", "costbenefit") else a.k
    sol = get_engine(a.engine).solve(f, c, None, budget, stream(a.seed, 0))
    _print_solution(sol)


def cmd_greedi(a):
    f = _objective(a)
    cfg = GreediConfig(a.machines, a.k, kappa_factor=a.kappa_factor, engine=a.engine,
                       decomposable=a.decomposable, seed=a.seed, workers=a.workers,
                       eval_subset_size=a.eval_subset_size)
    sol, tr = greedi(f, None, cfg)
    if a.trace:
        print("\n".join(tr.to_lines()))
    _print_solution(sol)


def cmd_baseline(a):
    f = _objective(a)
    _print_solution(baseline(a.kind, f, None, a.machines, a.k, a.seed, a.engine, None,
                             a.decomposable, a.workers))


def cmd_sweep(a):
    cfg = load_config(a.config)
    cfg.out = a.out
    if a.workers is not None:
        cfg.workers = a.workers
    res = run_experiment(cfg)
    bad = [r for r in res.rows if r.status.startswith("error")]
    print(f"wrote {len(res.rows)} rows to {a.out}" + (f" ({len(bad)} failed cells)" if bad else ""))


def cmd_verify(a):
    suites = [a.suite] if a.suite else list(SUITES)
    failed = 0
    for s in suites:
        for r in run_suite(s, a.seeds):
            print(r.line())
            failed += not (r.satisfied if hasattr(r, "satisfied") else r.passed)
    if failed:
        raise GreediError(f"{failed} checks failed")


def cmd_gen(a):
    ds = gen_synthetic(a.kind, parse_params(a.params), a.seed)
    if a.kind == "gaussian_mixture":
        dio.save_vectors(ds, a.out, a.format)
    elif a.kind == "random_graph":
        dio.save_graph(ds, a.out)
    else:
        dio.save_sets(ds, a.out)
    print(f"wrote {a.kind} to {a.out}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="greedi", description="Distributed submodular maximization")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("solve", help="single-machine engine run")
    _data_args(p)
    p.add_argument("--engine", default="lazy", choices=sorted(ENGINES))
    p.add_argument("--constraint", help="cardinality:K | knapsack:BUDGET | partition:BLOCKS:CAP")
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("greedi", help="two-round distributed run")
    _data_args(p)
    _machine_args(p)
    p.add_argument("--kappa-factor", type=float, default=1.0)
    p.add_argument("--decomposable", action="store_true", help="machine-local evaluation")
    p.add_argument("--eval-subset-size", type=int, default=None)
    p.add_argument("--trace", action="store_true", help="print the per-machine trace")
    p.set_defaults(fn=cmd_greedi)

    p = sub.add_parser("baseline", help="naive two-round protocol")
    _data_args(p)
    _machine_args(p)
    p.add_argument("--kind", required=True, choices=BASELINES)
    p.add_argument("--decomposable", action="store_true", help="machine-local evaluation")
    p.set_defaults(fn=cmd_baseline)

    p = sub.add_parser("sweep", help="run an experiment config to CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("verify", help="bound and structure check suites")
    p.add_argument("--suite", choices=SUITES)
    p.add_argument("--seeds", type=int, default=None)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("gen", help="write a synthetic dataset")
    p.add_argument("--kind", required=True, choices=KINDS)
    p.add_argument("--params", default="")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", default="csv", choices=dio.VECTOR_FORMATS)
    p.set_defaults(fn=cmd_gen)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.fn(args)
    except (GreediError, ValueError, OSError, KeyError) as exc:
        print(f"greedi {args.cmd}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
