"""Command-line entry point: ``griddeg <subcommand> ...``.

The exit status is 0 exactly when every assertion made by the subcommand holds.
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import acceptance
from .distance import FamilySpec, FamilyTooLarge, exact_distance
from .experiments import PARAMS, ConfigError, ExperimentConfig, load_config, run_experiment
from .field_poly import PrimeField
from .grid import DomainMismatch, DomainTooLarge
from .tableio import TableParseError, load_function, save_function
from .testers import (
    THREADS_ENV,
    JuntaTesterConfig,
    QueryBudgetExceeded,
    WeakDegConfig,
    deg_test,
    estimate_rejection,
    junta_test_recursive,
    junta_test_rephrased,
    weak_deg_test,
)

ESTIMATE_HEADER = "rate,ci_lo,ci_hi,mean_queries"


def _tester_args(p: argparse.ArgumentParser, junta: bool, weak: bool) -> None:
    p.add_argument("--fn", required=True, help="function table file")
    p.add_argument("--d", type=int, required=True, help="degree bound")
    if junta:
        p.add_argument("--k", type=int, help="locality of the junta tester")
        p.add_argument("--form", choices=("rephrased", "recursive"), default="rephrased")
    if weak:
        p.add_argument("--t", type=int, help="balanced block length (a multiple of s)")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--paper-params", action="store_true", help="use the large asymptotic parameters")
    p.add_argument("--threads", type=int, help=f"worker threads (default: ${THREADS_ENV} or 1)")


def _field_codomain(f) -> None:
    if not isinstance(f.codomain, PrimeField):
        raise DomainMismatch(f"degree tests need a prime-field codomain such as F7, got {f.codomain.descriptor}")


def _estimate(args, tester) -> int:
    f = load_function(args.fn)
    if args.command != "junta-test":
        _field_codomain(f)
    est = estimate_rejection(f, tester, args.trials, args.seed, args.threads)
    print(ESTIMATE_HEADER)
    print(est.row())
    return 0


def cmd_junta_test(args) -> int:
    cfg = JuntaTesterConfig(args.d, args.k, args.seed, args.paper_params)
    test = junta_test_recursive if args.form == "recursive" else junta_test_rephrased
    return _estimate(args, lambda f, rng: test(f, cfg, rng))


def cmd_weak_deg(args) -> int:
    cfg = WeakDegConfig(args.d, args.t, args.seed, args.paper_params)
    return _estimate(args, lambda f, rng: weak_deg_test(f, cfg, rng))


def cmd_deg_test(args) -> int:
    jcfg = JuntaTesterConfig(args.d, args.k, args.seed, args.paper_params)
    wcfg = WeakDegConfig(args.d, args.t, args.seed, args.paper_params)
    return _estimate(args, lambda f, rng: deg_test(f, jcfg, wcfg, rng))


def cmd_distance(args) -> int:
    f = load_function(args.fn)
    kind = "junta-degree" if args.family == "junta" else "degree"
    family = FamilySpec(kind, args.d, f.domain, f.codomain)
    dist, witness = exact_distance(f, family, cap=args.cap, reduce_twins=args.reduce_twins and kind == "junta-degree")
    print(f"{dist},{float(dist):.6g}")
    if args.witness:
        save_function(witness, args.witness)
    return 0


def _run_config(kind: str, seed: int, params: dict, output: str | None) -> int:
    result = run_experiment(ExperimentConfig(kind, seed, {**PARAMS[kind], **params}, output))
    if not output:
        sys.stdout.write(result.csv_text())
    print(result.summary(), file=sys.stderr)
    return 0 if result.passed else 1


def cmd_sse(args) -> int:
    params = {"s": args.s, "n": args.n, "sets": args.sets, "nus": args.nu}
    return _run_config("sse-sweep", args.seed, params, args.output)


def cmd_impossibility(args) -> int:
    params = {"n": args.n, "l": args.l, "trials": args.trials}
    return _run_config("impossibility", args.seed, params, args.output)


def cmd_experiment(args) -> int:
    cfg = load_config(args.config)
    result = run_experiment(cfg)
    if cfg.output is None:
        sys.stdout.write(result.csv_text())
    print(result.summary(), file=sys.stderr)
    return 0 if result.passed else 1


def cmd_acceptance(args) -> int:
    results = acceptance.run_acceptance(args.only or None)
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="griddeg", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("junta-test", help="estimate the junta-degree tester's rejection rate")
    _tester_args(p, junta=True, weak=False)
    p.set_defaults(run=cmd_junta_test)

    p = sub.add_parser("weak-deg", help="estimate the weak degree tester's rejection rate")
    _tester_args(p, junta=False, weak=True)
    p.set_defaults(run=cmd_weak_deg)

    p = sub.add_parser("deg-test", help="estimate the combined degree tester's rejection rate")
    _tester_args(p, junta=True, weak=True)
    p.set_defaults(run=cmd_deg_test)

    p = sub.add_parser("distance", help="exact distance to the junta-degree or degree family")
    p.add_argument("--family", choices=("junta", "degree"), required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--fn", required=True)
    p.add_argument("--cap", type=int, default=10**8, help="refuse families larger than this")
    p.add_argument("--reduce-twins", action="store_true", help="merge identical slices first (junta only)")
    p.add_argument("--witness", help="write a nearest member to this table file")
    p.set_defaults(run=cmd_distance)

    p = sub.add_parser("sse", help="spherical small-set expansion check on random sets")
    p.add_argument("--s", type=int, default=3)
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--sets", type=int, default=20)
    p.add_argument("--nu", nargs="+", default=["1/3", "1/2", "2/3", "1"], type=lambda v: str(Fraction(v)))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output")
    p.set_defaults(run=cmd_sse)

    p = sub.add_parser("impossibility", help="query-matrix demo on the asymmetric grid")
    p.add_argument("--n", type=int, nargs="+", required=True)
    p.add_argument("--l", type=int, nargs="+", required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output")
    p.set_defaults(run=cmd_impossibility)

    p = sub.add_parser("experiment", help="run a JSON-configured sweep")
    p.add_argument("--config", required=True)
    p.set_defaults(run=cmd_experiment)

    p = sub.add_parser("acceptance", help="run the acceptance suite")
    p.add_argument("--only", type=int, nargs="*", help="criterion numbers to run")
    p.set_defaults(run=cmd_acceptance)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except (
        ConfigError,
        TableParseError,
        DomainMismatch,
        DomainTooLarge,
        FamilyTooLarge,
        QueryBudgetExceeded,
        OSError,
        ValueError,
    ) as exc:
        print(f"griddeg {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
