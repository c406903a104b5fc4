"""Command-line front end.

Every solve command re-validates its output before reporting success and
prints one JSON record per run. Exit status: 0 ok, 1 infeasible,
2 validation failure (invalid instance or solution), 3 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from fractions import Fraction

from rgather import bench
from rgather.brute import TooLarge, brute_minmax, brute_minsum, brute_variants, proximity_brute_reference
from rgather.formats import ParseError, ValidationError, dumps_instance, read_instance_file, read_solution
from rgather.generate import SHAPES, InvalidParams, generate
from rgather.instance import InfeasibleInstance, Instance, Variant, check_feasible, evaluate
from rgather.minsum import solve_minsum
from rgather.proximity import solve_proximity
from rgather.ptas import ptas_solve, ptas_solve_bisection

EXIT_OK, EXIT_INFEASIBLE, EXIT_INVALID, EXIT_USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rgather", description="r-gathering solvers on weighted trees")
    parser.add_argument("--out", help="also append the report to this file")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def with_instance(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("instance", help="instance JSON file")
        return p

    p = with_instance("solve-minmax", "(1+eps)-approximate min-max r-gathering")
    p.add_argument("--epsilon", type=_fraction, required=True)
    p.add_argument("--driver", choices=("candidates", "bisection"), default="candidates")
    with_instance("solve-minsum", "exact min-sum r-gathering (opening costs ignored)")
    with_instance("solve-lbfl", "exact lower-bounded facility location (opening costs charged)")
    p = with_instance("solve-proximity", "exact r-gathering with nearest-facility assignment")
    p.add_argument("--objective", choices=("minmax", "minsum"), default="minmax")
    p = with_instance("solve-outliers", "approximate min-max with ignored users")
    p.add_argument("--alpha", type=_fraction, help="outlier fraction (default: from the file)")
    p.add_argument("--epsilon", type=_fraction, required=True)
    p = with_instance("solve-capped", "approximate min-max with at most k open facilities")
    p.add_argument("--k", type=int, help="facility cap (default: from the file)")
    p.add_argument("--epsilon", type=_fraction, required=True)
    p = with_instance("brute", "exhaustive optimum (small instances only)")
    p.add_argument(
        "--variant",
        choices=("minmax", "minsum", "lbfl", "outliers", "capped", "proximity-minmax", "proximity-minsum"),
        default="minmax",
    )
    p.add_argument("--alpha", type=_fraction)
    p.add_argument("--k", type=int)
    p = with_instance("check", "validate a solution file against an instance")
    p.add_argument("--solution", required=True)
    p.add_argument("--variant", choices=("plain", "outliers", "capped", "proximity"), default="plain")
    p.add_argument("--alpha", type=_fraction)
    p.add_argument("--k", type=int)
    p = sub.add_parser("bench", help="run a benchmark suite")
    p.add_argument("--suite", choices=bench.SUITES, default="desk")
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("table", "jsonl"), default="table")
    p = sub.add_parser("generate", help="write a random instance file to stdout")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--vertices", type=int, default=10)
    p.add_argument("--users", type=int, default=6)
    p.add_argument("--facilities", type=int, default=3)
    p.add_argument("--max-len", type=int, default=20)
    p.add_argument("--shape", choices=SHAPES, default="random_attachment")
    p.add_argument("-r", type=int, default=2)
    p.add_argument("--max-open-cost", type=int, default=0)
    return parser


def _budget(alpha, inst) -> int:
    return math.floor(Fraction(alpha) * inst.n_users)


def _emit(report: dict, out_path: str | None) -> None:
    line = json.dumps(report, sort_keys=True)
    print(line)
    if out_path:
        with open(out_path, "a") as fh:
            fh.write(line + "\n")


def _solve(args, loaded) -> tuple[dict, int]:
    inst = loaded.instance
    cmd = args.command
    params: dict = {}
    variant = Variant.plain()
    if cmd == "solve-minmax":
        params = {"epsilon": str(args.epsilon), "driver": args.driver}
        if args.driver == "bisection":
            sol = ptas_solve_bisection(inst, args.epsilon)
        else:
            sol = ptas_solve(inst, args.epsilon)
        cost = evaluate(inst, sol).minmax_cost
    elif cmd in ("solve-minsum", "solve-lbfl"):
        sol, cost = solve_minsum(inst, charge_open_costs=cmd == "solve-lbfl")
    elif cmd == "solve-proximity":
        params = {"objective": args.objective}
        sol, cost = solve_proximity(inst, args.objective)
        variant = Variant.proximity()
    elif cmd == "solve-outliers":
        alpha = args.alpha if args.alpha is not None else loaded.outlier_fraction
        if alpha is None:
            raise UsageError("--alpha is required (no outlier_fraction in the instance file)")
        if not 0 <= alpha < 1:
            raise UsageError("--alpha must lie in [0, 1)")
        budget = _budget(alpha, inst)
        if inst.n_users - budget < inst.r:
            raise InfeasibleInstance("too few served users")
        params = {"epsilon": str(args.epsilon), "alpha": str(alpha)}
        sol = ptas_solve(inst, args.epsilon, ignore_budget=budget)
        cost = evaluate(inst, sol).minmax_cost
        variant = Variant.outliers(budget)
    elif cmd == "solve-capped":
        k = args.k if args.k is not None else loaded.max_open
        if k is None or k < 1:
            raise UsageError("--k must be a positive integer (or set variant.max_open in the file)")
        params = {"epsilon": str(args.epsilon), "k": k}
        sol = ptas_solve(inst, args.epsilon, max_open=k)
        cost = evaluate(inst, sol).minmax_cost
        variant = Variant.facility_cap(k)
    elif cmd == "brute":
        params = {"variant": args.variant}
        if args.variant == "minmax":
            res = brute_minmax(inst)
        elif args.variant in ("minsum", "lbfl"):
            if args.variant == "minsum":
                inst = Instance(inst.tree, inst.users, [(v, 0) for v, _ in inst.facilities], inst.r)
            res = brute_minsum(inst)
        elif args.variant == "outliers":
            alpha = args.alpha if args.alpha is not None else loaded.outlier_fraction
            if alpha is None:
                raise UsageError("--alpha is required for --variant outliers")
            budget = _budget(alpha, inst)
            res = brute_variants(inst, ignore_budget=budget)
            variant = Variant.outliers(budget)
        elif args.variant == "capped":
            k = args.k if args.k is not None else loaded.max_open
            if k is None:
                raise UsageError("--k is required for --variant capped")
            res = brute_variants(inst, max_open=k)
            variant = Variant.facility_cap(k)
        else:
            res = proximity_brute_reference(inst, args.variant.split("-")[1])
            variant = Variant.proximity()
        sol, cost = res.solution, res.cost
    else:
        raise UsageError(f"unknown command {cmd}")
    return {"params": params, "solution": sol, "cost": cost, "variant": variant}, EXIT_OK


def _check_variant(args, loaded) -> Variant:
    if args.variant == "outliers":
        alpha = args.alpha if args.alpha is not None else loaded.outlier_fraction
        if alpha is None:
            raise UsageError("--alpha is required for --variant outliers")
        return Variant.outliers(_budget(alpha, loaded.instance))
    if args.variant == "capped":
        k = args.k if args.k is not None else loaded.max_open
        if k is None:
            raise UsageError("--k is required for --variant capped")
        return Variant.facility_cap(k)
    if args.variant == "proximity":
        return Variant.proximity()
    return Variant.plain()


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "bench":
            if args.suite == "desk":
                rows = list(bench.desk_suite(args.count, args.seed))
            else:
                rows = list(bench.scale_suite(seed=args.seed))
            if args.format == "table":
                print(bench.format_table(rows))
            else:
                for row in rows:
                    _emit(row, args.out)
            return EXIT_OK if all(r["verdict"] == "ok" for r in rows) else EXIT_INVALID
        if args.command == "generate":
            inst = generate(
                args.seed, args.vertices, args.users, args.facilities, args.max_len,
                shape=args.shape, r=args.r, max_open_cost=args.max_open_cost,
            )
            sys.stdout.write(dumps_instance(inst))
            return EXIT_OK

        loaded = read_instance_file(args.instance)
        if args.command == "check":
            sol = read_solution(args.solution)
            variant = _check_variant(args, loaded)
            violations = check_feasible(loaded.instance, sol, variant)
            rep = evaluate(loaded.instance, sol) if not violations else None
            _emit(
                {
                    "solver": "check",
                    "params": {"variant": args.variant},
                    "cost": None if rep is None else {"minmax": rep.minmax_cost, "minsum": rep.minsum_cost},
                    "verdict": "ok" if not violations else "invalid",
                    "violations": violations,
                },
                args.out,
            )
            return EXIT_OK if not violations else EXIT_INVALID

        t0 = time.perf_counter()
        try:
            out, status = _solve(args, loaded)
        except InfeasibleInstance as exc:
            _emit({"solver": args.command, "verdict": "infeasible", "message": str(exc)}, args.out)
            return EXIT_INFEASIBLE
        elapsed = time.perf_counter() - t0
        violations = check_feasible(loaded.instance, out["solution"], out["variant"])
        _emit(
            {
                "solver": args.command,
                "params": out["params"],
                "cost": out["cost"],
                "wall_time": round(elapsed, 6),
                "verdict": "ok" if not violations else "invalid",
                "violations": violations,
                "solution": out["solution"].to_dict(),
            },
            args.out,
        )
        return EXIT_OK if not violations else EXIT_INVALID
    except ValidationError as exc:
        print(f"rgather: invalid instance: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ParseError, UsageError, TooLarge, InvalidParams, OSError) as exc:
        print(f"rgather: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
