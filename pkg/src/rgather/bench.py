"""Benchmark suites: solver cost and wall time, with brute-force ratios where feasible."""

from __future__ import annotations

import math
import time
from fractions import Fraction

from rgather.brute import brute_minmax, brute_minsum, brute_variants, proximity_brute_reference
from rgather.generate import desk_instance, generate
from rgather.instance import InfeasibleInstance, Variant, check_feasible, evaluate
from rgather.minsum import solve_minsum
from rgather.proximity import solve_proximity
from rgather.ptas import ptas_solve

SUITES = ("desk", "scale")


def _row(solver, inst, params, cost, seconds, verdict, reference=None, seed=None):
    ratio = None
    if reference is not None and cost is not None:
        ratio = 1.0 if reference == cost else (math.inf if reference == 0 else cost / reference)
    return {
        "solver": solver,
        "n_users": inst.n_users,
        "n_facilities": inst.n_facilities,
        "params": {k: str(v) for k, v in params.items()},
        "cost": cost,
        "reference": reference,
        "ratio": ratio,
        "wall_time": round(seconds, 6),
        "verdict": verdict,
        "seed": seed,
    }


def _timed(fn, *args, **kwargs):
    t0 = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - t0


def desk_suite(count: int = 20, seed: int = 0):
    """Every solver against its brute-force optimum on small random instances."""
    for s in range(seed, seed + count):
        inst = desk_instance(s)
        opt = brute_minmax(inst).cost
        for eps in (Fraction(1), Fraction(1, 2)):
            sol, dt = _timed(ptas_solve, inst, eps)
            bad = check_feasible(inst, sol)
            cost = evaluate(inst, sol).minmax_cost
            ok = not bad and cost <= (1 + eps) * opt
            yield _row("ptas-minmax", inst, {"epsilon": eps}, cost, dt, "ok" if ok else "fail", opt, s)

        (sol, cost), dt = _timed(solve_minsum, inst)
        ref = brute_minsum(inst).cost
        ok = not check_feasible(inst, sol) and cost == ref
        yield _row("exact-lbfl", inst, {}, cost, dt, "ok" if ok else "fail", ref, s)

        for objective in ("minmax", "minsum"):
            try:
                ref = proximity_brute_reference(inst, objective).cost
            except InfeasibleInstance:
                ref = None
            try:
                (sol, cost), dt = _timed(solve_proximity, inst, objective)
                ok = not check_feasible(inst, sol, Variant.proximity()) and cost == ref
            except InfeasibleInstance:
                cost, dt, ok = None, 0.0, ref is None
            yield _row(f"exact-proximity-{objective}", inst, {}, cost, dt, "ok" if ok else "fail", ref, s)

        budget = inst.n_users // 4
        if inst.n_users - budget >= inst.r:
            ref = brute_variants(inst, ignore_budget=budget).cost
            sol, dt = _timed(ptas_solve, inst, Fraction(1, 2), ignore_budget=budget)
            cost = evaluate(inst, sol).minmax_cost
            ok = not check_feasible(inst, sol, Variant.outliers(budget)) and cost <= Fraction(3, 2) * ref
            yield _row("ptas-outliers", inst, {"epsilon": "1/2", "alpha": "1/4"}, cost, dt, "ok" if ok else "fail", ref, s)

        ref = brute_variants(inst, max_open=1).cost
        sol, dt = _timed(ptas_solve, inst, Fraction(1, 2), max_open=1)
        cost = evaluate(inst, sol).minmax_cost
        ok = not check_feasible(inst, sol, Variant.facility_cap(1)) and cost <= Fraction(3, 2) * ref
        yield _row("ptas-capped", inst, {"epsilon": "1/2", "k": 1}, cost, dt, "ok" if ok else "fail", ref, s)


def scale_suite(n_vertices: int = 2000, user_counts=(100, 200, 400), seed: int = 0):
    """Min-sum DP timings on one tree shape with growing user counts."""
    for n_users in user_counts:
        inst = generate(seed, n_vertices, n_users, 50, 100, r=3, max_open_cost=50)
        (sol, cost), dt = _timed(solve_minsum, inst)
        verdict = "ok" if not check_feasible(inst, sol) else "fail"
        yield _row("exact-lbfl", inst, {"n_vertices": n_vertices}, cost, dt, verdict, None, seed)


def format_table(rows) -> str:
    head = f"{'solver':<26}{'|U|':>4}{'|F|':>4}  {'params':<22}{'time[s]':>10}{'cost':>8}{'ref':>8}{'ratio':>8}  verdict"
    lines = [head, "-" * len(head)]
    for row in rows:
        params = ",".join(f"{k}={v}" for k, v in row["params"].items())
        ratio = "-" if row["ratio"] is None else f"{row['ratio']:.3f}"
        ref = "-" if row["reference"] is None else str(row["reference"])
        cost = "-" if row["cost"] is None else str(row["cost"])
        lines.append(
            f"{row['solver']:<26}{row['n_users']:>4}{row['n_facilities']:>4}  {params:<22}"
            f"{row['wall_time']:>10.4f}{cost:>8}{ref:>8}{ratio:>8}  {row['verdict']}"
        )
    return "\n".join(lines)
