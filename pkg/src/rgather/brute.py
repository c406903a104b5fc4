"""Exhaustive reference solvers.

These enumerate open facility subsets and every user-to-facility assignment,
so they are only usable on small instances. They exist to certify the
polynomial solvers, and favour being obviously correct over being fast.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from rgather.instance import InfeasibleInstance, Instance, Solution, nearest_open_facility


class TooLarge(ValueError):
    """The enumeration would exceed the configured ceiling."""


@dataclass(frozen=True)
class BruteConfig:
    max_users: int = 10
    max_facilities: int = 6
    max_proximity_facilities: int = 15
    max_rows: int = 2_000_000


@dataclass(frozen=True)
class BruteResult:
    cost: int
    solution: Solution


def _all_assignments(n_users: int, n_options: int) -> np.ndarray:
    rows = n_options**n_users
    idx = np.arange(rows, dtype=np.int64)
    powers = n_options ** np.arange(n_users, dtype=np.int64)
    return (idx[:, None] // powers[None, :]) % n_options


def _enumerate(
    instance: Instance,
    objective: str,
    ignore_budget: int = 0,
    max_open: int | None = None,
    config: BruteConfig = BruteConfig(),
) -> BruteResult:
    n, m = instance.n_users, instance.n_facilities
    if n > config.max_users or m > config.max_facilities:
        raise TooLarge(f"{n} users / {m} facilities exceed brute-force ceiling")
    instance.require_feasible(assigned_at_least=instance.r + ignore_budget)

    D = np.array(instance.distance_matrix(), dtype=np.int64).reshape(n, m)
    best = None
    for size in range(1, m + 1):
        if max_open is not None and size > max_open:
            break
        for subset in combinations(range(m), size):
            n_opt = size + (1 if ignore_budget > 0 else 0)
            if n_opt**n > config.max_rows:
                raise TooLarge(f"{n_opt}**{n} assignments per subset")
            A = _all_assignments(n, n_opt)
            cols = np.zeros((n, n_opt), dtype=np.int64)
            cols[:, :size] = D[:, list(subset)]
            per_user = np.take_along_axis(cols, A.T, axis=1).T if n else np.zeros((1, 0), dtype=np.int64)
            ok = np.ones(len(A), dtype=bool)
            for j in range(size):
                ok &= (A == j).sum(axis=1) >= instance.r
            if ignore_budget > 0:
                ok &= (A == size).sum(axis=1) <= ignore_budget
            if not ok.any():
                continue
            if objective == "minmax":
                cost = per_user.max(axis=1) if n else np.zeros(1, dtype=np.int64)
            else:
                cost = per_user.sum(axis=1) + sum(instance.open_cost(f) for f in subset)
            cost = np.where(ok, cost, np.iinfo(np.int64).max)
            i = int(np.argmin(cost))
            if best is None or cost[i] < best[0]:
                best = (int(cost[i]), subset, A[i])
    if best is None:
        raise InfeasibleInstance("no feasible open set")
    cost, subset, row = best
    assignment, ignored = {}, set()
    for u, j in enumerate(row):
        if j == len(subset):
            ignored.add(u)
        else:
            assignment[u] = subset[j]
    return BruteResult(cost, Solution(frozenset(subset), assignment, frozenset(ignored)))


def brute_minmax(instance: Instance, config: BruteConfig = BruteConfig()) -> BruteResult:
    return _enumerate(instance, "minmax", config=config)


def brute_minsum(instance: Instance, config: BruteConfig = BruteConfig()) -> BruteResult:
    """Minimum of assignment distances plus opening costs of the open set."""
    return _enumerate(instance, "minsum", config=config)


def brute_variants(
    instance: Instance,
    ignore_budget: int = 0,
    max_open: int | None = None,
    config: BruteConfig = BruteConfig(),
) -> BruteResult:
    """Min-max optimum with up to ``ignore_budget`` ignored users and at most
    ``max_open`` open facilities."""
    return _enumerate(instance, "minmax", ignore_budget=ignore_budget, max_open=max_open, config=config)


def brute_by_assignment(instance: Instance, objective: str, ignore_budget: int = 0, max_open: int | None = None) -> int:
    """Same optima as the subset enumeration, reached user by user.

    The open set is whatever the assignment uses. Opening an unused facility
    never helps, so the optimum agrees with :func:`_enumerate`.
    """
    instance.require_feasible(assigned_at_least=instance.r + ignore_budget)
    D = instance.distance_matrix()
    n, m, r = instance.n_users, instance.n_facilities, instance.r
    best = [None]
    load = [0] * m

    def rec(u, ignored, acc):
        if u == n:
            used = [f for f in range(m) if load[f]]
            if any(load[f] < r for f in used) or not used:
                return
            if max_open is not None and len(used) > max_open:
                return
            total = acc if objective == "minmax" else acc + sum(instance.open_cost(f) for f in used)
            if best[0] is None or total < best[0]:
                best[0] = total
            return
        if ignored < ignore_budget:
            rec(u + 1, ignored + 1, acc)
        for f in range(m):
            load[f] += 1
            nxt = max(acc, D[u][f]) if objective == "minmax" else acc + D[u][f]
            rec(u + 1, ignored, nxt)
            load[f] -= 1

    rec(0, 0, 0)
    if best[0] is None:
        raise InfeasibleInstance("no feasible assignment")
    return best[0]


def proximity_brute_reference(
    instance: Instance, objective: str = "minmax", config: BruteConfig = BruteConfig()
) -> BruteResult:
    """Optimum when every user must use its nearest open facility.

    Ties go to the smaller facility id. Opening costs are not charged.
    """
    m = instance.n_facilities
    if m > config.max_proximity_facilities:
        raise TooLarge(f"{m} facilities exceed proximity ceiling")
    if objective not in ("minmax", "minsum"):
        raise ValueError(f"unknown objective {objective!r}")
    best = None
    for size in range(1, m + 1):
        for subset in combinations(range(m), size):
            assignment = {
                u: nearest_open_facility(instance, subset, v, warn=False) for u, v in enumerate(instance.users)
            }
            loads = [0] * m
            for f in assignment.values():
                loads[f] += 1
            if any(loads[f] < instance.r for f in subset):
                continue
            dists = [instance.d(u, f) for u, f in assignment.items()]
            cost = max(dists, default=0) if objective == "minmax" else sum(dists)
            if best is None or cost < best.cost:
                best = BruteResult(cost, Solution(frozenset(subset), assignment))
    if best is None:
        raise InfeasibleInstance("no open set satisfies the proximity requirement")
    return best
