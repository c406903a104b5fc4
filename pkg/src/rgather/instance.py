"""Instances, solutions, objective evaluation and feasibility checks."""

from __future__ import annotations

import warnings
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

from rgather.tree import WeightedTree, binarize


class InfeasibleInstance(ValueError):
    """No solution exists (too few users, or no facility)."""


class DanglingReference(ValueError):
    pass


class EmptyOpenSet(ValueError):
    pass


class TieWarning(UserWarning):
    """Two open facilities are equidistant from a vertex."""


@dataclass(frozen=True)
class Instance:
    """Users and facilities on a weighted tree.

    Users and facilities are identified by their position in ``users`` and
    ``facilities``; ``users[i]`` is the vertex of user ``i`` and
    ``facilities[j]`` is ``(vertex, open_cost)`` of facility ``j``.
    """

    tree: WeightedTree
    users: tuple[int, ...]
    facilities: tuple[tuple[int, int], ...]
    r: int

    def __post_init__(self):
        object.__setattr__(self, "users", tuple(self.users))
        object.__setattr__(self, "facilities", tuple((int(v), int(c)) for v, c in self.facilities))
        if not isinstance(self.r, int) or self.r < 1:
            raise ValueError(f"r must be a positive integer, got {self.r!r}")
        for v in self.users:
            self.tree._check(v)
        for v, c in self.facilities:
            self.tree._check(v)
            if c < 0:
                raise ValueError(f"negative opening cost {c}")

    @property
    def n_users(self) -> int:
        return len(self.users)

    @property
    def n_facilities(self) -> int:
        return len(self.facilities)

    def facility_vertex(self, f: int) -> int:
        return self.facilities[f][0]

    def open_cost(self, f: int) -> int:
        return self.facilities[f][1]

    def users_at(self, v: int) -> int:
        return sum(1 for u in self.users if u == v)

    def d(self, user: int, facility: int) -> int:
        """Distance from user id to facility id."""
        return self.tree.dist(self.users[user], self.facilities[facility][0])

    def distance_matrix(self) -> list[list[int]]:
        """``D[u][f]`` for all user and facility ids."""
        return [[self.d(u, f) for f in range(self.n_facilities)] for u in range(self.n_users)]

    def candidates(self) -> list[int]:
        """Sorted distinct user-facility distances (the min-max optimum is one of them)."""
        return sorted({x for row in self.distance_matrix() for x in row})

    def require_feasible(self, assigned_at_least: int | None = None) -> None:
        need = self.r if assigned_at_least is None else assigned_at_least
        if not self.facilities:
            raise InfeasibleInstance("instance has no facility")
        if self.n_users < need or self.n_users < self.r:
            raise InfeasibleInstance(f"{self.n_users} users cannot fill a facility with r={self.r}")

    def is_binarized(self) -> bool:
        if not self.tree.is_full_binary():
            return False
        return (
            max(Counter(self.users).values(), default=0) <= 1
            and max(Counter(v for v, _ in self.facilities).values(), default=0) <= 1
        )

    def binarized(self) -> tuple["Instance", dict]:
        """Same instance on a full binary tree with one site per vertex.

        User and facility ids are unchanged; the returned map sends
        ``("u", i)`` / ``("f", j)`` to the new vertex.
        """
        sites = [(("u", i), v) for i, v in enumerate(self.users)]
        sites += [(("f", j), v) for j, (v, _) in enumerate(self.facilities)]
        tree, relocation = binarize(self.tree, sites)
        users = tuple(relocation[("u", i)] for i in range(self.n_users))
        facs = tuple((relocation[("f", j)], c) for j, (_, c) in enumerate(self.facilities))
        return Instance(tree, users, facs, self.r), relocation

    def with_tree(self, tree: WeightedTree) -> "Instance":
        """Same sites on a tree with identical topology but other lengths."""
        return Instance(tree, self.users, self.facilities, self.r)


@dataclass(frozen=True)
class Solution:
    open_facilities: frozenset[int]
    assignment: dict[int, int]
    ignored_users: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "open_facilities", frozenset(self.open_facilities))
        object.__setattr__(self, "ignored_users", frozenset(self.ignored_users))
        object.__setattr__(self, "assignment", dict(self.assignment))

    def loads(self) -> Counter:
        return Counter(self.assignment.values())

    def to_dict(self) -> dict:
        return {
            "open": sorted(self.open_facilities),
            "assignment": {str(u): f for u, f in sorted(self.assignment.items())},
            "ignored": sorted(self.ignored_users),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Solution":
        return cls(
            frozenset(int(f) for f in data.get("open", [])),
            {int(u): int(f) for u, f in data.get("assignment", {}).items()},
            frozenset(int(u) for u in data.get("ignored", [])),
        )


@dataclass(frozen=True)
class CostReport:
    minmax_cost: int
    minsum_cost: int
    distance_sum: int
    per_facility_load: dict[int, int]


def evaluate(instance: Instance, solution: Solution) -> CostReport:
    for u, f in solution.assignment.items():
        if not 0 <= u < instance.n_users:
            raise DanglingReference(f"unknown user {u}")
        if not 0 <= f < instance.n_facilities:
            raise DanglingReference(f"unknown facility {f}")
    for f in solution.open_facilities:
        if not 0 <= f < instance.n_facilities:
            raise DanglingReference(f"unknown facility {f}")
    dists = [instance.d(u, f) for u, f in solution.assignment.items()]
    opening = sum(instance.open_cost(f) for f in solution.open_facilities)
    return CostReport(
        minmax_cost=max(dists, default=0),
        minsum_cost=sum(dists) + opening,
        distance_sum=sum(dists),
        per_facility_load=dict(solution.loads()),
    )


def nearest_open_facility(instance: Instance, open_set: Iterable[int], vertex: int, warn: bool = True) -> int:
    """Open facility closest to ``vertex``; the smaller id wins ties."""
    open_set = sorted(open_set)
    if not open_set:
        raise EmptyOpenSet("no open facility")
    keyed = sorted((instance.tree.dist(vertex, instance.facility_vertex(f)), f) for f in open_set)
    if warn and len(keyed) > 1 and keyed[0][0] == keyed[1][0]:
        warnings.warn(
            f"facilities {keyed[0][1]} and {keyed[1][1]} tie at distance {keyed[0][0]} from vertex {vertex}",
            TieWarning,
            stacklevel=2,
        )
    return keyed[0][1]


@dataclass(frozen=True)
class Variant:
    """Which constraint family ``check_feasible`` enforces."""

    kind: str = "plain"  # plain | outliers | facility_cap | proximity
    budget: int = 0
    max_open: int | None = None

    @classmethod
    def plain(cls) -> "Variant":
        return cls("plain")

    @classmethod
    def outliers(cls, budget: int) -> "Variant":
        return cls("outliers", budget=budget)

    @classmethod
    def facility_cap(cls, k: int) -> "Variant":
        return cls("facility_cap", max_open=k)

    @classmethod
    def proximity(cls) -> "Variant":
        return cls("proximity")


def check_feasible(instance: Instance, solution: Solution, variant: Variant | None = None) -> list[str]:
    """Return a list of human-readable violations; empty means feasible."""
    variant = variant or Variant.plain()
    out = []
    opened = solution.open_facilities
    for f in sorted(opened):
        if not 0 <= f < instance.n_facilities:
            out.append(f"dangling: open facility {f} does not exist")
    for u in range(instance.n_users):
        if u in solution.ignored_users:
            if u in solution.assignment:
                out.append(f"ignored user {u} is also assigned")
            continue
        if u not in solution.assignment:
            out.append(f"unassigned: user {u}")
        elif solution.assignment[u] not in opened:
            out.append(f"closed: user {u} assigned to closed facility {solution.assignment[u]}")
    for u in solution.assignment:
        if not 0 <= u < instance.n_users:
            out.append(f"dangling: user {u} does not exist")
    loads = solution.loads()
    for f in sorted(opened):
        if loads.get(f, 0) < instance.r:
            out.append(f"under-loaded: facility {f} serves {loads.get(f, 0)} < r={instance.r}")

    if solution.ignored_users and variant.kind != "outliers":
        out.append(f"ignored users not allowed in variant {variant.kind}")
    if variant.kind == "outliers" and len(solution.ignored_users) > variant.budget:
        out.append(f"too many ignored: {len(solution.ignored_users)} > budget {variant.budget}")
    if variant.kind == "facility_cap" and len(opened) > variant.max_open:
        out.append(f"too many open: {len(opened)} > k={variant.max_open}")
    if variant.kind == "proximity" and opened and not out:
        for u, f in sorted(solution.assignment.items()):
            best = nearest_open_facility(instance, opened, instance.users[u], warn=False)
            if best != f:
                out.append(f"not nearest: user {u} assigned to {f}, nearest open is {best}")
    return out
