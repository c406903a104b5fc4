"""Exact r-gathering on a tree when users must use their nearest open facility.

Each vertex ``v`` gets an *anchor*: the open facility nearest to it, with
ties going to the smaller facility id. Users are served by the anchor of
their vertex. On a tree it suffices to check anchors edge by edge: if the
two endpoints of an edge have different anchors, each endpoint must strictly
prefer its own anchor, comparing ``(distance, id)``. Anchor regions are then
connected, and a child whose anchor differs from its parent's owns a
facility inside its own subtree that receives all its users from there.

``DP[v][f][c]`` is the best cost for ``T_v`` when ``v`` is anchored at ``f``
and ``c = min(r, users of T_v served by f)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from rgather.instance import InfeasibleInstance, Instance, Solution

INF = math.inf


@dataclass
class ProximityTables:
    instance: Instance
    objective: str
    dp: list[list[list[float]]]
    choice: list[list[list[tuple | None]]]


def _tables(instance: Instance, objective: str) -> ProximityTables:
    tree = instance.tree
    m = instance.n_facilities
    r = instance.r
    users_at = [0] * tree.n
    for v in instance.users:
        users_at[v] += 1
    fac_at = [None] * tree.n
    for f, (v, _) in enumerate(instance.facilities):
        fac_at[v] = f

    # facility f lies in T_v iff v is an ancestor of its vertex
    tin, tout = [0] * tree.n, [0] * tree.n
    for i, v in enumerate(tree.preorder):
        tin[v] = i
    size = tree.subtree_sizes([1] * tree.n)
    for v in range(tree.n):
        tout[v] = tin[v] + size[v]

    def inside(f: int, v: int) -> bool:
        return tin[v] <= tin[instance.facility_vertex(f)] < tout[v]

    dist = [[tree.dist(v, fv) for fv, _ in instance.facilities] for v in range(tree.n)]

    def prefers(v: int, f: int, h: int) -> bool:
        return (dist[v][f], f) < (dist[v][h], h)

    combine = max if objective == "minmax" else (lambda a, b: a + b)
    dp = [None] * tree.n
    choice = [None] * tree.n
    for v in tree.postorder:
        kids = tree.children[v]
        uv = users_at[v]
        g = fac_at[v]
        table = [[INF] * (r + 1) for _ in range(m)]
        back = [[None] * (r + 1) for _ in range(m)]
        for f in range(m):
            if objective == "minmax":
                own = dist[v][f] if uv else 0
            else:
                own = uv * dist[v][f]
            options = []
            for c in kids:
                opts = []
                # child keeps the anchor and passes its users on to f
                for k in range(r + 1):
                    if dp[c][f][k] < INF:
                        opts.append((dp[c][f][k], k, ("keep", k)))
                # child closes out its own anchor h inside T_c with a full quota
                if not inside(f, c):
                    best = None
                    for h in range(m):
                        if h == f or not inside(h, c) or dp[c][h][r] == INF:
                            continue
                        if prefers(v, f, h) and prefers(c, h, f):
                            if best is None or dp[c][h][r] < best[0]:
                                best = (dp[c][h][r], 0, ("close", h))
                    if best is not None:
                        opts.append(best)
                options.append(opts)
            if not kids:
                combos = [((), 0)]
            elif len(kids) == 1:
                combos = [((o,), o[1]) for o in options[0]]
            else:
                combos = [((a, b), a[1] + b[1]) for a in options[0] for b in options[1]]
            for parts, cnt in combos:
                cap = min(r, cnt + uv)
                cost = own
                for val, _, _ in parts:
                    cost = combine(cost, val)
                if cost < table[f][cap]:
                    table[f][cap] = cost
                    back[f][cap] = tuple(p[2] for p in parts)
        dp[v] = table
        choice[v] = back
    return ProximityTables(instance, objective, dp, choice)


def solve_proximity(instance: Instance, objective: str = "minmax") -> tuple[Solution, int]:
    """Optimal solution under the nearest-open-facility rule.

    ``objective`` is ``"minmax"`` (largest travel distance) or ``"minsum"``
    (total travel distance; opening costs are not charged).
    """
    if objective not in ("minmax", "minsum"):
        raise ValueError(f"unknown objective {objective!r}")
    if instance.n_users < instance.r or not instance.facilities:
        raise InfeasibleInstance("too few users or no facility")
    work = instance if instance.is_binarized() else instance.binarized()[0]
    tables = _tables(work, objective)
    tree = work.tree
    r = work.r
    root_row = tables.dp[tree.root]
    f_best = min(range(work.n_facilities), key=lambda f: (root_row[f][r], f))
    if root_row[f_best][r] == INF:
        raise InfeasibleInstance("no open set satisfies the proximity requirement")

    anchor = {}
    stack = [(tree.root, f_best, r)]
    while stack:
        v, f, c = stack.pop()
        anchor[v] = f
        for kid, pick in zip(tree.children[v], tables.choice[v][f][c]):
            if pick[0] == "keep":
                stack.append((kid, f, pick[1]))
            else:
                stack.append((kid, pick[1], r))
    assignment = {u: anchor[v] for u, v in enumerate(work.users)}
    opened = frozenset(anchor.values())
    return Solution(opened, assignment), int(root_row[f_best][r])
