"""Exact min-sum r-gathering / lower-bounded facility location on a tree.

``DP[v][t]`` is the cheapest way to handle ``T_v`` when ``t`` users leave
``T_v`` upward (``t > 0``) or ``-t`` outside users enter it (``t < 0``).
Some optimal solution uses every edge in one direction only, so a single
signed flow per edge is enough. Tables are arrays of length ``2n + 1``
indexed by ``t + n``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from rgather.instance import InfeasibleInstance, Instance, Solution

# two INF entries must add without int64 overflow
INF = 1 << 61
NONE = np.iinfo(np.int64).min


class CorruptTables(RuntimeError):
    pass


def _merge(A, B, uv, n, out, arg):
    """Min-plus merge of two child tables shifted by the users on ``v``.

    ``out[t] = min_k A[k] + B[t - uv - k]`` with all indices offset by ``n``;
    ``arg[t]`` records the minimizing ``k`` (child-x flow).
    """
    size = 2 * n + 1
    for ki in range(size):
        a = A[ki]
        k = ki - n
        # keep t = k + m + uv inside [-n, n]
        lo = max(0, -k - uv)
        hi = min(size, 2 * n + 1 - k - uv)
        for mi in range(lo, hi):
            s = a + B[mi]
            ti = k + mi + uv
            if s < out[ti] and s < INF:
                out[ti] = s
                arg[ti] = k


_merge_fast = numba.njit(cache=True)(_merge)


@dataclass
class MinsumTables:
    instance: Instance
    n: int
    dp: list[np.ndarray]
    merged: list[np.ndarray]
    merge_arg: list[np.ndarray]
    absorb_from: list[np.ndarray]
    charge_open_costs: bool

    @property
    def optimum(self):
        return self.dp[self.instance.tree.root][self.n]


def _with_edge(table: np.ndarray, length: int, n: int) -> np.ndarray:
    flows = np.abs(np.arange(-n, n + 1, dtype=np.int64)) if table.dtype != object else np.array(
        [abs(t) for t in range(-n, n + 1)], dtype=object
    )
    out = table + flows * length
    out[table >= INF] = INF
    return out


def minsum_tables(instance: Instance, charge_open_costs: bool = True) -> MinsumTables:
    """Fill the DP bottom-up; ``instance`` must be binarized."""
    if not instance.is_binarized():
        raise ValueError("minsum_tables needs a binarized instance")
    tree = instance.tree
    n = instance.n_users
    r = instance.r
    size = 2 * n + 1
    users_at = [0] * tree.n
    for v in instance.users:
        users_at[v] += 1
    fac_at = [None] * tree.n
    for f, (v, _) in enumerate(instance.facilities):
        fac_at[v] = f

    bound = 2 * n * max(tree.depth, default=0) + sum(c for _, c in instance.facilities)
    exact_ints = bound >= INF // 4
    dtype = object if exact_ints else np.int64
    merge = _merge if exact_ints else _merge_fast

    dp = [None] * tree.n
    merged_t = [None] * tree.n
    merge_arg = [None] * tree.n
    absorb_from = [None] * tree.n
    for v in tree.postorder:
        uv = users_at[v]
        merged = np.full(size, INF, dtype=dtype)
        arg = np.full(size, NONE, dtype=np.int64)
        kids = tree.children[v]
        if not kids:
            if uv <= n:
                merged[uv + n] = 0
        else:
            x, y = kids
            A = _with_edge(dp[x], tree.plen[x], n)
            B = _with_edge(dp[y], tree.plen[y], n)
            merge(A, B, uv, n, merged, arg)

        table = merged.copy()
        absorb = np.full(size, NONE, dtype=np.int64)
        f = fac_at[v]
        if f is not None:
            cost = instance.open_cost(f) if charge_open_costs else 0
            # suffix minimum of merged[k] over k >= t + r
            best_val, best_k = INF, NONE
            for ti in range(size - 1, -1, -1):
                ki = ti + r
                if ki < size and merged[ki] < best_val:
                    best_val, best_k = merged[ki], ki - n
                if best_val < INF and best_val + cost < table[ti]:
                    table[ti] = best_val + cost
                    absorb[ti] = best_k
        dp[v] = table
        merged_t[v] = merged
        merge_arg[v] = arg
        absorb_from[v] = absorb
    return MinsumTables(instance, n, dp, merged_t, merge_arg, absorb_from, charge_open_costs)


def reconstruct_minsum(tables: MinsumTables) -> Solution:
    """Turn the back-pointers into one concrete assignment.

    Flows are replayed top-down, then users are matched to facility seats
    bottom-up: at each vertex, users arriving from below are paired with
    seats offered below or at the vertex, and the surplus moves on.
    """
    inst = tables.instance
    tree = inst.tree
    n = tables.n
    if tables.optimum >= INF:
        raise CorruptTables("root state is infinite")
    fac_at = {v: f for f, (v, _) in enumerate(inst.facilities)}
    users_by_vertex: dict[int, list[int]] = {}
    for u, v in enumerate(inst.users):
        users_by_vertex.setdefault(v, []).append(u)

    flow = {tree.root: 0}
    absorbed = {}
    for v in tree.preorder:
        t = flow[v]
        k = tables.absorb_from[v][t + n]
        if k != NONE:
            absorbed[v] = int(k) - t
            t = int(k)
        if tables.merged[v][t + n] >= INF:
            raise CorruptTables(f"infinite merged state {t} at vertex {v}")
        kids = tree.children[v]
        if kids:
            kx = tables.merge_arg[v][t + n]
            if kx == NONE:
                raise CorruptTables(f"missing merge pointer at vertex {v}")
            flow[kids[0]] = int(kx)
            flow[kids[1]] = t - len(users_by_vertex.get(v, [])) - int(kx)

    assignment: dict[int, int] = {}
    opened: set[int] = set()
    carried: dict[int, tuple[list[int], list[int]]] = {}
    for v in tree.postorder:
        users = list(users_by_vertex.get(v, []))
        seats: list[int] = []
        for c in tree.children[v]:
            cu, cs = carried.pop(c)
            users += cu
            seats += cs
        if v in absorbed:
            opened.add(fac_at[v])
            seats += [fac_at[v]] * absorbed[v]
        while users and seats:
            assignment[users.pop()] = seats.pop()
        if len(users) - len(seats) != flow[v]:
            raise CorruptTables(f"flow mismatch at vertex {v}")
        carried[v] = (users, seats)
    return Solution(frozenset(opened), assignment)


def solve_minsum(instance: Instance, charge_open_costs: bool = True) -> tuple[Solution, int]:
    """Optimal min-sum solution and its cost (distances plus opening costs).

    With ``charge_open_costs=False`` this is plain min-sum r-gathering.
    """
    instance.require_feasible()
    work = instance if instance.is_binarized() else instance.binarized()[0]
    tables = minsum_tables(work, charge_open_costs)
    if tables.optimum >= INF:
        raise InfeasibleInstance("no feasible solution")
    sol = reconstruct_minsum(tables)
    return sol, int(tables.optimum)
