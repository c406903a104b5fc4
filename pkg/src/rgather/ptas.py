"""(1+eps)-approximation for min-max r-gathering on a tree.

The decision oracle snaps vertices onto a grid of step ``t = b*delta/4``
measured from the root, which turns edge lengths into small integers, and
then runs a tree DP whose states are user-count profiles indexed by rounded
distance. A binary search over thresholds drives the oracle.

DP state at vertex ``v`` (all indices are rounded distances):

``P[i]``
    users inside ``T_v`` that are still unassigned and sit at distance ``i``
    from ``v``; they must be served by a facility outside ``T_v``.
``Q[j]``
    promised seats of open facilities inside ``T_v`` that must be filled by
    users from outside ``T_v``. A seat of a facility at distance ``h`` below
    ``v`` is stored at ``j = K - h``, i.e. by the largest distance from ``v``
    at which an outside user may still take it.

Both vectors have length ``K + 1``. Variant counters (ignored users, open
facilities) are appended to the state key.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction

from rgather.instance import InfeasibleInstance, Instance, Solution, Variant, check_feasible, evaluate
from rgather.tree import RoundedTree, round_lengths

Profile = tuple[int, ...]


def shift(profile: Profile, k: int) -> Profile:
    """Move entries ``k`` places right (``k >= 0``) or ``|k|`` places left.

    Entries pushed past either end are discarded.
    """
    n = len(profile)
    if k >= 0:
        return (0,) * min(k, n) + tuple(profile[: max(n - k, 0)])
    k = -k
    return tuple(profile[k:]) + (0,) * min(k, n)


@dataclass(frozen=True)
class OracleParams:
    b: Fraction
    delta: Fraction

    def __post_init__(self):
        object.__setattr__(self, "b", Fraction(self.b))
        object.__setattr__(self, "delta", Fraction(self.delta))
        if self.b <= 0 or self.delta <= 0:
            raise ValueError(f"threshold and slack must be positive, got b={self.b}, delta={self.delta}")

    @property
    def unit_t(self) -> Fraction:
        return self.b * self.delta / 4

    @property
    def K(self) -> int:
        return math.floor((self.b + 2 * self.unit_t) / self.unit_t)


@dataclass
class DecisionTable:
    """Reachable states per vertex with one back-pointer each."""

    instance: Instance
    rounded: RoundedTree
    K: int
    states: list[dict]
    root_key: tuple | None

    @property
    def reachable(self) -> bool:
        return self.root_key is not None

    def state_count(self) -> int:
        return sum(len(s) for s in self.states)


@dataclass(frozen=True)
class Decision:
    yes: bool
    params: OracleParams
    solution: Solution | None = None
    rounded_cost: int | None = None

    def __bool__(self) -> bool:
        return self.yes


def _add(p: Profile, i: int, amount: int = 1) -> Profile:
    return p[:i] + (p[i] + amount,) + p[i + 1 :]


def _enumerate_fates(units, slots_x, slots_y, n_stay_max, can_stay, fac_open, ignore_left, K):
    """All distinct outcomes of routing the users present at a vertex.

    ``units`` lists ``(source, index)`` for each user, where source is
    ``"x"``, ``"y"`` (arrived from that child) or ``"v"`` (sits on the vertex).
    A user may stay unassigned, be absorbed by the facility on the vertex,
    take a seat promised by the *other* child (seat index >= user index), or
    be ignored (only users on the vertex, only with budget left).

    Returns ``{(slots_x, slots_y, P, absorbed, ignored): decisions}``.
    """
    empty = (0,) * (K + 1)
    frontier = {(slots_x, slots_y, empty, 0, 0): ()}
    for src, i in units:
        nxt = {}
        for (sx, sy, p, w1, ign), dec in frontier.items():
            outs = []
            if can_stay(i) and sum(p) < n_stay_max:
                outs.append(((sx, sy, _add(p, i), w1, ign), "s"))
            if fac_open:
                outs.append(((sx, sy, p, w1 + 1, ign), "a"))
            if src != "x":
                for j in range(i, K + 1):
                    if sx[j]:
                        outs.append(((_add(sx, j, -1), sy, p, w1, ign), ("x", j)))
            if src != "y":
                for j in range(i, K + 1):
                    if sy[j]:
                        outs.append(((sx, _add(sy, j, -1), p, w1, ign), ("y", j)))
            if src == "v" and ign < ignore_left:
                outs.append(((sx, sy, p, w1, ign + 1), "i"))
            for key, fate in outs:
                if key not in nxt:
                    nxt[key] = dec + (fate,)
        frontier = nxt
        if not frontier:
            break
    return frontier


def _units(px: Profile, py: Profile, u_v: int):
    units = []
    for src, prof in (("x", px), ("y", py)):
        for i, c in enumerate(prof):
            units.extend([(src, i)] * c)
    units.extend([("v", 0)] * u_v)
    return units


def dp_decision(
    rounded: RoundedTree,
    instance: Instance,
    K: int,
    ignore_budget: int = 0,
    max_open: int | None = None,
) -> DecisionTable:
    """Fill the reachable-state sets bottom-up.

    ``instance`` must live on ``rounded.base`` and be binarized; the DP uses
    the rounded edge lengths only. The root is reachable with empty profiles
    iff some solution has every user within rounded distance ``K`` of its
    facility, every open facility has at least ``r`` users, and the variant
    counters are within budget.
    """
    tree = rounded.tree
    if not instance.is_binarized():
        raise ValueError("dp_decision needs a binarized instance")
    n = instance.n_users
    r = instance.r
    cap = max_open if max_open is not None else instance.n_facilities
    users_at = [0] * tree.n
    for v in instance.users:
        users_at[v] += 1
    fac_at = [None] * tree.n
    for f, (v, _) in enumerate(instance.facilities):
        fac_at[v] = f
    n_in = tree.subtree_sizes(users_at)
    f_in = tree.subtree_sizes([0 if f is None else 1 for f in fac_at])
    zero = (0,) * (K + 1)

    states: list[dict] = [dict() for _ in range(tree.n)]
    for v in tree.postorder:
        is_root = v == tree.root
        up = 0 if is_root else tree.plen[v]
        n_out = n - n_in[v]
        fac_out = instance.n_facilities - f_in[v]
        # an unassigned user must reach a facility above v within K
        if is_root or fac_out == 0:
            can_stay = lambda i: False  # noqa: E731
        else:
            can_stay = lambda i, lim=K - up: i <= lim  # noqa: E731

        kids = tree.children[v]
        if kids:
            x, y = kids
            dx, dy = tree.plen[x], tree.plen[y]
            pairs = ((kx, ky) for kx in states[x] for ky in states[y])
        else:
            x = y = None
            dx = dy = 0
            pairs = iter([(None, None)])

        g = fac_at[v]
        out = states[v]
        for kx, ky in pairs:
            if kx is None:
                px = py = sx = sy = zero
                ign0 = open0 = 0
            else:
                px, sx = shift(kx[0], dx), shift(kx[1], -dx)
                py, sy = shift(ky[0], dy), shift(ky[1], -dy)
                ign0, open0 = kx[2] + ky[2], kx[3] + ky[3]
                if open0 > cap or ign0 > ignore_budget:
                    continue
            units = _units(px, py, users_at[v])
            open_choices = [False]
            if g is not None and open0 < cap:
                open_choices.append(True)
            for fac_open in open_choices:
                frontier = _enumerate_fates(
                    units, sx, sy, n_in[v], can_stay, fac_open, ignore_budget - ign0, K
                )
                for (rx, ry, p, w1, ign), dec in frontier.items():
                    q_base = tuple(a + b for a, b in zip(rx, ry))
                    # seats that can no longer be reached by anyone outside
                    if any(q_base[:up]) or (is_root and any(q_base)):
                        continue
                    free = n_out - sum(q_base)
                    if fac_open:
                        lo = max(0, r - w1)
                        if lo > free:
                            continue
                        w2_range = range(lo, free + 1)
                    else:
                        if w1:
                            continue
                        w2_range = range(0, 1)
                    for w2 in w2_range:
                        q = q_base if not w2 else _add(q_base, K, w2)
                        if w2 and any(q[:up]):
                            break
                        key = (p, q, ign0 + ign, open0 + int(fac_open))
                        if key not in out:
                            out[key] = (kx, ky, fac_open, dec, w2)

    found = None
    for key in states[tree.root]:
        if key[0] == zero and key[1] == zero:
            if found is None or key[2:] < found[2:]:
                found = key
    return DecisionTable(instance, rounded, K, states, found)


def reconstruct(table: DecisionTable) -> Solution:
    """Replay back-pointers into a concrete assignment."""
    if not table.reachable:
        raise ValueError("root state unreachable; nothing to reconstruct")
    tree = table.rounded.tree
    inst = table.instance
    K = table.K
    users_by_vertex: dict[int, list[int]] = {}
    for u, v in enumerate(inst.users):
        users_by_vertex.setdefault(v, []).append(u)
    fac_at = {v: f for f, (v, _) in enumerate(inst.facilities)}

    key_of = {tree.root: table.root_key}
    for v in tree.preorder:
        kids = tree.children[v]
        if kids:
            kx, ky = table.states[v][key_of[v]][:2]
            key_of[kids[0]], key_of[kids[1]] = kx, ky

    pending: dict[int, tuple[list, list]] = {}
    assignment: dict[int, int] = {}
    opened: set[int] = set()
    ignored: set[int] = set()
    for v in tree.postorder:
        _, _, fac_open, decisions, w2 = table.states[v][key_of[v]]
        kids = tree.children[v]
        groups: dict[tuple, list[int]] = {}
        seats = {"x": [], "y": []}
        for name, c in zip(("x", "y"), kids):
            d = tree.plen[c]
            c_users, c_seats = pending.pop(c)
            for uid, i in c_users:
                groups.setdefault((name, i + d), []).append(uid)
            seats[name] = [(f, j - d) for f, j in c_seats]
        units = []
        for name in ("x", "y"):
            units.extend(k for k in sorted(groups) if k[0] == name for _ in groups[k])
        here = users_by_vertex.get(v, [])
        if here:
            groups[("v", 0)] = list(here)
            units.extend([("v", 0)] * len(here))
        if len(units) != len(decisions):
            raise RuntimeError(f"back-pointer mismatch at vertex {v}")

        my_users = []
        for (src, i), fate in zip(units, decisions):
            uid = groups[(src, i)].pop()
            if fate == "s":
                my_users.append((uid, i))
            elif fate == "a":
                assignment[uid] = fac_at[v]
            elif fate == "i":
                ignored.add(uid)
            else:
                side, j = fate
                pos = next(k for k, (_, b) in enumerate(seats[side]) if b == j)
                assignment[uid] = seats[side].pop(pos)[0]
        if fac_open:
            opened.add(fac_at[v])
        my_seats = seats["x"] + seats["y"] + [(fac_at.get(v), K)] * w2
        pending[v] = (my_users, my_seats)
    rest_users, rest_seats = pending.pop(tree.root)
    if rest_users or rest_seats:
        raise RuntimeError("unmatched users or seats at the root")
    return Solution(frozenset(opened), assignment, frozenset(ignored))


def _prepared(instance: Instance) -> Instance:
    return instance if instance.is_binarized() else instance.binarized()[0]


def solve_decision(
    instance: Instance,
    b: Fraction | int,
    delta: Fraction | int,
    ignore_budget: int = 0,
    max_open: int | None = None,
) -> Decision:
    """Approximate feasibility test at threshold ``b``.

    A YES comes with a feasible solution of cost at most ``(1+delta)*b``;
    a NO guarantees the optimum exceeds ``b``.
    """
    instance.require_feasible(assigned_at_least=instance.r + ignore_budget)
    params = OracleParams(Fraction(b), Fraction(delta))
    work = _prepared(instance)
    rounded = round_lengths(work.tree, params.unit_t)
    table = dp_decision(rounded, work, params.K, ignore_budget=ignore_budget, max_open=max_open)
    if not table.reachable:
        return Decision(False, params)
    sol = reconstruct(table)
    rcost = max((rounded.dist(work.users[u], work.facility_vertex(f)) for u, f in sol.assignment.items()), default=0)
    return Decision(True, params, sol, rcost)


def initial_bounds(instance: Instance) -> tuple[int, int]:
    """``lower <= OPT <= upper`` from trivial tree bounds.

    Every user pays at least the distance to its nearest facility, and
    opening only the facility with the smallest worst-case distance is
    feasible once there are at least ``r`` users.
    """
    instance.require_feasible()
    D = instance.distance_matrix()
    lower = max(min(row) for row in D)
    upper = min(max(D[u][f] for u in range(instance.n_users)) for f in range(instance.n_facilities))
    return lower, upper


@dataclass
class SearchTrace:
    """Oracle calls made by a driver, as ``(b, yes)`` pairs."""

    calls: list[tuple[Fraction, bool]]
    final_candidate: int | None = None


def zero_threshold(cands: list[int], delta: Fraction) -> Fraction:
    """Positive stand-in threshold used when the candidate under test is 0."""
    positive = [c for c in cands if c > 0]
    if not positive:
        return Fraction(1)
    # (1+delta)*b stays below the smallest positive candidate
    return Fraction(positive[0]) / (2 * (1 + delta))


def ptas_solve(
    instance: Instance,
    epsilon: Fraction | int,
    ignore_budget: int = 0,
    max_open: int | None = None,
    trace: SearchTrace | None = None,
) -> Solution:
    """Solution with min-max cost at most ``(1+epsilon) * OPT``.

    Binary search over the sorted distinct user-facility distances, which
    contain the optimum, calling the oracle with slack ``epsilon/2``.
    """
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if max_open is not None and max_open < 1:
        raise ValueError("max_open must be at least 1")
    instance.require_feasible(assigned_at_least=instance.r + ignore_budget)
    delta = epsilon / 2
    work = _prepared(instance)
    cands = instance.candidates()
    lower, upper = initial_bounds(instance)
    if ignore_budget:
        lower = 0
    lo = bisect_left(cands, lower) - 1  # OPT > cands[lo]
    hi = cands.index(upper)  # OPT <= cands[hi]
    best: Decision | None = None
    best_at = None

    def ask(i):
        b = cands[i] if cands[i] > 0 else zero_threshold(cands, delta)
        res = solve_decision(work, b, delta, ignore_budget=ignore_budget, max_open=max_open)
        if trace is not None:
            trace.calls.append((Fraction(b), res.yes))
        return res

    while hi - lo > 1:
        mid = (lo + hi) // 2
        res = ask(mid)
        if res.yes:
            hi, best, best_at = mid, res, mid
        else:
            lo = mid
    if best_at != hi:
        best = ask(hi)
        if not best.yes:
            raise RuntimeError(f"oracle rejected threshold {cands[hi]} which bounds the optimum")
    if trace is not None:
        trace.final_candidate = cands[hi]
    return best.solution


def ptas_solve_bisection(
    instance: Instance,
    epsilon: Fraction | int,
    bounds: tuple[Fraction, Fraction] | None = None,
    trace: SearchTrace | None = None,
) -> Solution:
    """Halving search on ``[b1, b2]`` with a stopping gap of ``(epsilon/9) * B``.

    ``bounds`` defaults to :func:`initial_bounds`. With ``bounds = (B/3, B)``
    for a 3-approximate value ``B`` this is the classic loop; in general
    ``B`` is taken as ``3 * b1`` so that ``B/3 <= OPT`` still holds.
    """
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    delta = epsilon / 2
    work = _prepared(instance)
    b1, b2 = map(Fraction, bounds or initial_bounds(instance))
    if trace is None:
        trace = SearchTrace([])

    def ask(b):
        res = solve_decision(work, b, delta)
        trace.calls.append((b, res.yes))
        return res

    if b1 <= 0:
        cands = instance.candidates()
        res = ask(zero_threshold(cands, delta))
        if res.yes:
            return res.solution
        b1 = Fraction(min(c for c in cands if c > 0))
    if b2 < b1:
        b2 = b1
    B = 3 * b1
    while b2 - b1 > epsilon / 9 * B:
        b = (b1 + b2) / 2
        if ask(b).yes:
            b2 = b
        else:
            b1 = b
    res = ask(b2)
    if not res.yes:
        raise RuntimeError(f"oracle rejected upper bracket {b2}")
    return res.solution


def ptas_solve_outliers(instance: Instance, epsilon: Fraction | int, outlier_fraction: Fraction | int) -> Solution:
    """Min-max r-gathering that may leave ``floor(alpha * |U|)`` users unserved."""
    alpha = Fraction(outlier_fraction)
    if not 0 <= alpha < 1:
        raise ValueError("outlier fraction must lie in [0, 1)")
    budget = math.floor(alpha * instance.n_users)
    if instance.n_users - budget < instance.r:
        raise InfeasibleInstance(f"{instance.n_users - budget} served users cannot fill r={instance.r}")
    return ptas_solve(instance, epsilon, ignore_budget=budget)


def ptas_solve_capped(instance: Instance, epsilon: Fraction | int, max_open: int) -> Solution:
    """Min-max r-gathering with at most ``max_open`` open facilities."""
    return ptas_solve(instance, epsilon, max_open=max_open)


def certificate_ok(instance: Instance, decision: Decision, variant: Variant | None = None) -> bool:
    """YES certificates are feasible and within ``(1+delta)*b``."""
    if not decision.yes:
        return True
    if check_feasible(instance, decision.solution, variant):
        return False
    p = decision.params
    return evaluate(instance, decision.solution).minmax_cost <= (1 + p.delta) * p.b
