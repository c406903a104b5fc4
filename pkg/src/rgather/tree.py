"""Weighted rooted trees: construction, distances, binarization, rounding.

Edge lengths are non-negative Python integers. The rounding unit is a
``fractions.Fraction`` so that ``floor(depth / t)`` is evaluated exactly.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Sequence


class TreeError(ValueError):
    """Base class for malformed tree input."""


class CycleDetected(TreeError):
    pass


class Disconnected(TreeError):
    pass


class NegativeLength(TreeError):
    pass


class InvalidVertex(TreeError):
    pass


class NonPositiveUnit(ValueError):
    pass


class WeightedTree:
    """A rooted tree on vertices ``0..n-1`` with integer edge lengths.

    ``parent[v]`` is ``-1`` for the root and ``plen[v]`` is the length of the
    edge from ``v`` to its parent. ``depth[v]`` is the exact root distance.
    Instances are treated as immutable once built.
    """

    def __init__(self, parent: Sequence[int], plen: Sequence[int], root: int):
        n = len(parent)
        self.n = n
        self.root = root
        self.parent = list(parent)
        self.plen = list(plen)
        self.children: list[list[int]] = [[] for _ in range(n)]
        for v in range(n):
            if v != root:
                self.children[self.parent[v]].append(v)

        # preorder with an explicit stack; postorder is its reverse
        order = []
        stack = [root]
        while stack:
            v = stack.pop()
            order.append(v)
            stack.extend(reversed(self.children[v]))
        self.preorder = order
        self.postorder = order[::-1]

        self.depth = [0] * n
        self.level = [0] * n
        for v in order:
            if v != root:
                p = self.parent[v]
                self.depth[v] = self.depth[p] + self.plen[v]
                self.level[v] = self.level[p] + 1

        # binary lifting table for LCA queries
        self._up = [[p if p >= 0 else root for p in self.parent]]
        span = 1
        while span < n:
            prev = self._up[-1]
            self._up.append([prev[prev[v]] for v in range(n)])
            span *= 2

    @property
    def vertex_count(self) -> int:
        return self.n

    @property
    def edges(self) -> list[tuple[int, int, int]]:
        """Edges as ``(parent, child, length)`` in preorder of the child."""
        return [(self.parent[v], v, self.plen[v]) for v in self.preorder if v != self.root]

    def _check(self, v: int) -> None:
        if not (isinstance(v, int) and 0 <= v < self.n):
            raise InvalidVertex(f"vertex {v!r} not in tree of size {self.n}")

    def lca(self, v: int, w: int) -> int:
        self._check(v)
        self._check(w)
        if self.level[v] < self.level[w]:
            v, w = w, v
        diff = self.level[v] - self.level[w]
        k = 0
        while diff:
            if diff & 1:
                v = self._up[k][v]
            diff >>= 1
            k += 1
        if v == w:
            return v
        for k in range(len(self._up) - 1, -1, -1):
            if self._up[k][v] != self._up[k][w]:
                v = self._up[k][v]
                w = self._up[k][w]
        return self.parent[v]

    def dist(self, v: int, w: int) -> int:
        x = self.lca(v, w)
        return self.depth[v] + self.depth[w] - 2 * self.depth[x]

    def path(self, v: int, w: int) -> list[int]:
        """Vertices on the v-w path, both ends included."""
        x = self.lca(v, w)
        up = []
        while v != x:
            up.append(v)
            v = self.parent[v]
        down = []
        while w != x:
            down.append(w)
            w = self.parent[w]
        return up + [x] + down[::-1]

    def subtree_sizes(self, weight: Sequence[int]) -> list[int]:
        """Sum of ``weight`` over each subtree."""
        total = list(weight)
        for v in self.postorder:
            if v != self.root:
                total[self.parent[v]] += total[v]
        return total

    def is_full_binary(self) -> bool:
        return all(len(c) in (0, 2) for c in self.children)

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeightedTree):
            return NotImplemented
        return self.root == other.root and self.parent == other.parent and self.plen == other.plen

    def __hash__(self) -> int:
        return hash((self.root, tuple(self.parent), tuple(self.plen)))

    def __repr__(self) -> str:
        return f"WeightedTree(n={self.n}, root={self.root})"


def build_tree(
    edge_list: Iterable[tuple[int, int, int]],
    root: int = 0,
    n_vertices: int | None = None,
) -> WeightedTree:
    """Orient an undirected edge list away from ``root``.

    Vertices are ``0..n-1``; ``n`` defaults to one more than the largest id
    mentioned. Raises ``CycleDetected``, ``Disconnected``, ``NegativeLength``
    or ``InvalidVertex``.
    """
    edge_list = [tuple(e) for e in edge_list]
    ids = [root] + [x for u, v, _ in edge_list for x in (u, v)]
    for x in ids:
        if not isinstance(x, int) or isinstance(x, bool) or x < 0:
            raise InvalidVertex(f"bad vertex id {x!r}")
    n = n_vertices if n_vertices is not None else max(ids) + 1
    if max(ids) >= n:
        raise InvalidVertex(f"vertex id {max(ids)} exceeds vertex count {n}")

    adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for u, v, length in edge_list:
        if not isinstance(length, int) or isinstance(length, bool):
            raise TypeError(f"edge ({u},{v}) length must be an integer, got {length!r}")
        if length < 0:
            raise NegativeLength(f"edge ({u},{v}) has negative length {length}")
        if u == v:
            raise CycleDetected(f"self-loop at vertex {u}")
        adj[u].append((v, length))
        adj[v].append((u, length))
    if len(edge_list) >= n:
        raise CycleDetected(f"{len(edge_list)} edges on {n} vertices")

    parent = [-2] * n
    plen = [0] * n
    parent[root] = -1
    stack = [root]
    seen = 1
    while stack:
        v = stack.pop()
        skipped_parent = False
        for w, length in adj[v]:
            if w == parent[v] and not skipped_parent:
                skipped_parent = True
                continue
            if parent[w] != -2:
                raise CycleDetected(f"edge ({v},{w}) closes a cycle")
            parent[w] = v
            plen[w] = length
            seen += 1
            stack.append(w)
    if seen != n:
        missing = [v for v in range(n) if parent[v] == -2]
        raise Disconnected(f"vertices {missing[:10]} unreachable from root {root}")
    return WeightedTree(parent, plen, root)


def all_pairs_by_walk(tree: WeightedTree) -> list[list[int]]:
    """All-pairs distances by graph search from every vertex (no LCA)."""
    adj: list[list[tuple[int, int]]] = [[] for _ in range(tree.n)]
    for p, c, length in tree.edges:
        adj[p].append((c, length))
        adj[c].append((p, length))
    out = []
    for s in range(tree.n):
        d = [-1] * tree.n
        d[s] = 0
        stack = [s]
        while stack:
            v = stack.pop()
            for w, length in adj[v]:
                if d[w] < 0:
                    d[w] = d[v] + length
                    stack.append(w)
        out.append(d)
    return out


def binarize(
    tree: WeightedTree, sites: Sequence[tuple[Hashable, int]]
) -> tuple[WeightedTree, dict[Hashable, int]]:
    """Rewrite ``tree`` into a rooted full binary tree.

    ``sites`` lists ``(key, vertex)`` pairs, one per user or facility. A
    vertex holding exactly one site keeps it; a vertex holding several gets a
    zero-length pendant per site. Vertices with more than two attachments are
    expanded into a chain of zero-length edges, and vertices with a single
    attachment get an empty zero-length leaf. Original vertices keep their
    ids, so distances between original vertices are unchanged.

    Returns the new tree and a map from site key to its new vertex.
    """
    at: dict[int, list[Hashable]] = defaultdict(list)
    for key, v in sites:
        tree._check(v)
        at[v].append(key)

    parent = list(tree.parent)
    plen = list(tree.plen)

    def new_vertex(p: int, length: int) -> int:
        parent.append(p)
        plen.append(length)
        return len(parent) - 1

    relocation: dict[Hashable, int] = {}
    for v in range(tree.n):
        keys = at.get(v, [])
        attach = list(tree.children[v])  # existing children, already linked
        if len(keys) == 1:
            relocation[keys[0]] = v
        else:
            for key in keys:
                relocation[key] = new_vertex(v, 0)
                attach.append(relocation[key])
        if len(attach) == 1:
            attach.append(new_vertex(v, 0))
        cur = v
        while len(attach) > 2:
            nxt = new_vertex(cur, 0)
            # keep the first attachment at cur, push the rest one level down
            for c in attach[1:]:
                parent[c] = nxt
            attach = attach[1:]
            cur = nxt
    return WeightedTree(parent, plen, tree.root), relocation


@dataclass(frozen=True)
class RoundedTree:
    """The base tree with every vertex snapped toward the root onto a grid of
    step ``unit_t``; ``tree`` carries the resulting integer edge lengths."""

    base: WeightedTree
    unit_t: Fraction
    tree: WeightedTree

    def rounded_length(self, child: int) -> int:
        return self.tree.plen[child]

    def dist(self, v: int, w: int) -> int:
        return self.tree.dist(v, w)


def round_lengths(tree: WeightedTree, t: Fraction | int) -> RoundedTree:
    t = Fraction(t)
    if t <= 0:
        raise NonPositiveUnit(f"rounding unit must be positive, got {t}")
    snapped = [d // t for d in map(Fraction, tree.depth)]
    plen = [0 if v == tree.root else snapped[v] - snapped[tree.parent[v]] for v in range(tree.n)]
    return RoundedTree(tree, t, WeightedTree(tree.parent, [int(x) for x in plen], tree.root))
