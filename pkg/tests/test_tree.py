import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rgather.tree import (
    CycleDetected,
    Disconnected,
    InvalidVertex,
    NegativeLength,
    NonPositiveUnit,
    all_pairs_by_walk,
    binarize,
    build_tree,
    round_lengths,
)


@st.composite
def trees(draw, max_n=30, max_len=1000):
    n = draw(st.integers(1, max_n))
    parents = [draw(st.integers(0, v - 1)) for v in range(1, n)]
    lengths = draw(st.lists(st.integers(0, max_len), min_size=n - 1, max_size=n - 1))
    edges = [(p, v, l) for v, (p, l) in enumerate(zip(parents, lengths), start=1)]
    root = draw(st.integers(0, n - 1))
    return build_tree(edges, root=root, n_vertices=n)


def test_single_edge():
    t = build_tree([(0, 1, 5)])
    assert t.dist(0, 1) == 5
    assert t.dist(1, 0) == 5


def test_path_sum():
    t = build_tree([(0, 1, 5), (1, 2, 3)])
    assert t.dist(0, 2) == 8
    assert t.path(2, 0) == [2, 1, 0]


def test_parallel_edge_is_a_cycle():
    with pytest.raises(CycleDetected):
        build_tree([(0, 1, 1), (0, 1, 2)])


def test_construction_errors():
    with pytest.raises(CycleDetected):
        build_tree([(0, 1, 1), (1, 2, 1), (2, 0, 1)])
    with pytest.raises(Disconnected):
        build_tree([(0, 1, 1), (2, 3, 1)])
    with pytest.raises(NegativeLength):
        build_tree([(0, 1, -1)])
    with pytest.raises(InvalidVertex):
        build_tree([(0, -1, 1)])
    with pytest.raises(InvalidVertex):
        build_tree([(0, 5, 1)], n_vertices=3)
    with pytest.raises(TypeError):
        build_tree([(0, 1, 1.5)])


def test_single_vertex_tree():
    t = build_tree([], root=0, n_vertices=1)
    assert t.dist(0, 0) == 0
    assert t.children == [[]]


def test_deep_path_does_not_recurse():
    n = 20000
    t = build_tree([(v - 1, v, 1) for v in range(1, n)])
    assert t.dist(0, n - 1) == n - 1
    assert t.lca(n - 1, n // 2) == n // 2


@settings(max_examples=60, deadline=None)
@given(trees())
def test_dist_matches_walk(t):
    ref = all_pairs_by_walk(t)
    for v in range(t.n):
        assert t.dist(v, v) == 0
        for w in range(t.n):
            assert t.dist(v, w) == ref[v][w]


@settings(max_examples=60, deadline=None)
@given(trees(), st.data())
def test_path_length_is_distance(t, data):
    v = data.draw(st.integers(0, t.n - 1))
    w = data.draw(st.integers(0, t.n - 1))
    p = t.path(v, w)
    assert p[0] == v and p[-1] == w
    assert sum(t.dist(a, b) for a, b in zip(p, p[1:])) == t.dist(v, w)


def test_binarize_star():
    star = build_tree([(0, 1, 4), (0, 2, 5), (0, 3, 6)])
    b, reloc = binarize(star, [])
    assert b.is_full_binary()
    assert b.n == 5  # one chain vertex carries the third child
    assert [x for x in range(b.n) if b.plen[x] == 0 and x != b.root] == [4]
    for v in (1, 2, 3):
        for w in (1, 2, 3):
            assert b.dist(v, w) == star.dist(v, w)
    assert reloc == {}


def test_binarize_colocated_sites():
    t = build_tree([(0, 1, 3), (0, 2, 4)])
    sites = [("u0", 1), ("u1", 1), ("f0", 1)]
    b, reloc = binarize(t, sites)
    new = sorted(reloc.values())
    assert len(set(new)) == 3 and all(x >= t.n for x in new)
    assert all(b.dist(x, 1) == 0 for x in new)
    assert b.is_full_binary()


def test_binarize_fixed_point():
    t = build_tree([(0, 1, 3), (0, 2, 4), (1, 3, 1), (1, 4, 2)])
    b, reloc = binarize(t, [("a", 3), ("b", 4), ("c", 2)])
    assert b.parent == t.parent and b.plen == t.plen
    assert reloc == {"a": 3, "b": 4, "c": 2}


@settings(max_examples=60, deadline=None)
@given(trees(max_n=20, max_len=50), st.data())
def test_binarize_preserves_distances(t, data):
    sites = [(i, data.draw(st.integers(0, t.n - 1))) for i in range(data.draw(st.integers(0, 8)))]
    b, reloc = binarize(t, sites)
    assert b.is_full_binary()
    assert b.root == t.root
    for v in range(t.n):
        for w in range(t.n):
            assert b.dist(v, w) == t.dist(v, w)
    for key, v in sites:
        assert b.dist(reloc[key], v) == 0
    # at most one site per vertex afterwards
    assert len(set(reloc.values())) == len(sites)


def test_rounding_direct_floor():
    t = build_tree([(0, 1, 5), (1, 2, 3)])
    rt = round_lengths(t, 4)
    assert rt.tree.plen[1:] == [1, 1]
    assert rt.dist(0, 2) == 2


def test_rounding_collapses_for_large_unit():
    t = build_tree([(0, 1, 5), (1, 2, 3), (0, 3, 7)])
    rt = round_lengths(t, 100)
    assert all(x == 0 for x in rt.tree.plen)


def test_rounding_rejects_non_positive_unit():
    t = build_tree([(0, 1, 5)])
    with pytest.raises(NonPositiveUnit):
        round_lengths(t, 0)
    with pytest.raises(NonPositiveUnit):
        round_lengths(t, Fraction(-1, 2))


@settings(max_examples=80, deadline=None)
@given(trees(max_n=25, max_len=10**6), st.integers(1, 10**6), st.integers(1, 1000))
def test_rounding_sandwich(t, num, den):
    unit = Fraction(num, den)
    rt = round_lengths(t, unit)
    for v in range(t.n):
        for w in range(t.n):
            d = t.dist(v, w)
            dr = rt.dist(v, w) * unit
            assert d - 2 * unit <= dr <= d + 2 * unit


def test_rounding_keeps_topology():
    rng = random.Random(4)
    n = 40
    t = build_tree([(rng.randrange(v), v, rng.randint(0, 99)) for v in range(1, n)])
    rt = round_lengths(t, Fraction(7, 3))
    assert rt.tree.parent == t.parent
    assert all(x >= 0 for x in rt.tree.plen)
