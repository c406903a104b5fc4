"""Seeded random instances."""

from __future__ import annotations

import random

from rgather.instance import Instance
from rgather.tree import build_tree

SHAPES = ("random_attachment", "path", "star", "caterpillar")


class InvalidParams(ValueError):
    pass


def random_parents(rng: random.Random, n: int, shape: str) -> list[int]:
    """Parent of each vertex ``1..n-1`` (vertex 0 is the root)."""
    if shape == "random_attachment":
        return [rng.randrange(v) for v in range(1, n)]
    if shape == "path":
        return list(range(n - 1))
    if shape == "star":
        return [0] * (n - 1)
    if shape == "caterpillar":
        spine = (n + 1) // 2
        return [v - 1 for v in range(1, spine)] + [rng.randrange(spine) for _ in range(spine, n)]
    raise InvalidParams(f"unknown shape {shape!r}; expected one of {SHAPES}")


def generate(
    seed: int,
    n_vertices: int,
    n_users: int,
    n_facilities: int,
    max_len: int,
    shape: str = "random_attachment",
    r: int = 2,
    max_open_cost: int = 0,
    min_len: int = 1,
) -> Instance:
    """Random instance, deterministic in ``seed``.

    Sites go on distinct vertices while there are enough of them; otherwise
    they are drawn with replacement and colocated sites are split apart when
    the instance is binarized.
    """
    if n_vertices < 1 or n_users < 0 or n_facilities < 0 or r < 1:
        raise InvalidParams("sizes must be non-negative, n_vertices and r positive")
    if not 0 <= min_len <= max_len:
        raise InvalidParams(f"need 0 <= min_len <= max_len, got {min_len}, {max_len}")
    rng = random.Random(seed)
    parents = random_parents(rng, n_vertices, shape)
    edges = [(p, v, rng.randint(min_len, max_len)) for v, p in enumerate(parents, start=1)]
    tree = build_tree(edges, root=0, n_vertices=n_vertices)

    n_sites = n_users + n_facilities
    if n_sites <= n_vertices:
        where = rng.sample(range(n_vertices), n_sites)
    else:
        where = [rng.randrange(n_vertices) for _ in range(n_sites)]
    users = where[:n_users]
    facilities = [(v, rng.randint(0, max_open_cost)) for v in where[n_users:]]
    return Instance(tree, users, facilities, r)


def desk_instance(seed: int, max_users: int = 8, max_facilities: int = 4, max_r: int = 3, max_len: int = 20) -> Instance:
    """Small random instance inside the brute-force envelope."""
    rng = random.Random(seed)
    r = rng.randint(1, max_r)
    n_users = rng.randint(r, max_users)
    n_fac = rng.randint(1, max_facilities)
    n_vertices = rng.randint(2, 12)
    shape = rng.choice(SHAPES)
    return generate(rng.randrange(2**31), n_vertices, n_users, n_fac, max_len, shape=shape, r=r, max_open_cost=10)
