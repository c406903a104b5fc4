#!/usr/bin/env python3
"""r-gathering when every user must go to its nearest open facility."""

from rgather.brute import brute_minmax, proximity_brute_reference
from rgather.instance import Instance, Variant, check_feasible, evaluate
from rgather.proximity import solve_proximity
from rgather.tree import build_tree

# A path 0-1-2-3-4 with facilities on both ends and in the middle.
tree = build_tree([(0, 1, 3), (1, 2, 3), (2, 3, 3), (3, 4, 3)])
inst = Instance(tree, users=[0, 1, 1, 3, 3, 4], facilities=[(0, 0), (2, 0), (4, 0)], r=3)

for objective in ("minmax", "minsum"):
    sol, value = solve_proximity(inst, objective)
    ref = proximity_brute_reference(inst, objective).cost
    print(f"{objective}: cost {value} (brute force {ref}), open {sorted(sol.open_facilities)}")
    print("  nearest-facility check:", check_feasible(inst, sol, Variant.proximity()) or "ok")

# Without the nearest rule the min-max optimum can be lower: users may skip
# a closer open facility to fill up a farther one.
print("unrestricted min-max optimum:", brute_minmax(inst).cost)

# Ties between equidistant facilities go to the smaller facility id.
sol, _ = solve_proximity(inst, "minmax")
print("assignment:", {u: f for u, f in sorted(sol.assignment.items())})
print("max distance:", evaluate(inst, sol).minmax_cost)
