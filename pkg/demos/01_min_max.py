#!/usr/bin/env python3
"""Min-max r-gathering on a small tree, solved approximately and exactly."""

from fractions import Fraction

from rgather.brute import brute_minmax
from rgather.instance import Instance, check_feasible, evaluate
from rgather.ptas import SearchTrace, ptas_solve
from rgather.tree import build_tree

# Two clusters of users joined by a long edge. Each cluster has a facility.
tree = build_tree([
    (0, 1, 2), (0, 2, 3), (0, 3, 40),
    (3, 4, 1), (3, 5, 4), (3, 6, 2),
])
users = [1, 2, 0, 4, 5, 6]
facilities = [(0, 0), (3, 0)]
inst = Instance(tree, users, facilities, r=3)

print("candidate thresholds:", inst.candidates())

# The approximation scheme binary-searches the candidates and asks the
# decision oracle at each one. The trace shows which thresholds it tried.
trace = SearchTrace([])
sol = ptas_solve(inst, Fraction(1, 2), trace=trace)
for b, yes in trace.calls:
    print(f"  oracle at b={b}: {'YES' if yes else 'NO'}")
print("open facilities:", sorted(sol.open_facilities))
print("assignment:", sol.assignment)
print("violations:", check_feasible(inst, sol) or "none")
print("approximate cost:", evaluate(inst, sol).minmax_cost)

# The exhaustive solver confirms the optimum on an instance this small.
print("optimum:", brute_minmax(inst).cost)

# With r=4 neither cluster can stand alone, so everybody crosses the long edge.
merged = Instance(tree, users, facilities, r=4)
sol = ptas_solve(merged, 1)
print("r=4 cost:", evaluate(merged, sol).minmax_cost, "optimum:", brute_minmax(merged).cost)
