#!/usr/bin/env python3
"""Two variants of min-max r-gathering: ignoring a few users, and capping
the number of open facilities."""

from fractions import Fraction

from rgather.brute import brute_variants
from rgather.instance import Instance, Variant, check_feasible, evaluate
from rgather.ptas import ptas_solve_capped, ptas_solve_outliers
from rgather.tree import build_tree

# One remote user hangs off a long edge.
tree = build_tree([(0, 1, 1), (0, 2, 2), (0, 3, 1), (3, 4, 2), (0, 5, 90)])
inst = Instance(tree, users=[1, 2, 3, 4, 5], facilities=[(0, 0), (3, 0)], r=2)

for alpha in (Fraction(0), Fraction(1, 5)):
    sol = ptas_solve_outliers(inst, Fraction(1, 2), alpha)
    budget = int(alpha * inst.n_users)
    print(f"alpha={alpha}: ignored {sorted(sol.ignored_users)}, cost {evaluate(inst, sol).minmax_cost}, "
          f"optimum {brute_variants(inst, ignore_budget=budget).cost}")
    assert not check_feasible(inst, sol, Variant.outliers(budget))

# Capping the number of open facilities.
for k in (1, 2):
    sol = ptas_solve_capped(inst, Fraction(1, 2), k)
    print(f"k={k}: open {sorted(sol.open_facilities)}, cost {evaluate(inst, sol).minmax_cost}, "
          f"optimum {brute_variants(inst, max_open=k).cost}")
    assert not check_feasible(inst, sol, Variant.facility_cap(k))
