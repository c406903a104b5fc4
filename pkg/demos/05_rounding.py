#!/usr/bin/env python3
"""What the decision oracle sees: distances rounded onto a grid."""

from fractions import Fraction

from rgather.brute import brute_minmax
from rgather.generate import desk_instance
from rgather.ptas import OracleParams, solve_decision
from rgather.tree import build_tree, round_lengths

tree = build_tree([(0, 1, 5), (1, 2, 3), (0, 3, 7)])
for t in (Fraction(1), Fraction(4), Fraction(5, 2)):
    rt = round_lengths(tree, t)
    print(f"t={t}: rounded edge lengths {rt.tree.plen[1:]}")
    for v, w in ((0, 2), (2, 3)):
        d, dr = tree.dist(v, w), rt.dist(v, w) * t
        print(f"  d({v},{w})={d}, rounded back {dr}, within 2t: {abs(d - dr) <= 2 * t}")

# The oracle at threshold b uses t = b*delta/4 and accepts rounded costs up
# to K. Since t moves with b, a YES at one threshold does not promise a YES
# at every larger one.
inst = desk_instance(92)
print("optimum:", brute_minmax(inst).cost)
for b in (20, 23, 26, 27):
    p = OracleParams(b, 1)
    res = solve_decision(inst, b, 1)
    print(f"b={b}: t={p.unit_t}, K={p.K}, answer {'YES' if res.yes else 'NO'}")
