#!/usr/bin/env python3
"""Exact min-sum r-gathering and lower-bounded facility location."""

import time

from rgather.brute import brute_minsum
from rgather.generate import generate
from rgather.instance import Instance, evaluate
from rgather.minsum import solve_minsum

inst = generate(seed=5, n_vertices=12, n_users=8, n_facilities=4, max_len=20, r=2, max_open_cost=15)
print("facilities (vertex, opening cost):", inst.facilities)

# Opening costs charged: lower-bounded facility location.
sol, value = solve_minsum(inst)
rep = evaluate(inst, sol)
print(f"with opening costs: total {value} = distances {rep.distance_sum} + opening {value - rep.distance_sum}")
print("  brute force agrees:", brute_minsum(inst).cost == value)

# Opening costs ignored: plain min-sum r-gathering usually opens more facilities.
sol, value = solve_minsum(inst, charge_open_costs=False)
print(f"without opening costs: {value}, open {sorted(sol.open_facilities)}")
free = Instance(inst.tree, inst.users, [(v, 0) for v, _ in inst.facilities], inst.r)
print("  brute force agrees:", brute_minsum(free).cost == value)

# The DP is polynomial. Doubling the number of users roughly quadruples the time.
solve_minsum(generate(0, 10, 4, 2, 5))  # compile the inner kernel first
for n_users in (100, 200, 400):
    big = generate(1, 2000, n_users, 50, 100, r=3, max_open_cost=50)
    t0 = time.perf_counter()
    _, value = solve_minsum(big)
    print(f"|V|=2000 |U|={n_users}: cost {value} in {time.perf_counter() - t0:.2f}s")
