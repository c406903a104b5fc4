from fractions import Fraction

import pytest

from _support import single_facility, two_ends_path
from rgather.brute import brute_minmax, brute_variants
from rgather.generate import desk_instance
from rgather.instance import InfeasibleInstance, Instance, Variant, check_feasible, evaluate
from rgather.ptas import (
    OracleParams,
    SearchTrace,
    certificate_ok,
    dp_decision,
    initial_bounds,
    ptas_solve,
    ptas_solve_bisection,
    ptas_solve_capped,
    ptas_solve_outliers,
    reconstruct,
    shift,
    solve_decision,
)
from rgather.tree import build_tree, round_lengths

HALF = Fraction(1, 2)


def cost(inst, sol):
    return evaluate(inst, sol).minmax_cost


def test_shift():
    assert shift((1, 2, 0), 1) == (0, 1, 2)
    assert shift((1, 2, 3), -1) == (2, 3, 0)
    assert shift((0, 0, 5), 1) == (0, 0, 0)
    assert shift((1, 2, 3), 0) == (1, 2, 3)
    assert shift((1, 2, 3), 7) == (0, 0, 0)
    assert shift((1, 2, 3), -7) == (0, 0, 0)


@pytest.mark.parametrize("delta,K", [(1, 6), (HALF, 10), (Fraction(1, 3), 14), (Fraction(2, 5), 12), (3, 3)])
def test_profile_length(delta, K):
    assert OracleParams(7, delta).K == K
    assert OracleParams(7, delta).unit_t == Fraction(7) * Fraction(delta) / 4


def test_oracle_params_reject_non_positive():
    with pytest.raises(ValueError):
        OracleParams(0, 1)
    with pytest.raises(ValueError):
        OracleParams(1, 0)


def test_decision_single_facility():
    inst = single_facility()
    yes = solve_decision(inst, 3, HALF)
    assert yes.yes
    assert check_feasible(inst, yes.solution) == []
    assert cost(inst, yes.solution) == 3
    no = solve_decision(inst, 1, HALF)
    assert not no.yes and no.solution is None


def _pair_instance():
    # facility -- (1) -- user
    tree = build_tree([(0, 1, 1)])
    return Instance(tree, [1], [(0, 0)], 1).binarized()[0]


def test_dp_single_pair():
    work = _pair_instance()
    rounded = round_lengths(work.tree, 1)
    assert rounded.dist(work.users[0], work.facility_vertex(0)) == 1
    table = dp_decision(rounded, work, 1)
    assert table.reachable
    assert table.root_key[:2] == ((0, 0), (0, 0))
    assert not dp_decision(rounded, work, 0).reachable


def test_dp_without_facilities():
    tree = build_tree([(0, 1, 1), (0, 2, 1)])
    work = Instance(tree, [1, 2], [], 1)
    table = dp_decision(round_lengths(tree, 1), work, 4)
    assert not table.reachable
    # no facility means nothing is ever opened or promised
    assert all(key[1] == (0,) * 5 and key[3] == 0 for states in table.states for key in states)


def test_dp_needs_binarized_input():
    inst = single_facility()
    with pytest.raises(ValueError):
        dp_decision(round_lengths(inst.tree, 1), inst, 3)


@pytest.mark.parametrize("seed", range(25))
def test_dp_reachability_equals_rounded_brute_force(seed):
    inst = desk_instance(seed, max_users=6)
    work = inst.binarized()[0]
    for b, delta in ((Fraction(5), 1), (Fraction(12), HALF), (Fraction(3, 2), 1)):
        p = OracleParams(b, delta)
        rounded = round_lengths(work.tree, p.unit_t)
        on_grid = work.with_tree(rounded.tree)
        ropt = brute_minmax(on_grid).cost
        table = dp_decision(rounded, work, p.K)
        assert table.reachable == (ropt <= p.K), (seed, b, delta, ropt, p.K)
        if table.reachable:
            sol = reconstruct(table)
            assert check_feasible(work, sol) == []
            assert cost(on_grid, sol) <= p.K


@pytest.mark.parametrize("seed", range(15))
def test_dp_variant_counters_against_brute_force(seed):
    inst = desk_instance(seed, max_users=6)
    work = inst.binarized()[0]
    p = OracleParams(Fraction(9), HALF)
    rounded = round_lengths(work.tree, p.unit_t)
    on_grid = work.with_tree(rounded.tree)
    for k in (1, 2):
        ropt = brute_variants(on_grid, max_open=k).cost
        table = dp_decision(rounded, work, p.K, max_open=k)
        assert table.reachable == (ropt <= p.K)
        if table.reachable:
            assert check_feasible(work, reconstruct(table), Variant.facility_cap(k)) == []
    budget = 1
    if inst.n_users - budget >= inst.r:
        ropt = brute_variants(on_grid, ignore_budget=budget).cost
        table = dp_decision(rounded, work, p.K, ignore_budget=budget)
        assert table.reachable == (ropt <= p.K)
        if table.reachable:
            assert check_feasible(work, reconstruct(table), Variant.outliers(budget)) == []


@pytest.mark.parametrize("seed", range(20))
def test_oracle_contract(seed):
    inst = desk_instance(seed)
    opt = brute_minmax(inst).cost
    for delta in (1, HALF):
        for b in [c for c in inst.candidates() if c > 0] + [Fraction(opt, 3) + 1]:
            res = solve_decision(inst, b, delta)
            if res.yes:
                assert certificate_ok(inst, res)
                assert res.rounded_cost <= res.params.K
            else:
                assert opt > b


def test_oracle_can_flip_back_to_no():
    # rounding depends on b, so YES at one threshold does not imply YES at a larger one
    inst = desk_instance(92)
    assert brute_minmax(inst).cost == 35
    assert solve_decision(inst, 23, 1).yes
    assert not solve_decision(inst, 26, 1).yes
    p = OracleParams(26, 1)
    on_grid = inst.binarized()[0]
    on_grid = on_grid.with_tree(round_lengths(on_grid.tree, p.unit_t).tree)
    assert brute_minmax(on_grid).cost > p.K


def test_initial_bounds_single_facility():
    assert initial_bounds(single_facility()) == (3, 3)


@pytest.mark.parametrize("seed", range(30))
def test_initial_bounds_bracket(seed):
    inst = desk_instance(seed)
    lo, hi = initial_bounds(inst)
    assert lo <= brute_minmax(inst).cost <= hi


def test_ptas_single_facility():
    inst = single_facility()
    sol = ptas_solve(inst, 1)
    assert check_feasible(inst, sol) == []
    assert cost(inst, sol) == 3


def test_ptas_two_ends_path():
    inst = two_ends_path()
    assert brute_minmax(inst).cost == 1
    sol = ptas_solve(inst, HALF)
    assert check_feasible(inst, sol) == []
    assert cost(inst, sol) <= Fraction(3, 2)


def test_ptas_zero_optimum_uses_shrunken_threshold():
    tree = build_tree([(0, 1, 4), (1, 2, 6)])
    inst = Instance(tree, [0, 0, 2], [(0, 0), (2, 0)], 1)
    trace = SearchTrace([])
    sol = ptas_solve(inst, 1, trace=trace)
    assert cost(inst, sol) == 0
    # smallest positive candidate is 10 and delta = 1/2
    assert trace.calls[0][0] == Fraction(10, 3)
    assert trace.final_candidate == 0


def test_ptas_all_zero_lengths():
    tree = build_tree([(0, 1, 0), (1, 2, 0), (0, 3, 0)])
    inst = Instance(tree, [1, 2, 3], [(0, 0), (3, 0)], 2)
    assert cost(inst, ptas_solve(inst, 1)) == 0
    assert cost(inst, ptas_solve_bisection(inst, 1)) == 0


@pytest.mark.parametrize("seed", range(40))
def test_ptas_guarantee(seed):
    inst = desk_instance(seed)
    opt = brute_minmax(inst).cost
    for eps in (1, HALF):
        trace = SearchTrace([])
        sol = ptas_solve(inst, eps, trace=trace)
        assert check_feasible(inst, sol) == []
        assert cost(inst, sol) <= (1 + Fraction(eps)) * opt
        assert trace.final_candidate <= opt


@pytest.mark.parametrize("seed", range(20))
def test_bisection_driver(seed):
    inst = desk_instance(seed)
    opt = brute_minmax(inst).cost
    for eps in (1, HALF):
        sol = ptas_solve_bisection(inst, eps)
        assert check_feasible(inst, sol) == []
        assert cost(inst, sol) <= (1 + Fraction(eps)) * opt


def test_bisection_with_three_approximate_bracket():
    inst = two_ends_path()
    trace = SearchTrace([])
    sol = ptas_solve_bisection(inst, 1, bounds=(1, 3), trace=trace)
    assert cost(inst, sol) <= 2
    assert trace.calls


def test_outliers_drop_the_far_user():
    tree = build_tree([(0, 1, 1), (0, 2, 1), (0, 3, 100)])
    inst = Instance(tree, [1, 2, 3], [(0, 0)], 2)
    assert brute_minmax(inst).cost == 100
    sol = ptas_solve_outliers(inst, HALF, Fraction(1, 3))
    assert sol.ignored_users == {2}
    assert check_feasible(inst, sol, Variant.outliers(1)) == []
    assert cost(inst, sol) == 1


def test_outliers_zero_fraction_is_plain():
    for seed in range(10):
        inst = desk_instance(seed)
        assert ptas_solve_outliers(inst, 1, 0) == ptas_solve(inst, 1)


def test_outliers_argument_checks():
    inst = single_facility()
    with pytest.raises(ValueError):
        ptas_solve_outliers(inst, 1, 1)
    with pytest.raises(InfeasibleInstance):
        ptas_solve_outliers(inst, 1, Fraction(1, 2))


@pytest.mark.parametrize("seed", range(25))
def test_outliers_guarantee(seed):
    inst = desk_instance(seed)
    for alpha in (Fraction(1, 4), Fraction(1, 2)):
        budget = int(alpha * inst.n_users)
        if inst.n_users - budget < inst.r:
            continue
        ref = brute_variants(inst, ignore_budget=budget).cost
        sol = ptas_solve_outliers(inst, HALF, alpha)
        assert check_feasible(inst, sol, Variant.outliers(budget)) == []
        assert cost(inst, sol) <= Fraction(3, 2) * ref


@pytest.mark.parametrize("seed", range(25))
def test_capped_guarantee(seed):
    inst = desk_instance(seed)
    closed_form = min(max(inst.d(u, f) for u in range(inst.n_users)) for f in range(inst.n_facilities))
    sol = ptas_solve_capped(inst, HALF, 1)
    assert check_feasible(inst, sol, Variant.facility_cap(1)) == []
    assert cost(inst, sol) <= Fraction(3, 2) * closed_form
    ref = brute_variants(inst, max_open=2).cost
    sol = ptas_solve_capped(inst, HALF, 2)
    assert check_feasible(inst, sol, Variant.facility_cap(2)) == []
    assert cost(inst, sol) <= Fraction(3, 2) * ref


def test_loose_cap_is_plain():
    for seed in range(10):
        inst = desk_instance(seed)
        assert ptas_solve_capped(inst, 1, inst.n_facilities) == ptas_solve(inst, 1)


def test_argument_checks():
    inst = single_facility()
    with pytest.raises(ValueError):
        ptas_solve(inst, 0)
    with pytest.raises(ValueError):
        ptas_solve_capped(inst, 1, 0)
    with pytest.raises(ValueError):
        ptas_solve_bisection(inst, -1)
    with pytest.raises(InfeasibleInstance):
        ptas_solve(Instance(inst.tree, [1], [(0, 0)], 2), 1)
