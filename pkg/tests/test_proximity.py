import pytest

from _support import shared_vertex_conflicts, single_facility, two_ends_path
from rgather.brute import brute_minmax, brute_minsum, proximity_brute_reference
from rgather.generate import desk_instance
from rgather.instance import InfeasibleInstance, Instance, Variant, check_feasible
from rgather.proximity import solve_proximity
from rgather.tree import build_tree


def test_single_facility():
    inst = single_facility()
    assert solve_proximity(inst, "minmax")[1] == 3
    assert solve_proximity(inst, "minsum")[1] == 6
    assert proximity_brute_reference(inst, "minmax").cost == 3


def test_too_few_users():
    inst = single_facility(r=4)
    with pytest.raises(InfeasibleInstance):
        solve_proximity(inst)
    with pytest.raises(InfeasibleInstance):
        proximity_brute_reference(inst)


def test_two_ends_path():
    inst = two_ends_path()
    sol, value = solve_proximity(inst, "minmax")
    assert value == 1
    assert sol.open_facilities == {0, 1}
    assert check_feasible(inst, sol, Variant.proximity()) == []
    assert proximity_brute_reference(inst, "minmax").cost == 1


def test_never_below_unrestricted_optimum():
    for seed in range(40):
        inst = desk_instance(seed)
        assert solve_proximity(inst, "minmax")[1] >= brute_minmax(inst).cost
        free = Instance(inst.tree, inst.users, [(v, 0) for v, _ in inst.facilities], inst.r)
        assert solve_proximity(inst, "minsum")[1] >= brute_minsum(free).cost


def test_tie_goes_to_smaller_id():
    # one user exactly between two facilities
    tree = build_tree([(0, 1, 4), (0, 2, 4)])
    inst = Instance(tree, [0, 1, 2], [(2, 0), (1, 0)], 1)
    sol, value = solve_proximity(inst, "minsum")
    assert sol.assignment[0] == 0
    assert value == proximity_brute_reference(inst, "minsum").cost
    assert check_feasible(inst, sol, Variant.proximity()) == []


def test_unknown_objective():
    with pytest.raises(ValueError):
        solve_proximity(single_facility(), "median")


@pytest.mark.parametrize("seed", range(80))
@pytest.mark.parametrize("objective", ["minmax", "minsum"])
def test_exact_against_reference(seed, objective):
    inst = desk_instance(seed, max_users=10, max_facilities=6)
    try:
        ref = proximity_brute_reference(inst, objective).cost
    except InfeasibleInstance:
        ref = None
    if ref is None:
        with pytest.raises(InfeasibleInstance):
            solve_proximity(inst, objective)
        return
    sol, value = solve_proximity(inst, objective)
    assert value == ref
    assert check_feasible(inst, sol, Variant.proximity()) == []
    assert shared_vertex_conflicts(inst, sol) == []
