"""Adversarial edge cases across modules."""
import numpy as np
import pytest

from robustsets import (GroundSet, IntersectionSystem, LinearObjective,
                        PartitionMatroid, ProblemInstance, StPathSystem,
                        UniformMatroid, worst_case_value)
from robustsets.exact import exact_game_solve
from robustsets.lpscheme import (FractionalPoint, decompose,
                                 robust_shortest_path, solve_lp_scheme)
from robustsets.lpsolver import LinearProgram, solve_lp
from robustsets.mwu import mwu_solve
from robustsets.subroutines import BruteForceSubroutine

from conftest import random_instance


def test_lp_negative_rhs_row():
    # -x <= -2 states x >= 2; the row flip must keep duals consistent.
    lp = LinearProgram(np.array([1.0]), maximize=False)
    lp.add_row([-1.0], "<=", -2.0)
    res = solve_lp(lp)
    assert res.status == "optimal"
    assert res.x[0] == pytest.approx(2.0)
    assert res.value == pytest.approx(2.0)
    assert float(res.duals @ np.array([-2.0])) == pytest.approx(2.0)


def test_lp_redundant_equality_rows():
    lp = LinearProgram(np.array([1.0, 1.0]))
    lp.add_row([1.0, 1.0], "==", 1.0)
    lp.add_row([2.0, 2.0], "==", 2.0)  # dependent row
    res = solve_lp(lp)
    assert res.status == "optimal"
    assert res.value == pytest.approx(1.0)


def test_decompose_fractional_matching():
    # Perfect fractional matching on K_{2,2}: half on each of 4 edges.
    left = PartitionMatroid(4, [((0, 1), 1), ((2, 3), 1)])
    right = PartitionMatroid(4, [((0, 2), 1), ((1, 3), 1)])
    matching = IntersectionSystem([left, right])
    x = np.array([0.5, 0.5, 0.5, 0.5])
    p = decompose(FractionalPoint(x), matching)
    assert np.abs(p.element_marginals(4) - x).max() <= 1e-7
    for X, _ in p.atoms:
        assert matching.is_independent(X)


def test_lp_scheme_on_two_intersection_matches_exact():
    rng = np.random.default_rng(9)
    left = PartitionMatroid(4, [((0, 1), 1), ((2, 3), 1)])
    right = PartitionMatroid(4, [((0, 2), 1), ((1, 3), 1)])
    matching = IntersectionSystem([left, right])
    g = GroundSet(["ll", "lr", "rl", "rr"])
    objs = [LinearObjective(rng.uniform(0.1, 1.0, 4)) for _ in range(3)]
    inst = ProblemInstance(g, objs, matching)
    value, point = solve_lp_scheme(inst)
    assert value == pytest.approx(exact_game_solve(inst).value, abs=1e-6)
    p = decompose(point, matching)
    assert worst_case_value(p, inst) == pytest.approx(value, abs=1e-6)


def test_path_game_graph_with_cycle():
    # 0 -> 1 -> 2 plus the back arc 2 -> 1 and shortcut 0 -> 2.
    sys_ = StPathSystem(3, [(0, 1), (1, 2), (2, 1), (0, 2)], 0, 2)
    L = np.array([[1.0, 1.0, 0.1, 3.0],
                  [1.5, 1.5, 0.1, 2.0]])
    value, strategy = robust_shortest_path(sys_, L)
    for P, _ in strategy.atoms:
        assert sys_.is_independent(P)
        assert 2 not in P  # the cycle arc never helps: lengths are positive
    expected = max(sum(p * sum(L[k][a] for a in P)
                       for P, p in strategy.atoms) for k in range(2))
    assert expected <= value + 1e-6


def test_exact_maximal_reduction_matches_full_enumeration():
    # The maximal-sets-only game LP must equal the all-sets game LP when
    # every objective is monotone.
    from robustsets.lpsolver import LinearProgram as LP

    for seed in (0, 5, 9, 14):
        inst = random_instance(seed + 700, max_elements=6, max_scenarios=3)
        sol = exact_game_solve(inst)
        sets = inst.system.enumerate_independent()
        F = np.array([[f.value(X) for X in sets] for f in inst.objectives])
        lp = LP(np.concatenate([[1.0], np.zeros(len(sets))]),
                bounds=[(None, None)] + [(0.0, None)] * len(sets))
        for k in range(inst.n_objectives):
            lp.add_row(np.concatenate([[1.0], -F[k]]), "<=", 0.0)
        lp.add_row(np.concatenate([[0.0], np.ones(len(sets))]), "==", 1.0)
        res = solve_lp(lp)
        assert sol.value == pytest.approx(res.value, abs=1e-7)


def test_uniform_rank_zero_only_empty():
    sys_ = UniformMatroid(3, 0)
    assert sys_.is_independent(frozenset())
    assert not sys_.is_independent({0})
    hit = sys_.separate(np.array([0.1, 0.0, 0.0]))
    assert hit is not None and hit[1] == 0


def test_mwu_on_all_zero_scenario_rejected():
    g = GroundSet(["a"])
    inst = ProblemInstance(
        g, [LinearObjective([1.0]), LinearObjective([0.0])],
        UniformMatroid(1, 1))
    from robustsets.errors import PositivityError
    with pytest.raises(PositivityError):
        mwu_solve(inst, BruteForceSubroutine(), epsilon=0.3)
