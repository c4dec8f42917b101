import numpy as np
import pytest

from robustsets import (CardinalityRatioObjective, CoverageObjective, GroundSet,
                        LinearObjective, MixedStrategy, ProblemInstance,
                        SubmodularTableObjective, UniformMatroid,
                        expected_values, scenario_value, worst_case_value)
from robustsets.errors import InvalidStrategyError, ModelError
from robustsets.exact import exact_game_solve

from conftest import random_instance


def test_ground_set_unique_and_ordered():
    g = GroundSet(["x", "y", "z"])
    assert len(g) == 3
    assert g.index("y") == 1
    assert g.names({2, 0}) == ["x", "z"]
    with pytest.raises(ModelError):
        GroundSet(["a", "a"])
    with pytest.raises(ModelError):
        g.index("missing")


def test_worst_case_value_intro(intro_instance):
    p = MixedStrategy([({0}, 0.5), ({1}, 0.5)])
    assert worst_case_value(p, intro_instance) == pytest.approx(0.5, abs=1e-12)


def test_worst_case_value_empty_point_mass(intro_instance):
    p = MixedStrategy.point_mass(frozenset())
    assert worst_case_value(p, intro_instance) == 0.0


def test_worst_case_value_matches_exact_solver():
    inst = random_instance(seed=11, max_elements=4, with_tables=False)
    sol = exact_game_solve(inst)
    assert worst_case_value(sol.strategy, inst) == pytest.approx(
        sol.value, abs=1e-9)


def test_worst_case_value_rejects_infeasible_support():
    g = GroundSet(["a", "b"])
    inst = ProblemInstance(g, [LinearObjective([1.0, 1.0])], UniformMatroid(2, 1))
    bad = MixedStrategy.point_mass(frozenset({0, 1}))
    with pytest.raises(InvalidStrategyError):
        worst_case_value(bad, inst)


def test_scenario_value_point_mass_and_mixture(intro_instance):
    X = frozenset({0})
    assert scenario_value(X, [1.0, 0.0], intro_instance) == 1.0
    assert scenario_value(X, [0.0, 1.0], intro_instance) == 0.0
    assert scenario_value(X, [0.5, 0.5], intro_instance) == pytest.approx(0.5)


def test_scenario_value_full_set_uniform_mixture():
    inst = random_instance(seed=5, with_tables=False)
    n, m = inst.n_objectives, inst.n_elements
    E = frozenset(range(m))
    mean = float(np.mean([f.value(E) for f in inst.objectives]))
    assert scenario_value(E, np.full(n, 1.0 / n), inst) == pytest.approx(
        mean, abs=1e-12)


def test_scenario_value_linear_in_q():
    inst = random_instance(seed=23, with_tables=True)
    n = inst.n_objectives
    rng = np.random.default_rng(0)
    X = frozenset({0, 1})
    for _ in range(20):
        q1 = rng.dirichlet(np.ones(n))
        q2 = rng.dirichlet(np.ones(n))
        lam = float(rng.random())
        mix = lam * q1 + (1 - lam) * q2
        lhs = scenario_value(X, mix, inst)
        rhs = lam * scenario_value(X, q1, inst) \
            + (1 - lam) * scenario_value(X, q2, inst)
        assert lhs == pytest.approx(rhs, abs=1e-12)


def test_worst_case_value_lipschitz_in_total_variation():
    inst = random_instance(seed=31, max_elements=5, with_tables=False)
    sets = inst.system.enumerate_independent()
    fmax = max(f.value(X) for f in inst.objectives for X in sets)
    rng = np.random.default_rng(2)
    for _ in range(25):
        w1 = rng.dirichlet(np.ones(len(sets)))
        w2 = rng.dirichlet(np.ones(len(sets)))
        p1 = MixedStrategy(list(zip(sets, w1)))
        p2 = MixedStrategy(list(zip(sets, w2)))
        tv = 0.5 * float(np.abs(w1 - w2).sum())
        gap = abs(worst_case_value(p1, inst) - worst_case_value(p2, inst))
        assert gap <= tv * fmax + 1e-9


def test_objectives_vanish_on_empty_set():
    objectives = [
        LinearObjective([1.0, 2.0, 3.0]),
        CoverageObjective([[0], [1], [0, 1]], [1.0, 2.0]),
        CardinalityRatioObjective(2, 5.0, [3.0, 2.0, 1.0]),
        SubmodularTableObjective([0, 1, 1, 1.5], 2),
    ]
    for f in objectives:
        assert f.value(frozenset()) == 0.0


def test_linear_objective_rejects_negative_weights():
    with pytest.raises(ModelError):
        LinearObjective([1.0, -0.5])


def test_table_objective_rejects_nonsubmodular():
    # f({a}) = f({b}) = 0 but f({a,b}) = 1 violates submodularity.
    with pytest.raises(ModelError):
        SubmodularTableObjective([0.0, 0.0, 0.0, 1.0], 2)


def test_table_objective_rejects_nonzero_empty():
    with pytest.raises(ModelError):
        SubmodularTableObjective([0.5, 1.0, 1.0, 1.0], 2)


def test_table_monotone_flag():
    mono = SubmodularTableObjective([0, 1, 1, 1.5], 2)
    assert mono.monotone and mono.submodular
    cut = SubmodularTableObjective([0, 1, 1, 0], 2)  # graph cut, not monotone
    assert cut.submodular and not cut.monotone


def test_cardinality_ratio_top_k():
    f = CardinalityRatioObjective(2, 4.0, [3.0, 2.0, 1.0])
    assert f.value({0, 1, 2}) == pytest.approx(5.0 / 4.0)
    assert f.value({2}) == pytest.approx(0.25)


def test_mixed_strategy_probability_validation():
    with pytest.raises(InvalidStrategyError):
        MixedStrategy([({0}, 0.5), ({1}, 0.4)])
    with pytest.raises(InvalidStrategyError):
        MixedStrategy([({0}, 1.5), ({1}, -0.5)])
    merged = MixedStrategy([({0}, 0.5), ({0}, 0.25), ({1}, 0.25)])
    assert merged.support_size == 2


def test_expected_values_per_scenario(intro_instance):
    p = MixedStrategy([({0}, 0.75), ({1}, 0.25)])
    vals = expected_values(p, intro_instance)
    assert vals == pytest.approx([0.75, 0.25])
