import numpy as np
import pytest

from robustsets import (CardinalityRatioObjective, GroundSet,
                        IntersectionSystem, KnapsackSystem, LinearObjective,
                        PartitionMatroid, ProblemInstance, UniformMatroid)
from robustsets.errors import ModelError
from robustsets.exact import _exact_top_k_optima
from robustsets.reductions import reduce_linear
from robustsets.subroutines import (brute_force_best_response,
                                    cardinality_dp_best_response,
                                    greedy_best_response, knapsack_fptas,
                                    mixture_value, v_le_k_fptas)

from conftest import random_coverage_table, random_matroid


def brute_max(q, objectives, system):
    return max(mixture_value(q, objectives, X)
               for X in system.enumerate_independent())


# ---------------------------------------------------------------- brute force

def test_brute_force_point_mass_maximizes_single_objective():
    sys_ = UniformMatroid(3, 2)
    objs = [LinearObjective([1.0, 2.0, 3.0]), LinearObjective([9.0, 0.0, 0.0])]
    br = brute_force_best_response([0.0, 1.0], objs, sys_)
    assert br.chosen == frozenset({0}) and br.value == 9.0


def test_brute_force_intro_symmetric(intro_instance):
    br = brute_force_best_response([0.5, 0.5], intro_instance.objectives,
                                   intro_instance.system)
    assert br.value == pytest.approx(0.5)
    assert br.chosen in (frozenset({0}), frozenset({1}))


def test_brute_force_dominates_every_candidate():
    rng = np.random.default_rng(6)
    sys_ = KnapsackSystem(rng.integers(1, 5, size=6), 8)
    objs = [LinearObjective(rng.uniform(0, 1, 6)) for _ in range(3)]
    q = rng.dirichlet(np.ones(3))
    br = brute_force_best_response(q, objs, sys_)
    for X in sys_.enumerate_independent():
        assert br.value >= mixture_value(q, objs, X) - 1e-12


# -------------------------------------------------------------------- greedy

def test_greedy_linear_uniform_exact():
    br = greedy_best_response([1.0], [LinearObjective([3.0, 2.0, 1.0])],
                              UniformMatroid(3, 2))
    assert br.chosen == frozenset({0, 1})
    assert br.value == 5.0 and br.alpha == 1.0


def test_greedy_partition_per_block():
    sys_ = PartitionMatroid(3, [((0, 1), 1), ((2,), 1)])
    br = greedy_best_response([1.0], [LinearObjective([3.0, 2.0, 1.0])], sys_)
    assert br.chosen == frozenset({0, 2}) and br.value == 4.0


def test_greedy_two_intersection_half_guarantee():
    rng = np.random.default_rng(15)
    for _ in range(10):
        m1, m2 = random_matroid(rng, 6), random_matroid(rng, 6)
        inter = IntersectionSystem([m1, m2])
        objs = [LinearObjective(rng.uniform(0, 1, 6)) for _ in range(2)]
        q = rng.dirichlet(np.ones(2))
        br = greedy_best_response(q, objs, inter)
        assert br.alpha == 0.5
        assert br.value >= 0.5 * brute_max(q, objs, inter) - 1e-9


def test_greedy_monotone_submodular_guarantee():
    rng = np.random.default_rng(77)
    for _ in range(6):
        sys_ = random_matroid(rng, 6)
        objs = [random_coverage_table(rng, 6) for _ in range(2)]
        q = rng.dirichlet(np.ones(2))
        br = greedy_best_response(q, objs, sys_)
        assert br.alpha == 0.5  # 1/(mu+1) with mu = 1
        assert br.value >= br.alpha * brute_max(q, objs, sys_) - 1e-9


def test_greedy_rejects_non_monotone():
    from conftest import random_cut_table
    cut = random_cut_table(np.random.default_rng(3), 4)
    with pytest.raises(ModelError):
        greedy_best_response([1.0], [cut], UniformMatroid(4, 2))


# ------------------------------------------------------------ knapsack fptas

def test_knapsack_fptas_near_optimal():
    sys_ = KnapsackSystem([5, 4, 3], 7)
    objs = [LinearObjective([5.0, 4.0, 3.0])]
    br = knapsack_fptas([1.0], objs, sys_, eps=0.1)
    assert br.value >= 0.9 * 7.0
    assert sys_.is_independent(br.chosen)


def test_knapsack_fptas_nothing_fits():
    sys_ = KnapsackSystem([5, 6], 4)
    br = knapsack_fptas([1.0], [LinearObjective([1.0, 1.0])], sys_, eps=0.2)
    assert br.chosen == frozenset() and br.value == 0.0


def test_knapsack_fptas_unconstrained_takes_everything():
    sys_ = KnapsackSystem([1, 1, 1], 10)
    br = knapsack_fptas([1.0], [LinearObjective([2.0, 1.0, 0.5])], sys_, eps=0.3)
    assert br.chosen == frozenset({0, 1, 2})


def test_knapsack_fptas_eps_validation():
    sys_ = KnapsackSystem([1], 1)
    with pytest.raises(ModelError):
        knapsack_fptas([1.0], [LinearObjective([1.0])], sys_, eps=1.5)


def test_knapsack_fptas_tiny_eps_is_exact_on_integer_profits():
    rng = np.random.default_rng(41)
    for _ in range(15):
        m = int(rng.integers(2, 8))
        sys_ = KnapsackSystem(rng.integers(1, 9, size=m),
                              int(rng.integers(3, 18)))
        objs = [LinearObjective(rng.integers(0, 12, size=m).astype(float))]
        br = knapsack_fptas([1.0], objs, sys_, eps=0.01)
        assert br.value == pytest.approx(brute_max([1.0], objs, sys_),
                                         abs=1e-9)


def test_knapsack_fptas_guarantee_random():
    rng = np.random.default_rng(9)
    for _ in range(20):
        m = int(rng.integers(3, 8))
        sys_ = KnapsackSystem(rng.integers(1, 9, size=m),
                              int(rng.integers(4, 20)))
        objs = [LinearObjective(rng.uniform(0, 2, m)) for _ in range(2)]
        red = [reduce_linear(f, float(rng.uniform(1, 5))) for f in objs]
        q = rng.dirichlet(np.ones(2))
        eps = float(rng.uniform(0.05, 0.5))
        br = knapsack_fptas(q, red, sys_, eps)
        assert br.value >= (1 - eps) * brute_max(q, red, sys_) - 1e-9


# ----------------------------------------------------------------- top-k dp

def test_v_le_k_unconstrained_exact():
    sys_ = KnapsackSystem([1, 1, 1], 10)
    est = v_le_k_fptas(sys_, [5.0, 4.0, 3.0], k=5, eps=0.2)
    assert est == pytest.approx(12.0, abs=1e-9)


def test_v_le_k_single_item():
    sys_ = KnapsackSystem([5, 3, 4], 4)
    true = 4.0  # heaviest item that fits is element 1 (v=4? sizes 5,3,4)
    est = v_le_k_fptas(sys_, [9.0, 4.0, 2.0], k=1, eps=0.25)
    assert true <= est <= true / 0.75 + 1e-9


def brute_top_k(system, values, k):
    best = 0.0
    for X in system.enumerate_independent():
        chosen = sorted((values[e] for e in X), reverse=True)[:k]
        best = max(best, sum(chosen))
    return best


def test_v_le_k_sandwich_random():
    rng = np.random.default_rng(19)
    for _ in range(25):
        m = int(rng.integers(3, 9))
        sys_ = KnapsackSystem(rng.integers(1, 9, size=m),
                              int(rng.integers(4, 25)))
        values = rng.uniform(0.2, 3.0, size=m)
        k = int(rng.integers(1, m + 1))
        eps = float(rng.uniform(0.1, 0.4))
        true = brute_top_k(sys_, values, k)
        est = v_le_k_fptas(sys_, values, k, eps)
        assert true - 1e-9 <= est <= true / (1 - eps) + 1e-9


def test_v_le_k_validation():
    sys_ = KnapsackSystem([1], 1)
    with pytest.raises(ModelError):
        v_le_k_fptas(sys_, [1.0], k=0, eps=0.2)


def _ratio_fixture(rng, m, exact_dens=True, eps=0.2):
    sizes = rng.integers(1, 9, size=m)
    capacity = int(rng.integers(int(sizes.min()), int(sizes.sum())))
    sys_ = KnapsackSystem(sizes, capacity)
    values = np.sort(rng.uniform(0.5, 4.0, size=m))[::-1].copy()
    if exact_dens:
        dens = _exact_top_k_optima(sys_.sizes, values, capacity)
    else:
        dens = np.array([v_le_k_fptas(sys_, values, k + 1, eps)
                         for k in range(m)])
    keep = dens > 0
    objs = [CardinalityRatioObjective(k + 1, float(dens[k]), values)
            for k in range(m) if keep[k]]
    return sys_, objs


def test_cardinality_dp_single_item():
    sys_ = KnapsackSystem([2], 3)
    objs = [CardinalityRatioObjective(1, 5.0, [5.0])]
    br = cardinality_dp_best_response([1.0], objs, sys_, eps=0.25)
    assert br.chosen == frozenset({0})
    assert br.value == pytest.approx(1.0)


def test_cardinality_dp_all_fit_takes_everything():
    sys_ = KnapsackSystem([1, 1, 1], 5)
    vals = [2.0, 2.0, 2.0]
    objs = [CardinalityRatioObjective(k, 2.0 * k, vals) for k in (1, 2, 3)]
    br = cardinality_dp_best_response([0.0, 0.0, 1.0], objs, sys_, eps=0.25)
    assert br.chosen == frozenset({0, 1, 2})


def test_cardinality_dp_requires_sorted_values():
    sys_ = KnapsackSystem([1, 1], 2)
    objs = [CardinalityRatioObjective(1, 2.0, [1.0, 2.0])]
    with pytest.raises(ModelError):
        cardinality_dp_best_response([1.0], objs, sys_, eps=0.2)


def test_cardinality_dp_guarantee_random():
    rng = np.random.default_rng(37)
    eps = 0.25
    for _ in range(25):
        m = int(rng.integers(2, 7))
        sys_, objs = _ratio_fixture(rng, m)
        q = rng.dirichlet(np.ones(len(objs)))
        br = cardinality_dp_best_response(q, objs, sys_, eps)
        assert sys_.is_independent(br.chosen)
        assert br.value >= (1 - 2 * eps) * brute_max(q, objs, sys_) - 1e-9
