"""Shared fixtures: the two-element motivating instance and seeded random
instance factories used across the suite."""
import numpy as np
import pytest

from robustsets import (CoverageObjective, ExplicitListSystem, GroundSet,
                        KnapsackSystem, LinearObjective, PartitionMatroid,
                        ProblemInstance, SubmodularTableObjective,
                        UniformMatroid)


@pytest.fixture
def intro_instance():
    """Two singleton scenarios over I = {{}, {a}, {b}}: randomization gets
    1/2 where any single set gets 0."""
    ground = GroundSet(["a", "b"])
    system = ExplicitListSystem(2, [frozenset(), frozenset({0}), frozenset({1})])
    objectives = [LinearObjective([1.0, 0.0]), LinearObjective([0.0, 1.0])]
    return ProblemInstance(ground, objectives, system)


def random_system(rng: np.random.Generator, m: int):
    roll = rng.integers(0, 3)
    if roll == 0:
        return UniformMatroid(m, int(rng.integers(1, m)))
    if roll == 1:
        cut = int(rng.integers(1, m))
        blocks = [(tuple(range(cut)), int(rng.integers(1, cut + 1))),
                  (tuple(range(cut, m)), int(rng.integers(1, m - cut + 1)))]
        return PartitionMatroid(m, blocks)
    sizes = rng.integers(1, 8, size=m)
    capacity = int(max(sizes.max(), sizes.sum() // 2))
    return KnapsackSystem(sizes, capacity)


def random_matroid(rng: np.random.Generator, m: int):
    if rng.integers(0, 2) == 0:
        return UniformMatroid(m, int(rng.integers(1, m)))
    cut = int(rng.integers(1, m))
    blocks = [(tuple(range(cut)), int(rng.integers(1, cut + 1))),
              (tuple(range(cut, m)), int(rng.integers(1, m - cut + 1)))]
    return PartitionMatroid(m, blocks)


def random_coverage_table(rng: np.random.Generator, m: int):
    """Monotone submodular table materialized from a random coverage function."""
    n_items = int(rng.integers(2, 6))
    weights = rng.uniform(0.2, 2.0, size=n_items)
    covers = [frozenset(int(i) for i in
                        rng.choice(n_items, size=int(rng.integers(1, n_items + 1)),
                                   replace=False))
              for _ in range(m)]
    cov = CoverageObjective(covers, weights)
    table = np.array([cov.value(frozenset(e for e in range(m) if mask >> e & 1))
                      for mask in range(1 << m)])
    return SubmodularTableObjective(table, m)


def random_instance(seed: int, max_elements: int = 8, max_scenarios: int = 4,
                    with_tables: bool = True) -> ProblemInstance:
    """Seeded random instance over matroid or knapsack systems with linear
    (and optionally table) objectives, all scenarios positive somewhere."""
    rng = np.random.default_rng(seed)
    m = int(rng.integers(3, max_elements + 1))
    n = int(rng.integers(1, max_scenarios + 1))
    ground = GroundSet([f"e{i}" for i in range(m)])
    system = random_system(rng, m)
    objectives = []
    for _ in range(n):
        if with_tables and m <= 8 and rng.random() < 0.3:
            objectives.append(random_coverage_table(rng, m))
        else:
            objectives.append(LinearObjective(rng.uniform(0.05, 1.0, size=m)))
    return ProblemInstance(ground, objectives, system)


def random_cut_table(rng: np.random.Generator, m: int) -> SubmodularTableObjective:
    """Non-monotone submodular table: weighted cut function of a random graph."""
    weights = {}
    for i in range(m):
        for j in range(i + 1, m):
            if rng.random() < 0.6:
                weights[(i, j)] = float(rng.uniform(0.1, 1.0))
    table = np.zeros(1 << m)
    for mask in range(1 << m):
        total = 0.0
        for (i, j), w in weights.items():
            if (mask >> i & 1) != (mask >> j & 1):
                total += w
        table[mask] = total
    return SubmodularTableObjective(table, m)
