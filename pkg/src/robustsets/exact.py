"""Exact ground truth at desk scale: full game solves, value bounds, and
hard-instance generators used as adversarial fixtures.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import ModelError, SizeLimitError, SolverFailure
from .instance import (CardinalityRatioObjective, GroundSet, LinearObjective,
                       MixedStrategy, ProblemInstance)
from .lpsolver import LinearProgram, solve_lp
from .systems import KnapsackSystem, UniformMatroid, maximal_independent_sets

MINIMAX_TOL = 1e-6


@dataclass
class GameSolution:
    """Optimal value with both players' optimal strategies."""

    value: float
    strategy: MixedStrategy
    adversary: np.ndarray
    primal_value: float
    dual_value: float


def candidate_sets(inst: ProblemInstance) -> list[frozenset]:
    """Independent sets worth enumerating as strategy atoms.

    With all-monotone objectives only inclusion-wise maximal sets (plus the
    empty set) can carry mass in some optimal strategy, which shrinks the
    game LP considerably.
    """
    sets = inst.system.enumerate_independent()
    if all(f.monotone for f in inst.objectives):
        sets = [frozenset()] + maximal_independent_sets(inst.system, sets)
    return sets


def exact_game_solve(inst: ProblemInstance) -> GameSolution:
    """Solve the max-min game exactly by LP over all enumerable atoms.

    Recovers the adversary's optimal scenario mixture from the duals and
    verifies that both sides of the minimax identity agree.
    """
    cands = candidate_sets(inst)
    n, m = inst.n_objectives, len(cands)
    F = np.empty((n, m))
    for j, X in enumerate(cands):
        F[:, j] = inst.objective_values(X)

    # Variables: worst-case value nu (free) then one probability per atom.
    lp = LinearProgram(np.concatenate([[1.0], np.zeros(m)]),
                       bounds=[(None, None)] + [(0.0, None)] * m)
    for k in range(n):
        lp.add_row(np.concatenate([[1.0], -F[k]]), "<=", 0.0)
    lp.add_row(np.concatenate([[0.0], np.ones(m)]), "==", 1.0)
    res = solve_lp(lp)
    if res.status != "optimal":
        raise SolverFailure(f"game LP came back {res.status}")

    nu = float(res.value)
    probs = np.maximum(res.x[1:], 0.0)
    probs /= probs.sum()
    strategy = MixedStrategy(
        [(cands[j], probs[j]) for j in range(m) if probs[j] > 1e-12])

    q = np.maximum(res.duals[:n], 0.0)
    if q.sum() <= 0:
        raise SolverFailure("degenerate adversary duals")
    q /= q.sum()
    dual_value = float((q @ F).max())
    primal_value = float((F @ probs).min())
    if abs(primal_value - nu) > MINIMAX_TOL or abs(dual_value - nu) > MINIMAX_TOL:
        raise SolverFailure(
            f"minimax identity violated: primal {primal_value}, "
            f"dual {dual_value}, lp {nu}")
    return GameSolution(value=nu, strategy=strategy, adversary=q,
                        primal_value=primal_value, dual_value=dual_value)


def deterministic_value(inst: ProblemInstance) -> tuple[float, frozenset]:
    """Best single independent set: max over X of min over scenarios."""
    best, best_X = -np.inf, frozenset()
    for X in inst.system.enumerate_independent():
        v = float(inst.objective_values(X).min())
        if v > best + 1e-15:
            best, best_X = v, X
    return best, best_X


def scenario_maximizers(inst: ProblemInstance) -> list[frozenset]:
    """Per scenario, a maximizing independent set (brute force)."""
    sets = inst.system.enumerate_independent()
    out = []
    for f in inst.objectives:
        best, best_X = -np.inf, frozenset()
        for X in sets:
            v = f.value(X)
            if v > best + 1e-15:
                best, best_X = v, X
        out.append(best_X)
    return out


def value_bounds(inst: ProblemInstance, maximizers, alpha: float = 1.0
                 ) -> tuple[float, float]:
    """Sandwich the game value from per-scenario alpha-approximate maximizers.

    With exact maximizers (alpha = 1) the bounds are
    (min_k f_k(X_k) / n, min_k f_k(X_k)).
    """
    if not inst.objectives:
        raise ModelError("instance has no objectives")
    if not (0 < alpha <= 1):
        raise ModelError("alpha must lie in (0, 1]")
    vals = [f.value(X) for f, X in zip(inst.objectives, maximizers, strict=True)]
    low = min(vals) / inst.n_objectives
    high = min(vals) / alpha
    return float(low), float(high)


def gen_hitting_set_instance(elements, subsets, r: int) -> ProblemInstance:
    """Coverage-count scenarios over a cardinality constraint.

    Scenario k scores |X intersect S_k|; with exact (deterministic) play
    the value is positive iff some r-subset hits every S_k, which makes
    these instances adversarial for deterministic strategies.
    """
    ground = GroundSet(elements)
    objectives = []
    for S in subsets:
        if not S:
            raise ModelError("every target subset must be nonempty")
        w = np.zeros(len(ground))
        for name in S:
            w[ground.index(name)] = 1.0
        objectives.append(LinearObjective(w))
    return ProblemInstance(ground, objectives, UniformMatroid(len(ground), r))


def has_equal_split(a) -> bool:
    """Is there a half-size subset of a with half the total sum?"""
    a = list(a)
    half = len(a) // 2
    total = sum(a)
    if total % 2:
        return False
    return any(sum(c) * 2 == total for c in combinations(a, half))


def gen_partition_instance(a) -> tuple[ProblemInstance, float]:
    """Knapsack instance whose top-k ratio game encodes an equal-split puzzle.

    Built from 2n integers a_1 >= ... >= a_2n >= 1 (n >= 4): one oversized
    anchor item plus 2n padded items, with capacity exactly the padded
    total.  Returns the instance and the threshold alpha such that a
    strategy with worst-case ratio >= alpha exists iff the numbers admit an
    equal-cardinality, equal-sum split.
    """
    a = [int(v) for v in a]
    if len(a) % 2 or len(a) < 8:
        raise ModelError("need an even count of values, at least 8")
    n = len(a) // 2
    if any(a[i] < a[i + 1] for i in range(len(a) - 1)):
        raise ModelError("values must be sorted in nonincreasing order")
    if a[-1] < 1:
        raise ModelError("values must be >= 1")
    if sum(a) % 2:
        a = [2 * v for v in a]  # halves must be integral; scaling keeps
        # both the split answer and the threshold unchanged
    A = sum(a) // 2
    a1 = a[0]
    two_n = 2 * n

    sizes = np.empty(two_n + 1, dtype=np.int64)
    values = np.empty(two_n + 1, dtype=float)
    sizes[0] = A + 2 * n * n * a1
    values[0] = 2 * (two_n + 1) * a1
    for i in range(1, two_n + 1):
        sizes[i] = a[i - 1] + two_n * a1
        values[i] = float(sizes[i])
    capacity = int(sizes[1:].sum())

    if two_n + 1 > 16:
        raise SizeLimitError("generator supports at most 2n+1 <= 16 items")
    system = KnapsackSystem(sizes, capacity)
    dens = _exact_top_k_optima(sizes, values, capacity)
    ground = GroundSet([str(i) for i in range(two_n + 1)])
    objectives = [CardinalityRatioObjective(k, dens[k - 1], values)
                  for k in range(1, two_n + 2)]
    inst = ProblemInstance(ground, objectives, system)

    v0 = values[0]
    alpha = 0.25 * (3 * capacity - 2 * v0) / (capacity - v0)
    return inst, float(alpha)


def _exact_top_k_optima(sizes, values, capacity) -> np.ndarray:
    """Best achievable top-k value per k, by full feasible enumeration."""
    m = len(sizes)
    best = np.zeros(m)
    for mask in range(1 << m):
        total = 0
        chosen = []
        for e in range(m):
            if mask >> e & 1:
                total += int(sizes[e])
                chosen.append(values[e])
        if total > capacity:
            continue
        chosen.sort(reverse=True)
        acc = 0.0
        for k, v in enumerate(chosen):
            acc += v
            if acc > best[k]:
                best[k] = acc
        if chosen:
            best[len(chosen):] = np.maximum(best[len(chosen):], acc)
    return best
