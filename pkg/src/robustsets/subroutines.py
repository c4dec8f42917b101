"""Best-response solvers: given a scenario mixture q, (approximately)
maximize sum_k q_k g_k(X) over the independent sets, each solver
certifying its own approximation ratio alpha.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernels import cardinality_min_size_dp, knapsack_min_size_dp
from .errors import ModelError, UnsupportedOperationError
from .instance import CardinalityRatioObjective, LinearObjective
from .lpsolver import LinearProgram, solve_lp
from .reductions import ClippedLinearObjective
from .systems import IntersectionSystem, KnapsackSystem, greedy_max_weight

_LINEAR_KINDS = (LinearObjective, ClippedLinearObjective)


@dataclass
class BestResponse:
    chosen: frozenset
    value: float
    alpha: float


def mixture_value(q, objectives, X) -> float:
    q = np.asarray(q, dtype=float)
    return float(sum(qk * f.value(X) for qk, f in zip(q, objectives, strict=True)))


def _check_mixture(q, n: int) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    if q.shape != (n,) or np.any(q < -1e-12) or abs(q.sum() - 1.0) > 1e-9:
        raise ModelError("q must be a probability vector over the scenarios")
    return q


def brute_force_best_response(q, objectives, system) -> BestResponse:
    """Exact argmax by full enumeration (alpha = 1).

    Strictly-greater comparison so the first maximum in enumeration order
    wins, matching the table kernel's tie rule exactly.
    """
    q = _check_mixture(q, len(objectives))
    best_v, best_X = -math.inf, frozenset()
    for X in system.enumerate_independent():
        v = mixture_value(q, objectives, X)
        if v > best_v:
            best_v, best_X = v, X
    return BestResponse(chosen=best_X, value=best_v, alpha=1.0)


def _system_mu(system) -> int:
    if isinstance(system, IntersectionSystem):
        return system.mu
    if system.is_matroid:
        return 1
    raise UnsupportedOperationError(
        f"greedy needs a matroid or matroid intersection, got {system.kind!r}")


def greedy_alpha(objectives, system) -> float:
    """Certified greedy ratio: 1/mu for linear mixtures, 1/(mu+1) for
    monotone submodular ones, over a mu-matroid intersection."""
    mu = _system_mu(system)
    if all(isinstance(f, _LINEAR_KINDS) for f in objectives):
        return 1.0 / mu
    return 1.0 / (mu + 1)


def greedy_best_response(q, objectives, system) -> BestResponse:
    """Marginal-gain greedy for a monotone mixture over a (mu-intersection
    of) matroid(s); adds the best feasible element until no positive gain."""
    q = _check_mixture(q, len(objectives))
    alpha = greedy_alpha(objectives, system)
    if not all(f.monotone for f in objectives):
        raise ModelError("greedy requires a monotone objective mixture")

    if all(isinstance(f, _LINEAR_KINDS) for f in objectives):
        w = np.zeros(system.n_elements)
        for qk, f in zip(q, objectives):
            w += qk * f.weights
        chosen = greedy_max_weight(system, w)
        return BestResponse(chosen=chosen, value=float(w[list(chosen)].sum()
                            if chosen else 0.0), alpha=alpha)

    chosen: set[int] = set()
    current = 0.0
    remaining = set(range(system.n_elements))
    while True:
        best_gain, best_e, best_val = 1e-12, None, 0.0
        for e in sorted(remaining):
            cand = frozenset(chosen | {e})
            if not system.is_independent(cand):
                continue
            val = mixture_value(q, objectives, cand)
            gain = val - current
            if gain > best_gain + 1e-15:
                best_gain, best_e, best_val = gain, e, val
        if best_e is None:
            break
        chosen.add(best_e)
        remaining.discard(best_e)
        current = best_val
    return BestResponse(chosen=frozenset(chosen), value=current, alpha=alpha)


def _knapsack_profit_dp(profits: np.ndarray, sizes: np.ndarray, capacity: int,
                        eps: float) -> frozenset:
    """Profit-scaling DP returning a (1-eps)-optimal fitting subset."""
    m = profits.size
    fits = np.where(sizes <= capacity)[0]
    if fits.size == 0:
        return frozenset()
    pmax = float(profits[fits].max())
    if pmax <= 0:
        return frozenset()
    K = eps * pmax / m
    scaled = np.floor(profits[fits] / K).astype(np.int64)
    mask = knapsack_min_size_dp(scaled, sizes[fits].astype(np.int64),
                                int(capacity))
    chosen = {int(fits[i]) for i in range(fits.size) if mask >> i & 1}
    # Greedy completion: adding positive-profit items that still fit only
    # improves the (monotone) objective.
    used = int(sizes[list(chosen)].sum()) if chosen else 0
    for e in sorted(range(m), key=lambda e: (-profits[e], e)):
        if e in chosen or profits[e] <= 0:
            continue
        if used + sizes[e] <= capacity:
            chosen.add(e)
            used += int(sizes[e])
    return frozenset(chosen)


def knapsack_fptas(q, objectives, system: KnapsackSystem, eps: float
                   ) -> BestResponse:
    """Profit-scaling knapsack DP on the mixture weights (alpha = 1 - eps)."""
    if not isinstance(system, KnapsackSystem):
        raise UnsupportedOperationError("knapsack subroutine needs a knapsack system")
    if not (0 < eps < 1):
        raise ModelError("eps must lie in (0, 1)")
    if not all(isinstance(f, _LINEAR_KINDS) for f in objectives):
        raise ModelError("knapsack subroutine requires linear objectives")
    q = _check_mixture(q, len(objectives))
    profits = np.zeros(system.n_elements)
    for qk, f in zip(q, objectives):
        profits += qk * f.weights
    chosen = _knapsack_profit_dp(profits, system.sizes, system.capacity, eps)
    value = float(profits[list(chosen)].sum()) if chosen else 0.0
    return BestResponse(chosen=chosen, value=value, alpha=1.0 - eps)


def v_le_k_fptas(system: KnapsackSystem, values, k: int, eps: float) -> float:
    """Overestimate of the best achievable top-k value within the knapsack.

    Returns an estimate v with  OPT <= v <= OPT / (1 - eps), where OPT is
    the maximum, over feasible sets, of the total value of the k heaviest
    chosen elements.  Computed from a cardinality-capped profit-scaling DP
    tightened against an LP relaxation bound.
    """
    if k < 1:
        raise ModelError("k must be >= 1")
    if not (0 < eps < 1):
        raise ModelError("eps must lie in (0, 1)")
    values = np.asarray(values, dtype=float)
    m = values.size
    fits = np.where(system.sizes <= system.capacity)[0]
    if fits.size == 0 or float(values[fits].max()) <= 0:
        return 0.0
    v_fit = values[fits]
    s_fit = system.sizes[fits].astype(np.int64)
    k_eff = min(k, fits.size)
    vmax = float(v_fit.max())
    K = eps * vmax / k_eff
    scaled = np.floor(v_fit / K).astype(np.int64)

    # Position-capped DP: uniform contribution up to position k, blocked
    # beyond it, which enforces the cardinality bound.
    kappa = int(np.sort(scaled)[::-1][:k_eff].sum())
    contrib = np.full((fits.size, fits.size), kappa + 1, dtype=np.int64)
    contrib[:, :k_eff] = scaled[:, None]
    _, mask = cardinality_min_size_dp(contrib, s_fit, int(system.capacity),
                                      kappa)
    chosen = {int(fits[i]) for i in range(fits.size) if mask >> i & 1}

    used = int(sum(system.sizes[e] for e in chosen))
    for e in sorted((int(i) for i in fits), key=lambda e: (-values[e], e)):
        if e in chosen or values[e] <= 0:
            continue
        if used + system.sizes[e] <= system.capacity:
            chosen.add(e)
            used += int(system.sizes[e])
    found = float(sum(sorted((values[e] for e in chosen), reverse=True)[:k]))

    # LP relaxation of the cardinality-capped knapsack: a cheap certified
    # upper bound that makes the estimate exact on unconstrained inputs.
    lp = LinearProgram(v_fit, bounds=[(0.0, 1.0)] * fits.size)
    lp.add_row(s_fit.astype(float), "<=", float(system.capacity))
    lp.add_row(np.ones(fits.size), "<=", float(k_eff))
    res = solve_lp(lp)
    upper = float(res.value)
    return min(found / (1.0 - eps), upper)


def cardinality_dp_best_response(q, objectives, system: KnapsackSystem,
                                 eps: float) -> BestResponse:
    """Top-k ratio best response by position-scaled DP (alpha = 1 - 2 eps).

    Requires element values sorted nonincreasingly in ground order so that
    positions in the DP align with element indices.
    """
    if not isinstance(system, KnapsackSystem):
        raise UnsupportedOperationError("cardinality DP needs a knapsack system")
    if not (0 < eps < 1):
        raise ModelError("eps must lie in (0, 1)")
    if not all(isinstance(f, CardinalityRatioObjective) for f in objectives):
        raise ModelError("cardinality DP requires top-k ratio objectives")
    q = _check_mixture(q, len(objectives))
    values = objectives[0].values
    for f in objectives[1:]:
        if not np.array_equal(f.values, values):
            raise ModelError("ratio objectives must share one value vector")
    if np.any(np.diff(values) > 1e-12):
        raise ModelError("element values must be sorted nonincreasingly")

    m = system.n_elements
    n_scen = len(objectives)
    # Positional coefficient: the j-th heaviest chosen element is counted
    # by every scenario whose cardinality bound is at least j.
    coeff = np.zeros(m)
    for qk, f in zip(q, objectives):
        if f.k >= 1:
            coeff[:min(f.k, m)] += qk / f.denominator
    kappa = int(math.ceil(max(m, n_scen) ** 2 / eps))
    contrib = np.floor(np.outer(values, coeff) * kappa).astype(np.int64)
    _, mask = cardinality_min_size_dp(contrib, system.sizes.astype(np.int64),
                                      int(system.capacity), kappa)
    chosen = {e for e in range(m) if mask >> e & 1}

    used = int(sum(system.sizes[e] for e in chosen))
    for e in range(m):  # completion: the mixture is monotone in X
        if e not in chosen and used + system.sizes[e] <= system.capacity:
            chosen.add(e)
            used += int(system.sizes[e])
    chosen = frozenset(chosen)
    return BestResponse(chosen=chosen,
                        value=mixture_value(q, objectives, chosen),
                        alpha=1.0 - 2.0 * eps)


class BestResponseSolver:
    """Interface consumed by the multiplicative-weights engine."""

    name = "abstract"

    def certified_alpha(self, objectives, system) -> float:
        raise NotImplementedError

    def best_response(self, q, objectives, system) -> BestResponse:
        raise NotImplementedError


class BruteForceSubroutine(BestResponseSolver):
    name = "brute-force"

    def certified_alpha(self, objectives, system) -> float:
        return 1.0

    def best_response(self, q, objectives, system) -> BestResponse:
        return brute_force_best_response(q, objectives, system)


class GreedySubroutine(BestResponseSolver):
    name = "greedy"

    def certified_alpha(self, objectives, system) -> float:
        return greedy_alpha(objectives, system)

    def best_response(self, q, objectives, system) -> BestResponse:
        return greedy_best_response(q, objectives, system)


class KnapsackFptasSubroutine(BestResponseSolver):
    def __init__(self, eps: float):
        if not (0 < eps < 1):
            raise ModelError("eps must lie in (0, 1)")
        self.eps = float(eps)
        self.name = f"knapsack-fptas(eps={eps})"

    def certified_alpha(self, objectives, system) -> float:
        return 1.0 - self.eps

    def best_response(self, q, objectives, system) -> BestResponse:
        return knapsack_fptas(q, objectives, system, self.eps)


class CardinalityDpSubroutine(BestResponseSolver):
    def __init__(self, eps: float):
        if not (0 < eps < 1):
            raise ModelError("eps must lie in (0, 1)")
        self.eps = float(eps)
        self.name = f"cardinality-dp(eps={eps})"

    def certified_alpha(self, objectives, system) -> float:
        return 1.0 - 2.0 * self.eps

    def best_response(self, q, objectives, system) -> BestResponse:
        return cardinality_dp_best_response(q, objectives, system, self.eps)
