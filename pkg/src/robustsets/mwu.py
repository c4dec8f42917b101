"""Multiplicative-weights engine for the randomized max-min problem.

Runs T rounds of: normalize scenario weights into a mixture q, ask a
best-response subroutine for a good independent set under q, then decay
each scenario's weight exponentially in the (capped) value it received.
The empirical distribution of the played sets is the output strategy.

Weight updates run in log space: the raw weights underflow float64 for
the iteration counts the accuracy target demands.  The engine is fully
deterministic; there is no randomness anywhere in the loop.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from ._kernels import mwu_table_loop
from .errors import ModelError, PositivityError, SolverFailure
from .instance import (CardinalityRatioObjective, MixedStrategy,
                       ProblemInstance, worst_case_value)
from .lpsolver import LinearProgram, solve_lp
from .reductions import build_reduction, family_gamma
from .subroutines import BestResponseSolver, BruteForceSubroutine

T_CAP = 10 ** 8


@dataclass
class MwuConfig:
    """Derived run parameters; delta and T follow from the accuracy target."""

    epsilon: float
    delta: float
    T: int
    eta: float
    alpha: float
    gamma: float

    def __post_init__(self):
        if not (0 < self.delta <= 0.5):
            raise ModelError("delta must lie in (0, 1/2]")
        if self.T < 1:
            raise ModelError("iteration count must be >= 1")
        if not (self.eta > 0):
            raise ModelError("value cap eta must be positive")


def iteration_count(n: int, alpha: float, delta: float, gamma: float) -> int:
    """Rounds needed for the additive regret to shrink below the target."""
    if n == 1:
        return 1
    T = math.ceil(n * n * math.log(n) / (alpha * delta ** 3 * gamma))
    return max(1, T)


class MwuTrace:
    """Per-round record of the run, stored compactly.

    Only the distinct played sets and their capped values are kept; the
    mixtures q and per-round mixture values are reconstructed on demand
    (they are a deterministic function of the play sequence).
    """

    def __init__(self, sets, values: np.ndarray, choices: np.ndarray,
                 config: MwuConfig):
        self.sets = tuple(sets)
        self.values = np.asarray(values, dtype=float)   # (n, #distinct sets)
        self.choices = np.asarray(choices, dtype=np.int64)
        self.config = config

    @property
    def T(self) -> int:
        return self.choices.size

    def played_values(self) -> np.ndarray:
        """Capped objective values of the played set, per scenario and round."""
        return self.values[:, self.choices]

    def log_weight_path(self) -> np.ndarray:
        """(T, n) log-weights entering each round (row t is before round t)."""
        factor = math.log1p(-self.config.delta) / self.config.eta
        played = self.played_values()
        cum = np.cumsum(played, axis=1) * factor
        path = np.empty((self.T, played.shape[0]))
        path[0] = 0.0
        path[1:] = cum[:, :-1].T
        return path

    def mixtures(self) -> np.ndarray:
        """(T, n) scenario mixture q used in each round."""
        lw = self.log_weight_path()
        lw -= lw.max(axis=1, keepdims=True)
        w = np.exp(lw)
        return w / w.sum(axis=1, keepdims=True)

    def mixture_values(self) -> np.ndarray:
        """Per-round mixture value of the played set."""
        return np.einsum("tk,kt->t", self.mixtures(), self.played_values())

    def scenario_totals(self) -> np.ndarray:
        """Per-scenario sum of capped values over all rounds."""
        return self.played_values().sum(axis=1)

    def final_log_weights(self) -> np.ndarray:
        factor = math.log1p(-self.config.delta) / self.config.eta
        return factor * self.scenario_totals()

    def potential_check(self) -> tuple[float, float]:
        """Sides of the regret guarantee: total mixture value vs
        eta ln(n)/delta + (1+delta) * best fixed scenario total."""
        cfg = self.config
        lhs = float(self.mixture_values().sum())
        n = self.values.shape[0]
        rhs = cfg.eta * math.log(n) / cfg.delta \
            + (1.0 + cfg.delta) * float(self.scenario_totals().min())
        return lhs, rhs

    def strategy(self) -> MixedStrategy:
        counts = np.bincount(self.choices, minlength=len(self.sets))
        return MixedStrategy(
            [(X, c / self.T) for X, c in zip(self.sets, counts) if c])

    def write_jsonl(self, path, element_names=None):
        """One JSON record per round: mixture, played set, mixture value."""
        qs = self.mixtures()
        mix = np.einsum("tk,kt->t", qs, self.played_values())
        with open(path, "w") as fh:
            for t in range(self.T):
                X = sorted(self.sets[self.choices[t]])
                if element_names is not None:
                    X = [element_names[e] for e in X]
                fh.write(json.dumps({
                    "t": t + 1,
                    "q": [round(v, 15) for v in qs[t]],
                    "set": X,
                    "mixture_value": mix[t],
                }) + "\n")


def _identity_reductions(inst: ProblemInstance):
    return [build_reduction(f, math.inf) for f in inst.objectives]


def _scenario_anchor_values(inst: ProblemInstance,
                            subroutine: BestResponseSolver) -> np.ndarray:
    """Original objective value of the subroutine's answer per point-mass q."""
    identity = _identity_reductions(inst)
    n = inst.n_objectives
    vals = np.empty(n)
    for k in range(n):
        q = np.zeros(n)
        q[k] = 1.0
        br = subroutine.best_response(q, identity, inst.system)
        vals[k] = inst.objectives[k].value(br.chosen)
    return vals


def init_eta(inst: ProblemInstance, subroutine: BestResponseSolver,
             delta: float, gamma: float | None = None) -> float:
    """Value cap from per-scenario anchor solves.

    Runs the subroutine once per scenario with a point-mass mixture (no
    cap), then sets eta = n * min_k f_k(X_k) / (alpha * delta * gamma),
    which lands in the window the convergence guarantee needs.
    """
    if gamma is None:
        gamma = family_gamma(inst.objectives)
    alpha = subroutine.certified_alpha(_identity_reductions(inst), inst.system)
    vals = _scenario_anchor_values(inst, subroutine)
    if np.any(vals <= 0):
        k = int(np.argmin(vals))
        raise PositivityError(
            f"scenario {k} has maximum value 0 over the feasible sets")
    return inst.n_objectives * float(vals.min()) / (alpha * delta * gamma)


def _batch_evaluator(objectives):
    """Vectorized X -> per-scenario values, with fast paths for the
    weight-vector and top-k ratio families."""
    if all(hasattr(f, "weights") for f in objectives):
        W = np.stack([f.weights for f in objectives])

        def eval_weights(X):
            idx = list(X)
            return W[:, idx].sum(axis=1) if idx else np.zeros(W.shape[0])

        return eval_weights
    if all(isinstance(f, CardinalityRatioObjective) for f in objectives):
        vals = objectives[0].values
        ks = np.array([f.k for f in objectives])
        dens = np.array([f.denominator for f in objectives])

        def eval_ratio(X):
            chosen = np.sort(vals[list(X)])[::-1] if X else np.zeros(0)
            prefix = np.concatenate([[0.0], np.cumsum(chosen)])
            return prefix[np.minimum(ks, chosen.size)] / dens

        return eval_ratio
    return lambda X: np.array([f.value(X) for f in objectives])


def mwu_solve(inst: ProblemInstance, subroutine: BestResponseSolver,
              epsilon: float, trace_path=None
              ) -> tuple[MixedStrategy, MwuTrace]:
    """Run the engine; the output strategy has worst-case value at least
    (alpha - epsilon) times the optimum, for the subroutine's ratio alpha."""
    if not (0 < epsilon < 1):
        raise ModelError("epsilon must lie in (0, 1)")
    n = inst.n_objectives
    delta = min(epsilon / 3.0, 0.5)

    if all(isinstance(f, CardinalityRatioObjective) for f in inst.objectives):
        # Top-k ratios are already capped at 1 on feasible sets: run on the
        # original objectives with eta = 1 and gamma = 1.
        eta, gamma = 1.0, 1.0
        reduced = list(inst.objectives)
    else:
        gamma = family_gamma(inst.objectives)
        alpha0 = subroutine.certified_alpha(
            _identity_reductions(inst), inst.system)
        vals = _scenario_anchor_values(inst, subroutine)
        if np.any(vals <= 0):
            raise PositivityError("every scenario must have positive optimum")
        eta = n * float(vals.min()) / (alpha0 * delta * gamma)
        reduced = [build_reduction(f, eta) for f in inst.objectives]

    alpha = subroutine.certified_alpha(reduced, inst.system)
    T = iteration_count(n, alpha, delta, gamma)
    if T > T_CAP:
        raise ModelError(
            f"iteration count {T} exceeds the cap; increase epsilon")
    config = MwuConfig(epsilon=epsilon, delta=delta, T=T, eta=eta,
                       alpha=alpha, gamma=gamma)

    factor = math.log1p(-delta) / eta
    if isinstance(subroutine, BruteForceSubroutine):
        # Table mode: with an exact enumerating subroutine the whole run is
        # argmax rounds against a fixed value matrix, handled by a kernel.
        cands = inst.system.enumerate_independent()
        evaluate = _batch_evaluator(reduced)
        V = np.empty((n, len(cands)))
        for j, X in enumerate(cands):
            V[:, j] = evaluate(X)
        choices = mwu_table_loop(V, factor, T)
        trace = MwuTrace(cands, V, choices, config)
    else:
        evaluate = _batch_evaluator(reduced)
        logw = np.zeros(n)
        index: dict[frozenset, int] = {}
        sets: list[frozenset] = []
        cols: list[np.ndarray] = []
        choices = np.empty(T, dtype=np.int64)
        for t in range(T):
            w = np.exp(logw - logw.max())
            q = w / w.sum()
            br = subroutine.best_response(q, reduced, inst.system)
            j = index.get(br.chosen)
            if j is None:
                j = len(sets)
                index[br.chosen] = j
                sets.append(br.chosen)
                cols.append(np.asarray(evaluate(br.chosen), dtype=float))
            choices[t] = j
            logw += factor * cols[j]
        trace = MwuTrace(sets, np.column_stack(cols), choices, config)

    strategy = trace.strategy()
    if trace_path is not None:
        trace.write_jsonl(trace_path, element_names=inst.ground.elements)
    return strategy, trace


def sparsify(strategy, inst: ProblemInstance) -> MixedStrategy:
    """Reweight a strategy's own support by LP to at most n atoms.

    Maximizes the worst-case expected value over distributions restricted
    to the given support; a basic optimal solution has at most n nonzero
    probabilities and its value cannot be below the input's.
    """
    if isinstance(strategy, MixedStrategy):
        sets = list(strategy.support)
        before = worst_case_value(strategy, inst)
    else:
        sets = list(dict.fromkeys(strategy))
        before = None
    if not sets:
        raise ModelError("nothing to sparsify: empty support")
    n = inst.n_objectives
    F = np.empty((n, len(sets)))
    for j, X in enumerate(sets):
        F[:, j] = inst.objective_values(X)

    lp = LinearProgram(np.concatenate([[1.0], np.zeros(len(sets))]),
                       bounds=[(None, None)] + [(0.0, None)] * len(sets))
    for k in range(n):
        lp.add_row(np.concatenate([[1.0], -F[k]]), "<=", 0.0)
    lp.add_row(np.concatenate([[0.0], np.ones(len(sets))]), "==", 1.0)
    res = solve_lp(lp)
    if res.status != "optimal":
        raise SolverFailure(f"sparsify LP came back {res.status}")
    r = np.maximum(res.x[1:], 0.0)
    r /= r.sum()
    out = MixedStrategy([(sets[j], r[j]) for j in range(len(sets))
                         if r[j] > 1e-12])
    if out.support_size > n:
        raise SolverFailure("sparsified support exceeds the scenario count")
    if before is not None and worst_case_value(out, inst) < before - 1e-9:
        raise SolverFailure("sparsification decreased the worst-case value")
    return out
