"""Cutting-plane solvers over independence system polytopes.

The aggregated formulation works with per-element selection probabilities
x instead of per-set probabilities: maximize the worst-case scenario value
of x over the polytope, separating violated polytope inequalities on
demand, then decompose the optimal x into an explicit mixed strategy by
column generation.  Variants cover relaxed polytopes (certified
approximation), source-sink path games via min-cut separation, weight
sets given by half-space descriptions, and curvature-based linearization.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import (DecompositionError, ModelError, SolverFailure,
                     UnsupportedOperationError)
from .instance import LinearObjective, MixedStrategy, Objective, ProblemInstance
from .lpsolver import LinearProgram, solve_lp
from .systems import (IndependenceSystem, IntersectionSystem, StPathSystem,
                      greedy_max_weight)

CUT_TOL = 1e-8
RECON_TOL = 1e-7


@dataclass
class FractionalPoint:
    """Per-element selection probabilities, indexed by ground order."""

    x: np.ndarray

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        if np.any(self.x < -1e-9) or np.any(self.x > 1 + 1e-9):
            raise ModelError("coordinates must lie in [0, 1]")
        self.x = np.clip(self.x, 0.0, 1.0)

    @classmethod
    def from_strategy(cls, strategy: MixedStrategy, n_elements: int):
        return cls(strategy.element_marginals(n_elements))


@dataclass
class RelaxedSolution:
    """Relaxed optimum with its certified sandwich around the true value."""

    value: float
    lower: float
    upper: float
    point: FractionalPoint
    adversary: np.ndarray


def polytope_oracle(system: IndependenceSystem):
    """Separation oracle for the system's polytope.

    Matroid kinds (and <= 2 matroid intersections, whose common polytope
    is exactly the intersection of the matroid polytopes) separate via
    rank inequalities; other kinds fall back to enumeration at desk scale.
    Returns a function x -> None (member) or a violated cut (a, sense, rhs).
    """
    if isinstance(system, IntersectionSystem) and system.mu > 2:
        raise UnsupportedOperationError(
            "exact polytope oracle unavailable for 3+ matroid intersections; "
            "use the relaxation solver")
    if isinstance(system, StPathSystem):
        raise UnsupportedOperationError(
            "path systems use min-cut separation, not the polytope oracle")
    if system.is_matroid or isinstance(system, IntersectionSystem):
        def rank_oracle(x):
            hit = system.separate(x)
            if hit is None:
                return None
            U, rho = hit
            a = np.zeros(system.n_elements)
            a[list(U)] = 1.0
            return a, "<=", float(rho)

        return rank_oracle
    return _enumeration_oracle(system)


def _enumeration_oracle(system: IndependenceSystem):
    """Exact hull separation by LP over the enumerated characteristic vectors."""
    cands = system.enumerate_independent()
    chi = np.zeros((len(cands), system.n_elements))
    for j, X in enumerate(cands):
        chi[j, list(X)] = 1.0
    bound = float(system.n_elements + 1)

    def oracle(x):
        nv = system.n_elements + 1  # hyperplane coefficients d and offset c
        lp = LinearProgram(np.concatenate([np.asarray(x, dtype=float), [-1.0]]),
                           bounds=[(-1.0, 1.0)] * system.n_elements
                           + [(-bound, bound)])
        for row in chi:
            lp.add_row(np.concatenate([row, [-1.0]]), "<=", 0.0)
        res = solve_lp(lp)
        if res.status != "optimal":
            raise SolverFailure(f"separation LP came back {res.status}")
        if res.value > CUT_TOL:
            d, c = res.x[:-1], float(res.x[-1])
            return d, "<=", c
        return None

    return oracle


def _cut_violation(cut, x) -> float:
    a, sense, rhs = cut
    lhs = float(np.asarray(a) @ x)
    return lhs - rhs if sense == "<=" else rhs - lhs


def _maxmin_with_cuts(W: np.ndarray, oracle, maximize: bool = True,
                      covering: bool = False):
    """Optimize the worst scenario of W @ x over box + generated cuts.

    maximize=True solves max_x min_k (packing cuts); maximize=False solves
    min_x max_k with covering cuts (the path variant).  Returns the
    objective value, the point x, the scenario duals, and the cut list.
    """
    n, m = W.shape
    cuts: list = []
    cap = max(50 * m * m, 50)
    for _ in range(cap):
        lp = LinearProgram(np.concatenate([[1.0], np.zeros(m)]),
                           maximize=maximize,
                           bounds=[(None, None)] + [(0.0, 1.0)] * m)
        for k in range(n):
            if maximize:
                lp.add_row(np.concatenate([[1.0], -W[k]]), "<=", 0.0)
            else:
                lp.add_row(np.concatenate([[-1.0], W[k]]), "<=", 0.0)
        for a, sense, rhs in cuts:
            lp.add_row(np.concatenate([[0.0], a]), sense, rhs)
        res = solve_lp(lp)
        if res.status == "infeasible":
            raise ModelError("cut system infeasible: the feasible region is empty")
        if res.status != "optimal":
            raise SolverFailure(f"scheme LP came back {res.status}")
        x = res.x[1:]
        cut = oracle(x)
        if cut is None or _cut_violation(cut, x) <= CUT_TOL:
            q = np.maximum(res.duals[:n] if maximize else -res.duals[:n], 0.0)
            q = q / q.sum() if q.sum() > 0 else np.full(n, 1.0 / n)
            return float(res.value), x, q, cuts
        if not covering and cut[1] != "<=":
            raise SolverFailure("packing scheme received a covering cut")
        cuts.append(cut)
    raise SolverFailure(f"cutting-plane loop exceeded {cap} iterations")


def solve_lp_scheme(inst: ProblemInstance, oracle=None
                    ) -> tuple[float, FractionalPoint]:
    """Aggregated max-min solve for linear objectives; exact when the
    oracle separates the true polytope."""
    W = _linear_weight_matrix(inst)
    if oracle is None:
        oracle = polytope_oracle(inst.system)
    value, x, _, _ = _maxmin_with_cuts(W, oracle)
    return value, FractionalPoint(x)


def solve_relaxed(inst: ProblemInstance, oracle=None, alpha: float | None = None
                  ) -> RelaxedSolution:
    """Max-min over a relaxed polytope with a certified value sandwich.

    With an alpha-relaxation (alpha * relaxed polytope inside the true
    one), the relaxed optimum nu satisfies alpha * nu <= true <= nu.
    Defaults to the per-matroid rank oracle on matroid intersections,
    where alpha = 1/mu.
    """
    W = _linear_weight_matrix(inst)
    if oracle is None or alpha is None:
        if not isinstance(inst.system, IntersectionSystem):
            raise UnsupportedOperationError(
                "default relaxation exists only for matroid intersections")
        alpha = 1.0 / inst.system.mu

        def oracle(x, _system=inst.system):
            hit = _system.separate(x)
            if hit is None:
                return None
            U, rho = hit
            a = np.zeros(_system.n_elements)
            a[list(U)] = 1.0
            return a, "<=", float(rho)

    if not (0 < alpha <= 1):
        raise ModelError("alpha must lie in (0, 1]")
    value, x, q, _ = _maxmin_with_cuts(W, oracle)
    return RelaxedSolution(value=value, lower=alpha * value, upper=value,
                           point=FractionalPoint(x), adversary=q)


def _linear_weight_matrix(inst: ProblemInstance) -> np.ndarray:
    for f in inst.objectives:
        if not isinstance(f, LinearObjective):
            raise UnsupportedOperationError(
                "the LP scheme requires linear objectives")
    return np.stack([f.weights for f in inst.objectives])


def decompose(point: FractionalPoint | np.ndarray, system: IndependenceSystem
              ) -> MixedStrategy:
    """Write x as a convex combination of independent sets (column generation).

    The master problem matches the per-element marginals exactly with
    artificial slack mass to drive to zero; columns are priced by
    maximizing the dual weights over the system (greedy on matroids,
    enumeration otherwise).  Fails with a separating cut when x is outside
    the polytope.  The support of the result is at most |E| + 1.
    """
    x = point.x if isinstance(point, FractionalPoint) else \
        FractionalPoint(np.asarray(point, dtype=float)).x
    m = system.n_elements
    if x.shape != (m,):
        raise ModelError("point dimension does not match the system")

    if system.is_matroid or isinstance(system, IntersectionSystem):
        # A violated rank inequality on any component matroid already
        # proves the point is outside the (smaller) common polytope.
        hit = system.separate(x)
        if hit is not None:
            U, rho = hit
            a = np.zeros(m)
            a[list(U)] = 1.0
            raise DecompositionError(
                f"point violates a rank inequality on {sorted(U)}",
                cut=(a, "<=", float(rho)))
    if system.is_matroid:
        def price(y):
            return greedy_max_weight(system, y)
    else:
        cands = system.enumerate_independent()

        def price(y):
            best, best_X = 0.0, frozenset()  # empty set prices at 0
            for X in cands:
                v = float(sum(y[e] for e in X))
                if v > best + 1e-15:
                    best, best_X = v, X
            return best_X

    columns: list[frozenset] = [frozenset(), price(x)]
    seen = set(columns)
    for _ in range(200 + 10 * m * m):
        nc = len(columns)
        lp = LinearProgram(
            np.concatenate([np.zeros(nc), np.ones(2 * m)]), maximize=False)
        for e in range(m):
            row = np.zeros(nc + 2 * m)
            for j, X in enumerate(columns):
                if e in X:
                    row[j] = 1.0
            row[nc + e] = 1.0
            row[nc + m + e] = -1.0
            lp.add_row(row, "==", float(x[e]))
        conv = np.concatenate([np.ones(nc), np.zeros(2 * m)])
        lp.add_row(conv, "==", 1.0)
        res = solve_lp(lp)
        if res.status != "optimal":
            raise SolverFailure(f"decomposition master came back {res.status}")
        y, sigma = res.duals[:m], float(res.duals[m])
        X_new = price(np.asarray(y))
        gain = float(sum(y[e] for e in X_new)) + sigma
        if X_new not in seen and gain > 1e-9:
            columns.append(X_new)
            seen.add(X_new)
            continue
        if res.value > 1e-9:
            raise DecompositionError(
                "point lies outside the independence system polytope",
                cut=(np.asarray(y), "<=", -sigma))
        lam = np.maximum(res.x[:nc], 0.0)
        lam /= lam.sum()
        strategy = MixedStrategy(
            [(columns[j], lam[j]) for j in range(nc) if lam[j] > 1e-12])
        recon = strategy.element_marginals(m)
        if np.abs(recon - x).max() > RECON_TOL:
            raise SolverFailure("decomposition reconstruction error too large")
        return strategy
    raise SolverFailure("column generation did not converge")


def robust_shortest_path(system: StPathSystem, lengths
                         ) -> tuple[float, MixedStrategy]:
    """Randomized worst-case shortest path: minimize, over distributions on
    source-sink paths, the maximum expected length across scenarios.

    Solves the aggregated min-max over the covering relaxation with
    min-cut separation; positive lengths force the optimum onto the path
    polytope, so stripping paths off the support decomposes it exactly.
    """
    L = np.asarray(lengths, dtype=float)
    if L.ndim != 2 or L.shape[1] != system.n_elements:
        raise ModelError("lengths must be scenarios x arcs")
    if np.any(L <= 0):
        raise ModelError("arc lengths must be strictly positive")
    if not system.is_independent(frozenset(range(system.n_elements))):
        raise ModelError("no source-sink path exists")

    def oracle(x):
        value, cut = system.min_st_cut(x)
        if value < 1.0 - CUT_TOL:
            a = np.zeros(system.n_elements)
            a[list(cut)] = 1.0
            return a, ">=", 1.0
        return None

    value, x, _, _ = _maxmin_with_cuts(L, oracle, maximize=False, covering=True)
    strategy = _strip_paths(system, x)
    return float(value), strategy


def _strip_paths(system: StPathSystem, x: np.ndarray) -> MixedStrategy:
    """Decompose a unit path flow by repeatedly removing bottleneck paths."""
    remaining = x.copy()
    atoms: list[tuple[frozenset, float]] = []
    out_arcs: dict[int, list[int]] = {}
    for a, (u, _) in enumerate(system.arcs):
        out_arcs.setdefault(u, []).append(a)
    for _ in range(system.n_elements + 1):
        parent: dict[int, int] = {}
        seen = {system.source}
        queue = deque([system.source])
        while queue and system.sink not in seen:
            u = queue.popleft()
            for a in out_arcs.get(u, ()):
                v = system.arcs[a][1]
                if v not in seen and remaining[a] > 1e-9:
                    seen.add(v)
                    parent[v] = a
                    queue.append(v)
        if system.sink not in seen:
            break
        path = []
        node = system.sink
        while node != system.source:
            a = parent[node]
            path.append(a)
            node = system.arcs[a][0]
        bottleneck = min(remaining[a] for a in path)
        atoms.append((frozenset(path), float(bottleneck)))
        for a in path:
            remaining[a] -= bottleneck
    if not atoms:
        raise SolverFailure("no path found in the fractional support")
    total = sum(p for _, p in atoms)
    if abs(total - 1.0) > 1e-6:
        raise SolverFailure(f"path mass {total} is not a unit flow")
    return MixedStrategy([(P, p / total) for P, p in atoms])


class FunctionPolytope:
    """Half-space description of a set of nonnegative weight vectors:
    { w >= 0 : exists psi >= 0 with A w + B psi <= c }."""

    def __init__(self, A, c, B=None):
        self.A = np.atleast_2d(np.asarray(A, dtype=float))
        self.c = np.asarray(c, dtype=float)
        m = self.A.shape[0]
        self.B = (np.zeros((m, 0)) if B is None
                  else np.atleast_2d(np.asarray(B, dtype=float)))
        if self.c.shape != (m,) or self.B.shape[0] != m:
            raise ModelError("inconsistent polytope dimensions")
        if not self._nonempty():
            raise ModelError("the weight polytope is empty")

    @property
    def n_elements(self) -> int:
        return self.A.shape[1]

    @property
    def n_aux(self) -> int:
        return self.B.shape[1]

    def _nonempty(self) -> bool:
        nv = self.n_elements + self.n_aux
        lp = LinearProgram(np.zeros(nv))
        M = np.hstack([self.A, self.B])
        for i in range(self.A.shape[0]):
            lp.add_row(M[i], "<=", float(self.c[i]))
        return solve_lp(lp).status == "optimal"

    @classmethod
    def from_scenarios(cls, W) -> "FunctionPolytope":
        """Embed finitely many linear scenarios as the convex hull of their
        weight vectors: w = sum_k psi_k W_k with psi a probability vector."""
        W = np.atleast_2d(np.asarray(W, dtype=float))
        n, m = W.shape
        A_rows, B_rows, c = [], [], []
        eye = np.eye(m)
        for e in range(m):
            A_rows.append(eye[e])
            B_rows.append(-W[:, e])
            c.append(0.0)
            A_rows.append(-eye[e])
            B_rows.append(W[:, e])
            c.append(0.0)
        A_rows.append(np.zeros(m))
        B_rows.append(np.ones(n))
        c.append(1.0)
        A_rows.append(np.zeros(m))
        B_rows.append(-np.ones(n))
        c.append(-1.0)
        return cls(np.array(A_rows), np.array(c), np.array(B_rows))

    def min_inner(self, x) -> float:
        """min over the polytope of x . w (for validation and tests)."""
        nv = self.n_elements + self.n_aux
        lp = LinearProgram(np.concatenate([np.asarray(x, dtype=float),
                                           np.zeros(self.n_aux)]),
                           maximize=False, bounds=[(0.0, None)] * nv)
        M = np.hstack([self.A, self.B])
        for i in range(self.A.shape[0]):
            lp.add_row(M[i], "<=", float(self.c[i]))
        res = solve_lp(lp)
        if res.status != "optimal":
            raise ModelError(f"inner weight LP came back {res.status}")
        return float(res.value)


def solve_function_polytope(system: IndependenceSystem, F: FunctionPolytope,
                            oracle=None):
    """Max-min against a weight set given by half-spaces.

    The inner minimization min_{w in F} x.w is replaced by its LP dual
    (variables y >= 0 over the describing rows), giving one joint LP in
    (x, y) solved under cutting planes on x.  Returns the value, the
    optimal x, and its decomposition into a mixed strategy.
    """
    m = system.n_elements
    if F.n_elements != m:
        raise ModelError("polytope dimension does not match the system")
    if oracle is None:
        oracle = polytope_oracle(system)
    rows_m = F.A.shape[0]

    cuts: list = []
    cap = max(50 * m * m, 50)
    for _ in range(cap):
        # Variables: x (m) then dual multipliers y (one per describing row).
        lp = LinearProgram(np.concatenate([np.zeros(m), -F.c]),
                           bounds=[(0.0, 1.0)] * m + [(0.0, None)] * rows_m)
        for e in range(m):
            row = np.concatenate([np.zeros(m), F.A[:, e]])
            row[e] = 1.0
            lp.add_row(row, ">=", 0.0)
        for j in range(F.n_aux):
            lp.add_row(np.concatenate([np.zeros(m), F.B[:, j]]), ">=", 0.0)
        for a, sense, rhs in cuts:
            lp.add_row(np.concatenate([a, np.zeros(rows_m)]), sense, rhs)
        res = solve_lp(lp)
        if res.status == "unbounded":
            raise ModelError(
                "inner weight problem is unbounded below over the polytope")
        if res.status != "optimal":
            raise SolverFailure(f"weight-set LP came back {res.status}")
        x = res.x[:m]
        cut = oracle(x)
        if cut is None or _cut_violation(cut, x) <= CUT_TOL:
            point = FractionalPoint(x)
            return float(res.value), point, decompose(point, system)
        cuts.append(cut)
    raise SolverFailure(f"cutting-plane loop exceeded {cap} iterations")


def curvature_linearize(g: Objective) -> tuple[LinearObjective, float]:
    """Modular upper bound from singleton values, certified by curvature.

    Returns (g_hat, factor) with factor * g_hat(X) <= g(X) <= g_hat(X) for
    every X; factor = 1 - curvature, where the curvature measures the
    worst relative drop of an element's marginal at the full set.
    """
    if not (g.monotone and g.submodular):
        raise ModelError("curvature needs a monotone submodular objective")
    n = g.n_elements
    full = frozenset(range(n))
    singles = np.array([g.value(frozenset({e})) for e in range(n)])
    if np.all(singles <= 0):
        raise ModelError("objective is identically zero")
    g_full = g.value(full)
    ratios = [(g_full - g.value(full - {e})) / singles[e]
              for e in range(n) if singles[e] > 0]
    factor = min(ratios)
    return LinearObjective(singles), float(factor)
