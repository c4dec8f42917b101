"""Problem instances: ground sets, objective families, and mixed strategies.

Element identifiers are strings mapped to dense indices at construction;
every solver works on index sets (frozensets of ints).  All reals are
float64 with tolerance 1e-9 for equality checks.
"""
from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidStrategyError, ModelError

EQ_TOL = 1e-9


class GroundSet:
    """Ordered set of unique element names; order fixes all vector indexing."""

    def __init__(self, elements: Sequence[str]):
        elements = tuple(str(e) for e in elements)
        if not elements:
            raise ModelError("ground set must be nonempty")
        if len(set(elements)) != len(elements):
            raise ModelError("ground set identifiers must be unique")
        self.elements = elements
        self._index = {e: i for i, e in enumerate(elements)}

    def __len__(self) -> int:
        return len(self.elements)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ModelError(f"unknown element {name!r}") from None

    def names(self, idxs: Iterable[int]) -> list[str]:
        return [self.elements[i] for i in sorted(idxs)]

    def index_set(self, names: Iterable[str]) -> frozenset[int]:
        return frozenset(self.index(e) for e in names)

    def __repr__(self):
        return f"GroundSet({list(self.elements)!r})"


def _as_index_set(X) -> frozenset:
    if isinstance(X, frozenset):
        return X
    return frozenset(X)


class Objective:
    """Set-function evaluator over ground indices with f(empty) = 0, f >= 0."""

    kind = "abstract"
    monotone = False
    submodular = False

    def __init__(self, n_elements: int):
        self.n_elements = int(n_elements)

    def value(self, X) -> float:
        raise NotImplementedError

    def _check_indices(self, X: frozenset):
        for e in X:
            if not (0 <= e < self.n_elements):
                raise ModelError(f"element index {e} out of range")


class LinearObjective(Objective):
    """f(X) = sum of nonnegative per-element weights."""

    kind = "linear"
    monotone = True
    submodular = True

    def __init__(self, weights):
        w = np.asarray(weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise ModelError("weights must be a nonempty vector")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ModelError("linear weights must be finite and >= 0")
        super().__init__(w.size)
        w.setflags(write=False)
        self.weights = w

    def value(self, X) -> float:
        X = _as_index_set(X)
        self._check_indices(X)
        return float(sum(self.weights[e] for e in X))


def _table_monotone(table: np.ndarray, n: int, tol: float = EQ_TOL) -> bool:
    idx = np.arange(table.size)
    for i in range(n):
        lo = idx[(idx >> i) & 1 == 0]
        if np.any(table[lo] > table[lo | (1 << i)] + tol):
            return False
    return True


def table_is_submodular(table: np.ndarray, n: int, tol: float = EQ_TOL) -> bool:
    """Exhaustive check of f(X+i) + f(X+j) >= f(X+i+j) + f(X) for all X, i != j."""
    idx = np.arange(table.size)
    for i in range(n):
        for j in range(i + 1, n):
            base = idx[((idx >> i) & 1 == 0) & ((idx >> j) & 1 == 0)]
            lhs = table[base | (1 << i)] + table[base | (1 << j)]
            rhs = table[base | (1 << i) | (1 << j)] + table[base]
            if np.any(lhs + tol < rhs):
                return False
    return True


class SubmodularTableObjective(Objective):
    """Explicit value table indexed by subset bitmask; ground size <= 20.

    Submodularity is verified exhaustively for small grounds and by
    sampling otherwise; monotonicity is recorded as a flag.
    """

    kind = "submodular_table"
    MAX_GROUND = 20

    def __init__(self, table, n_elements: int, check: bool = True):
        n = int(n_elements)
        if n > self.MAX_GROUND:
            raise ModelError(f"table objectives support at most {self.MAX_GROUND} elements")
        t = np.asarray(table, dtype=float)
        if t.shape != (1 << n,):
            raise ModelError(f"table must have 2^{n} entries")
        if abs(t[0]) > EQ_TOL:
            raise ModelError("f(empty set) must be 0")
        if np.any(t < -EQ_TOL) or not np.all(np.isfinite(t)):
            raise ModelError("table values must be finite and >= 0")
        super().__init__(n)
        t = np.maximum(t, 0.0)
        t.setflags(write=False)
        self.table = t
        if check and not self._passes_submodularity():
            raise ModelError("table failed submodularity checks")
        self.submodular = True
        self.monotone = _table_monotone(t, n)

    def _passes_submodularity(self) -> bool:
        n = self.n_elements
        if (1 << n) <= 4096:
            return table_is_submodular(self.table, n)
        rng = np.random.default_rng(0)
        for _ in range(1000):
            i, j = rng.choice(n, size=2, replace=False)
            base = int(rng.integers(0, 1 << n)) & ~(1 << int(i)) & ~(1 << int(j))
            lhs = self.table[base | (1 << int(i))] + self.table[base | (1 << int(j))]
            rhs = self.table[base | (1 << int(i)) | (1 << int(j))] + self.table[base]
            if lhs + EQ_TOL < rhs:
                return False
        return True

    def value(self, X) -> float:
        X = _as_index_set(X)
        self._check_indices(X)
        mask = 0
        for e in X:
            mask |= 1 << e
        return float(self.table[mask])


class CoverageObjective(Objective):
    """f(X) = total weight of items covered by the union of element cover sets."""

    kind = "coverage"
    monotone = True
    submodular = True

    def __init__(self, covers: Sequence[Iterable[int]], item_weights):
        w = np.asarray(item_weights, dtype=float)
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ModelError("item weights must be finite and >= 0")
        covers = tuple(frozenset(int(i) for i in c) for c in covers)
        for c in covers:
            for i in c:
                if not (0 <= i < w.size):
                    raise ModelError(f"covered item {i} out of range")
        super().__init__(len(covers))
        w.setflags(write=False)
        self.covers = covers
        self.item_weights = w

    def value(self, X) -> float:
        X = _as_index_set(X)
        self._check_indices(X)
        covered: set[int] = set()
        for e in X:
            covered |= self.covers[e]
        return float(sum(self.item_weights[i] for i in covered))


class CardinalityRatioObjective(Objective):
    """f(X) = (total of the k heaviest chosen values) / denominator.

    The denominator is a precomputed positive estimate of the best
    achievable top-k value, so evaluation stays cheap inside iterative
    solvers.
    """

    kind = "cardinality_ratio"
    monotone = True
    submodular = True

    def __init__(self, k: int, denominator: float, values):
        v = np.asarray(values, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise ModelError("values must be a nonempty vector")
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise ModelError("element values must be finite and >= 0")
        if not (k >= 1):
            raise ModelError("cardinality bound k must be >= 1")
        if not (denominator > 0):
            raise ModelError("denominator must be positive")
        super().__init__(v.size)
        v.setflags(write=False)
        self.k = int(k)
        self.denominator = float(denominator)
        self.values = v

    def top_k_value(self, X) -> float:
        X = _as_index_set(X)
        self._check_indices(X)
        chosen = sorted((self.values[e] for e in X), reverse=True)
        return float(sum(chosen[: self.k]))

    def value(self, X) -> float:
        return self.top_k_value(X) / self.denominator


class ProblemInstance:
    """Ground set, n objective scenarios, and an independence system."""

    def __init__(self, ground: GroundSet, objectives: Sequence[Objective], system):
        if len(objectives) < 1:
            raise ModelError("at least one objective is required")
        m = len(ground)
        for f in objectives:
            if f.n_elements != m:
                raise ModelError("objective dimension does not match ground set")
        if system.n_elements != m:
            raise ModelError("system dimension does not match ground set")
        self.ground = ground
        self.objectives = tuple(objectives)
        self.system = system

    @property
    def n_objectives(self) -> int:
        return len(self.objectives)

    @property
    def n_elements(self) -> int:
        return len(self.ground)

    def objective_values(self, X) -> np.ndarray:
        X = _as_index_set(X)
        return np.array([f.value(X) for f in self.objectives], dtype=float)


class MixedStrategy:
    """Finite-support probability distribution over element index sets."""

    def __init__(self, atoms: Iterable[tuple[Iterable[int], float]]):
        merged: dict[frozenset, float] = {}
        for X, p in atoms:
            p = float(p)
            if p < -EQ_TOL:
                raise InvalidStrategyError(f"negative probability {p}")
            if p <= 0:
                continue
            X = _as_index_set(X)
            merged[X] = merged.get(X, 0.0) + p
        total = sum(merged.values())
        if abs(total - 1.0) > 1e-9:
            raise InvalidStrategyError(f"probabilities sum to {total}, expected 1")
        self.atoms = tuple(sorted(merged.items(), key=lambda a: sorted(a[0])))

    @property
    def support(self) -> tuple[frozenset, ...]:
        return tuple(X for X, _ in self.atoms)

    @property
    def support_size(self) -> int:
        return len(self.atoms)

    def validate(self, system):
        for X, _ in self.atoms:
            if not system.is_independent(X):
                raise InvalidStrategyError(
                    f"support set {sorted(X)} is not independent")

    def element_marginals(self, n_elements: int) -> np.ndarray:
        x = np.zeros(n_elements)
        for X, p in self.atoms:
            for e in X:
                x[e] += p
        return x

    @classmethod
    def point_mass(cls, X) -> "MixedStrategy":
        return cls([(X, 1.0)])


def worst_case_value(p: MixedStrategy, inst: ProblemInstance) -> float:
    """min over scenarios of the expected objective under strategy p."""
    p.validate(inst.system)
    totals = np.zeros(inst.n_objectives)
    for X, prob in p.atoms:
        totals += prob * inst.objective_values(X)
    return float(totals.min())


def expected_values(p: MixedStrategy, inst: ProblemInstance) -> np.ndarray:
    """Per-scenario expected objective values under strategy p."""
    totals = np.zeros(inst.n_objectives)
    for X, prob in p.atoms:
        totals += prob * inst.objective_values(X)
    return totals


def scenario_value(X, q, inst: ProblemInstance) -> float:
    """Expected objective of the fixed set X under scenario mixture q."""
    q = np.asarray(q, dtype=float)
    if q.shape != (inst.n_objectives,):
        raise ModelError("scenario mixture has wrong length")
    if np.any(q < -EQ_TOL) or abs(q.sum() - 1.0) > 1e-9:
        raise ModelError("scenario mixture must be a probability vector")
    return float(q @ inst.objective_values(X))
