"""Independence systems: membership, rank, and polytope separation.

Concrete kinds: uniform and partition matroids, explicit set lists,
knapsack constraints, intersections of matroids, and s-t path systems
(the one kind that is deliberately not downward closed).
"""
from __future__ import annotations

from collections import deque
from typing import Iterable, Sequence

import numpy as np

from .errors import ModelError, SizeLimitError, UnsupportedOperationError

SEP_TOL = 1e-9
ENUM_LIMIT_GROUND = 16


def _as_index_set(X) -> frozenset:
    if isinstance(X, frozenset):
        return X
    return frozenset(X)


class IndependenceSystem:
    kind = "abstract"
    downward_closed = True
    is_matroid = False

    def __init__(self, n_elements: int):
        if n_elements < 1:
            raise ModelError("system needs at least one element")
        self.n_elements = int(n_elements)

    def _check_indices(self, X: frozenset):
        for e in X:
            if not (0 <= e < self.n_elements):
                raise ModelError(f"element index {e} out of range")

    def is_independent(self, X) -> bool:
        raise NotImplementedError

    def rank(self, U) -> int:
        raise UnsupportedOperationError(f"rank is not defined for kind {self.kind!r}")

    def separate(self, x):
        raise UnsupportedOperationError(
            f"matroid polytope separation is not available for kind {self.kind!r}")

    def enumerate_independent(self) -> list[frozenset]:
        """All independent sets in increasing bitmask order (desk scale only)."""
        n = self.n_elements
        if n > ENUM_LIMIT_GROUND:
            raise SizeLimitError(
                f"cannot enumerate independent sets over {n} elements")
        out = []
        for mask in range(1 << n):
            X = frozenset(e for e in range(n) if mask >> e & 1)
            if self.is_independent(X):
                out.append(X)
        return out


def greedy_max_weight(system: IndependenceSystem, weights) -> frozenset:
    """Greedy linear maximization: decreasing weight, lowest index first.

    Exact for matroids; a 1/mu approximation on mu-matroid intersections.
    Nonpositive weights are skipped (valid for downward-closed systems).
    """
    w = np.asarray(weights, dtype=float)
    order = sorted(range(system.n_elements), key=lambda e: (-w[e], e))
    chosen: set[int] = set()
    for e in order:
        if w[e] <= 0:
            break
        if system.is_independent(frozenset(chosen | {e})):
            chosen.add(e)
    return frozenset(chosen)


def matroid_rank(system: IndependenceSystem, U) -> int:
    """Greedy maximum independent subset size within U (matroids only)."""
    U = _as_index_set(U)
    system._check_indices(U)
    if not system.is_matroid:
        raise UnsupportedOperationError(
            f"rank requires a matroid, got kind {system.kind!r}")
    return system.rank(U)


def maximal_independent_sets(system: IndependenceSystem,
                             sets: Sequence[frozenset]) -> list[frozenset]:
    """Filter a list of independent sets down to the inclusion-wise maximal ones."""
    ground = range(system.n_elements)
    out = []
    for X in sets:
        if all(e in X or not system.is_independent(X | {e}) for e in ground):
            out.append(X)
    return out


class UniformMatroid(IndependenceSystem):
    kind = "uniform"
    is_matroid = True

    def __init__(self, n_elements: int, r: int):
        super().__init__(n_elements)
        if not (0 <= r):
            raise ModelError("uniform matroid rank must be >= 0")
        self.r = int(r)

    def is_independent(self, X) -> bool:
        X = _as_index_set(X)
        self._check_indices(X)
        return len(X) <= self.r

    def rank(self, U) -> int:
        U = _as_index_set(U)
        self._check_indices(U)
        return min(len(U), self.r)

    def separate(self, x):
        return _separate_by_blocks(x, [(tuple(range(self.n_elements)), self.r)])


class PartitionMatroid(IndependenceSystem):
    """Blocks with per-block capacities; blocks must partition the ground set."""

    kind = "partition"
    is_matroid = True

    def __init__(self, n_elements: int, blocks: Sequence[tuple[Iterable[int], int]]):
        super().__init__(n_elements)
        seen: set[int] = set()
        norm = []
        for elems, cap in blocks:
            elems = tuple(sorted(int(e) for e in elems))
            if any(not (0 <= e < n_elements) for e in elems):
                raise ModelError("block element out of range")
            if seen & set(elems):
                raise ModelError("blocks must be disjoint")
            if cap < 0:
                raise ModelError("block capacity must be >= 0")
            seen |= set(elems)
            norm.append((elems, int(cap)))
        if seen != set(range(n_elements)):
            raise ModelError("blocks must cover every element")
        self.blocks = tuple(norm)
        self._block_of = np.empty(n_elements, dtype=int)
        for j, (elems, _) in enumerate(self.blocks):
            for e in elems:
                self._block_of[e] = j

    def is_independent(self, X) -> bool:
        X = _as_index_set(X)
        self._check_indices(X)
        counts = [0] * len(self.blocks)
        for e in X:
            counts[self._block_of[e]] += 1
        return all(c <= cap for c, (_, cap) in zip(counts, self.blocks))

    def rank(self, U) -> int:
        U = _as_index_set(U)
        self._check_indices(U)
        counts = [0] * len(self.blocks)
        for e in U:
            counts[self._block_of[e]] += 1
        return sum(min(c, cap) for c, (_, cap) in zip(counts, self.blocks))

    def separate(self, x):
        return _separate_by_blocks(x, [(elems, cap) for elems, cap in self.blocks])


def _separate_by_blocks(x, blocks):
    """Minimize rank(U) - x(U) over U for block-separable rank functions.

    Within a block the minimizer takes some number of largest-x elements,
    so a prefix scan per block finds the global minimum exactly.
    """
    x = np.asarray(x, dtype=float)
    total_gap = 0.0
    chosen: list[int] = []
    rho = 0
    for elems, cap in blocks:
        order = sorted(elems, key=lambda e: (-x[e], e))
        best_gap, best_i = 0.0, 0
        acc = 0.0
        for i, e in enumerate(order, start=1):
            acc += x[e]
            gap = min(i, cap) - acc
            if gap < best_gap - 1e-15:
                best_gap, best_i = gap, i
        if best_i > 0:
            total_gap += best_gap
            chosen.extend(order[:best_i])
            rho += min(best_i, cap)
    if total_gap < -SEP_TOL:
        return frozenset(chosen), rho
    return None


class ExplicitListSystem(IndependenceSystem):
    """All independent sets stored explicitly; ground size <= 20."""

    kind = "explicit"
    MAX_GROUND = 20

    def __init__(self, n_elements: int, sets: Iterable[Iterable[int]]):
        super().__init__(n_elements)
        if n_elements > self.MAX_GROUND:
            raise SizeLimitError(
                f"explicit systems support at most {self.MAX_GROUND} elements")
        family = {_as_index_set(S) for S in sets}
        for S in family:
            self._check_indices(S)
        if frozenset() not in family:
            raise ModelError("the empty set must be independent")
        for S in family:
            for e in S:
                if S - {e} not in family:
                    raise ModelError(
                        f"family is not downward closed at {sorted(S)} minus {e}")
        self.sets = frozenset(family)
        self._matroid_checked: bool | None = None

    @classmethod
    def from_maximal(cls, n_elements: int, maximal: Iterable[Iterable[int]]):
        closed: set[frozenset] = {frozenset()}
        stack = [_as_index_set(S) for S in maximal]
        while stack:
            S = stack.pop()
            if S in closed:
                continue
            closed.add(S)
            stack.extend(S - {e} for e in S)
        return cls(n_elements, closed)

    def is_independent(self, X) -> bool:
        X = _as_index_set(X)
        self._check_indices(X)
        return X in self.sets

    @property
    def is_matroid(self) -> bool:
        if self._matroid_checked is None:
            self._matroid_checked = self._verify_exchange()
        return self._matroid_checked

    def _verify_exchange(self) -> bool:
        if len(self.sets) > 5000:
            return False  # unverifiable at this size: treat as non-matroid
        by_size: dict[int, list[frozenset]] = {}
        for S in self.sets:
            by_size.setdefault(len(S), []).append(S)
        for X in self.sets:
            for size in range(len(X) + 1, max(by_size) + 1):
                for Y in by_size.get(size, ()):
                    if not any(X | {e} in self.sets for e in Y - X):
                        return False
        return True

    def rank(self, U) -> int:
        U = _as_index_set(U)
        self._check_indices(U)
        if not self.is_matroid:
            raise UnsupportedOperationError("explicit family is not a matroid")
        chosen: frozenset = frozenset()
        for e in sorted(U):
            if chosen | {e} in self.sets:
                chosen |= {e}
        return len(chosen)

    def separate(self, x):
        if not self.is_matroid:
            raise UnsupportedOperationError("explicit family is not a matroid")
        x = np.asarray(x, dtype=float)
        n = self.n_elements
        best = (0.0, None, 0)
        for mask in range(1, 1 << n):
            U = frozenset(e for e in range(n) if mask >> e & 1)
            gap = self.rank(U) - float(sum(x[e] for e in U))
            if gap < best[0] - 1e-15:
                best = (gap, U, self.rank(U))
        if best[1] is not None and best[0] < -SEP_TOL:
            return best[1], best[2]
        return None

    def enumerate_independent(self) -> list[frozenset]:
        def mask_of(S):
            m = 0
            for e in S:
                m |= 1 << e
            return m

        return sorted(self.sets, key=mask_of)


class KnapsackSystem(IndependenceSystem):
    """Feasible sets have integer total size at most the capacity."""

    kind = "knapsack"

    def __init__(self, sizes, capacity):
        s = np.asarray(sizes)
        if not np.issubdtype(s.dtype, np.integer):
            sf = np.asarray(sizes, dtype=float)
            if not np.allclose(sf, np.round(sf), atol=1e-12):
                raise ModelError("knapsack sizes must be integers (scale first)")
            s = np.round(sf).astype(np.int64)
        s = s.astype(np.int64)
        if np.any(s <= 0):
            raise ModelError("knapsack sizes must be positive")
        if int(capacity) != capacity or capacity < 0:
            raise ModelError("knapsack capacity must be a nonnegative integer")
        super().__init__(s.size)
        s.setflags(write=False)
        self.sizes = s
        self.capacity = int(capacity)

    def is_independent(self, X) -> bool:
        X = _as_index_set(X)
        self._check_indices(X)
        return int(sum(self.sizes[e] for e in X)) <= self.capacity


class IntersectionSystem(IndependenceSystem):
    """Common independent sets of mu matroids on one ground set."""

    kind = "intersection"

    def __init__(self, matroids: Sequence[IndependenceSystem]):
        if not matroids:
            raise ModelError("intersection needs at least one matroid")
        n = matroids[0].n_elements
        for m in matroids:
            if m.n_elements != n:
                raise ModelError("matroids must share the ground set")
            if not m.is_matroid:
                raise ModelError("intersection components must be matroids")
        super().__init__(n)
        self.matroids = tuple(matroids)

    @property
    def mu(self) -> int:
        return len(self.matroids)

    def is_independent(self, X) -> bool:
        X = _as_index_set(X)
        self._check_indices(X)
        return all(m.is_independent(X) for m in self.matroids)

    def separate(self, x):
        """Separate over the intersection of the component matroid polytopes.

        Exact for the common polytope when mu <= 2; a relaxation otherwise.
        """
        for m in self.matroids:
            hit = m.separate(x)
            if hit is not None:
                return hit
        return None


class StPathSystem(IndependenceSystem):
    """Arc subsets of a digraph that contain a path from source to sink.

    Not downward closed: removing arcs can disconnect the path.
    """

    kind = "st_path"
    downward_closed = False

    def __init__(self, n_nodes: int, arcs: Sequence[tuple[int, int]],
                 source: int, sink: int):
        if n_nodes < 2:
            raise ModelError("need at least two nodes")
        arcs = tuple((int(u), int(v)) for u, v in arcs)
        for u, v in arcs:
            if not (0 <= u < n_nodes and 0 <= v < n_nodes):
                raise ModelError("arc endpoint out of range")
        if not (0 <= source < n_nodes and 0 <= sink < n_nodes) or source == sink:
            raise ModelError("invalid source/sink")
        super().__init__(len(arcs))
        self.n_nodes = int(n_nodes)
        self.arcs = arcs
        self.source = int(source)
        self.sink = int(sink)

    def is_independent(self, X) -> bool:
        X = _as_index_set(X)
        self._check_indices(X)
        out: dict[int, list[int]] = {}
        for a in X:
            u, v = self.arcs[a]
            out.setdefault(u, []).append(v)
        seen = {self.source}
        queue = deque([self.source])
        while queue:
            u = queue.popleft()
            if u == self.sink:
                return True
            for v in out.get(u, ()):
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        return self.sink in seen

    def enumerate_simple_paths(self) -> list[frozenset]:
        """All simple source-sink paths as arc index sets (DFS, index order)."""
        out_arcs: dict[int, list[int]] = {}
        for a, (u, _) in enumerate(self.arcs):
            out_arcs.setdefault(u, []).append(a)
        paths: list[frozenset] = []

        def walk(node, used_nodes, used_arcs):
            if node == self.sink:
                paths.append(frozenset(used_arcs))
                return
            for a in out_arcs.get(node, ()):
                v = self.arcs[a][1]
                if v not in used_nodes:
                    walk(v, used_nodes | {v}, used_arcs + [a])

        walk(self.source, {self.source}, [])
        return paths

    def min_st_cut(self, x) -> tuple[float, frozenset]:
        """Minimum s-t cut value under arc capacities x, via max flow.

        Returns the cut value and the arc set crossing the cut; value below 1
        certifies a violated covering constraint over those arcs.
        """
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n_elements,) or np.any(x < -SEP_TOL):
            raise ModelError("capacities must be a nonnegative arc vector")
        flow = np.zeros(self.n_elements)
        out_arcs: dict[int, list[int]] = {}
        in_arcs: dict[int, list[int]] = {}
        for a, (u, v) in enumerate(self.arcs):
            out_arcs.setdefault(u, []).append(a)
            in_arcs.setdefault(v, []).append(a)

        def reachable():
            """BFS in the residual graph; returns (visited set, parent map)."""
            parent: dict[int, tuple[int, bool]] = {}
            seen = {self.source}
            queue = deque([self.source])
            while queue:
                u = queue.popleft()
                for a in out_arcs.get(u, ()):
                    v = self.arcs[a][1]
                    if v not in seen and x[a] - flow[a] > SEP_TOL:
                        seen.add(v)
                        parent[v] = (a, True)
                        queue.append(v)
                for a in in_arcs.get(u, ()):
                    v = self.arcs[a][0]
                    if v not in seen and flow[a] > SEP_TOL:
                        seen.add(v)
                        parent[v] = (a, False)
                        queue.append(v)
            return seen, parent

        while True:
            seen, parent = reachable()
            if self.sink not in seen:
                break
            path = []
            node = self.sink
            while node != self.source:
                a, forward = parent[node]
                path.append((a, forward))
                node = self.arcs[a][0] if forward else self.arcs[a][1]
            bottleneck = min(
                (x[a] - flow[a]) if fwd else flow[a] for a, fwd in path)
            for a, fwd in path:
                flow[a] += bottleneck if fwd else -bottleneck
        seen, _ = reachable()
        cut = frozenset(
            a for a, (u, v) in enumerate(self.arcs) if u in seen and v not in seen)
        return float(sum(x[a] for a in cut)), cut
