"""Capped objective surrogates for the multiplicative-weights engine.

A reduction g of f with cap eta and certification gamma satisfies
(i)  g(X) <= min(f(X), eta) everywhere, and
(ii) g(X) < gamma * eta  implies  g(X) = f(X).
Three constructions cover the objective kinds: plain truncation for
monotone submodular objectives, per-element weight clipping for linear
ones, and an inf-convolution with a per-element penalty for general
submodular objectives.  gamma is attached by the construction, never
user-supplied, because the engine's iteration count depends on it.
"""
from __future__ import annotations

import math
from itertools import combinations

import numpy as np

from .errors import ModelError, SizeLimitError
from .instance import (CardinalityRatioObjective, LinearObjective, Objective,
                       _as_index_set)

CHECK_TOL = 1e-12


class ReducedObjective(Objective):
    """Base for reduction surrogates; evaluates like any other objective."""

    construction = "abstract"

    def __init__(self, base: Objective, eta: float, gamma: float):
        if not (eta > 0):
            raise ModelError("cap eta must be positive")
        super().__init__(base.n_elements)
        self.base = base
        self.eta = float(eta)
        self.gamma = float(gamma)


class TruncatedObjective(ReducedObjective):
    """g = min(f, eta); keeps monotone submodularity, gamma = 1."""

    construction = "truncate"

    def __init__(self, base: Objective, eta: float):
        if math.isfinite(eta) and not base.monotone:
            raise ModelError("truncation requires a monotone objective")
        super().__init__(base, eta, 1.0)
        self.monotone = base.monotone
        if math.isfinite(eta):
            self.submodular = base.submodular and base.monotone
        else:
            self.submodular = base.submodular

    def value(self, X) -> float:
        return min(self.base.value(X), self.eta)


class ClippedLinearObjective(ReducedObjective):
    """Per-element clip g(X) = sum min(w_e, eta/|E|); gamma = 1/|E|."""

    construction = "linear_clip"
    monotone = True
    submodular = True

    def __init__(self, base: LinearObjective, eta: float):
        if not isinstance(base, LinearObjective):
            raise ModelError("weight clipping requires a linear objective")
        super().__init__(base, eta, 1.0 / base.n_elements)
        cap = eta / base.n_elements
        self.weights = np.minimum(base.weights, cap)
        self.weights.setflags(write=False)

    def value(self, X) -> float:
        X = _as_index_set(X)
        self._check_indices(X)
        return float(sum(self.weights[e] for e in X))


class InfConvolutionObjective(ReducedObjective):
    """g(X) = min over Z subset of X of f(Z) + eta |X - Z| / |E|.

    Evaluated by exhaustive minimization over subsets of X (so |X| <= 20);
    preserves submodularity even for non-monotone f, gamma = 1/|E|.
    """

    construction = "submodular_inf"
    MAX_EVAL = 20

    def __init__(self, base: Objective, eta: float):
        if not base.submodular:
            raise ModelError("inf-convolution requires a submodular objective")
        super().__init__(base, eta, 1.0 / base.n_elements)
        self.submodular = True
        self.monotone = base.monotone

    def value(self, X) -> float:
        X = _as_index_set(X)
        self._check_indices(X)
        if len(X) > self.MAX_EVAL:
            raise SizeLimitError(
                f"inf-convolution evaluation capped at |X| <= {self.MAX_EVAL}")
        if not math.isfinite(self.eta):
            return self.base.value(X)
        penalty = self.eta / self.n_elements
        elems = sorted(X)
        best = math.inf
        for r in range(len(elems) + 1):
            for Z in combinations(elems, r):
                cand = self.base.value(frozenset(Z)) + penalty * (len(elems) - r)
                if cand < best:
                    best = cand
        return best


def reduce_monotone_submodular(f: Objective, eta: float) -> TruncatedObjective:
    """Truncate a monotone submodular objective at eta (gamma = 1)."""
    if math.isfinite(eta) and not (f.monotone and f.submodular):
        raise ModelError("objective must be monotone submodular")
    return TruncatedObjective(f, eta)


def reduce_linear(f: LinearObjective, eta: float) -> ClippedLinearObjective:
    """Clip linear weights at eta/|E| (gamma = 1/|E|)."""
    return ClippedLinearObjective(f, eta)


def reduce_general_submodular(f: Objective, eta: float) -> InfConvolutionObjective:
    """Inf-convolution reduction of a (possibly non-monotone) submodular f."""
    return InfConvolutionObjective(f, eta)


def build_reduction(f: Objective, eta: float) -> ReducedObjective:
    """Pick the construction matching the objective kind."""
    if isinstance(f, LinearObjective):
        return reduce_linear(f, eta)
    if isinstance(f, CardinalityRatioObjective):
        return TruncatedObjective(f, eta)
    if f.monotone and f.submodular:
        return reduce_monotone_submodular(f, eta)
    if f.submodular:
        return reduce_general_submodular(f, eta)
    raise ModelError(f"no reduction construction for objective kind {f.kind!r}")


def family_gamma(objectives) -> float:
    """Certified gamma shared by the family (minimum over constructions)."""
    gammas = []
    for f in objectives:
        if isinstance(f, CardinalityRatioObjective):
            gammas.append(1.0)
        elif isinstance(f, LinearObjective):
            gammas.append(1.0 / f.n_elements)
        elif f.monotone and f.submodular:
            gammas.append(1.0)
        elif f.submodular:
            gammas.append(1.0 / f.n_elements)
        else:
            raise ModelError(f"no reduction construction for kind {f.kind!r}")
    return min(gammas)


def check_reduction(f: Objective, g, eta: float, gamma: float,
                    samples: int | None = None, seed: int = 0):
    """Verify the reduction laws; returns (ok, first violating set or None).

    Exhaustive over all subsets when |E| <= 12, sampled otherwise.
    Law (ii) is checked in its strict form (trigger g(X) < gamma*eta),
    which is what every construction certifies.
    """
    n = f.n_elements
    if n <= 12 and samples is None:
        subsets = ((frozenset(e for e in range(n) if mask >> e & 1))
                   for mask in range(1 << n))
    else:
        rng = np.random.default_rng(seed)
        count = samples if samples is not None else 2000
        subsets = (frozenset(int(e) for e in np.where(rng.random(n) < 0.5)[0])
                   for _ in range(count))
    g_value = g.value if isinstance(g, Objective) else g
    for X in subsets:
        fx, gx = f.value(X), g_value(X)
        if gx > min(fx, eta) + CHECK_TOL:
            return False, X
        if gx < gamma * eta - CHECK_TOL and abs(gx - fx) > CHECK_TOL:
            return False, X
    return True, None
