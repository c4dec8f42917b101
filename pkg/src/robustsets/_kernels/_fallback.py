"""Pure numpy implementations of the hot kernels.

Semantically identical to the compiled versions in _core.pyx; selected at
import time when the extension is unavailable (or forced via
ROBUSTSETS_PURE=1).
"""
from __future__ import annotations

import numpy as np

INF = np.int64(1) << 62


def mwu_table_loop(values: np.ndarray, factor: float, T: int) -> np.ndarray:
    """Run T multiplicative-weight rounds against a fixed value table.

    values[k, j] is the (reduced) objective of candidate j under scenario k;
    each round plays the candidate maximizing the weight-mixture value
    (first index wins ties) and scales log-weights by factor * value.
    Returns the chosen candidate index per round.
    """
    values = np.ascontiguousarray(values, dtype=np.float64)
    n, m = values.shape
    logw = np.zeros(n)
    choices = np.empty(T, dtype=np.int64)
    for t in range(T):
        w = np.exp(logw - logw.max())
        q = w / w.sum()
        scores = q @ values
        j = int(np.argmax(scores))
        choices[t] = j
        logw += factor * values[:, j]
    return choices


def knapsack_min_size_dp(profits: np.ndarray, sizes: np.ndarray,
                         capacity: int) -> int:
    """Maximize total integer profit under a size budget; returns a bitmask.

    Table dp[j][p] = minimum size of a subset of the first j items with
    profit exactly p.  Ties prefer not taking the later item.
    """
    profits = np.asarray(profits, dtype=np.int64)
    sizes = np.asarray(sizes, dtype=np.int64)
    n = profits.size
    P = int(profits.sum())
    dp = np.full((n + 1, P + 1), INF, dtype=np.int64)
    dp[0, 0] = 0
    for j in range(1, n + 1):
        prof, sz = int(profits[j - 1]), int(sizes[j - 1])
        prev = dp[j - 1]
        cand = np.full(P + 1, INF, dtype=np.int64)
        if prof <= P:
            cand[prof:] = np.minimum(prev[:P + 1 - prof] + sz, INF)
        dp[j] = np.minimum(prev, cand)
    feasible = np.where(dp[n] <= capacity)[0]
    best_p = int(feasible[-1]) if feasible.size else 0
    mask = 0
    p = best_p
    for j in range(n, 0, -1):
        if dp[j, p] < dp[j - 1, p]:
            mask |= 1 << (j - 1)
            p -= int(profits[j - 1])
    return mask


def cardinality_min_size_dp(contrib: np.ndarray, sizes: np.ndarray,
                            capacity: int, kappa: int) -> tuple[int, int]:
    """Maximize a position-scaled integer score under a size budget.

    contrib[z-1, xi-1] is the score earned when item z (items ordered by
    decreasing value) is chosen as the xi-th chosen item.  Table
    tau[z][xi][phi] = minimum size of a subset of the first z items with
    exactly xi items and total score phi.  Returns (best score, bitmask).
    """
    contrib = np.asarray(contrib, dtype=np.int64)
    sizes = np.asarray(sizes, dtype=np.int64)
    n = sizes.size
    K = int(kappa)
    tau = np.full((n + 1, n + 1, K + 1), INF, dtype=np.int64)
    tau[0, 0, 0] = 0
    for z in range(1, n + 1):
        sz = int(sizes[z - 1])
        tau[z] = tau[z - 1]
        for xi in range(1, z + 1):
            c = int(contrib[z - 1, xi - 1])
            if c > K:
                continue
            prev = tau[z - 1, xi - 1]
            cand = np.full(K + 1, INF, dtype=np.int64)
            cand[c:] = np.minimum(prev[:K + 1 - c] + sz, INF)
            tau[z, xi] = np.minimum(tau[z - 1, xi], cand)
    best_phi, best_xi = 0, 0
    for phi in range(K, -1, -1):
        hits = np.where(tau[n, :, phi] <= capacity)[0]
        if hits.size:
            best_phi, best_xi = phi, int(hits[0])
            break
    mask = 0
    xi, phi = best_xi, best_phi
    for z in range(n, 0, -1):
        if tau[z, xi, phi] < tau[z - 1, xi, phi]:
            mask |= 1 << (z - 1)
            phi -= int(contrib[z - 1, xi - 1])
            xi -= 1
    return best_phi, mask
