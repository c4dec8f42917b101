# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; semantics mirror _fallback.py exactly."""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp

cnp.import_array()

INF64 = np.int64(1) << 62
cdef long long INF = 1LL << 62


def mwu_table_loop(values, double factor, long long T):
    """Run T multiplicative-weight rounds against a fixed value table.

    values[k, j] is the (reduced) objective of candidate j under scenario k;
    each round plays the candidate maximizing the weight-mixture value
    (first index wins ties) and scales log-weights by factor * value.
    Returns the chosen candidate index per round.
    """
    cdef double[:, ::1] V = np.ascontiguousarray(values, dtype=np.float64)
    cdef Py_ssize_t n = V.shape[0]
    cdef Py_ssize_t m = V.shape[1]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] choices = np.empty(T, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] logw_arr = np.zeros(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] q_arr = np.zeros(n)
    cdef double[::1] logw = logw_arr
    cdef double[::1] q = q_arr
    cdef Py_ssize_t t, k, j, best_j
    cdef double mx, total, score, best_score

    for t in range(T):
        mx = logw[0]
        for k in range(1, n):
            if logw[k] > mx:
                mx = logw[k]
        total = 0.0
        for k in range(n):
            q[k] = exp(logw[k] - mx)
            total += q[k]
        for k in range(n):
            q[k] /= total
        best_j = 0
        best_score = -1.0
        for j in range(m):
            score = 0.0
            for k in range(n):
                score += q[k] * V[k, j]
            if score > best_score:
                best_score = score
                best_j = j
        choices[t] = best_j
        for k in range(n):
            logw[k] += factor * V[k, best_j]
    return choices


def knapsack_min_size_dp(profits, sizes, capacity):
    """Maximize total integer profit under a size budget; returns a bitmask.

    Table dp[j][p] = minimum size of a subset of the first j items with
    profit exactly p.  Ties prefer not taking the later item.
    """
    cdef long long[::1] prof = np.ascontiguousarray(profits, dtype=np.int64)
    cdef long long[::1] sz = np.ascontiguousarray(sizes, dtype=np.int64)
    cdef long long cap = capacity
    cdef Py_ssize_t n = prof.shape[0]
    cdef long long P = 0
    cdef Py_ssize_t j, p
    for j in range(n):
        P += prof[j]
    cdef cnp.ndarray[cnp.int64_t, ndim=2] dp_arr = np.full(
        (n + 1, P + 1), INF64, dtype=np.int64)
    cdef long long[:, ::1] dp = dp_arr
    dp[0, 0] = 0
    cdef long long pj, sj, cand
    for j in range(1, n + 1):
        pj = prof[j - 1]
        sj = sz[j - 1]
        for p in range(P + 1):
            cand = dp[j - 1, p]
            if p >= pj and dp[j - 1, p - pj] < INF:
                if dp[j - 1, p - pj] + sj < cand:
                    cand = dp[j - 1, p - pj] + sj
            dp[j, p] = cand
    cdef long long best_p = 0
    for p in range(P, -1, -1):
        if dp[n, p] <= cap:
            best_p = p
            break
    cdef long long mask = 0
    p = <Py_ssize_t> best_p
    for j in range(n, 0, -1):
        if dp[j, p] < dp[j - 1, p]:
            mask |= 1LL << (j - 1)
            p -= <Py_ssize_t> prof[j - 1]
    return int(mask)


def cardinality_min_size_dp(contrib, sizes, capacity, kappa):
    """Maximize a position-scaled integer score under a size budget.

    contrib[z-1, xi-1] is the score earned when item z (items ordered by
    decreasing value) is chosen as the xi-th chosen item.  Table
    tau[z][xi][phi] = minimum size of a subset of the first z items with
    exactly xi items and total score phi.  Returns (best score, bitmask).
    """
    cdef long long[:, ::1] C = np.ascontiguousarray(contrib, dtype=np.int64)
    cdef long long[::1] sz = np.ascontiguousarray(sizes, dtype=np.int64)
    cdef long long cap = capacity
    cdef Py_ssize_t n = sz.shape[0]
    cdef Py_ssize_t K = kappa
    cdef cnp.ndarray[cnp.int64_t, ndim=3] tau_arr = np.full(
        (n + 1, n + 1, K + 1), INF64, dtype=np.int64)
    cdef long long[:, :, ::1] tau = tau_arr
    tau[0, 0, 0] = 0
    cdef Py_ssize_t z, xi, phi
    cdef long long c, szz, skip, take
    for z in range(1, n + 1):
        szz = sz[z - 1]
        for xi in range(0, n + 1):
            if xi == 0 or xi > z:
                for phi in range(K + 1):
                    tau[z, xi, phi] = tau[z - 1, xi, phi]
                continue
            c = C[z - 1, xi - 1]
            for phi in range(K + 1):
                skip = tau[z - 1, xi, phi]
                if c <= phi and tau[z - 1, xi - 1, phi - c] < INF:
                    take = tau[z - 1, xi - 1, phi - c] + szz
                    if take < skip:
                        skip = take
                tau[z, xi, phi] = skip
    cdef long long best_phi = 0
    cdef Py_ssize_t best_xi = 0
    cdef bint found = False
    for phi in range(K, -1, -1):
        for xi in range(n + 1):
            if tau[n, xi, phi] <= cap:
                best_phi = phi
                best_xi = xi
                found = True
                break
        if found:
            break
    cdef long long mask = 0
    xi = best_xi
    phi = <Py_ssize_t> best_phi
    for z in range(n, 0, -1):
        if tau[z, xi, phi] < tau[z - 1, xi, phi]:
            mask |= 1LL << (z - 1)
            phi -= <Py_ssize_t> C[z - 1, xi - 1]
            xi -= 1
    return int(best_phi), int(mask)
