"""Dense two-phase primal simplex with Bland's anti-cycling rule.

Deterministic and self-contained; built for the small LPs this package
generates (a few hundred rows at most).  Duals are returned per caller
row: shadow prices in the caller's sense (for a maximization, a binding
<= row gets a nonnegative dual).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ModelError, SolverFailure

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-7

LESS, EQUAL, GREATER = "<=", "==", ">="
_SENSES = (LESS, EQUAL, GREATER)


@dataclass
class LinearProgram:
    """max/min c.x subject to rows (a, sense, rhs) and variable bounds."""

    c: np.ndarray
    maximize: bool = True
    rows: list = field(default_factory=list)
    bounds: list = field(default_factory=list)

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        if self.c.ndim != 1 or not np.all(np.isfinite(self.c)):
            raise ModelError("objective coefficients must be a finite vector")
        if not self.bounds:
            self.bounds = [(0.0, None)] * self.c.size

    @property
    def n_vars(self) -> int:
        return self.c.size

    def add_row(self, coeffs, sense: str, rhs: float):
        a = np.asarray(coeffs, dtype=float)
        if a.shape != (self.n_vars,) or not np.all(np.isfinite(a)):
            raise ModelError("row coefficients must match the variable count")
        if sense not in _SENSES:
            raise ModelError(f"unknown sense {sense!r}")
        if not np.isfinite(rhs):
            raise ModelError("right-hand side must be finite")
        self.rows.append((a, sense, float(rhs)))

    def set_bounds(self, j: int, lo, hi):
        if lo is not None and hi is not None and lo > hi:
            raise ModelError("lower bound exceeds upper bound")
        self.bounds[j] = (lo, hi)


@dataclass
class LpResult:
    status: str
    x: np.ndarray | None = None
    value: float | None = None
    duals: np.ndarray | None = None


def solve_lp(lp: LinearProgram) -> LpResult:
    """Solve to a basic optimal solution, or report infeasible/unbounded."""
    sense = -1.0 if lp.maximize else 1.0
    n = lp.n_vars
    c_int = sense * lp.c

    # Column bookkeeping: each caller variable becomes one or two
    # nonnegative columns (shifted by a finite lower bound, or split when
    # free); finite upper bounds become extra rows.
    col_var: list[tuple[int, float]] = []  # (caller var, +1/-1 multiplier)
    shifts = np.zeros(n)
    for j, (lo, hi) in enumerate(lp.bounds):
        if lo is None:
            col_var.append((j, 1.0))
            col_var.append((j, -1.0))
        else:
            shifts[j] = lo
            col_var.append((j, 1.0))
    ncols = len(col_var)

    def expand(coeffs) -> np.ndarray:
        out = np.empty(ncols)
        for idx, (j, mult) in enumerate(col_var):
            out[idx] = coeffs[j] * mult
        return out

    rows = [(expand(a), s, rhs - float(a @ shifts)) for a, s, rhs in lp.rows]
    n_caller_rows = len(rows)
    for j, (lo, hi) in enumerate(lp.bounds):
        if hi is not None:
            a = np.zeros(n)
            a[j] = 1.0
            rows.append((expand(a), LESS, hi - (lo or 0.0)))

    m = len(rows)
    obj = expand(lp.c) * sense
    const = float(c_int @ shifts)

    # Equality standard form: slack/surplus columns, then one artificial
    # per row; rows are sign-flipped so every rhs is nonnegative.
    n_slack = sum(1 for _, s, _ in rows if s != EQUAL)
    total = ncols + n_slack + m
    A = np.zeros((m, total))
    b = np.zeros(m)
    row_sign = np.ones(m)
    si = ncols
    for i, (a, s, rhs) in enumerate(rows):
        A[i, :ncols] = a
        if s == LESS:
            A[i, si] = 1.0
            si += 1
        elif s == GREATER:
            A[i, si] = -1.0
            si += 1
        b[i] = rhs
        if b[i] < 0:
            A[i] *= -1.0
            b[i] = -b[i]
            row_sign[i] = -1.0
    art0 = ncols + n_slack
    for i in range(m):
        A[i, art0 + i] = 1.0

    # Tableau: m constraint rows | phase-2 cost row | phase-1 cost row.
    T = np.zeros((m + 2, total + 1))
    T[:m, :total] = A
    T[:m, total] = b
    T[m, :ncols] = obj
    T[m + 1, art0:art0 + m] = 1.0
    basis = list(range(art0, art0 + m))
    for i in range(m):  # reduce phase-1 costs against the artificial basis
        T[m + 1] -= T[i]

    allowed = np.ones(total, dtype=bool)
    allowed[art0:] = False  # artificials may leave but never re-enter
    max_pivots = 10 * (m + total) ** 2
    pivots = 0

    def pivot(r: int, j: int):
        nonlocal pivots
        pivots += 1
        if pivots > max_pivots:
            raise SolverFailure(f"pivot cap {max_pivots} exceeded")
        piv_row = T[r] / T[r, j]
        col = T[:, j].copy()
        T[:] -= np.outer(col, piv_row)
        T[r] = piv_row
        basis[r] = j

    def run_simplex(cost_row: int) -> str:
        while True:
            z = T[cost_row, :total]
            cands = np.where(allowed & (z < -PIVOT_TOL))[0]
            if cands.size == 0:
                return "optimal"
            j = int(cands[0])  # Bland: lowest eligible index enters
            col = T[:m, j]
            pos = np.where(col > PIVOT_TOL)[0]
            if pos.size == 0:
                return "unbounded"
            ratios = np.maximum(T[pos, total], 0.0) / col[pos]
            best = ratios.min()
            ties = pos[ratios <= best + PIVOT_TOL]
            r = int(min(ties, key=lambda i: basis[i]))  # Bland: lowest basis var
            pivot(r, j)

    status = run_simplex(m + 1)
    if status == "unbounded":
        raise SolverFailure("phase-1 simplex reported unbounded")
    if T[m + 1, total] < -FEAS_TOL:
        return LpResult(status="infeasible")
    for r in range(m):  # drive leftover artificials out where possible
        if basis[r] >= art0:
            nz = np.where(allowed & (np.abs(T[r, :total]) > PIVOT_TOL))[0]
            if nz.size:
                pivot(r, int(nz[0]))

    status = run_simplex(m)
    if status == "unbounded":
        return LpResult(status="unbounded")

    xu = np.zeros(total)
    for r, j in enumerate(basis):
        xu[j] = T[r, total]
    x = shifts.copy()
    for idx, (j, mult) in enumerate(col_var):
        x[j] += mult * xu[idx]

    value_int = float(T[m, total])  # equals -(c_int . xu) by construction
    value = sense * (-value_int + const)

    y = -T[m, art0:art0 + m]  # phase-2 reduced costs of the artificials
    duals = (sense * row_sign * y)[:n_caller_rows]

    _verify_feasible(lp, x)
    return LpResult(status="optimal", x=x, value=value, duals=np.asarray(duals))


def _verify_feasible(lp: LinearProgram, x: np.ndarray):
    for a, s, rhs in lp.rows:
        lhs = float(a @ x)
        if s == LESS and lhs > rhs + FEAS_TOL:
            raise SolverFailure(f"primal infeasible after solve: {lhs} > {rhs}")
        if s == GREATER and lhs < rhs - FEAS_TOL:
            raise SolverFailure(f"primal infeasible after solve: {lhs} < {rhs}")
        if s == EQUAL and abs(lhs - rhs) > FEAS_TOL:
            raise SolverFailure(f"primal infeasible after solve: {lhs} != {rhs}")
    for xj, (lo, hi) in zip(x, lp.bounds):
        if lo is not None and xj < lo - FEAS_TOL:
            raise SolverFailure("variable below its lower bound after solve")
        if hi is not None and xj > hi + FEAS_TOL:
            raise SolverFailure("variable above its upper bound after solve")
