"""Dense two-phase simplex for small equality-form linear programs.

Solves ``min c @ x  s.t.  A @ x = b, x >= 0`` on a dense tableau.  Phase 1
introduces one artificial variable per row and minimizes their sum; phase 2
optimizes the real objective with the artificials barred from entering.
Bland's smallest-index rule is used for both the entering and the leaving
variable, which rules out cycling.  Dual multipliers are read off the final
tableau through the artificial columns (whose initial block is the identity,
so their final block is the basis inverse).

This is deliberately a from-scratch solver: it is the ground-truth oracle the
rest of the package is tested against, so it has no third-party moving parts.
Sizes here are desk scale (hundreds of rows); no sparse or revised variants.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PIVOT_TOL = 1e-10


class LpError(RuntimeError):
    """Infeasible input or an internal invariant failure."""


@dataclass(frozen=True)
class LpSolution:
    x: np.ndarray
    objective: float
    duals: np.ndarray
    iterations: int


def solve_equality_lp(
    c,
    A,
    b,
    pivot_tol: float = PIVOT_TOL,
    max_iterations: int | None = None,
) -> LpSolution:
    c = np.asarray(c, dtype=np.float64)
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if A.ndim != 2 or c.ndim != 1 or b.ndim != 1:
        raise ValueError("expected matrix A and vectors b, c")
    m, n = A.shape
    if c.size != n or b.size != m:
        raise ValueError("inconsistent LP dimensions")

    # Flip rows so every right-hand side is nonnegative, then append the
    # artificial identity block.
    A = A.copy()
    b = b.copy()
    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0

    tableau = np.hstack([A, np.eye(m), b[:, None]])
    basis = np.arange(n, n + m)
    art = np.arange(n, n + m)
    if max_iterations is None:
        max_iterations = 2000 + 200 * (m + n)

    iters = 0

    def pivot(row: int, col: int) -> None:
        tableau[row] /= tableau[row, col]
        factors = tableau[:, col].copy()
        factors[row] = 0.0
        tableau[:] -= np.outer(factors, tableau[row])
        basis[row] = col

    def run_phase(cost: np.ndarray, allowed: np.ndarray) -> None:
        nonlocal iters
        while True:
            iters += 1
            if iters > max_iterations:
                raise LpError("simplex iteration limit exceeded")
            reduced = cost - cost[basis] @ tableau[:, : n + m]
            candidates = np.flatnonzero(allowed & (reduced < -pivot_tol))
            if candidates.size == 0:
                return
            col = int(candidates[0])  # Bland: smallest entering index
            ratios = tableau[:, col]
            rows = np.flatnonzero(ratios > pivot_tol)
            if rows.size == 0:
                raise LpError("unbounded linear program")
            values = tableau[rows, -1] / ratios[rows]
            best = values.min()
            tied = rows[values <= best + pivot_tol]
            row = int(tied[np.argmin(basis[tied])])  # Bland: smallest leaving index
            pivot(row, col)

    # Phase 1: minimize the artificial total.
    phase1_cost = np.zeros(n + m)
    phase1_cost[art] = 1.0
    allowed = np.ones(n + m, dtype=bool)
    run_phase(phase1_cost, allowed)
    if float(phase1_cost[basis] @ tableau[:, -1]) > 1e-7:
        raise LpError("infeasible linear program")

    # Drive any artificial still basic (at value zero) out of the basis; a row
    # with no real pivot candidate is redundant and can stay parked on its
    # artificial without affecting phase 2, since entering is barred below.
    for row in range(m):
        if basis[row] >= n:
            cols = np.flatnonzero(np.abs(tableau[row, :n]) > pivot_tol)
            if cols.size:
                pivot(row, int(cols[0]))

    # Phase 2: real objective, artificials barred.
    phase2_cost = np.concatenate([c, np.zeros(m)])
    allowed = np.concatenate([np.ones(n, dtype=bool), np.zeros(m, dtype=bool)])
    run_phase(phase2_cost, allowed)

    x = np.zeros(n)
    for row, var in enumerate(basis):
        if var < n:
            x[var] = tableau[row, -1]
    # Final artificial block = basis inverse, so y = c_B @ B^{-1}; undo the
    # phase-0 row sign flips to express duals against the caller's rows.
    duals = phase2_cost[basis] @ tableau[:, art]
    duals[neg] *= -1.0
    objective = float(c @ x)
    return LpSolution(x=x, objective=objective, duals=duals, iterations=iters)
