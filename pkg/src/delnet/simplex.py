"""Dense phase-1 simplex for equality-form feasibility questions.

Solves "is there x >= 0 with A x = b" by minimizing the sum of artificial
variables with Bland's anti-cycling rule.  When the optimum is positive the
problem is infeasible and the optimal dual multipliers y provide a Farkas
certificate: y @ A <= 0 componentwise while y @ b > 0, which is exactly the
separating object downstream code turns into a loss matrix.  Instances here
are tiny (tens of rows), so a dense tableau is the simplest reliable choice;
Bland's rule guarantees termination and the final residual is always checked
by the caller.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .prob import DelnetError, InputError

PIVOT_TOL = 1e-11   # entries at or below this never pivot
FEAS_TOL = 1e-9     # phase-1 optimum at or below this counts as feasible


class SimplexError(DelnetError):
    """The solver exceeded its iteration bound (should not happen with Bland)."""


@dataclass(frozen=True, eq=False)
class FeasibilityResult:
    """Outcome of a phase-1 run.

    Exactly one of ``x`` (a feasible point) and ``farkas`` (a certificate of
    infeasibility, in the original row order and signs) is set.
    ``objective`` is the phase-1 optimum: the residual mass that could not be
    matched, zero up to roundoff when feasible.
    """

    feasible: bool
    x: np.ndarray | None
    farkas: np.ndarray | None
    objective: float
    iterations: int


def solve_equality_feasibility(A, b, *, feas_tol: float = FEAS_TOL,
                               max_iter: int | None = None) -> FeasibilityResult:
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if A.ndim != 2 or b.ndim != 1 or A.shape[0] != b.shape[0]:
        raise InputError("need a 2-d matrix and matching right-hand side")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
        raise InputError("non-finite entries in the system")
    m, n = A.shape

    signs = np.where(b < 0.0, -1.0, 1.0)
    T = np.empty((m, n + m + 1))
    T[:, :n] = A * signs[:, None]
    T[:, n:n + m] = np.eye(m)
    T[:, -1] = b * signs
    basis = np.arange(n, n + m)

    # Reduced costs for min sum(artificials): r = c - y@col with y = c_B = 1.
    cost = np.zeros(n + m)
    cost[:n] = -T[:, :n].sum(axis=0)

    if max_iter is None:
        max_iter = 10_000 + 200 * (m + n)
    iterations = 0
    while True:
        entering_candidates = np.flatnonzero(cost < -PIVOT_TOL)
        if entering_candidates.size == 0:
            break
        j = int(entering_candidates[0])  # Bland: smallest improving index
        col = T[:, j]
        rows = np.flatnonzero(col > PIVOT_TOL)
        if rows.size == 0:
            # Phase-1 objective is bounded below by zero, so this cannot
            # occur with exact arithmetic; treat as numerical breakdown.
            raise SimplexError("unbounded pivot column in phase 1")
        ratios = T[rows, -1] / col[rows]
        best = ratios.min()
        tied = rows[ratios <= best + PIVOT_TOL]
        r = int(tied[np.argmin(basis[tied])])  # Bland: smallest basic index
        T[r] /= T[r, j]
        factors = T[:, j].copy()
        factors[r] = 0.0
        T -= np.outer(factors, T[r])
        cost = cost - cost[j] * T[r, :-1]
        basis[r] = j
        iterations += 1
        if iterations > max_iter:
            raise SimplexError(f"no convergence in {max_iter} pivots")

    artificial = basis >= n
    objective = float(T[artificial, -1].sum()) if np.any(artificial) else 0.0
    if objective <= feas_tol:
        x = np.zeros(n)
        keep = basis < n
        x[basis[keep]] = np.maximum(T[keep, -1], 0.0)
        return FeasibilityResult(True, x, None, objective, iterations)
    # Dual multipliers off the final cost row: artificial column j has
    # original cost 1 and reduced cost 1 - y_j.
    y = (1.0 - cost[n:n + m]) * signs
    return FeasibilityResult(False, None, y, objective, iterations)
