"""Self-contained dense linear programming.

Two-phase primal simplex on a dense tableau with Bland's anti-cycling
rule, written for the small, exactness-sensitive programs this package
produces (matrix games, epigraph formulations, convex-hull membership).
Determinism matters more than speed here: given the same input the
solver always follows the same pivot path.

The pivot loop itself lives in a kernel module with two interchangeable
implementations: a compiled Cython extension (leakgames._kernel) and a
pure numpy fallback (leakgames._kernel_py).  The compiled one is picked
at import time when present; set LEAKGAMES_PURE_PY=1 to force the
fallback.  Both follow identical pivot paths.

Variables are nonnegative by default; a variable may be declared free
(encoded internally as a difference of two nonnegative ones).  General
upper bounds are out of scope.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernel_py
from .errors import SolverError

log = logging.getLogger(__name__)

if os.environ.get("LEAKGAMES_PURE_PY"):
    _kernel = _kernel_py
    KERNEL_NAME = "python"
else:
    try:
        from . import _kernel  # type: ignore[attr-defined]

        KERNEL_NAME = "compiled"
    except ImportError:
        _kernel = _kernel_py
        KERNEL_NAME = "python"

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-8
REFACTOR_EVERY = 64

LESS = "<="
EQUAL = "="
GREATER = ">="


@dataclass(frozen=True)
class LinearProgram:
    """min/max of c.x subject to rows (coefficients, relation, bound).

    ``free[j]`` marks variable j as unrestricted in sign; all other
    variables satisfy x_j >= 0.
    """

    c: np.ndarray
    rows: tuple
    sense: str = "min"
    free: np.ndarray | None = None

    @staticmethod
    def build(c, rows: Sequence[tuple], sense: str = "min", free=None) -> "LinearProgram":
        c = np.asarray(c, dtype=float)
        n = c.shape[0]
        norm_rows = []
        for coeffs, rel, rhs in rows:
            coeffs = np.asarray(coeffs, dtype=float)
            if coeffs.shape != (n,):
                raise ValueError("constraint dimension does not match objective")
            if rel not in (LESS, EQUAL, GREATER):
                raise ValueError(f"unknown relation {rel!r}")
            norm_rows.append((coeffs, rel, float(rhs)))
        if sense not in ("min", "max"):
            raise ValueError(f"unknown sense {sense!r}")
        if free is None:
            free_mask = np.zeros(n, dtype=bool)
        else:
            free_mask = np.zeros(n, dtype=bool)
            free_mask[list(free)] = True
        return LinearProgram(c=c, rows=tuple(norm_rows), sense=sense, free=free_mask)

    @property
    def n_vars(self) -> int:
        return self.c.shape[0]


@dataclass
class LPSolution:
    status: str  # "optimal" | "infeasible" | "unbounded" | "stalled"
    x: np.ndarray | None = None
    duals: np.ndarray | None = None
    objective: float | None = None
    gap: float | None = None
    max_residual: float | None = None
    iterations: int = 0
    kernel: str = KERNEL_NAME
    diagnostics: dict = field(default_factory=dict)

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


def _pivot(tableau: np.ndarray, basis: np.ndarray, r: int, j: int) -> None:
    tableau[r] /= tableau[r, j]
    prow = tableau[r]
    factors = tableau[:, j].copy()
    factors[r] = 0.0
    tableau -= np.outer(factors, prow)
    tableau[:, j] = 0.0
    tableau[r, j] = 1.0
    basis[r] = j


def _refactor(A: np.ndarray, b: np.ndarray, c: np.ndarray, basis: np.ndarray):
    """Rebuild a canonical tableau from scratch for the given basis.

    Long runs of (mostly degenerate) pivots let rounding noise pile up
    in the tableau until junk entries cross the pivot tolerance;
    recomputing everything from the original data resets the noise to
    one linear solve's worth.  Returns (tableau, y) with y the simplex
    multipliers of the basis.
    """
    m = A.shape[0]
    B = A[:, basis]
    body = np.linalg.solve(B, np.hstack([A, b[:, None]]))
    y = np.linalg.solve(B.T, c[basis])
    obj = np.empty(A.shape[1] + 1)
    obj[:-1] = c - y @ A
    obj[-1] = -y @ b
    tableau = np.ascontiguousarray(np.vstack([body, obj]))
    tableau[:m][:, basis] = np.eye(m)
    tableau[m, basis] = 0.0
    rhs = tableau[:m, -1]
    if rhs.size and rhs.min() < -1e-7:
        raise SolverError(f"simplex lost primal feasibility (rhs {rhs.min():.3g})")
    np.clip(rhs, 0.0, None, out=rhs)
    return tableau, y


def _run_phase(A: np.ndarray, b: np.ndarray, c: np.ndarray, basis: np.ndarray,
               n_enter: int, max_iter: int):
    """Simplex with periodic refactorisation.  Returns
    (status, tableau, y, iterations); status is a kernel constant.

    The kernel is re-entered on a fresh tableau after every REFRESH
    request, every REFACTOR_EVERY pivots, and once more after it claims
    optimality; only an optimality claim that survives a refresh (zero
    further pivots) is accepted.
    """
    iterations = 0
    state = np.zeros(1, dtype=np.int64)
    tableau, y = _refactor(A, b, c, basis)
    while True:
        budget = min(REFACTOR_EVERY, max_iter - iterations)
        if budget <= 0:
            return _kernel_py.ITERATION_LIMIT, tableau, y, iterations
        status, its = _kernel.run_simplex(tableau, basis, n_enter, PIVOT_TOL,
                                          budget, state)
        iterations += its
        if status == _kernel_py.UNBOUNDED:
            return status, tableau, y, iterations
        fresh, y = _refactor(A, b, c, basis)
        if status == _kernel_py.OPTIMAL and its == 0:
            # no pivot happened since the last refresh: truly optimal
            return status, fresh, y, iterations
        tableau = fresh


def lp_solve(lp: LinearProgram, max_iter: int | None = None) -> LPSolution:
    """Solve ``lp`` and return primal values, row duals and the duality gap.

    Row duals are reported so that sum(duals * rhs) equals the optimal
    objective at zero gap; for a minimisation, duals of ``<=`` rows are
    <= 0 and of ``>=`` rows >= 0 (flipped for maximisation).
    """
    n = lp.n_vars
    minimize = lp.sense == "min"
    c0 = lp.c if minimize else -lp.c
    free = lp.free if lp.free is not None else np.zeros(n, dtype=bool)

    # equilibrate rows to unit infinity-norm and sign-normalise to b >= 0,
    # remembering scale and flip for mapping the duals back
    A_list, b_list, rels, flips = [], [], [], []
    for coeffs, rel, rhs in lp.rows:
        scale = float(np.abs(coeffs).max()) if coeffs.size else 0.0
        if scale <= 0.0:
            scale = 1.0
        coeffs, rhs = coeffs / scale, rhs / scale
        if rhs < 0:
            coeffs, rhs = -coeffs, -rhs
            rel = {LESS: GREATER, GREATER: LESS, EQUAL: EQUAL}[rel]
            flips.append(-1.0 / scale)
        else:
            flips.append(1.0 / scale)
        A_list.append(coeffs)
        b_list.append(rhs)
        rels.append(rel)
    m = len(A_list)
    flips_arr = np.array(flips)

    # expand to standard form columns: originals (free ones split), slacks
    col_var = []  # (original index, sign)
    for j in range(n):
        col_var.append((j, 1.0))
    for j in range(n):
        if free[j]:
            col_var.append((j, -1.0))
    n_main = len(col_var)
    n_slack = sum(1 for r in rels if r != EQUAL)
    n_std = n_main + n_slack

    A_std = np.zeros((m, n_std))
    b_std = np.array(b_list, dtype=float)
    for i, coeffs in enumerate(A_list):
        for k, (j, sign) in enumerate(col_var):
            A_std[i, k] = sign * coeffs[j]
    slack_of_row = {}
    k = n_main
    for i, rel in enumerate(rels):
        if rel == LESS:
            A_std[i, k] = 1.0
            slack_of_row[i] = k
            k += 1
        elif rel == GREATER:
            A_std[i, k] = -1.0
            slack_of_row[i] = k
            k += 1

    need_artificial = [i for i, rel in enumerate(rels) if rel != LESS]
    n_art = len(need_artificial)
    total = n_std + n_art

    tableau = np.zeros((m + 1, total + 1))
    tableau[:m, :n_std] = A_std
    tableau[:m, total] = b_std
    basis = np.empty(m, dtype=np.int64)
    for i, rel in enumerate(rels):
        if rel == LESS:
            basis[i] = slack_of_row[i]
    for a_idx, i in enumerate(need_artificial):
        tableau[i, n_std + a_idx] = 1.0
        basis[i] = n_std + a_idx

    iterations = 0
    if max_iter is None:
        max_iter = 5000 + 100 * (m + total)
    debug = bool(os.environ.get("LEAKGAMES_LP_DEBUG"))
    if debug:
        log.info("lp_solve: %d rows, %d std cols, %d artificials, kernel=%s",
                 m, n_std, n_art, KERNEL_NAME)

    keep_rows = np.arange(m)
    if n_art:
        # phase 1: minimise the sum of artificials
        A1 = np.array(tableau[:m, :total])
        c1 = np.zeros(total)
        c1[n_std:] = 1.0
        status, tableau, _, its = _run_phase(A1, b_std, c1, basis, total, max_iter)
        iterations += its
        if status == _kernel_py.ITERATION_LIMIT:
            return LPSolution(status="stalled", iterations=iterations)
        if status == _kernel_py.UNBOUNDED:
            raise SolverError("phase 1 reported unbounded; its objective is bounded below")
        phase1 = -tableau[m, total]
        if phase1 > FEAS_TOL:
            return LPSolution(status="infeasible", iterations=iterations,
                              diagnostics={"phase1": phase1})
        # drive remaining artificials out of the basis, drop redundant rows
        drop = []
        for i in range(m):
            if basis[i] >= n_std:
                pivot_col = None
                for j in range(n_std):
                    if abs(tableau[i, j]) > PIVOT_TOL:
                        pivot_col = j
                        break
                if pivot_col is None:
                    drop.append(i)
                else:
                    _pivot(tableau, basis, i, pivot_col)
        if drop:
            keep = [i for i in range(m) if i not in drop]
            basis = basis[keep]
            keep_rows = keep_rows[keep]
            A_std = A_std[keep]
            b_std = b_std[keep]
            m = len(keep)

    # phase 2 on the artificial-free columns
    c_std = np.zeros(n_std)
    for k2, (j, sign) in enumerate(col_var):
        c_std[k2] = sign * c0[j]
    status, tableau, y_std, its = _run_phase(
        A_std, b_std, c_std, basis, n_std, max_iter - iterations)
    iterations += its
    if status == _kernel_py.UNBOUNDED:
        return LPSolution(status="unbounded", iterations=iterations)
    if status == _kernel_py.ITERATION_LIMIT:
        return LPSolution(status="stalled", iterations=iterations)

    x_std = np.zeros(n_std)
    x_std[basis] = tableau[:m, n_std]
    x = np.zeros(n)
    for k2, (j, sign) in enumerate(col_var):
        x[j] += sign * x_std[k2]

    y_full = np.zeros(len(A_list))
    y_full[keep_rows] = y_std
    duals0 = flips_arr * y_full

    b_user = np.array([rhs for _, _, rhs in lp.rows], dtype=float)
    primal0 = float(c0 @ x)
    dual0 = float(duals0 @ b_user)
    gap = abs(primal0 - dual0)

    residual = 0.0
    for (coeffs, rel, rhs) in lp.rows:
        lhs = float(coeffs @ x)
        if rel == LESS:
            residual = max(residual, lhs - rhs)
        elif rel == GREATER:
            residual = max(residual, rhs - lhs)
        else:
            residual = max(residual, abs(lhs - rhs))
    residual = max(residual, float(-(x[~free]).min(initial=0.0)))

    objective = primal0 if minimize else -primal0
    duals = duals0 if minimize else -duals0
    if debug:
        log.info("lp_solve: optimal obj=%.12g gap=%.3g iters=%d",
                 objective, gap, iterations)
    return LPSolution(
        status="optimal", x=x, duals=duals, objective=objective,
        gap=gap, max_residual=residual, iterations=iterations,
        diagnostics={"rows": len(lp.rows), "cols": n, "kernel": KERNEL_NAME},
    )


def require_optimal(solution: LPSolution, what: str = "linear program") -> LPSolution:
    if not solution.optimal:
        raise SolverError(f"{what} finished with status {solution.status}")
    return solution
