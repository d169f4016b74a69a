"""Minimax engines: exact LP solvers and an iterative cross-check.

Conventions: in a matrix game the row player minimises and the column
player maximises.  ``solve_matrix_game`` is the exact LP route;
``fictitious_play`` independently brackets the value and exists to
cross-validate the LP, not to replace it.

``solve_convex_linear_game`` handles the harder payoff shape where the
row player's mixture enters a convex piecewise-linear function (one
linear piece per observable/guess pair) and the column player takes the
worst case.  It solves the epigraph linear program

    min z   s.t.  t_{a,y} >= sum_d delta(d) k[a][y, w, d]   for all w,
                  z >= sum_y t_{a,y}                        for all a,
                  delta a distribution,

and reads the column player's equilibrium off the duals of the per-a
rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .matrix import LabeledMatrix
from .simplex import EQUAL, LESS, LinearProgram, lp_solve, require_optimal


@dataclass
class MatrixGameSolution:
    value: float
    row_strategy: np.ndarray      # minimiser
    col_strategy: np.ndarray      # maximiser
    diagnostics: dict = field(default_factory=dict)


def _payoff_array(payoff):
    if isinstance(payoff, LabeledMatrix):
        return np.array(payoff.data), payoff.rows, payoff.cols
    arr = np.asarray(payoff, dtype=float)
    return arr, None, None


def matrix_game_lp(u: np.ndarray) -> LinearProgram:
    """Row player's LP: variables (delta, v), min v."""
    n_d, n_a = u.shape
    c = np.zeros(n_d + 1)
    c[-1] = 1.0
    rows = []
    for a in range(n_a):
        row = np.zeros(n_d + 1)
        row[:n_d] = u[:, a]
        row[-1] = -1.0
        rows.append((row, LESS, 0.0))
    srow = np.zeros(n_d + 1)
    srow[:n_d] = 1.0
    rows.append((srow, EQUAL, 1.0))
    return LinearProgram.build(c, rows, sense="min", free=[n_d])


def matrix_game_dual_lp(u: np.ndarray) -> LinearProgram:
    """Column player's LP: variables (alpha, w), max w."""
    n_d, n_a = u.shape
    c = np.zeros(n_a + 1)
    c[-1] = 1.0
    rows = []
    for d in range(n_d):
        row = np.zeros(n_a + 1)
        row[:n_a] = -u[d, :]
        row[-1] = 1.0
        rows.append((row, LESS, 0.0))
    srow = np.zeros(n_a + 1)
    srow[:n_a] = 1.0
    rows.append((srow, EQUAL, 1.0))
    return LinearProgram.build(c, rows, sense="max", free=[n_a])


def solve_matrix_game(payoff) -> MatrixGameSolution:
    """Saddle point of a finite zero-sum matrix game (row min, col max)."""
    u, _, _ = _payoff_array(payoff)
    n_d, n_a = u.shape
    sol = require_optimal(lp_solve(matrix_game_lp(u)), "matrix game LP")
    delta = np.clip(sol.x[:n_d], 0.0, None)
    delta /= delta.sum()
    alpha = np.clip(-sol.duals[:n_a], 0.0, None)
    total = alpha.sum()
    alpha = alpha / total if total > 0 else np.full(n_a, 1.0 / n_a)
    value = float(sol.objective)
    upper = float((delta @ u).max())
    lower = float((u @ alpha).min())
    return MatrixGameSolution(
        value=value, row_strategy=delta, col_strategy=alpha,
        diagnostics={
            "gap": sol.gap, "iterations": sol.iterations,
            "minimax_residual": max(abs(upper - value), abs(lower - value)),
            "kernel": sol.kernel,
        },
    )


def closed_form_2x2(payoff):
    """Completely mixed saddle point of a 2x2 game, if the formula applies.

    Returns (value, delta(row0), alpha(col0)) when the denominator is
    nonzero and both strategy values land in [0, 1]; None otherwise
    (caller falls back to the LP).
    """
    u, _, _ = _payoff_array(payoff)
    if u.shape != (2, 2):
        raise ValueError("closed form needs a 2x2 payoff matrix")
    den = u[0, 0] - u[0, 1] - u[1, 0] + u[1, 1]
    if den == 0.0:
        return None
    d0 = (u[1, 1] - u[1, 0]) / den
    a0 = (u[1, 1] - u[0, 1]) / den
    if not (0.0 <= d0 <= 1.0 and 0.0 <= a0 <= 1.0):
        return None
    delta = np.array([d0, 1.0 - d0])
    alpha = np.array([a0, 1.0 - a0])
    value = float(delta @ u @ alpha)
    return value, float(d0), float(a0)


@dataclass
class Bracket:
    lower: float
    upper: float
    row_strategy: np.ndarray
    col_strategy: np.ndarray

    def contains(self, value: float, slack: float = 1e-9) -> bool:
        return self.lower - slack <= value <= self.upper + slack

    @property
    def width(self) -> float:
        return self.upper - self.lower


def fictitious_play(payoff, iters: int, seed: int = 0) -> Bracket:
    """Iterative best-response bracketing of the game value.

    Both players repeatedly best-respond to the opponent's empirical
    mixture (ties broken uniformly at random under ``seed``).  At any
    iteration count the returned interval [lower, upper] contains the
    game value; the width shrinks as iters grows.
    """
    if iters < 1:
        raise ValueError("iters must be >= 1")
    u, _, _ = _payoff_array(payoff)
    n_d, n_a = u.shape
    rng = np.random.default_rng(seed)
    row_counts = np.zeros(n_d)
    col_counts = np.zeros(n_a)
    row_score = np.zeros(n_d)  # cumulative payoff of each row vs col history
    col_score = np.zeros(n_a)  # cumulative payoff of each col vs row history
    for _ in range(iters):
        best_rows = np.flatnonzero(row_score == row_score.min())
        d = int(rng.choice(best_rows))
        best_cols = np.flatnonzero(col_score == col_score.max())
        a = int(rng.choice(best_cols))
        row_counts[d] += 1
        col_counts[a] += 1
        row_score += u[:, a]
        col_score += u[d, :]
    delta = row_counts / row_counts.sum()
    alpha = col_counts / col_counts.sum()
    upper = float((delta @ u).max())
    lower = float((u @ alpha).min())
    return Bracket(lower=lower, upper=upper, row_strategy=delta, col_strategy=alpha)


@dataclass
class ConvexGameSolution:
    value: float
    delta: np.ndarray
    alpha: np.ndarray
    diagnostics: dict = field(default_factory=dict)


def convex_game_lp(pieces) -> tuple[LinearProgram, int, list]:
    """Epigraph LP for min_delta max_a of piecewise-linear branch payoffs.

    ``pieces`` is a sequence over column-player actions; pieces[a] is an
    array of shape (n_y_a, n_w_a, n_d): the linear coefficients over
    delta of piece (y, w) of branch a.  Returns the LP, the number of
    delta variables, and the index ranges of the per-a rows (for duals).
    """
    pieces = [np.asarray(p, dtype=float) for p in pieces]
    n_d = pieces[0].shape[2]
    n_a = len(pieces)
    t_offsets = []
    n_t = 0
    for p in pieces:
        if p.ndim != 3 or p.shape[2] != n_d:
            raise ValueError("piece arrays must have shape (n_y, n_w, n_d)")
        t_offsets.append(n_t)
        n_t += p.shape[0]
    nvar = n_d + n_t + 1  # delta, t, z
    z = nvar - 1
    c = np.zeros(nvar)
    c[z] = 1.0
    rows = []
    for a, p in enumerate(pieces):
        n_y, n_w, _ = p.shape
        for y in range(n_y):
            t_idx = n_d + t_offsets[a] + y
            for w in range(n_w):
                row = np.zeros(nvar)
                row[:n_d] = p[y, w]
                row[t_idx] = -1.0
                rows.append((row, LESS, 0.0))
    branch_row_start = len(rows)
    for a, p in enumerate(pieces):
        row = np.zeros(nvar)
        row[n_d + t_offsets[a]: n_d + t_offsets[a] + p.shape[0]] = 1.0
        row[z] = -1.0
        rows.append((row, LESS, 0.0))
    srow = np.zeros(nvar)
    srow[:n_d] = 1.0
    rows.append((srow, EQUAL, 1.0))
    free = list(range(n_d, nvar))
    lp = LinearProgram.build(c, rows, sense="min", free=free)
    branch_rows = list(range(branch_row_start, branch_row_start + n_a))
    return lp, n_d, branch_rows


def solve_convex_linear_game(pieces) -> ConvexGameSolution:
    """Solve min_delta max_a sum_y max_w (pieces[a][y, w] . delta)."""
    lp, n_d, branch_rows = convex_game_lp(pieces)
    sol = require_optimal(lp_solve(lp), "convex game LP")
    delta = np.clip(sol.x[:n_d], 0.0, None)
    delta /= delta.sum()
    alpha = np.clip(-sol.duals[branch_rows], 0.0, None)
    total = alpha.sum()
    n_a = len(branch_rows)
    alpha = alpha / total if total > 0 else np.full(n_a, 1.0 / n_a)
    value = float(sol.objective)
    return ConvexGameSolution(
        value=value, delta=delta, alpha=alpha,
        diagnostics={
            "gap": sol.gap, "iterations": sol.iterations,
            "lp_rows": len(lp.rows), "lp_cols": lp.n_vars,
            "kernel": sol.kernel,
        },
    )


def branch_value(pieces_a: np.ndarray, delta: np.ndarray) -> float:
    """Evaluate one branch payoff sum_y max_w (k[y, w] . delta)."""
    return float(np.einsum("ywd,d->yw", pieces_a, delta).max(axis=1).sum())


def convex_game_attacker_lp(pieces) -> tuple[LinearProgram, int]:
    """Explicit maximin LP of the column player for the convex game.

    Variables: alpha (per a), beta (per piece), gamma.  max gamma s.t.
    sum alpha = 1; per (a, y): sum_w beta = alpha_a; per d:
    gamma <= sum beta . k.  Used for cross-checks and uniqueness probes.
    """
    pieces = [np.asarray(p, dtype=float) for p in pieces]
    n_a = len(pieces)
    n_d = pieces[0].shape[2]
    b_offsets = []
    n_b = 0
    for p in pieces:
        b_offsets.append(n_b)
        n_b += p.shape[0] * p.shape[1]
    nvar = n_a + n_b + 1
    gamma = nvar - 1
    c = np.zeros(nvar)
    c[gamma] = 1.0
    rows = []
    srow = np.zeros(nvar)
    srow[:n_a] = 1.0
    rows.append((srow, EQUAL, 1.0))
    for a, p in enumerate(pieces):
        n_y, n_w, _ = p.shape
        for y in range(n_y):
            row = np.zeros(nvar)
            row[n_a + b_offsets[a] + y * n_w: n_a + b_offsets[a] + (y + 1) * n_w] = 1.0
            row[a] = -1.0
            rows.append((row, EQUAL, 0.0))
    for d in range(n_d):
        row = np.zeros(nvar)
        row[gamma] = 1.0
        for a, p in enumerate(pieces):
            row[n_a + b_offsets[a]: n_a + b_offsets[a] + p.shape[0] * p.shape[1]] = \
                -p[:, :, d].reshape(-1)
        rows.append((row, LESS, 0.0))
    return LinearProgram.build(c, rows, sense="max", free=[gamma]), n_a


def optimal_coordinate_range(lp: LinearProgram, optimum: float, coord: int,
                             slack: float = 1e-9) -> tuple[float, float]:
    """Range of one variable over the (near-)optimal face of ``lp``."""
    if lp.sense == "min":
        pin = (np.array(lp.c), LESS, optimum + slack)
    else:
        pin = (-np.array(lp.c), LESS, -(optimum - slack))
    rows = list(lp.rows) + [pin]
    free = np.flatnonzero(lp.free) if lp.free is not None else None
    e = np.zeros(lp.n_vars)
    e[coord] = 1.0
    lo = require_optimal(
        lp_solve(LinearProgram.build(e, rows, sense="min", free=free)),
        "range probe").objective
    hi = require_optimal(
        lp_solve(LinearProgram.build(e, rows, sense="max", free=free)),
        "range probe").objective
    return float(lo), float(hi)


def matrix_game_unique(u: np.ndarray, value: float, tol: float = 1e-7) -> bool:
    """Probe whether the equilibrium strategies of a matrix game are unique."""
    n_d, n_a = u.shape
    primal = matrix_game_lp(u)
    for d in range(n_d):
        lo, hi = optimal_coordinate_range(primal, value, d)
        if hi - lo > tol:
            return False
    dual = matrix_game_dual_lp(u)
    for a in range(n_a):
        lo, hi = optimal_coordinate_range(dual, value, a)
        if hi - lo > tol:
            return False
    return True


def convex_game_unique(pieces, value: float, tol: float = 1e-6) -> bool:
    """Probe uniqueness of (delta, alpha) in a convex-linear game."""
    lp, n_d, _ = convex_game_lp(pieces)
    for d in range(n_d):
        lo, hi = optimal_coordinate_range(lp, value, d)
        if hi - lo > tol:
            return False
    dual_lp, n_a = convex_game_attacker_lp(pieces)
    for a in range(n_a):
        lo, hi = optimal_coordinate_range(dual_lp, value, a)
        if hi - lo > tol:
            return False
    return True
