# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled simplex pivot loop.

Semantics match leakgames._kernel_py.run_simplex pivot for pivot; see
that module for the contract and the pivot-selection rationale.
"""

import numpy as np

OPTIMAL = 0
UNBOUNDED = 1
ITERATION_LIMIT = 2
REFRESH = 3

DEF SMALL_PIVOT = 1e-2
DEF AMPLIFICATION_CAP = 1e6
DEF TRUSTED_PIVOT = 1e-8
DEF DEGENERATE_STEP = 1e-12
DEF STALL_LIMIT = 40


def run_simplex(double[:, ::1] tableau, long long[::1] basis, int n_enter,
                double tol, int max_iter, long long[::1] state):
    cdef int m = tableau.shape[0] - 1
    cdef int n = tableau.shape[1] - 1
    cdef int it, i, j, jj, r
    cdef double ratio, best, pivot, factor, tmp, dmin, colval
    cdef double amplification = 1.0
    cdef long long best_basis
    cdef bint bland

    for it in range(max_iter):
        if amplification > AMPLIFICATION_CAP:
            return REFRESH, it
        bland = state[0] >= STALL_LIMIT
        j = -1
        if bland:
            for jj in range(n_enter):
                if tableau[m, jj] < -tol:
                    j = jj
                    break
        else:
            dmin = 0.0
            for jj in range(n_enter):
                if tableau[m, jj] < dmin:
                    dmin = tableau[m, jj]
                    j = jj
            if j >= 0 and dmin >= -tol:
                j = -1
        if j < 0:
            return OPTIMAL, it

        # ratio test; ties towards lowest basis index (Bland) or the
        # numerically largest pivot element (normal mode)
        r = -1
        best = 0.0
        best_basis = 0
        colval = 0.0
        for i in range(m):
            if tableau[i, j] > tol:
                ratio = tableau[i, n] / tableau[i, j]
                if ratio < 0.0:
                    ratio = 0.0
                if r < 0 or ratio < best:
                    r = i
                    best = ratio
                    best_basis = basis[i]
                    colval = tableau[i, j]
                elif ratio == best:
                    if bland:
                        if basis[i] < best_basis:
                            r = i
                            best_basis = basis[i]
                            colval = tableau[i, j]
                    else:
                        if tableau[i, j] > colval or \
                                (tableau[i, j] == colval and basis[i] < best_basis):
                            r = i
                            best_basis = basis[i]
                            colval = tableau[i, j]
        if r < 0:
            return UNBOUNDED, it

        pivot = tableau[r, j]
        if pivot < TRUSTED_PIVOT and it > 0:
            return REFRESH, it
        if pivot < SMALL_PIVOT:
            amplification *= SMALL_PIVOT / pivot
        if best <= DEGENERATE_STEP:
            state[0] += 1
        else:
            state[0] = 0
        for jj in range(n + 1):
            tableau[r, jj] = tableau[r, jj] / pivot
        for i in range(m + 1):
            if i == r:
                continue
            factor = tableau[i, j]
            if factor != 0.0:
                for jj in range(n + 1):
                    tmp = factor * tableau[r, jj]
                    tableau[i, jj] = tableau[i, jj] - tmp
        for i in range(m + 1):
            tableau[i, j] = 0.0
        tableau[r, j] = 1.0
        basis[r] = j
    return ITERATION_LIMIT, max_iter
