"""Dense two-phase simplex for small LPs, deterministic by construction.

minimize c.x  subject to  A x <= b, x >= 0

Pivoting uses Bland's rule (lowest eligible index enters; ties in the
ratio test break toward the lowest basis index), which forbids cycling
and makes repeated runs byte-identical.  The tableau is a numpy array:
dtype=object holding Fractions for the exact backend, float64 with a
1e-9 feasibility tolerance otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import SimplexIterationError

FLOAT_TOL = 1e-9


@dataclass(frozen=True)
class LpSolution:
    value: object
    x: tuple
    iterations: int


def _pivot(tableau, obj, basis, row, col, tol):
    piv = tableau[row][col]
    tableau[row] = tableau[row] / piv
    prow = tableau[row]
    for i in range(len(tableau)):
        if i == row:
            continue
        factor = tableau[i][col]
        if factor > tol or factor < -tol:
            tableau[i] = tableau[i] - factor * prow
    factor = obj[col]
    if factor > tol or factor < -tol:
        obj -= factor * prow
    basis[row] = col


def _iterate(tableau, obj, basis, allowed, tol, max_iter, phase):
    """Run Bland pivots until optimality; returns pivot count."""
    iterations = 0
    ncols = len(obj) - 1
    while True:
        col = next(
            (j for j in range(ncols) if allowed[j] and obj[j] < -tol), None
        )
        if col is None:
            return iterations
        # ratio test over rows with a positive pivot coefficient
        best_row = None
        best_ratio = None
        for i in range(len(tableau)):
            coef = tableau[i][col]
            if coef > tol:
                ratio = tableau[i][-1] / coef
                if (
                    best_ratio is None
                    or ratio < best_ratio
                    or (ratio == best_ratio and basis[i] < basis[best_row])
                ):
                    best_ratio = ratio
                    best_row = i
        if best_row is None:
            raise SimplexIterationError(
                "unbounded direction encountered",
                phase=phase,
                iterations=iterations,
                objective=float(obj[-1]),
            )
        _pivot(tableau, obj, basis, best_row, col, tol)
        iterations += 1
        if iterations > max_iter:
            raise SimplexIterationError(
                "iteration cap exceeded",
                phase=phase,
                iterations=iterations,
                objective=float(obj[-1]),
            )


def solve_min(costs, rows, rhs, *, exact: bool, max_iter: int | None = None) -> LpSolution:
    """Solve the LP; `exact` picks Fraction arithmetic over float64.

    Raises SimplexIterationError on the iteration cap or an unbounded ray;
    infeasible systems raise ValueError (callers here always have a
    feasible point, so that branch is defensive).
    """
    nstruct = len(costs)
    m = len(rows)
    nslack = m  # slack column block is fixed even if redundant rows get dropped
    if max_iter is None:
        max_iter = max(2000, 50 * (m + nstruct))

    if exact:
        zero, one = Fraction(0), Fraction(1)
        conv = Fraction
        dtype = object
        tol = Fraction(0)
    else:
        zero, one = 0.0, 1.0
        conv = float
        dtype = float
        tol = FLOAT_TOL

    neg_rows = [i for i in range(m) if rhs[i] < 0]
    nart = len(neg_rows)
    art_of_row = {r: k for k, r in enumerate(neg_rows)}
    ncols = nstruct + nslack + nart  # structural | slack | artificial

    tableau = np.zeros((m, ncols + 1), dtype=dtype)
    if exact:
        tableau[:] = zero
    basis = [0] * m
    for i in range(m):
        flip = -1 if i in art_of_row else 1
        for j, a in enumerate(rows[i]):
            tableau[i][j] = conv(a) * flip
        tableau[i][nstruct + i] = conv(flip)
        tableau[i][-1] = conv(rhs[i]) * flip
        if i in art_of_row:
            acol = nstruct + nslack + art_of_row[i]
            tableau[i][acol] = one
            basis[i] = acol
        else:
            basis[i] = nstruct + i

    iterations = 0
    if nart:
        # phase 1: minimize the artificial sum, priced out over the start basis
        obj = np.zeros(ncols + 1, dtype=dtype)
        if exact:
            obj[:] = zero
        for j in range(nstruct + nslack, ncols):
            obj[j] = one
        for i in range(m):
            if basis[i] >= nstruct + nslack:
                obj -= tableau[i]
        allowed = [True] * ncols
        iterations += _iterate(tableau, obj, basis, allowed, tol, max_iter, phase=1)
        if obj[-1] < -tol or obj[-1] > tol:
            raise ValueError(f"infeasible system (phase-1 objective {obj[-1]})")
        # drive basic artificials out; drop redundant rows
        keep = []
        for i in range(m):
            if basis[i] >= nstruct + nslack:
                col = next(
                    (
                        j
                        for j in range(nstruct + nslack)
                        if tableau[i][j] > tol or tableau[i][j] < -tol
                    ),
                    None,
                )
                if col is None:
                    continue  # redundant constraint
                _pivot(tableau, obj, basis, i, col, tol)
            keep.append(i)
        if len(keep) != m:
            tableau = tableau[keep]
            basis = [basis[i] for i in keep]
            m = len(keep)

    # artificial columns (if any) stay in the tableau but are barred below
    ncols_active = nstruct + nslack

    obj = np.zeros(ncols + 1, dtype=dtype)
    if exact:
        obj[:] = zero
    for j in range(nstruct):
        obj[j] = conv(costs[j])
    for i in range(m):
        b = basis[i]
        if obj[b] > tol or obj[b] < -tol:
            obj -= obj[b] * tableau[i]
    allowed = [j < ncols_active for j in range(ncols)]
    iterations += _iterate(tableau, obj, basis, allowed, tol, max_iter, phase=2)

    x = [zero] * nstruct
    for i in range(m):
        if basis[i] < nstruct:
            x[basis[i]] = tableau[i][-1]
    return LpSolution(value=-obj[-1], x=tuple(x), iterations=iterations)
