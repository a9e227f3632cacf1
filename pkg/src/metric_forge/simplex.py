"""Dense two-phase simplex with Bland anti-cycling.

Solves min/max c.x subject to A_ub x <= b_ub, A_eq x = b_eq, x >= 0 on a
dense numpy tableau. Dantzig pricing by default for speed, switching
permanently to Bland's smallest-index rule if the objective stalls, which
guarantees termination on degenerate instances. The final basis is
re-solved directly (x_B = B^-1 b, y = B^-T c_B) so the reported solution
and duals do not inherit tableau drift.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import Infeasible, NumericalFailure, Unbounded

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-7


@dataclass
class SimplexResult:
    x: np.ndarray          # primal solution, original variables
    objective: float
    duals: np.ndarray      # one multiplier per row (ub rows first, then eq)
    iterations: int


def solve_lp(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None,
             maximize: bool = False, max_iter: Optional[int] = None) -> SimplexResult:
    """Solve a linear program over nonnegative variables.

    Raises Infeasible or Unbounded as appropriate, NumericalFailure if the
    iteration cap is hit or the final basis fails verification. At the
    optimum duals @ rhs equals the objective (checked internally).
    """
    c = np.asarray(c, dtype=float)
    n = c.size
    sign = -1.0 if maximize else 1.0

    A_ub = np.zeros((0, n)) if A_ub is None else np.asarray(A_ub, dtype=float)
    b_ub = np.zeros(0) if b_ub is None else np.atleast_1d(np.asarray(b_ub, dtype=float))
    A_eq = np.zeros((0, n)) if A_eq is None else np.asarray(A_eq, dtype=float)
    b_eq = np.zeros(0) if b_eq is None else np.atleast_1d(np.asarray(b_eq, dtype=float))
    m_ub, m_eq = A_ub.shape[0], A_eq.shape[0]
    m = m_ub + m_eq

    # Standard form: [A_ub I; A_eq 0] [x; s] = [b_ub; b_eq], x, s >= 0,
    # rows sign-normalized to b >= 0.
    a = np.zeros((m, n + m_ub))
    b = np.concatenate([b_ub, b_eq])
    if m_ub:
        a[:m_ub, :n] = A_ub
        a[:m_ub, n:] = np.eye(m_ub)
    if m_eq:
        a[m_ub:, :n] = A_eq
    cost = np.concatenate([sign * c, np.zeros(m_ub)])

    row_sign = np.ones(m)
    neg = b < 0
    a[neg] *= -1.0
    b = np.abs(b)
    row_sign[neg] = -1.0

    # Rows whose slack column survived with +1 start basic on the slack;
    # the rest (equalities and negated inequalities) get artificials.
    basis = np.full(m, -1, dtype=int)
    needs_art = [i for i in range(m) if i >= m_ub or neg[i]]
    for i in range(m):
        if basis[i] < 0 and i not in needs_art:
            basis[i] = n + i
    n_struct = n + m_ub
    n_art = len(needs_art)
    total = n_struct + n_art
    tab = np.zeros((m, total + 1))
    tab[:, :n_struct] = a
    tab[:, -1] = b
    for j, i in enumerate(needs_art):
        tab[i, n_struct + j] = 1.0
        basis[i] = n_struct + j

    if max_iter is None:
        max_iter = 2000 + 60 * (m + total)

    iters = 0
    keep_rows = np.ones(m, dtype=bool)
    if n_art:
        # Phase 1: minimize the sum of artificials (they never re-enter).
        red = np.zeros(total + 1)
        red[n_struct:total] = 1.0
        for i in range(m):
            if basis[i] >= n_struct:
                red -= tab[i]
        iters += _iterate(tab, basis, red, enter_limit=n_struct, max_iter=max_iter)
        if -red[-1] > FEAS_TOL * max(1.0, float(np.abs(b).max(initial=0.0))):
            raise Infeasible("phase-1 objective is positive")
        tab, basis, keep_rows = _drop_artificials(tab, basis, n_struct)
        m = tab.shape[0]
        tab = np.ascontiguousarray(
            np.concatenate([tab[:, :n_struct], tab[:, -1:]], axis=1)
        )

    # Phase 2.
    red = np.concatenate([cost, [0.0]]).astype(float)
    for i in range(m):
        if red[basis[i]] != 0.0:
            red -= red[basis[i]] * tab[i]
    iters += _iterate(tab, basis, red, enter_limit=n_struct, max_iter=max_iter)

    # Re-solve on the final basis for clean primal and dual values.
    full = a[keep_rows]
    rhs = b[keep_rows]
    basis_cols = basis.tolist()
    bmat = full[:, basis_cols]
    try:
        xb = np.linalg.solve(bmat, rhs)
        y = np.linalg.solve(bmat.T, cost[basis_cols])
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"singular final basis: {exc}") from exc
    if xb.min(initial=0.0) < -1e-6 * max(1.0, float(np.abs(rhs).max(initial=0.0))):
        raise NumericalFailure("final basis is primal infeasible")
    x_full = np.zeros(n_struct)
    x_full[basis_cols] = np.maximum(xb, 0.0)
    x = x_full[:n]
    obj = float(cost @ x_full)

    # Reduced costs from the dual vector must be nonnegative at optimality.
    reduced = cost - full.T @ y
    scale = max(1.0, float(np.abs(cost).max(initial=0.0)))
    if reduced.min(initial=0.0) < -1e-6 * scale:
        raise NumericalFailure("final basis fails dual feasibility")

    duals = np.zeros(m_ub + m_eq)
    duals[np.nonzero(keep_rows)[0]] = y * row_sign[keep_rows]
    if maximize:
        obj = -obj
        duals = -duals
    return SimplexResult(x=x, objective=obj, duals=duals, iterations=iters)


def _iterate(tab: np.ndarray, basis: np.ndarray, red: np.ndarray,
             enter_limit: int, max_iter: int) -> int:
    """Run simplex pivots in place until optimal. Returns iteration count.

    red[-1] holds minus the current objective, so progress means red[-1]
    rising; a long stall flips pricing to Bland's rule for termination.
    """
    m = tab.shape[0]
    bland = False
    stall = 0
    last_obj = red[-1]
    for it in range(max_iter):
        costs = red[:enter_limit]
        if bland:
            negcols = np.nonzero(costs < -PIVOT_TOL)[0]
            if negcols.size == 0:
                return it
            col = int(negcols[0])
        else:
            col = int(np.argmin(costs))
            if costs[col] >= -PIVOT_TOL:
                return it

        colvals = tab[:, col]
        mask = colvals > PIVOT_TOL
        if not np.any(mask):
            raise Unbounded("no blocking row for the entering column")
        ratios = np.full(m, np.inf)
        ratios[mask] = tab[mask, -1] / colvals[mask]
        rmin = float(ratios.min())
        ties = np.nonzero(ratios <= rmin + 1e-12 * (1.0 + abs(rmin)))[0]
        if bland:
            row = int(ties[np.argmin(basis[ties])])
        else:
            row = int(ties[np.argmax(colvals[ties])])

        piv = tab[row, col]
        tab[row] /= piv
        col_tab = tab[:, col].copy()
        col_tab[row] = 0.0
        tab -= np.outer(col_tab, tab[row])
        red -= red[col] * tab[row]
        basis[row] = col

        if not bland:
            if red[-1] <= last_obj + 1e-12:
                stall += 1
                if stall > 3 * (m + 10):
                    bland = True
            else:
                stall = 0
            last_obj = red[-1]
    raise NumericalFailure(f"simplex hit the iteration cap ({max_iter})")


def _drop_artificials(tab: np.ndarray, basis: np.ndarray, art_start: int):
    """Pivot basic artificials out after phase 1; drop redundant rows."""
    m = tab.shape[0]
    keep = np.ones(m, dtype=bool)
    for i in range(m):
        if basis[i] < art_start:
            continue
        row = tab[i]
        candidates = np.nonzero(np.abs(row[:art_start]) > PIVOT_TOL)[0]
        if candidates.size == 0:
            keep[i] = False  # redundant constraint
            continue
        col = int(candidates[0])
        piv = tab[i, col]
        tab[i] /= piv
        col_tab = tab[:, col].copy()
        col_tab[i] = 0.0
        tab -= np.outer(col_tab, tab[i])
        basis[i] = col
    return tab[keep], basis[keep], keep
