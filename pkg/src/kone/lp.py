"""Self-contained dense simplex kernel behind every cone predicate.

All cone questions (membership, interiority, scaled norms, polytope
containment) reduce to small equality-form linear programs

    minimize c.z   subject to   A z = b,  z >= 0,

with few rows (the ambient dimension) and possibly many columns (one per
generator).  Pivoting is deterministic -- Dantzig's rule with a permanent
Bland switch once progress stalls -- so identical inputs replay identical
runs, which the certificate machinery relies on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["LPResult", "equality_feasibility", "solve_lp"]

_COST_TOL = 1e-11
_PIVOT_TOL = 1e-11
_STALL_LIMIT = 40


@dataclass
class LPResult:
    status: str  # "optimal" | "unbounded" | "infeasible" | "maxiter"
    objective: float
    x: np.ndarray | None


def _simplex(A, b, c, basis, allowed, maxiter):
    """Primal simplex from a feasible basis; returns (status, basis, xB)."""
    k = A.shape[0]
    basis = list(basis)
    bland = False
    stall = 0
    best = np.inf
    for _ in range(maxiter):
        B = A[:, basis]
        try:
            Binv = np.linalg.inv(B)
        except np.linalg.LinAlgError:
            return "singular", basis, None
        xB = Binv @ b
        np.clip(xB, 0.0, None, out=xB)  # absorb degenerate drift
        obj = float(c[basis] @ xB)
        if obj < best - 1e-13:
            best, stall = obj, 0
        else:
            stall += 1
            if stall > _STALL_LIMIT:
                bland = True
        y = c[basis] @ Binv
        rc = c - y @ A
        mask = allowed.copy()
        mask[basis] = False
        cand = np.flatnonzero(mask & (rc < -_COST_TOL))
        if cand.size == 0:
            return "optimal", basis, xB
        enter = int(cand[0]) if bland else int(cand[np.argmin(rc[cand])])
        direction = Binv @ A[:, enter]
        pos = np.flatnonzero(direction > _PIVOT_TOL)
        if pos.size == 0:
            return "unbounded", basis, xB
        ratios = xB[pos] / direction[pos]
        rmin = float(ratios.min())
        tie = pos[ratios <= rmin + 1e-12]
        labels = np.asarray(basis)[tie]
        leave = int(tie[np.argmin(labels)])  # smallest label breaks ties
        basis[leave] = enter
    return "maxiter", basis, None


def _default_maxiter(n_cols: int, n_rows: int) -> int:
    return 200 + 40 * (n_cols + n_rows)


def _phase1(A, b, maxiter):
    """Feasibility phase: minimize the artificial slack mass of {Az=b, z>=0}.

    Returns (residual, basis, ext, b1, n) where residual == 0 iff the system
    is exactly feasible; small residuals mean near-feasible (one-sided L1).
    """
    k, n = A.shape
    sgn = np.where(b < 0.0, -1.0, 1.0)
    A1 = A * sgn[:, None]
    b1 = b * sgn
    ext = np.hstack([A1, np.eye(k)])
    c1 = np.concatenate([np.zeros(n), np.ones(k)])
    allowed = np.ones(n + k, dtype=bool)
    basis = list(range(n, n + k))
    status, basis, xB = _simplex(ext, b1, c1, basis, allowed, maxiter)
    if xB is None:
        return np.inf, basis, ext, b1, n
    residual = float(c1[basis] @ xB)
    return max(residual, 0.0), basis, ext, b1, n


def equality_feasibility(A, b, maxiter: int | None = None):
    """Phase-1 residual of {A z = b, z >= 0} and the best point found.

    A residual at (or numerically near) zero certifies feasibility; the
    caller compares against its own tolerance.
    """
    A = np.ascontiguousarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    k, n = A.shape
    if maxiter is None:
        maxiter = _default_maxiter(n + k, k)
    residual, basis, ext, b1, n = _phase1(A, b, maxiter)
    x = np.zeros(ext.shape[1])
    if residual < np.inf:
        B = ext[:, basis]
        x[basis] = np.clip(np.linalg.solve(B, b1), 0.0, None)
    return residual, x[:n]


def _purge_artificials(ext, b1, basis, n):
    """Pivot zero-level artificials out of the basis; drop dependent rows."""
    k = ext.shape[0]
    rows = list(range(k))
    while True:
        art_pos = [p for p, col in enumerate(basis) if col >= n]
        if not art_pos:
            break
        p = art_pos[0]
        B = ext[np.ix_(rows, basis)]
        Binv = np.linalg.inv(B)
        row = Binv[p] @ ext[np.ix_(rows, list(range(n)))]
        pivots = np.flatnonzero((np.abs(row) > 1e-9) & ~np.isin(np.arange(n), basis))
        if pivots.size:
            basis[p] = int(pivots[0])
        else:
            # redundant constraint: remove the row together with its artificial
            del rows[p]
            del basis[p]
    return rows, basis


def solve_lp(A, b, c, maxiter: int | None = None, feas_tol: float = 1e-9) -> LPResult:
    """Two-phase simplex for minimize c.z subject to A z = b, z >= 0."""
    A = np.ascontiguousarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    k, n = A.shape
    if maxiter is None:
        maxiter = _default_maxiter(n + k, k)
    residual, basis, ext, b1, _ = _phase1(A, b, maxiter)
    if residual > feas_tol * (1.0 + float(np.abs(b).sum())):
        return LPResult("infeasible", np.inf, None)
    rows, basis = _purge_artificials(ext, b1, basis, n)
    A2 = ext[np.ix_(rows, list(range(n)))]
    b2 = b1[rows]
    allowed = np.ones(n, dtype=bool)
    status, basis, xB = _simplex(A2, b2, c, basis, allowed, maxiter)
    if status == "unbounded":
        return LPResult("unbounded", -np.inf, None)
    if status != "optimal" or xB is None:
        return LPResult(status, np.nan, None)
    x = np.zeros(n)
    x[basis] = xB
    return LPResult("optimal", float(c @ x), x)
