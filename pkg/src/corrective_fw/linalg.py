"""Dense kernels: a symmetric linear-system solver and a phase-I feasibility LP.

Both routines are deliberately small and deterministic; system sizes are
bounded by the active-set size, so dense arithmetic is sufficient.
"""

import logging

import numpy as np
from dataclasses import dataclass

from .errors import DimensionMismatchError, IterationLimitError, NonFiniteInputError

log = logging.getLogger(__name__)

# Pivot magnitudes at or below PIVOT_RTOL * max|M| mark the system as
# rank deficient and reroute the solve to a min-norm least-squares path.
PIVOT_RTOL = 1e-11


@dataclass
class LinearSystemSolution:
    solution: np.ndarray
    residual_norm: float
    rank_deficient: bool


def _require_finite(name, arr):
    if not np.all(np.isfinite(arr)):
        raise NonFiniteInputError(f"{name} contains NaN or Inf entries")


def _rank_probe(matrix, threshold):
    """Partial-pivot elimination used only to detect small pivots."""
    a = matrix.copy()
    n = a.shape[0]
    for k in range(n):
        piv = k + int(np.argmax(np.abs(a[k:, k])))
        if abs(a[piv, k]) <= threshold:
            return True
        if piv != k:
            a[[k, piv]] = a[[piv, k]]
        a[k + 1 :] -= np.outer(a[k + 1 :, k] / a[k, k], a[k])
    return False


def solve_symmetric_system(matrix, rhs, pivot_rtol=PIVOT_RTOL):
    """Solve M x = rhs for symmetric M, minimizing ||M x - rhs||_2.

    Returns the exact solution when M is nonsingular.  When any elimination
    pivot falls at or below ``pivot_rtol * max|M|`` the system is flagged rank
    deficient and the minimum-norm least-squares solution is returned instead.
    """
    m = np.array(matrix, dtype=float)
    b = np.array(rhs, dtype=float).ravel()
    _require_finite("matrix", m)
    _require_finite("rhs", b)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {m.shape}")
    if b.shape[0] != m.shape[0]:
        raise DimensionMismatchError(
            f"rhs length {b.shape[0]} does not match matrix size {m.shape[0]}"
        )
    scale = float(np.abs(m).max()) if m.size else 0.0
    if scale > 0.0 and float(np.abs(m - m.T).max()) > 1e-12 * scale:
        raise ValueError("matrix is not symmetric within 1e-12 relative")

    deficient = _rank_probe(m, pivot_rtol * scale)
    if deficient:
        x = np.linalg.lstsq(m, b, rcond=None)[0]
    else:
        x = np.linalg.solve(m, b)
    residual = float(np.linalg.norm(m @ x - b))
    return LinearSystemSolution(solution=x, residual_norm=residual, rank_deficient=deficient)


def solve_feasibility_lp(eq_lhs, eq_rhs, tol=1e-8, max_iterations=None):
    """Find lam >= 0 with eq_lhs @ lam == eq_rhs, or None when infeasible.

    Runs a phase-I simplex minimizing the sum of artificial variables, with
    Bland's rule so cycling cannot occur.  Feasibility is decided against
    ``tol * (1 + max|eq_rhs|)``; the same scaled tolerance bounds the equality
    residual of any returned point.

    Raises IterationLimitError at ``50 * (vars + constraints)`` pivots
    (callers treat this as infeasible but should log it distinctly).
    """
    a = np.array(eq_lhs, dtype=float)
    b = np.array(eq_rhs, dtype=float).ravel()
    _require_finite("eq_lhs", a)
    _require_finite("eq_rhs", b)
    if a.ndim != 2:
        raise DimensionMismatchError("eq_lhs must be a matrix")
    n_rows, n_vars = a.shape
    if b.shape[0] != n_rows:
        raise DimensionMismatchError(
            f"eq_rhs length {b.shape[0]} does not match row count {n_rows}"
        )
    feas_tol = tol * (1.0 + (float(np.abs(b).max()) if b.size else 0.0))
    if max_iterations is None:
        max_iterations = 50 * (n_vars + n_rows)

    # Tableau [A | I | b] with rows flipped so b >= 0; basis starts on the
    # artificial block.
    tableau = np.hstack([a, np.eye(n_rows), b[:, None]])
    neg = tableau[:, -1] < 0
    tableau[neg] *= -1.0
    basis = list(range(n_vars, n_vars + n_rows))
    cost = np.concatenate([np.zeros(n_vars), np.ones(n_rows)])

    for _ in range(max_iterations):
        reduced = cost - cost[basis] @ tableau[:, :-1]
        entering = -1
        for j in range(n_vars + n_rows):
            if reduced[j] < -1e-12:
                entering = j
                break
        if entering < 0:
            break
        col = tableau[:, entering]
        best_ratio = np.inf
        leaving = -1
        for i in range(n_rows):
            if col[i] > 1e-12:
                ratio = tableau[i, -1] / col[i]
                if ratio < best_ratio - 1e-15 or (
                    abs(ratio - best_ratio) <= 1e-15
                    and (leaving < 0 or basis[i] < basis[leaving])
                ):
                    best_ratio = ratio
                    leaving = i
        if leaving < 0:
            # Phase-I objective is bounded below by zero, so an unbounded
            # pivot column can only be numerical noise.
            return None
        pivot = tableau[leaving, entering]
        tableau[leaving] /= pivot
        for i in range(n_rows):
            if i != leaving and tableau[i, entering] != 0.0:
                tableau[i] -= tableau[i, entering] * tableau[leaving]
        basis[leaving] = entering
    else:
        raise IterationLimitError(
            f"phase-I simplex exceeded {max_iterations} pivots"
        )

    objective = float(cost[basis] @ tableau[:, -1])
    if objective > feas_tol:
        return None

    # Pivot remaining artificials out of the basis where a real column allows.
    for i in range(n_rows):
        if basis[i] >= n_vars:
            row = tableau[i, :n_vars]
            candidates = np.nonzero(np.abs(row) > 1e-9)[0]
            if candidates.size:
                j = int(candidates[0])
                pivot = tableau[i, j]
                tableau[i] /= pivot
                for r in range(n_rows):
                    if r != i and tableau[r, j] != 0.0:
                        tableau[r] -= tableau[r, j] * tableau[i]
                basis[i] = j

    lam = np.zeros(n_vars)
    for i, var in enumerate(basis):
        if var < n_vars:
            lam[var] = tableau[i, -1]
    lam[(lam < 0.0) & (lam > -1e-12)] = 0.0
    residual = float(np.abs(a @ lam - b).max()) if n_rows else 0.0
    if residual > feas_tol or lam.min(initial=0.0) < -1e-12:
        log.warning("phase-I simplex produced an out-of-tolerance point; reporting infeasible")
        return None
    return lam
