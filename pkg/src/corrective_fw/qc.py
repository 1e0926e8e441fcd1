"""Quadratic corrective steps for quadratic objectives.

Both corrections target the minimizer of the objective over the affine hull
of the active set, assembled purely from cached scalar products so the system
size depends on |S| only.  The LP variant enforces nonnegative weights inside
a feasibility LP; the MNP variant solves the plain linear system and, when
weights go negative, pulls back to the simplex boundary with a single ratio
test, dropping every atom that hits zero.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .cfw import (
    STEP_DROP,
    STEP_FCFW_ACCEPT,
    STEP_PAIRWISE_FALLBACK,
    CorrectiveOutcome,
    pairwise_local_step,
)
from .errors import IterationLimitError, SingletonActiveSetError
from .linalg import solve_feasibility_lp, solve_symmetric_system
from .objectives import QuadraticObjective

log = logging.getLogger(__name__)

# Accept slightly negative solved weights before clamping; beyond this the
# MNP branch runs its pullback.
NEGATIVE_WEIGHT_TOL = 1e-12
# Ratio-test ties within this tolerance are all dropped.
RATIO_TIE_TOL = 1e-12
# A rank-deficient solve is only trusted while the stationarity residual
# (checked in the unreduced form) stays below this.
RANK_DEFICIENT_RESIDUAL_TOL = 1e-6


@dataclass
class AffineSystem:
    """Reduced symmetric system for the affine-hull minimizer.

    Entry (i, j) is <v_i - w, A (v_j - w)> with anchor w = atom 0; the right
    hand side collects -<v_i - w, A w + b>.
    """

    reduced_matrix: np.ndarray
    reduced_rhs: np.ndarray
    anchor_index: int = 0


@dataclass
class QcSchedule:
    """When the hybrid corrector fires a quadratic correction.

    A correction runs once ``interval_n`` new atoms arrived since the last
    one, but never before ``warmup_iterations`` and never while the active
    set is smaller than ``min_active_set``.
    """

    interval_n: int = 1
    warmup_iterations: int = 0
    min_active_set: int = 2

    def __post_init__(self):
        if self.interval_n < 1:
            raise ValueError("interval_n must be >= 1")
        if self.warmup_iterations < 0 or self.min_active_set < 0:
            raise ValueError("schedule counts must be nonnegative")


def build_affine_system(active, objective):
    """Assemble the anchored stationarity system from the Gram cache."""
    if len(active) < 2:
        raise SingletonActiveSetError("affine system needs at least two atoms")
    active.ensure_gram(objective)
    g = active.gram
    bv = active.lin
    reduced = g[1:, 1:] - g[1:, :1] - g[:1, 1:] + g[0, 0]
    reduced = 0.5 * (reduced + reduced.T)
    rhs = -(g[1:, 0] - g[0, 0] + bv[1:] - bv[0])
    return AffineSystem(reduced_matrix=reduced, reduced_rhs=rhs)


def recover_full_weights(system, mu):
    """Full weight vector from the reduced solution; anchor takes 1 - sum(mu)."""
    mu = np.asarray(mu, dtype=float)
    out = np.empty(mu.shape[0] + 1)
    out[0] = 1.0 - mu.sum()
    out[1:] = mu
    return out


def stationarity_residual(active, weights):
    """max_i |<A V lambda + b, v_i - v_0>| evaluated from the Gram cache."""
    g = active.gram
    bv = active.lin
    if len(active) < 2:
        return 0.0
    res = (g[1:, :] - g[:1, :]) @ weights + (bv[1:] - bv[0])
    return float(np.abs(res).max())


def _fallback(active, objective, away_index, local_index, reason):
    log.info("quadratic correction fell back to pairwise: %s", reason)
    out = pairwise_local_step(active, objective, away_index, local_index)
    return CorrectiveOutcome(
        out.new_weights, STEP_PAIRWISE_FALLBACK, out.progress, out.dropped
    )


def _accept(active, objective, weights, f_before):
    clipped = np.maximum(weights, 0.0)
    clipped /= clipped.sum()
    active.apply_weights(clipped)
    progress = f_before - objective.value(active.iterate)
    return CorrectiveOutcome(active.weights.copy(), STEP_FCFW_ACCEPT, progress)


def qc_mnp_step(active, objective, away_index, local_index):
    """Minimum-norm-point style correction: affine solve plus one pullback.

    Accepts the solved weights outright when they are (numerically)
    nonnegative.  Otherwise the ratio test
    ``tau = min { lam_i / (lam_i - lam_i') : lam_i' < lam_i }`` moves the
    weights to the simplex boundary and every index attaining tau is dropped.
    Rank-deficient solves are accepted only while the unreduced stationarity
    residual stays small; otherwise the step degrades to a pairwise step.
    """
    if len(active) < 2:
        raise SingletonActiveSetError("qc_mnp_step needs at least two atoms")
    system = build_affine_system(active, objective)
    try:
        solution = solve_symmetric_system(system.reduced_matrix, system.reduced_rhs)
    except (np.linalg.LinAlgError, ValueError) as exc:
        return _fallback(active, objective, away_index, local_index, f"solve failed: {exc}")
    lam_new = recover_full_weights(system, solution.solution)
    if not np.all(np.isfinite(lam_new)):
        return _fallback(active, objective, away_index, local_index, "non-finite solution")
    if solution.rank_deficient:
        residual = stationarity_residual(active, lam_new)
        if residual > RANK_DEFICIENT_RESIDUAL_TOL:
            return _fallback(
                active,
                objective,
                away_index,
                local_index,
                f"rank deficient with residual {residual:.3e}",
            )
    f_before = objective.value(active.iterate)
    lam_old = active.weights
    if lam_new.min() >= -NEGATIVE_WEIGHT_TOL:
        return _accept(active, objective, lam_new, f_before)

    mask = lam_new < lam_old
    ratios = np.where(mask, lam_old / np.where(mask, lam_old - lam_new, 1.0), np.inf)
    tau = float(ratios[mask].min())
    drop = np.abs(ratios - tau) <= RATIO_TIE_TOL
    lam_pulled = lam_old + tau * (lam_new - lam_old)
    lam_pulled[drop] = 0.0
    lam_pulled = np.maximum(lam_pulled, 0.0)
    lam_pulled /= lam_pulled.sum()
    dropped = [a.key for a, d in zip(active.atoms, drop) if d]
    active.apply_weights(lam_pulled)
    progress = f_before - objective.value(active.iterate)
    return CorrectiveOutcome(active.weights.copy(), STEP_DROP, progress, dropped)


def qc_lp_step(active, objective, away_index, local_index, lp_tol=1e-8):
    """LP correction: stationarity plus simplex constraints as a feasibility LP.

    Feasible systems yield the exact minimizer over conv(S) (an FCFW step);
    infeasible systems mean the affine minimizer lies outside the hull and a
    local pairwise step runs instead.
    """
    if len(active) < 2:
        raise SingletonActiveSetError("qc_lp_step needs at least two atoms")
    active.ensure_gram(objective)
    g = active.gram
    bv = active.lin
    m = len(active)
    lhs = np.empty((m, m))
    lhs[:-1] = g[1:, :] - g[:1, :]
    lhs[-1] = 1.0
    rhs = np.empty(m)
    rhs[:-1] = bv[0] - bv[1:]
    rhs[-1] = 1.0
    # Equilibrate the stationarity rows (scale-invariant solution set, far
    # better-behaved feasibility tolerances when the Gram entries are large).
    row_scale = np.maximum(np.abs(lhs).max(axis=1), np.abs(rhs))
    row_scale = np.where(row_scale > 1.0, row_scale, 1.0)
    lhs /= row_scale[:, None]
    rhs /= row_scale
    try:
        lam = solve_feasibility_lp(lhs, rhs, tol=lp_tol)
    except IterationLimitError as exc:
        log.warning("qc_lp_step hit the LP pivot cap: %s", exc)
        lam = None
    if lam is None:
        return _fallback(active, objective, away_index, local_index, "LP infeasible")
    f_before = objective.value(active.iterate)
    return _accept(active, objective, lam, f_before)


def hybrid_corrector(schedule, variant, fire_immediately=False):
    """Corrective step mixing quadratic corrections with pairwise steps.

    Counts atoms added to the active set and fires one quadratic correction
    of the requested variant ("LP" or "MNP") each time ``interval_n`` new
    atoms arrived, subject to the schedule's warmup and minimum active-set
    size; every other invocation is a local pairwise step.  The counter
    resets after each correction.  With ``fire_immediately`` the first
    eligible invocation corrects regardless of the counter (used by inner
    solves that re-fit the weights to a fresh quadratic model).

    Non-quadratic objectives always take the pairwise path.
    """
    if variant not in ("LP", "MNP"):
        raise ValueError(f"unknown quadratic correction variant {variant!r}")
    state = {"anchor": -schedule.interval_n if fire_immediately else 0}

    def corrector(ctx):
        eligible = (
            isinstance(ctx.objective, QuadraticObjective)
            and len(ctx.active_set) >= max(schedule.min_active_set, 2)
            and ctx.iteration >= schedule.warmup_iterations
            and ctx.atoms_added - state["anchor"] >= schedule.interval_n
        )
        if not eligible:
            return pairwise_local_step(
                ctx.active_set, ctx.objective, ctx.away_index, ctx.local_index
            )
        state["anchor"] = ctx.atoms_added
        step = qc_lp_step if variant == "LP" else qc_mnp_step
        return step(ctx.active_set, ctx.objective, ctx.away_index, ctx.local_index)

    return corrector
