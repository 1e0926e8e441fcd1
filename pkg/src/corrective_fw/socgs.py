"""Second-order conditional gradient sliding.

Each outer iteration advances two candidate tracks: a plain corrective step
on the objective (the outer corrective step, its own active set and iterate)
and an inexact projected variable-metric step that minimizes a Hessian-metric
quadratic model with a corrective Frank-Wolfe inner loop, warm-started from
the current state.  The next iterate adopts whichever candidate has the lower
objective value.
"""

import math
import time
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .cfw import (
    STEP_FW,
    STEP_GAP,
    CfwParams,
    CorrectiveContext,
    TraceRecord,
    pairwise_corrector,
    run_from_active_set,
)
from .active_set import ActiveSet
from .errors import InfeasibleStartError
from .objectives import QuadraticObjective, line_search
from .qc import QcSchedule, hybrid_corrector

# The experimental protocol fires one quadratic correction at the first
# eligible inner invocation and another after this many fresh atoms.
INNER_QC_ATOM_INTERVAL = 30


class HessianOracle:
    """Interface: dense symmetric positive definite matrix at a point.

    Implementations may also expose ``hessian_vec(x, d)``; only the dense
    path is required by the solvers here.
    """

    def matrix_at(self, x):
        raise NotImplementedError


class ExactHessianOracle(HessianOracle):
    """Wraps any objective exposing ``hessian(x)``."""

    def __init__(self, objective):
        self.objective = objective

    def matrix_at(self, x):
        return self.objective.hessian(x)

    def hessian_vec(self, x, d):
        return self.objective.hessian_vec(x, d)


class ConstantHessianOracle(HessianOracle):
    def __init__(self, matrix):
        self.matrix = np.asarray(matrix, dtype=float)

    def matrix_at(self, x):
        return self.matrix


@dataclass
class SocgsParams:
    outer_iterations: int = 100
    inner_iterations_k: int = 100
    inner_gap_threshold: Optional[float] = None
    qc_warmup: int = 25
    time_limit: float = math.inf
    gap_tolerance: float = 0.0

    def __post_init__(self):
        if self.outer_iterations < 1 or self.inner_iterations_k < 1:
            raise ValueError("iteration counts must be >= 1")


def build_quadratic_model(objective, hessian, x_t):
    """Quadratic model anchored at x_t with the oracle's metric.

    model(x) = <grad f(x_t), x - x_t> + 0.5 ||x - x_t||^2_H, shifted so
    model(x_t) = 0; its gradient at the anchor equals grad f(x_t) exactly.
    """
    h = hessian.matrix_at(x_t) if isinstance(hessian, HessianOracle) else np.asarray(hessian)
    g = objective.gradient(x_t)
    linear = g - h @ x_t
    constant = 0.5 * float(x_t @ (h @ x_t)) - float(g @ x_t)
    return QuadraticObjective(h, linear, constant)


def pvm_inexact_step(model, lmo, warm_start, k, gap_threshold, corrector):
    """Run the corrective FW inner loop on the model from a warm start.

    Stops after at most ``k`` inner iterations, or earlier once the model's
    FW gap falls at or below ``gap_threshold`` (when provided).  The warm
    start is copied; the caller's active set is untouched.
    """
    active = warm_start.copy()
    active.invalidate_gram()
    inner_params = CfwParams(
        max_iterations=k,
        fw_gap_tolerance=0.0 if gap_threshold is None else gap_threshold,
    )
    traces = run_from_active_set(model, lmo, corrector, active, inner_params)
    return active, traces


def _default_inner_factory(variant, qc_warmup):
    """Inner corrector per outer iteration: pairwise during warmup, then the
    quadratic-correction hybrid (one correction immediately, the next after
    a batch of fresh atoms)."""

    def factory(outer_iteration):
        if variant == "Pairwise" or outer_iteration < qc_warmup:
            return pairwise_corrector()
        schedule = QcSchedule(interval_n=INNER_QC_ATOM_INTERVAL, warmup_iterations=0)
        return hybrid_corrector(schedule, variant, fire_immediately=True)

    return factory


def _ocs_step(active, objective, lmo, corrector, iteration, atoms_added):
    """One corrective-FW iteration on f applied to the outer track."""
    x = active.iterate
    g = objective.gradient(x)
    away_i, local_i = active.extreme_atoms(g)
    vertex = lmo.minimize(g)
    fw_gap = float(g @ x) - vertex.dot(g)
    pw_gap = float(g @ (active.dense[away_i] - active.dense[local_i]))
    if len(active) > 1 and pw_gap >= fw_gap:
        ctx = CorrectiveContext(active, objective, g, away_i, local_i, vertex, iteration, atoms_added)
        kind = corrector(ctx).kind
        return kind, 0
    gamma = line_search(objective, x, x - vertex.to_dense(), 1.0)
    added = 1 if active.add_atom_fw(vertex, gamma) else 0
    return STEP_FW, added


def socgs_run(
    objective,
    hessian_oracle,
    lmo,
    x_start,
    params,
    outer_corrector=None,
    inner_corrector="MNP",
    lower_bound_fn: Optional[Callable] = None,
):
    """Second-order conditional gradient sliding.

    ``inner_corrector`` is either "Pairwise"/"LP"/"MNP" (built with the
    warmup protocol: no quadratic corrections during the first
    ``params.qc_warmup`` outer iterations) or a callable
    ``factory(outer_iteration) -> corrective step``.

    The fixed inner budget ``params.inner_iterations_k`` is the default stop
    for the variable-metric subproblem; a caller-supplied ``lower_bound_fn``
    switches the threshold to (lb(x_t) / ||grad f(x_t)||)^4 instead.

    Traces log, per outer iteration, f and the true FW gap at the current
    iterate, the adopted branch in extra2 ("PVM" or "OCS"), and the inner
    iteration count in extra1.
    """
    if outer_corrector is None:
        outer_corrector = pairwise_corrector()
    if callable(inner_corrector):
        inner_factory = inner_corrector
    else:
        if inner_corrector not in ("Pairwise", "LP", "MNP"):
            raise ValueError(f"unknown inner corrector {inner_corrector!r}")
        inner_factory = _default_inner_factory(inner_corrector, params.qc_warmup)

    x_start = np.asarray(x_start, dtype=float)
    v0 = lmo.minimize(objective.gradient(x_start))
    lmo_calls = 1
    if not lmo.contains(v0.to_dense(), tol=1e-9):
        raise InfeasibleStartError("oracle produced an infeasible start vertex")
    main = ActiveSet.from_atom(v0)
    ocs = main.copy()
    ocs_atoms_added = 0

    traces = []
    start = time.perf_counter()
    t = 0
    while True:
        x = main.iterate
        g = objective.gradient(x)
        f_now = objective.value(x)
        vertex = lmo.minimize(g)
        lmo_calls += 1
        true_gap = float(g @ x) - vertex.dot(g)
        elapsed = time.perf_counter() - start
        if (
            true_gap <= params.gap_tolerance
            or t >= params.outer_iterations
            or elapsed > params.time_limit
        ):
            traces.append(
                TraceRecord(
                    t, elapsed, f_now, true_gap, len(main), STEP_GAP, lmo_calls
                )
            )
            break

        size_before = len(main)
        ocs_kind, added = _ocs_step(
            ocs, objective, lmo, outer_corrector, t, ocs_atoms_added
        )
        ocs_atoms_added += added
        lmo_calls += 1

        model = build_quadratic_model(objective, hessian_oracle, x)
        if lower_bound_fn is not None:
            grad_norm = float(np.linalg.norm(g))
            threshold = (lower_bound_fn(x) / grad_norm) ** 4 if grad_norm > 0 else 0.0
        else:
            threshold = params.inner_gap_threshold
        pvm_active, inner_traces = pvm_inexact_step(
            model, lmo, main, params.inner_iterations_k, threshold, inner_factory(t)
        )
        inner_iters = len(inner_traces) - 1
        lmo_calls += inner_traces[-1].lmo_calls

        f_pvm = objective.value(pvm_active.iterate)
        f_ocs = objective.value(ocs.iterate)
        if f_pvm <= f_ocs:
            candidate, branch = pvm_active, "PVM"
            f_candidate = f_pvm
        else:
            candidate, branch = ocs.copy(), "OCS"
            f_candidate = f_ocs
        # The tracks evolve independently of the adopted sequence, so in
        # principle both candidates can sit above the current value; keeping
        # the current state preserves monotonicity of the main sequence.
        if f_candidate <= f_now:
            main = candidate
        else:
            branch = "Keep"
        traces.append(
            TraceRecord(
                t,
                elapsed,
                f_now,
                true_gap,
                size_before,
                ocs_kind,
                lmo_calls,
                extra1=float(inner_iters),
                extra2=branch,
            )
        )
        t += 1
    return main, traces
