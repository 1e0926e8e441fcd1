"""Corrective Frank-Wolfe main loops (eager and lazified) and pairwise steps.

Each iteration either takes a Frank-Wolfe step toward the oracle vertex or
hands control to a corrective step on the active set.  A corrective step must
either make guaranteed progress (descent) or remove an atom without
increasing the objective (drop); the pairwise steps below realize that
contract, and the quadratic corrections in :mod:`corrective_fw.qc` plug in
through the same interface.
"""

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .active_set import ActiveSet
from .errors import InfeasibleStartError
from .lmo import Atom
from .objectives import line_search

STEP_FW = "FW"
STEP_DESCENT = "Descent"
STEP_DROP = "Drop"
STEP_GAP = "Gap"
STEP_FCFW_ACCEPT = "FcfwAccept"
STEP_PAIRWISE_FALLBACK = "PairwiseFallback"

STEP_KINDS = (
    STEP_FW,
    STEP_DESCENT,
    STEP_DROP,
    STEP_GAP,
    STEP_FCFW_ACCEPT,
    STEP_PAIRWISE_FALLBACK,
)


@dataclass
class CfwParams:
    """Budget and tolerance knobs shared by the eager and lazy loops."""

    max_iterations: int = 1000
    time_limit: float = math.inf
    fw_gap_tolerance: float = 0.0
    laziness_j: float = 2.0
    lazy: bool = False

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.fw_gap_tolerance < 0:
            raise ValueError("fw_gap_tolerance must be >= 0")
        if self.laziness_j < 1:
            raise ValueError("laziness_j must be >= 1")


@dataclass
class CorrectiveOutcome:
    """Report of one corrective step (the step itself mutates the active set)."""

    new_weights: np.ndarray
    kind: str
    progress: float
    dropped: list = field(default_factory=list)


@dataclass
class TraceRecord:
    """One per-iteration log row; the final row describes the terminal state.

    ``fw_gap`` holds the true Frank-Wolfe gap in eager mode and the lazy
    surrogate in lazy mode (the true gap then lands in ``extra1`` whenever the
    oracle was actually called).  The terminal row always has kind "Gap": it
    certifies the state without moving.
    """

    iteration: int
    elapsed_s: float
    primal: float
    fw_gap: float
    active_set_size: int
    step_kind: str
    lmo_calls: int
    extra1: Optional[float] = None
    extra2: object = None


@dataclass
class CorrectiveContext:
    """Everything a corrective step may use; no LMO access by design."""

    active_set: ActiveSet
    objective: object
    gradient: np.ndarray
    away_index: int
    local_index: int
    global_fw: Optional[Atom]
    iteration: int
    atoms_added: int


CorrectiveStepFn = Callable[[CorrectiveContext], CorrectiveOutcome]


def pairwise_local_step(active, objective, away_index, local_index):
    """Move weight from the away atom to the local FW atom along a line search.

    The step size is capped at the away atom's weight; when the cap binds the
    away atom is removed (drop step), otherwise the step is a descent step.
    """
    if away_index == local_index:
        return CorrectiveOutcome(active.weights.copy(), STEP_DESCENT, 0.0)
    cap = float(active.weights[away_index])
    d = active.dense[away_index] - active.dense[local_index]
    x = active.iterate
    f_before = objective.value(x)
    gamma = line_search(objective, x, d, cap)
    dropping = gamma == cap
    dropped = [active.atoms[away_index].key] if dropping else []
    w = active.weights.copy()
    w[away_index] -= gamma
    w[local_index] += gamma
    active.apply_weights(w)
    progress = f_before - objective.value(active.iterate)
    kind = STEP_DROP if dropping else STEP_DESCENT
    return CorrectiveOutcome(active.weights.copy(), kind, progress, dropped)


def pairwise_global_step(active, objective, away_index, global_fw):
    """Pairwise transfer from the away atom toward the global FW vertex.

    The vertex joins the active set whenever it receives positive weight; a
    binding cap still drops the away atom, so |S| may stay constant.
    """
    target = active.index_of(global_fw)
    if target is None:
        target = active.append_zero(global_fw)
    if target == away_index:
        return CorrectiveOutcome(active.weights.copy(), STEP_DESCENT, 0.0)
    return pairwise_local_step(active, objective, away_index, target)


def pairwise_corrector():
    """Corrective step used by default: the local pairwise step."""

    def corrector(ctx):
        return pairwise_local_step(
            ctx.active_set, ctx.objective, ctx.away_index, ctx.local_index
        )

    return corrector


def global_pairwise_corrector():
    """Pairwise step toward the oracle vertex; falls back to the local step
    when no vertex is available (lazy iterations skip the oracle)."""

    def corrector(ctx):
        if ctx.global_fw is None:
            return pairwise_local_step(
                ctx.active_set, ctx.objective, ctx.away_index, ctx.local_index
            )
        return pairwise_global_step(
            ctx.active_set, ctx.objective, ctx.away_index, ctx.global_fw
        )

    return corrector


def _pairwise_gap(active, gradient, away_index, local_index):
    return float(gradient @ (active.dense[away_index] - active.dense[local_index]))


def run_from_active_set(objective, lmo, corrector, active, params):
    """Eager corrective Frank-Wolfe from an existing active set (mutated in place)."""
    if corrector is None:
        corrector = pairwise_corrector()
    traces = []
    lmo_calls = 0
    atoms_added = 0
    start = time.perf_counter()
    t = 0
    while True:
        x = active.iterate
        g = objective.gradient(x)
        f_now = objective.value(x)
        away_i, local_i = active.extreme_atoms(g)
        vertex = lmo.minimize(g)
        lmo_calls += 1
        fw_gap = float(g @ x) - vertex.dot(g)
        pw_gap = _pairwise_gap(active, g, away_i, local_i)
        elapsed = time.perf_counter() - start
        size_before = len(active)
        if (
            fw_gap <= params.fw_gap_tolerance
            or t >= params.max_iterations
            or elapsed > params.time_limit
        ):
            traces.append(
                TraceRecord(t, elapsed, f_now, fw_gap, size_before, STEP_GAP, lmo_calls)
            )
            return traces
        if size_before > 1 and pw_gap >= fw_gap:
            ctx = CorrectiveContext(
                active, objective, g, away_i, local_i, vertex, t, atoms_added
            )
            kind = corrector(ctx).kind
        else:
            gamma = line_search(objective, x, x - vertex.to_dense(), 1.0)
            if active.add_atom_fw(vertex, gamma):
                atoms_added += 1
            kind = STEP_FW
        traces.append(
            TraceRecord(t, elapsed, f_now, fw_gap, size_before, kind, lmo_calls)
        )
        t += 1


def cfw_run(objective, lmo, corrector, x0, params):
    """Corrective Frank-Wolfe from a start vertex.

    Per iteration: pick the away and local FW atoms inside the active set,
    query the oracle for the global FW vertex, and take a corrective step
    whenever the local pairwise gap is at least the FW gap (ties go to the
    corrective step), otherwise a line-searched FW step that adds the vertex.
    Stops at the gap tolerance, the iteration cap, or the time limit, and
    appends one trace row per iteration plus a terminal row.
    """
    if params.lazy:
        return lcfw_run(objective, lmo, corrector, x0, params)
    active = _start_active_set(lmo, x0)
    traces = run_from_active_set(objective, lmo, corrector, active, params)
    return active, traces


def _start_active_set(lmo, x0):
    if not isinstance(x0, Atom):
        raise InfeasibleStartError("x0 must be an Atom of the domain")
    if not lmo.contains(x0.to_dense(), tol=1e-9):
        raise InfeasibleStartError("x0 is not feasible for the given domain")
    return ActiveSet.from_atom(x0)


def lcfw_run(objective, lmo, corrector, x0, params):
    """Lazified corrective Frank-Wolfe.

    Keeps a gap surrogate phi: corrective steps run whenever the local
    pairwise gap reaches phi (no oracle call); otherwise the oracle is
    consulted once and either a FW step is taken (true gap >= phi / J) or phi
    is halved with the iterate unchanged (gap step).  Terminates once
    phi <= tolerance / 2, which certifies a primal gap below the tolerance.
    """
    if corrector is None:
        corrector = pairwise_corrector()
    active = _start_active_set(lmo, x0)
    traces = []
    start = time.perf_counter()

    g = objective.gradient(active.iterate)
    vertex = lmo.minimize(g)
    lmo_calls = 1
    phi = (float(g @ active.iterate) - vertex.dot(g)) / 2.0
    atoms_added = 0
    t = 0
    while True:
        x = active.iterate
        g = objective.gradient(x)
        f_now = objective.value(x)
        away_i, local_i = active.extreme_atoms(g)
        pw_gap = _pairwise_gap(active, g, away_i, local_i)
        elapsed = time.perf_counter() - start
        size_before = len(active)
        if (
            phi <= params.fw_gap_tolerance / 2.0
            or t >= params.max_iterations
            or elapsed > params.time_limit
        ):
            traces.append(
                TraceRecord(t, elapsed, f_now, phi, size_before, STEP_GAP, lmo_calls)
            )
            return active, traces
        true_gap = None
        if size_before > 1 and pw_gap >= phi:
            ctx = CorrectiveContext(
                active, objective, g, away_i, local_i, None, t, atoms_added
            )
            kind = corrector(ctx).kind
        else:
            vertex = lmo.minimize(g)
            lmo_calls += 1
            true_gap = float(g @ x) - vertex.dot(g)
            if true_gap >= phi / params.laziness_j:
                gamma = line_search(objective, x, x - vertex.to_dense(), 1.0)
                if active.add_atom_fw(vertex, gamma):
                    atoms_added += 1
                kind = STEP_FW
            else:
                kind = STEP_GAP
        traces.append(
            TraceRecord(
                t, elapsed, f_now, phi, size_before, kind, lmo_calls, extra1=true_gap
            )
        )
        if kind == STEP_GAP:
            phi /= 2.0
        t += 1
