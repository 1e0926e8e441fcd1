"""Splitting solvers over finite products of LMO-accessible sets.

The composite objective is F_lam(x) = f(sum_i w_i x^i) + (lam/2) * dist^2,
where dist^2 = sum_i w_i ||x^i - xbar||^2 measures the weighted squared
distance to the diagonal.  Block updates are either open-loop Frank-Wolfe
steps (penalty and step-size schedules) or per-block corrective decisions on
the block-restricted quadratic, which is explicit whenever f is quadratic.
"""

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .active_set import ActiveSet
from .cfw import (
    STEP_FW,
    STEP_GAP,
    CorrectiveContext,
    TraceRecord,
    pairwise_corrector,
)
from .errors import InfeasibleStartError
from .lmo import Atom
from .objectives import QuadraticObjective, line_search


def scg_schedules(t):
    """Penalty ln(t+2) and step size 2 / (sqrt(t+2) ln(t+2)), clamped to 1.

    The raw step formula exceeds 1 for t <= 2 while the block update needs a
    convex combination, hence the clamp.
    """
    lam = math.log(t + 2.0)
    gamma = min(1.0, 2.0 / (math.sqrt(t + 2.0) * lam))
    return lam, gamma


def original_scg_schedules(t):
    """Reference schedule pair: same penalty, step size 2 / sqrt(t+2)."""
    lam = math.log(t + 2.0)
    gamma = min(1.0, 2.0 / math.sqrt(t + 2.0))
    return lam, gamma


@dataclass
class SplitProblem:
    """Product-domain problem: per-block oracles plus an objective on the average."""

    blocks: list  # (LinearMinimizationOracle, dim) pairs
    weights: np.ndarray
    objective: object
    penalty_schedule: Callable[[int], float] = field(default=lambda t: scg_schedules(t)[0])
    step_schedule: Callable[[int], float] = field(default=lambda t: scg_schedules(t)[1])

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        if len(self.blocks) != self.weights.shape[0]:
            raise ValueError("one weight per block required")
        if self.weights.min() <= 0 or abs(self.weights.sum() - 1.0) > 1e-12:
            raise ValueError("weights must be positive and sum to 1")


@dataclass
class SplitState:
    block_iterates: list
    averaged_point: np.ndarray
    diagonal_distance_sq: float
    block_active_sets: Optional[list] = None


def _average(blocks_dense, weights):
    out = weights[0] * blocks_dense[0]
    for w, x in zip(weights[1:], blocks_dense[1:]):
        out = out + w * x
    return out


def _distance_sq(blocks_dense, weights, avg):
    return float(sum(w * float(np.sum((x - avg) ** 2)) for w, x in zip(weights, blocks_dense)))


def composite_value(problem, blocks_dense, lam):
    avg = _average(blocks_dense, problem.weights)
    dist_sq = _distance_sq(blocks_dense, problem.weights, avg)
    return problem.objective.value(avg) + 0.5 * lam * dist_sq, avg, dist_sq


def scg_block_direction(state, block_index, grad_avg, lambda_t):
    """Linearization direction handed to block i's oracle."""
    return grad_avg + lambda_t * (state.block_iterates[block_index] - state.averaged_point)


class _BlockQuadOperator:
    """Hessian of F_lam restricted to one block: w^2 A_f + lam w (1-w) I."""

    def __init__(self, base_matvec, w, lam):
        self.base_matvec = base_matvec
        self.scale = w * w
        self.shift = lam * w * (1.0 - w)

    def matvec(self, x):
        return self.scale * self.base_matvec(x) + self.shift * x


def _block_quadratic(problem, blocks_dense, i, lam):
    """F_lam as an explicit quadratic in block i, other blocks held fixed."""
    f = problem.objective
    if not isinstance(f, QuadraticObjective):
        raise ValueError("block-restricted quadratics require a quadratic objective")
    w = problem.weights
    # weighted sum (not average) of the other blocks
    r = sum(w[j] * blocks_dense[j] for j in range(len(blocks_dense)) if j != i)
    op = _BlockQuadOperator(f.apply_quad, w[i], lam)
    linear = w[i] * (f.apply_quad(r) + f.linear - lam * r)
    zero_block = [
        np.zeros_like(blocks_dense[i]) if j == i else blocks_dense[j]
        for j in range(len(blocks_dense))
    ]
    constant = composite_value(problem, zero_block, lam)[0]
    return QuadraticObjective(op, linear, constant)


def _as_modes(block_update, n_blocks):
    if isinstance(block_update, str):
        modes = [block_update] * n_blocks
    else:
        modes = list(block_update)
    if len(modes) != n_blocks or any(m not in ("fw", "corrective") for m in modes):
        raise ValueError("block_update must be 'fw', 'corrective', or one such mode per block")
    return modes


def scg_run(
    problem,
    x0,
    params,
    block_update="fw",
    corrector_factory=None,
    step_mode="schedule",
):
    """Split conditional gradient over the product domain.

    With ``block_update='fw'`` and ``step_mode='schedule'`` every block takes
    the open-loop step from the problem's schedules against the
    start-of-iteration average.  Corrective blocks instead keep an active set
    and run one corrective-Frank-Wolfe decision per cycle on the
    block-restricted quadratic, re-linearized after each block update;
    ``step_mode='linesearch'`` makes plain FW blocks use the exact block line
    search as well.

    Trace rows log the composite value at the iteration's penalty, the
    weighted product Frank-Wolfe gap, and (extra1, extra2) = (dist^2, lam).
    """
    if step_mode not in ("schedule", "linesearch"):
        raise ValueError("step_mode must be 'schedule' or 'linesearch'")
    n_blocks = len(problem.blocks)
    modes = _as_modes(block_update, n_blocks)
    weights = problem.weights
    oracles = [b[0] for b in problem.blocks]

    actives = []
    dense = []
    for (oracle, _dim), atom, mode in zip(problem.blocks, x0, modes):
        if not isinstance(atom, Atom) or not oracle.contains(atom.to_dense(), tol=1e-9):
            raise InfeasibleStartError("each start block must be a feasible Atom")
        if mode == "corrective":
            actives.append(ActiveSet.from_atom(atom))
            dense.append(actives[-1].iterate)
        else:
            actives.append(None)
            dense.append(atom.to_dense())

    if corrector_factory is None:
        corrector_factory = pairwise_corrector
    correctors = [corrector_factory() if m == "corrective" else None for m in modes]
    atoms_added = [0] * n_blocks

    traces = []
    lmo_calls = 0
    start = time.perf_counter()
    t = 0
    while True:
        lam = problem.penalty_schedule(t)
        f_value, avg, dist_sq = composite_value(problem, dense, lam)
        grad_avg = problem.objective.gradient(avg)
        sizes = sum(len(a) for a in actives if a is not None) or n_blocks
        elapsed = time.perf_counter() - start

        # Weighted product FW gap of F_lam at the start-of-iteration point.
        directions = [
            grad_avg + lam * (dense[i] - avg) for i in range(n_blocks)
        ]
        vertices = [oracles[i].minimize(directions[i]) for i in range(n_blocks)]
        lmo_calls += n_blocks
        gap = float(
            sum(
                weights[i] * (float(directions[i] @ dense[i]) - vertices[i].dot(directions[i]))
                for i in range(n_blocks)
            )
        )
        if (
            gap <= params.fw_gap_tolerance
            or t >= params.max_iterations
            or elapsed > params.time_limit
        ):
            traces.append(
                TraceRecord(t, elapsed, f_value, gap, sizes, STEP_GAP, lmo_calls, dist_sq, lam)
            )
            break

        cycle_kind = STEP_FW
        if step_mode == "schedule" and all(m == "fw" for m in modes):
            gamma = problem.step_schedule(t)
            for i in range(n_blocks):
                v = vertices[i].to_dense()
                dense[i] = dense[i] + gamma * (v - dense[i])
        else:
            for i in range(n_blocks):
                block_obj = _block_quadratic(problem, dense, i, lam)
                if modes[i] == "fw":
                    x_i = dense[i]
                    g_i = block_obj.gradient(x_i)
                    v = oracles[i].minimize(g_i)
                    lmo_calls += 1
                    gamma = line_search(block_obj, x_i, x_i - v.to_dense(), 1.0)
                    dense[i] = x_i + gamma * (v.to_dense() - x_i)
                else:
                    active = actives[i]
                    x_i = active.iterate
                    g_i = block_obj.gradient(x_i)
                    away_i, local_i = active.extreme_atoms(g_i)
                    v = oracles[i].minimize(g_i)
                    lmo_calls += 1
                    block_gap = float(g_i @ x_i) - v.dot(g_i)
                    pw_gap = float(
                        g_i @ (active.dense[away_i] - active.dense[local_i])
                    )
                    if len(active) > 1 and pw_gap >= block_gap:
                        ctx = CorrectiveContext(
                            active, block_obj, g_i, away_i, local_i, v, t, atoms_added[i]
                        )
                        cycle_kind = correctors[i](ctx).kind
                    else:
                        gamma = line_search(block_obj, x_i, x_i - v.to_dense(), 1.0)
                        if active.add_atom_fw(v, gamma):
                            atoms_added[i] += 1
                    dense[i] = active.iterate

        traces.append(
            TraceRecord(t, elapsed, f_value, gap, sizes, cycle_kind, lmo_calls, dist_sq, lam)
        )
        t += 1

    avg = _average(dense, weights)
    state = SplitState(
        block_iterates=[np.asarray(x) for x in dense],
        averaged_point=avg,
        diagonal_distance_sq=_distance_sq(dense, weights, avg),
        block_active_sets=actives if any(a is not None for a in actives) else None,
    )
    return state, traces


def alm_run(blocks, x0, params, block_update="fw", corrector_factory=None):
    """Alternating linear minimization: pure feasibility over two sets.

    Specializes the split solver to f == 0 with a constant penalty chosen so
    the composite value equals 0.5 ||x - y||^2.  Block steps use exact line
    searches (the composite restricted to a block is an explicit quadratic),
    which converges far faster here than any open-loop schedule.
    """
    if len(blocks) != 2 or blocks[0][1] != blocks[1][1]:
        raise ValueError("alm_run needs exactly two blocks of equal dimension")
    dim = blocks[0][1]
    from .objectives import ScaledIdentity

    zero = QuadraticObjective(ScaledIdentity(0.0, dim), np.zeros(dim), 0.0)
    problem = SplitProblem(
        blocks=blocks,
        weights=np.array([0.5, 0.5]),
        objective=zero,
        penalty_schedule=lambda t: 4.0,
        step_schedule=lambda t: min(1.0, 2.0 / (t + 2.0)),
    )
    return scg_run(
        problem,
        x0,
        params,
        block_update=block_update,
        corrector_factory=corrector_factory,
        step_mode="linesearch",
    )
