import math

import numpy as np
import pytest
from helpers import two_box_split_optimum

from corrective_fw.cfw import CfwParams
from corrective_fw.lmo import BoxLMO, L2BallLMO, SimplexLMO
from corrective_fw.objectives import QuadraticObjective
from corrective_fw.qc import QcSchedule, hybrid_corrector
from corrective_fw.splitting import (
    SplitProblem,
    SplitState,
    alm_run,
    composite_value,
    original_scg_schedules,
    scg_block_direction,
    scg_run,
    scg_schedules,
)


def distance_quadratic(target):
    target = np.asarray(target, dtype=float)
    n = target.shape[0]
    return QuadraticObjective(np.eye(n), -target, 0.5 * float(target @ target))


def box_pair_problem(lower_p, upper_p, lower_q, upper_q, target):
    dim = len(target)
    return SplitProblem(
        blocks=[(BoxLMO(lower_p, upper_p), dim), (BoxLMO(lower_q, upper_q), dim)],
        weights=np.array([0.5, 0.5]),
        objective=distance_quadratic(target),
    )


class TestSchedules:
    def test_values_at_zero(self):
        lam, gamma = scg_schedules(0)
        assert lam == pytest.approx(math.log(2.0), rel=1e-12)
        # raw step 2 / (sqrt(2) ln 2) ~ 2.0404 exceeds 1, so it clamps
        assert gamma == 1.0

    def test_values_at_two(self):
        lam, gamma = scg_schedules(2)
        assert lam == pytest.approx(math.log(4.0), rel=1e-12)
        assert gamma == pytest.approx(2.0 / (2.0 * math.log(4.0)), rel=1e-12)

    def test_monotone_trends(self):
        lams = []
        gammas = []
        for t in range(3, 4000, 97):
            lam, gamma = scg_schedules(t)
            lams.append(lam)
            gammas.append(gamma)
        assert all(b > a for a, b in zip(lams, lams[1:]))
        assert all(b < a for a, b in zip(gammas, gammas[1:]))
        assert gammas[-1] < 0.05

    def test_original_schedule_is_larger_stepped(self):
        for t in range(3, 100):
            assert original_scg_schedules(t)[1] >= scg_schedules(t)[1]
            assert original_scg_schedules(t)[0] == scg_schedules(t)[0]


class TestBlockDirection:
    def test_on_diagonal_direction_is_plain_gradient(self):
        state = SplitState(
            block_iterates=[np.array([1.0, 0.0]), np.array([1.0, 0.0])],
            averaged_point=np.array([1.0, 0.0]),
            diagonal_distance_sq=0.0,
        )
        g = np.array([0.3, -0.4])
        for i in range(2):
            assert np.allclose(scg_block_direction(state, i, g, 2.5), g)

    def test_zero_penalty_direction_is_plain_gradient(self):
        state = SplitState(
            block_iterates=[np.array([1.0, 0.0]), np.array([0.0, 1.0])],
            averaged_point=np.array([0.5, 0.5]),
            diagonal_distance_sq=0.25,
        )
        g = np.array([0.3, -0.4])
        assert np.allclose(scg_block_direction(state, 0, g, 0.0), g)

    def test_hand_values_two_blocks(self):
        state = SplitState(
            block_iterates=[np.array([1.0, 0.0]), np.array([0.0, 1.0])],
            averaged_point=np.array([0.5, 0.5]),
            diagonal_distance_sq=0.25,
        )
        g = np.zeros(2)
        assert np.allclose(scg_block_direction(state, 0, g, 2.0), [1.0, -1.0])
        assert np.allclose(scg_block_direction(state, 1, g, 2.0), [-1.0, 1.0])


class TestScgRun:
    def test_identical_simplices_reach_interior_target(self):
        n = 4
        target = np.array([0.4, 0.3, 0.2, 0.1])
        problem = SplitProblem(
            blocks=[(SimplexLMO(n), n), (SimplexLMO(n), n)],
            weights=np.array([0.5, 0.5]),
            objective=distance_quadratic(target),
        )
        x0 = [SimplexLMO(n).minimize(np.arange(n, dtype=float))] * 2
        params = CfwParams(max_iterations=4000, fw_gap_tolerance=0.0)
        state, traces = scg_run(problem, x0, params, block_update="fw")
        assert state.diagonal_distance_sq <= 1e-3
        assert problem.objective.value(state.averaged_point) <= 1e-3

    def test_block_iterates_stay_feasible(self):
        problem = box_pair_problem(
            [-1.0, -1.0], [1.0, 1.0], [0.5, 0.5], [2.0, 2.0], [0.0, 0.0]
        )
        for budget in (1, 3, 10, 50):
            x0 = [oracle.minimize(np.ones(dim)) for oracle, dim in problem.blocks]
            state, _ = scg_run(
                problem, x0, CfwParams(max_iterations=budget), block_update="fw"
            )
            for (oracle, _dim), block in zip(problem.blocks, state.block_iterates):
                assert oracle.contains(block, tol=1e-9)

    def test_state_matches_recomputation(self):
        problem = box_pair_problem(
            [-1.0, 0.0], [1.0, 2.0], [0.0, -2.0], [3.0, 1.0], [0.3, 0.3]
        )
        x0 = [oracle.minimize(np.ones(dim)) for oracle, dim in problem.blocks]
        state, _ = scg_run(problem, x0, CfwParams(max_iterations=25), block_update="fw")
        avg = 0.5 * (state.block_iterates[0] + state.block_iterates[1])
        assert np.abs(state.averaged_point - avg).max() <= 1e-10
        dist = sum(
            0.5 * float(np.sum((b - avg) ** 2)) for b in state.block_iterates
        )
        assert abs(state.diagonal_distance_sq - dist) <= 1e-10

    def test_composite_bound_holds_on_intersecting_boxes(self):
        # The guaranteed decay of the composite gap at rate 1/sqrt(t+2);
        # spot-checked at a few iterations on a small instance.
        rng = np.random.default_rng(0)
        dim = 6
        lower_p, upper_p = -np.ones(dim), np.ones(dim)
        lower_q, upper_q = np.zeros(dim), 2.0 * np.ones(dim)
        target = rng.standard_normal(dim)
        problem = box_pair_problem(lower_p, upper_p, lower_q, upper_q, target)
        x0 = [oracle.minimize(np.ones(d)) for oracle, d in problem.blocks]
        _, traces = scg_run(problem, x0, CfwParams(max_iterations=120), block_update="fw")
        d_p = float(np.linalg.norm(upper_p - lower_p))
        d_q = float(np.linalg.norm(upper_q - lower_q))
        hi = 0.5 * sum(max((upper_p[i] / 2 + upper_q[i] / 2 - target[i]) ** 2,
                           (target[i] - lower_p[i] / 2 - lower_q[i] / 2) ** 2)
                       for i in range(dim))
        constant = (d_p + d_q) ** 2 * 2.0 + math.sqrt(2.0) * hi
        for record in traces:
            if record.iteration < 3:
                continue
            lam = record.extra2
            f_opt = two_box_split_optimum(lower_p, upper_p, lower_q, upper_q, target, lam)
            assert record.primal - f_opt <= constant / math.sqrt(record.iteration + 2.0)

    def test_corrective_blocks_make_faster_progress(self):
        problem = box_pair_problem(
            [-1.0] * 4, [1.0] * 4, [0.0] * 4, [2.0] * 4, [0.4, 0.2, 0.6, 0.5]
        )
        x0 = [oracle.minimize(np.ones(d)) for oracle, d in problem.blocks]
        params = CfwParams(max_iterations=80)
        _, vanilla = scg_run(problem, x0, params, block_update="fw")
        x0b = [oracle.minimize(np.ones(d)) for oracle, d in problem.blocks]
        _, corrective = scg_run(
            problem,
            x0b,
            params,
            block_update="corrective",
            corrector_factory=lambda: hybrid_corrector(QcSchedule(interval_n=5), "MNP"),
        )
        assert corrective[-1].primal <= vanilla[-1].primal + 1e-12

    def test_trace_extras_carry_distance_and_penalty(self):
        problem = box_pair_problem([-1.0], [1.0], [0.0], [2.0], [0.3])
        x0 = [oracle.minimize(np.ones(d)) for oracle, d in problem.blocks]
        _, traces = scg_run(problem, x0, CfwParams(max_iterations=5), block_update="fw")
        for t, record in enumerate(traces):
            assert record.extra2 == pytest.approx(math.log(t + 2.0))
            assert record.extra1 >= 0.0


class TestAlmRun:
    def test_disjoint_segments_find_closest_endpoints(self):
        blocks = [(BoxLMO([0.0], [1.0]), 1), (BoxLMO([2.0], [3.0]), 1)]
        x0 = [blocks[0][0].minimize(np.array([1.0])), blocks[1][0].minimize(np.array([-1.0]))]
        state, traces = alm_run(blocks, x0, CfwParams(max_iterations=2000))
        x, y = state.block_iterates
        assert abs(x[0] - 1.0) <= 1e-3 and abs(y[0] - 2.0) <= 1e-3
        # F = 0.5 ||x - y||^2 approaches 0.5 * (set distance)^2 = 0.5
        assert traces[-1].primal == pytest.approx(0.5, abs=2e-3)

    def test_intersecting_boxes_drive_distance_to_zero(self):
        dim = 3
        blocks = [
            (BoxLMO(-np.ones(dim), np.ones(dim)), dim),
            (BoxLMO(np.zeros(dim), 2 * np.ones(dim)), dim),
        ]
        x0 = [blocks[0][0].minimize(np.ones(dim)), blocks[1][0].minimize(-np.ones(dim))]
        initial = float(np.linalg.norm(x0[0].to_dense() - x0[1].to_dense()))
        state, _ = alm_run(blocks, x0, CfwParams(max_iterations=3000))
        x, y = state.block_iterates
        assert float(np.linalg.norm(x - y)) <= 1e-3 * initial

    def test_disjoint_unit_balls_reach_distance_one(self):
        dim = 2
        blocks = [
            (L2BallLMO(np.zeros(dim), 1.0), dim),
            (L2BallLMO(np.array([3.0, 0.0]), 1.0), dim),
        ]
        x0 = [blocks[0][0].minimize(np.array([-1.0, 0.7])), blocks[1][0].minimize(np.array([1.0, 0.3]))]
        state, _ = alm_run(blocks, x0, CfwParams(max_iterations=5000))
        x, y = state.block_iterates
        assert 0.999 <= float(np.linalg.norm(x - y)) <= 1.001

    def test_identical_singletons_converge_immediately(self):
        blocks = [(BoxLMO([0.5], [0.5]), 1), (BoxLMO([0.5], [0.5]), 1)]
        x0 = [b[0].minimize(np.array([1.0])) for b in blocks]
        state, traces = alm_run(blocks, x0, CfwParams(max_iterations=10))
        assert len(traces) == 1
        assert state.diagonal_distance_sq == 0.0

    def test_rejects_mismatched_blocks(self):
        with pytest.raises(ValueError):
            alm_run([(BoxLMO([0.0], [1.0]), 1)], [], CfwParams())


class TestCompositeValue:
    def test_matches_direct_formula(self):
        problem = box_pair_problem([-1.0, 0.0], [1.0, 1.0], [0.0, 0.0], [2.0, 2.0], [0.5, 0.5])
        x = [np.array([0.2, 0.4]), np.array([1.0, 0.8])]
        lam = 3.0
        value, avg, dist_sq = composite_value(problem, x, lam)
        expected_avg = 0.5 * (x[0] + x[1])
        expected_dist = 0.5 * np.sum((x[0] - expected_avg) ** 2) + 0.5 * np.sum(
            (x[1] - expected_avg) ** 2
        )
        assert np.allclose(avg, expected_avg)
        assert dist_sq == pytest.approx(expected_dist)
        assert value == pytest.approx(
            problem.objective.value(expected_avg) + 0.5 * lam * expected_dist
        )


class TestMixedBlockModes:
    def test_corrective_and_fw_blocks_cooperate(self):
        problem = box_pair_problem(
            [-1.0] * 3, [1.0] * 3, [0.0] * 3, [2.0] * 3, [0.25, 0.5, 0.75]
        )
        x0 = [oracle.minimize(np.ones(d)) for oracle, d in problem.blocks]
        state, traces = scg_run(
            problem, x0, CfwParams(max_iterations=120), block_update=["corrective", "fw"]
        )
        assert state.block_active_sets is not None
        assert state.block_active_sets[0] is not None
        assert state.block_active_sets[1] is None
        for (oracle, _d), block in zip(problem.blocks, state.block_iterates):
            assert oracle.contains(block, tol=1e-9)
        assert traces[-1].primal <= traces[0].primal
