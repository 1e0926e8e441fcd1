import numpy as np
import pytest
from helpers import simplex_projection

from corrective_fw.active_set import ActiveSet
from corrective_fw.bench import gen_logistic_synthetic
from corrective_fw.cfw import pairwise_corrector
from corrective_fw.lmo import Atom, L1BallLMO, SimplexLMO
from corrective_fw.objectives import QuadraticObjective
from corrective_fw.socgs import (
    ConstantHessianOracle,
    ExactHessianOracle,
    SocgsParams,
    build_quadratic_model,
    pvm_inexact_step,
    socgs_run,
)


def small_logistic(seed=0, n=20, m=60):
    obj, lmo = gen_logistic_synthetic(n, m, seed)
    return obj, lmo


class TestBuildQuadraticModel:
    def test_exact_hessian_reproduces_quadratic_up_to_shift(self):
        rng = np.random.default_rng(1)
        basis = rng.standard_normal((5, 5))
        quad = basis @ basis.T + np.eye(5)
        obj = QuadraticObjective(quad, rng.standard_normal(5), 2.0)
        x_t = rng.standard_normal(5)
        model = build_quadratic_model(obj, ConstantHessianOracle(quad), x_t)
        for _ in range(20):
            x = rng.standard_normal(5)
            assert model.value(x) == pytest.approx(obj.value(x) - obj.value(x_t), abs=1e-10)

    def test_identity_metric_is_proximal_linearization(self):
        rng = np.random.default_rng(2)
        obj, _ = small_logistic(seed=3)
        x_t = rng.standard_normal(obj.dim) * 0.1
        model = build_quadratic_model(obj, ConstantHessianOracle(np.eye(obj.dim)), x_t)
        g = obj.gradient(x_t)
        for _ in range(10):
            x = rng.standard_normal(obj.dim)
            expected = float(g @ (x - x_t)) + 0.5 * float((x - x_t) @ (x - x_t))
            assert model.value(x) == pytest.approx(expected, abs=1e-10)

    def test_model_gradient_matches_objective_at_anchor(self):
        rng = np.random.default_rng(3)
        obj, _ = small_logistic(seed=4)
        x_t = rng.standard_normal(obj.dim) * 0.05
        model = build_quadratic_model(obj, ExactHessianOracle(obj), x_t)
        assert np.abs(model.gradient(x_t) - obj.gradient(x_t)).max() <= 1e-12

    def test_hessian_matches_finite_difference_of_gradient(self):
        rng = np.random.default_rng(4)
        obj, _ = small_logistic(seed=5, n=10, m=30)
        x = rng.standard_normal(10) * 0.2
        hess = obj.hessian(x)
        eps = 1e-5
        for _ in range(10):
            d = rng.standard_normal(10)
            fd = (obj.gradient(x + eps * d) - obj.gradient(x - eps * d)) / (2.0 * eps)
            exact = hess @ d
            assert np.linalg.norm(fd - exact) <= 1e-4 * (1.0 + np.linalg.norm(exact))


class TestPvmInexactStep:
    def test_stationary_warm_start_exits_immediately(self):
        # Warm start already minimizes the model over the simplex.
        n = 4
        target = np.full(n, 1.0 / n)
        obj = QuadraticObjective(np.eye(n), -target)
        lmo = SimplexLMO(n)
        warm = ActiveSet([Atom.unit(n, i) for i in range(n)], np.full(n, 1.0 / n))
        model = build_quadratic_model(obj, ConstantHessianOracle(np.eye(n)), warm.iterate)
        active, traces = pvm_inexact_step(model, lmo, warm, 50, 1e-10, pairwise_corrector())
        assert len(traces) == 1
        assert traces[0].fw_gap <= 1e-10

    def test_identity_metric_approximates_simplex_projection(self):
        rng = np.random.default_rng(5)
        n = 8
        obj, _ = small_logistic(seed=6, n=n, m=20)
        x_t = np.zeros(n)
        model = build_quadratic_model(obj, ConstantHessianOracle(np.eye(n)), x_t)
        lmo = SimplexLMO(n)
        warm = ActiveSet.from_atom(Atom.unit(n, 0))
        active, _ = pvm_inexact_step(model, lmo, warm, 200, None, pairwise_corrector())
        expected = simplex_projection(x_t - obj.gradient(x_t))
        assert np.abs(active.iterate - expected).max() <= 1e-5

    def test_k_one_takes_exactly_one_step(self):
        n = 5
        obj = QuadraticObjective(np.eye(n), -np.full(n, 1.0 / n))
        lmo = SimplexLMO(n)
        warm = ActiveSet.from_atom(Atom.unit(n, 0))
        model = build_quadratic_model(obj, ConstantHessianOracle(np.eye(n)), warm.iterate)
        _, traces = pvm_inexact_step(model, lmo, warm, 1, None, pairwise_corrector())
        assert len(traces) == 2  # one step plus the terminal row

    def test_warm_start_left_untouched(self):
        n = 5
        obj = QuadraticObjective(np.eye(n), -np.full(n, 1.0 / n))
        lmo = SimplexLMO(n)
        warm = ActiveSet.from_atom(Atom.unit(n, 0))
        before = warm.iterate.copy()
        pvm_inexact_step(
            build_quadratic_model(obj, ConstantHessianOracle(np.eye(n)), warm.iterate),
            lmo,
            warm,
            25,
            None,
            pairwise_corrector(),
        )
        assert np.array_equal(warm.iterate, before)


class TestSocgsRun:
    def test_monotone_and_converges_on_logistic(self):
        obj, lmo = small_logistic(seed=7)
        params = SocgsParams(
            outer_iterations=60, inner_iterations_k=60, qc_warmup=5, gap_tolerance=1e-6
        )
        active, traces = socgs_run(
            obj, ExactHessianOracle(obj), lmo, np.zeros(obj.dim), params, inner_corrector="MNP"
        )
        primals = [r.primal for r in traces]
        assert all(b <= a + 1e-12 for a, b in zip(primals, primals[1:]))
        assert traces[-1].fw_gap <= 1e-6

    def test_exact_model_with_qc_inner_solves_quadratic_in_one_outer_step(self):
        rng = np.random.default_rng(8)
        n = 6
        basis, _ = np.linalg.qr(rng.standard_normal((n, n)))
        eigs = 1.0 + rng.random(n)
        quad = (basis * eigs) @ basis.T
        target_weights = rng.random(n) + 0.3
        target_weights /= target_weights.sum()
        # optimum strictly inside the simplex so the model solve can land on it
        linear = -quad @ target_weights
        obj = QuadraticObjective(quad, linear)
        lmo = SimplexLMO(n)
        params = SocgsParams(
            outer_iterations=40,
            inner_iterations_k=400,
            qc_warmup=0,
            gap_tolerance=1e-8,
        )
        active, traces = socgs_run(
            obj, ConstantHessianOracle(quad), lmo, np.zeros(n), params, inner_corrector="MNP"
        )
        f_star = obj.value(target_weights)
        assert obj.value(active.iterate) - f_star <= 1e-8
        # once the active set covers the optimal face, a PVM win follows fast
        assert any(r.extra2 == "PVM" for r in traces if r.extra2 is not None)

    def test_first_outer_iteration_matches_plain_corrective_step(self):
        obj, lmo = small_logistic(seed=9)
        params = SocgsParams(outer_iterations=1, inner_iterations_k=5, qc_warmup=25)
        _, traces = socgs_run(
            obj, ExactHessianOracle(obj), lmo, np.zeros(obj.dim), params, inner_corrector="MNP"
        )
        assert traces[0].step_kind == "FW"  # singleton start always FW

    def test_warmup_trajectories_bit_identical_across_inner_correctors(self):
        obj, lmo = small_logistic(seed=10)
        warmup = 8
        params = SocgsParams(outer_iterations=14, inner_iterations_k=30, qc_warmup=warmup)
        runs = {}
        for variant in ("MNP", "Pairwise"):
            _, traces = socgs_run(
                obj, ExactHessianOracle(obj), lmo, np.zeros(obj.dim), params, inner_corrector=variant
            )
            runs[variant] = traces
        for a, b in zip(runs["MNP"][:warmup], runs["Pairwise"][:warmup]):
            assert a.primal == b.primal
            assert a.fw_gap == b.fw_gap
            assert a.active_set_size == b.active_set_size
            assert a.step_kind == b.step_kind

    def test_identity_metric_still_converges(self):
        obj, lmo = small_logistic(seed=11)
        params = SocgsParams(
            outer_iterations=80, inner_iterations_k=60, qc_warmup=0, gap_tolerance=1e-5
        )
        _, traces = socgs_run(
            obj,
            ConstantHessianOracle(np.eye(obj.dim)),
            lmo,
            np.zeros(obj.dim),
            params,
            inner_corrector="Pairwise",
        )
        assert traces[-1].fw_gap <= 1e-5

    def test_lower_bound_threshold_path(self):
        obj, lmo = small_logistic(seed=12)
        params = SocgsParams(outer_iterations=10, inner_iterations_k=500, gap_tolerance=1e-5)
        f_floor = 0.0  # crude valid lower bound for the regularized loss

        def lb(x):
            return max(obj.value(x) - f_floor, 0.0) * 0.5

        _, traces = socgs_run(
            obj,
            ExactHessianOracle(obj),
            lmo,
            np.zeros(obj.dim),
            params,
            inner_corrector="Pairwise",
            lower_bound_fn=lb,
        )
        assert len(traces) >= 2  # ran without the fixed-k stop
