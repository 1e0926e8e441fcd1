"""Shared oracles and instrumentation used across the test suite."""

import numpy as np

from corrective_fw.cfw import CfwParams, cfw_run
from corrective_fw.linalg import solve_symmetric_system
from corrective_fw.lmo import SimplexLMO
from corrective_fw.objectives import QuadraticObjective
from corrective_fw.qc import QcSchedule, hybrid_corrector


def simplex_projection(point):
    """Euclidean projection onto the probability simplex (sorting method)."""
    p = np.asarray(point, dtype=float)
    u = np.sort(p)[::-1]
    cssv = np.cumsum(u) - 1.0
    rho = np.nonzero(u * np.arange(1, p.shape[0] + 1) > cssv)[0][-1]
    theta = cssv[rho] / (rho + 1.0)
    return np.maximum(p - theta, 0.0)


def random_simplex_quadratic(seed, n, eig_low=1.0, eig_high=5.0):
    """Seeded SPD quadratic over the n-simplex with known spectrum bounds."""
    rng = np.random.default_rng(seed)
    basis, _ = np.linalg.qr(rng.standard_normal((n, n)))
    eigs = eig_low + (eig_high - eig_low) * rng.random(n)
    quad = (basis * eigs) @ basis.T
    quad = 0.5 * (quad + quad.T)
    linear = rng.standard_normal(n)
    return QuadraticObjective(quad, linear), SimplexLMO(n), float(eigs.max())


def reference_optimum(objective, lmo, x0, max_iterations=100_000, tol=1e-14):
    """High-accuracy reference solve with the MNP-flavor hybrid corrector."""
    corrector = hybrid_corrector(QcSchedule(interval_n=1), "MNP")
    params = CfwParams(max_iterations=max_iterations, fw_gap_tolerance=tol)
    active, traces = cfw_run(objective, lmo, corrector, x0, params)
    return objective.value(active.iterate), active, traces


def instrument(corrector):
    """Wrap a corrective step; log the Alg-2-relevant quantities per call."""
    calls = []

    def wrapped(ctx):
        pw_gap = float(
            ctx.gradient
            @ (ctx.active_set.dense[ctx.away_index] - ctx.active_set.dense[ctx.local_index])
        )
        f_before = ctx.objective.value(ctx.active_set.iterate)
        size_before = len(ctx.active_set)
        outcome = corrector(ctx)
        calls.append(
            {
                "pw_gap": pw_gap,
                "f_before": f_before,
                "f_after": ctx.objective.value(ctx.active_set.iterate),
                "size_before": size_before,
                "size_after": len(ctx.active_set),
                "kind": outcome.kind,
                "progress": outcome.progress,
                "dropped": outcome.dropped,
            }
        )
        return outcome

    return wrapped, calls


def two_box_split_optimum(lower_p, upper_p, lower_q, upper_q, target, lam):
    """Exact minimum of the two-block composite over a box pair, coordinate-wise.

    For f(z) = 0.5 ||z - target||^2 and equal block weights the composite
    separates per coordinate into
    F_i(a, b) = 0.5 ((a+b)/2 - t_i)^2 + (lam/8) (a-b)^2 over a rectangle;
    the minimum is at the unconstrained stationary point (t_i, t_i) or on an
    edge, where the edge-restricted stationary point (clamped) covers all
    remaining cases.
    """

    def coordinate_min(lo_a, hi_a, lo_b, hi_b, t):
        def value(a, b):
            return 0.5 * (0.5 * (a + b) - t) ** 2 + lam / 8.0 * (a - b) ** 2

        def partner(beta):
            return (2.0 * t + (lam - 1.0) * beta) / (1.0 + lam)

        candidates = [(min(max(t, lo_a), hi_a), min(max(t, lo_b), hi_b))]
        for a_fixed in (lo_a, hi_a):
            candidates.append((a_fixed, min(max(partner(a_fixed), lo_b), hi_b)))
        for b_fixed in (lo_b, hi_b):
            candidates.append((min(max(partner(b_fixed), lo_a), hi_a), b_fixed))
        candidates += [(a, b) for a in (lo_a, hi_a) for b in (lo_b, hi_b)]
        return min(value(a, b) for a, b in candidates)

    return sum(
        coordinate_min(lower_p[i], upper_p[i], lower_q[i], upper_q[i], target[i])
        for i in range(len(target))
    )


def conv_hull_quadratic_minimum(atoms_dense, objective):
    """Brute-force minimizer of a quadratic over conv(S) by face enumeration.

    For every nonempty subset, solve the stationarity system over the
    subset's affine hull (consistent systems only) and keep candidates whose
    barycentric weights are feasible; singletons are always candidates.  The
    minimum over all candidates is the exact constrained optimum.
    """
    m = atoms_dense.shape[0]
    best_value = np.inf
    best_point = None
    for mask in range(1, 2**m):
        idx = [i for i in range(m) if mask >> i & 1]
        sub = atoms_dense[idx]
        if len(idx) == 1:
            point = sub[0]
        else:
            anchor = sub[0]
            w = (sub[1:] - anchor).T  # columns v_i - w
            aw = np.array([objective.apply_quad(col) for col in w.T]).T
            reduced = w.T @ aw
            reduced = 0.5 * (reduced + reduced.T)
            rhs = -(w.T @ (objective.apply_quad(anchor) + objective.linear))
            sol = solve_symmetric_system(reduced, rhs)
            mu = sol.solution
            if sol.residual_norm > 1e-8 * (1.0 + np.abs(rhs).max()):
                continue  # no stationary point on this face's affine hull
            lam = np.concatenate([[1.0 - mu.sum()], mu])
            if lam.min() < -1e-10:
                continue
            point = lam @ sub
        value = objective.value(point)
        if value < best_value:
            best_value = value
            best_point = point
    return best_value, best_point
