"""Problem generators at desk scale, a LIBSVM loader, and the run dispatcher.

All randomness flows through one numpy PCG64 generator seeded from the run
configuration, drawn in a fixed documented order, so a (config, seed) pair
pins the full numeric trajectory.
"""

import logging
import math
import time

import numpy as np

from .cfw import CfwParams, cfw_run, lcfw_run, pairwise_corrector
from .errors import EmptyDatasetError, TraceParseError
from .lmo import Atom, BirkhoffLMO, KSparseLMO, L1BallLMO, L2BallLMO
from .objectives import LogisticObjective, QuadraticObjective, ScaledIdentity
from .qc import QcSchedule, hybrid_corrector
from .socgs import ExactHessianOracle, SocgsParams, socgs_run
from .splitting import SplitProblem, alm_run, scg_run
from .traces import write_trace

log = logging.getLogger(__name__)


def ksparse_regression_data(n, m, seed):
    """Standard-normal design matrix and targets (sampled in this order)."""
    rng = np.random.default_rng(seed)
    design = rng.standard_normal((m, n))
    targets = rng.standard_normal(m)
    return design, targets


def gen_ksparse_regression(n, m, k, tau, seed):
    """Least-squares ||A x - y||^2 over the k-sparse polytope.

    The residual form is expanded to 0.5 <x, (2 A^T A) x> + <-2 A^T y, x>
    + ||y||^2 so quadratic corrections apply directly.
    """
    design, targets = ksparse_regression_data(n, m, seed)
    quad = 2.0 * design.T @ design
    linear = -2.0 * design.T @ targets
    constant = float(targets @ targets)
    return QuadraticObjective(quad, linear, constant), KSparseLMO(n, k, tau)


def gen_birkhoff_projection(n, seed):
    """Scaled Frobenius projection of a uniform random matrix onto the
    doubly stochastic matrices: f(X) = ||X - X0||_F^2 / n^2."""
    rng = np.random.default_rng(seed)
    x0 = rng.random((n, n)).ravel()
    scale = 2.0 / (n * n)
    objective = QuadraticObjective(
        ScaledIdentity(scale, n * n), -scale * x0, float(x0 @ x0) / (n * n)
    )
    return objective, BirkhoffLMO(n)


def birkhoff_ball_sample_count(n, q):
    """ceil(-n ln(1-q)): vertex samples needed so the sampled face covers
    about a q fraction of the entries."""
    if not 0.0 < q < 1.0:
        raise ValueError(f"q={q} outside (0, 1)")
    return int(math.ceil(-n * math.log(1.0 - q)))


def gen_split_birkhoff_ball(n, c, q, r, seed):
    """Two-block split problem: Birkhoff polytope x shifted l2 ball.

    Sampling order: the projection target X0, then the uniform directions
    whose oracle vertices position the ball.  The ball center sits at the
    sampled-face average, pushed back along the mean direction by c, so the
    sets intersect iff c <= r.
    """
    if c < 0.0:
        raise ValueError("c must be nonnegative")
    m_samples = birkhoff_ball_sample_count(n, q)
    rng = np.random.default_rng(seed)
    x0 = rng.random((n, n)).ravel()
    birkhoff = BirkhoffLMO(n)
    vertices = []
    directions = []
    for _ in range(m_samples):
        d = rng.random((n, n)).ravel()
        directions.append(d)
        vertices.append(birkhoff.minimize(d).to_dense())
    v_bar = np.mean(vertices, axis=0)
    d_bar = np.mean(directions, axis=0)
    center = v_bar - c * d_bar / float(np.linalg.norm(d_bar))
    dim = n * n
    scale = 2.0 / dim
    objective = QuadraticObjective(ScaledIdentity(scale, dim), -scale * x0, float(x0 @ x0) / dim)
    return SplitProblem(
        blocks=[(birkhoff, dim), (L2BallLMO(center, r), dim)],
        weights=np.array([0.5, 0.5]),
        objective=objective,
    )


def gen_logistic_synthetic(n, m, seed):
    """Synthetic logistic data over the unit l1 ball.

    Standard-normal features, labels from a planted standard-normal linear
    model with exactly round(0.1 m) sign flips.  The planted model is logged
    for diagnostics.
    """
    rng = np.random.default_rng(seed)
    features = rng.standard_normal((m, n))
    planted = rng.standard_normal(n)
    labels = np.where(features @ planted >= 0.0, 1.0, -1.0)
    n_flips = int(round(0.1 * m))
    flip = rng.choice(m, size=n_flips, replace=False)
    labels[flip] *= -1.0
    log.info(
        "planted logistic model: ||w||=%.4f, positive label share %.3f",
        float(np.linalg.norm(planted)),
        float((labels > 0).mean()),
    )
    return LogisticObjective(features, labels), L1BallLMO(n, 1.0)


def load_libsvm(path):
    """Load a LIBSVM-format file ("label idx:val idx:val ...", 1-based).

    Labels 0/1 are remapped to -1/+1.  Returns the logistic objective over
    the densified features plus a (samples, features) report.
    """
    rows = []
    labels = []
    max_index = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            try:
                raw = float(parts[0])
            except ValueError as exc:
                raise TraceParseError(f"bad label {parts[0]!r}", path=path, line=lineno) from exc
            if raw in (1.0, -1.0):
                label = raw
            elif raw == 0.0:
                label = -1.0
            else:
                raise TraceParseError(f"label {raw!r} is not 0/1 or +-1", path=path, line=lineno)
            entries = []
            for token in parts[1:]:
                idx, _, val = token.partition(":")
                if not _:
                    raise TraceParseError(f"bad feature token {token!r}", path=path, line=lineno)
                try:
                    index = int(idx)
                    value = float(val)
                except ValueError as exc:
                    raise TraceParseError(
                        f"bad feature token {token!r}", path=path, line=lineno
                    ) from exc
                if index < 1:
                    raise TraceParseError(
                        f"feature index {index} is not 1-based", path=path, line=lineno
                    )
                entries.append((index, value))
                max_index = max(max_index, index)
            rows.append(entries)
            labels.append(label)
    if not rows:
        raise EmptyDatasetError(f"{path}: no samples")
    features = np.zeros((len(rows), max_index))
    for i, entries in enumerate(rows):
        for index, value in entries:
            features[i, index - 1] = value
    return LogisticObjective(features, np.asarray(labels)), (len(rows), max_index)


def _corrector_from_config(config):
    if config.corrector == "Pairwise":
        return pairwise_corrector()
    schedule = QcSchedule(
        interval_n=config.qc_interval,
        warmup_iterations=config.qc_warmup,
        min_active_set=config.qc_min_active_set,
    )
    return hybrid_corrector(schedule, "LP" if config.corrector == "QcLp" else "MNP")


def _corrector_factory_from_config(config):
    if config.corrector == "Pairwise":
        return pairwise_corrector
    variant = "LP" if config.corrector == "QcLp" else "MNP"

    def factory():
        schedule = QcSchedule(
            interval_n=config.qc_interval,
            warmup_iterations=config.qc_warmup,
            min_active_set=config.qc_min_active_set,
        )
        return hybrid_corrector(schedule, variant)

    return factory


def _unit_box_atoms(problem):
    atoms = []
    for oracle, dim in problem.blocks:
        atoms.append(oracle.minimize(np.ones(dim)))
    return atoms


def run(config):
    """Dispatch a configured run, write its trace, and summarize.

    Returns (exit_code, summary) where exit_code is 0 when the tolerance was
    certified, 2 when the budget ran out first.
    """
    config.validate()
    started = time.perf_counter()
    params = CfwParams(
        max_iterations=config.max_iterations,
        time_limit=config.time_limit_s,
        fw_gap_tolerance=config.gap_tolerance,
        laziness_j=config.laziness_j,
        lazy=config.algorithm == "LCFW",
    )

    if config.problem == "KSparseRegression":
        objective, lmo = gen_ksparse_regression(
            config.n, config.m, config.k, config.tau, config.seed
        )
        x0 = lmo.minimize(objective.gradient(np.zeros(config.n)))
        runner = lcfw_run if config.algorithm == "LCFW" else cfw_run
        _, traces = runner(objective, lmo, _corrector_from_config(config), x0, params)
        converged = traces[-1].fw_gap <= (
            config.gap_tolerance / 2.0 if config.algorithm == "LCFW" else config.gap_tolerance
        )
    elif config.problem == "BirkhoffProjection":
        objective, lmo = gen_birkhoff_projection(config.n, config.seed)
        x0 = lmo.minimize(objective.gradient(np.zeros(config.n * config.n)))
        runner = lcfw_run if config.algorithm == "LCFW" else cfw_run
        _, traces = runner(objective, lmo, _corrector_from_config(config), x0, params)
        converged = traces[-1].fw_gap <= (
            config.gap_tolerance / 2.0 if config.algorithm == "LCFW" else config.gap_tolerance
        )
    elif config.problem == "SplitBirkhoffBall":
        problem = gen_split_birkhoff_ball(config.n, config.c, config.q, config.r, config.seed)
        x0 = _unit_box_atoms(problem)
        modes = (
            ["corrective", "fw"] if config.block_update == "corrective" else "fw"
        )
        _, traces = scg_run(
            problem,
            x0,
            params,
            block_update=modes,
            corrector_factory=_corrector_factory_from_config(config),
            step_mode="schedule" if config.block_update == "fw" else "linesearch",
        )
        converged = traces[-1].fw_gap <= config.gap_tolerance
    elif config.problem == "AlmIntersection":
        problem = gen_split_birkhoff_ball(config.n, config.c, config.q, config.r, config.seed)
        x0 = _unit_box_atoms(problem)
        _, traces = alm_run(
            problem.blocks,
            x0,
            params,
            block_update="corrective" if config.block_update == "corrective" else "fw",
            corrector_factory=_corrector_factory_from_config(config),
        )
        converged = traces[-1].fw_gap <= config.gap_tolerance
    elif config.problem == "LogisticSocgs":
        objective, lmo = gen_logistic_synthetic(config.n, config.m, config.seed)
        socgs_params = SocgsParams(
            outer_iterations=config.max_iterations,
            inner_iterations_k=config.inner_iterations,
            qc_warmup=config.socgs_qc_warmup,
            time_limit=config.time_limit_s,
            gap_tolerance=config.gap_tolerance,
        )
        inner = {"Pairwise": "Pairwise", "QcLp": "LP", "QcMnp": "MNP"}[config.corrector]
        _, traces = socgs_run(
            objective,
            ExactHessianOracle(objective),
            lmo,
            np.zeros(config.n),
            socgs_params,
            inner_corrector=inner,
        )
        converged = traces[-1].fw_gap <= config.gap_tolerance
    else:
        raise ValueError(f"problem {config.problem!r} is not runnable from a config")

    write_trace(config.output_path, traces)
    wall = time.perf_counter() - started
    last = traces[-1]
    summary = {
        "primal": last.primal,
        "gap": last.fw_gap,
        "iterations": last.iteration,
        "lmo_calls": last.lmo_calls,
        "wall_s": wall,
        "trace": config.output_path,
    }
    return (0 if converged else 2), summary
