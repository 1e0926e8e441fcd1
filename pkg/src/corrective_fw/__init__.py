"""Projection-free convex optimization with corrective active-set steps.

Solvers: corrective Frank-Wolfe (eager and lazified), quadratic corrections
(LP and minimum-norm-point flavors), split conditional gradient and
alternating linear minimization over set products, and second-order
conditional gradient sliding.  A benchmark harness with deterministic
generators and CSV traces lives in :mod:`corrective_fw.bench` and
:mod:`corrective_fw.cli`.
"""

from . import bench
from .active_set import ActiveSet
from .cfw import (
    CfwParams,
    CorrectiveContext,
    CorrectiveOutcome,
    TraceRecord,
    cfw_run,
    global_pairwise_corrector,
    lcfw_run,
    pairwise_corrector,
    pairwise_global_step,
    pairwise_local_step,
    run_from_active_set,
)
from .lmo import (
    Atom,
    BirkhoffLMO,
    BoxLMO,
    KSparseLMO,
    L1BallLMO,
    L2BallLMO,
    LinearMinimizationOracle,
    ProductLMO,
    SimplexLMO,
    hungarian_min_assignment,
)
from .linalg import LinearSystemSolution, solve_feasibility_lp, solve_symmetric_system
from .objectives import (
    LogisticObjective,
    Objective,
    QuadraticObjective,
    ScaledIdentity,
    exact_quadratic_line_search,
    line_search,
    logistic_eval,
    secant_line_search,
)
from .qc import (
    AffineSystem,
    QcSchedule,
    build_affine_system,
    hybrid_corrector,
    qc_lp_step,
    qc_mnp_step,
    recover_full_weights,
)
from .socgs import (
    ConstantHessianOracle,
    ExactHessianOracle,
    HessianOracle,
    SocgsParams,
    build_quadratic_model,
    pvm_inexact_step,
    socgs_run,
)
from .splitting import (
    SplitProblem,
    SplitState,
    alm_run,
    original_scg_schedules,
    scg_block_direction,
    scg_run,
    scg_schedules,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
