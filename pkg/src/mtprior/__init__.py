"""Multi-task regression/classification with pairwise feature-relation priors.

The composite objective couples per-task least squares with a group-lasso row
penalty, a quadratic penalty on prior feature relations (rows of D), and a
smoothness penalty between adjacent tasks' coefficients.  Five proximal
solvers minimize it, and the ``verification`` module turns the convergence
guarantees into executable checks.
"""
from .kernels import BACKEND as kernel_backend
from .model import (
    ConstraintProvenance,
    PriorMatrix,
    ProblemInstance,
    RegularizationParams,
    TaskData,
    validate_coefficients,
    validate_instance,
    zero_coefficients,
)
from .objective import (
    SmoothnessConstants,
    chain_coupling_max,
    compute_constants,
    eval_full,
    eval_nonsmooth,
    eval_smooth,
    grad_smooth,
    majorization_value,
    power_extremes,
)
from .prox import prox_of_point, prox_step
from .solvers import (
    ALGORITHMS,
    ComparisonResult,
    SolverConfig,
    SolverResult,
    fista_t_next,
    run_comparison,
    search_stepsize_modified,
    solve,
    solve_fista_backtracking,
    solve_gd_constant,
    solve_ista_backtracking,
    solve_ista_modified,
    solve_linear_momentum,
)
from .verification import (
    ConvergenceCertificate,
    InequalityCheck,
    ReferenceSolution,
    check_lemma1,
    check_lemma2,
    check_lemma3,
    check_linear_bound,
    check_sublinear_bound,
    estimate_optimum,
)
from .prior import AugmentedTasks, PriorBuildConfig, build_artificial, build_natural
from .metrics import MacroRoc, RocCurve, macro_roc, nmse, roc_auc, variance_explained
from .data_io import (
    SyntheticData,
    SyntheticSpec,
    generate_synthetic,
    load_matrix_csv,
    load_prior_csv,
    load_task_csv,
    load_tasks_csv,
    load_trace_csv,
    split_holdout,
    write_matrix_csv,
    write_prior_csv,
    write_provenance_json,
    write_report_json,
    write_task_csv,
    write_trace_csv,
)

__version__ = "0.1.0"
