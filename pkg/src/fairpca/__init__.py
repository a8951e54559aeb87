"""Min-max fair PCA on the Stiefel manifold.

Finds an orthonormal basis maximizing the smallest per-group retained
variance by alternating Riemannian gradient descent in the basis with
projected gradient ascent in the group weights, plus a Riemannian
subgradient baseline, dataset tooling, and diagnostics.
"""

from .arpgda import (
    ARPGDAParams,
    InequalityViolation,
    IterationRecord,
    REPORT_SCHEMA,
    Schedules,
    SolveResult,
    SolverState,
    arpgda_step,
    initial_state,
    make_schedules,
    recommended_params,
    solve_arpgda,
)
from .baselines import RSGParams, rsg_step, solve_rsg
from .data import (
    DatasetMeta,
    dataset_csv_text,
    describe,
    gen_synthetic_blocks,
    gen_synthetic_gaussian,
    load_csv_grouped,
    preprocess,
    save_csv_grouped,
    save_meta,
)
from .exceptions import (
    DataError,
    DegenerateProblemError,
    DiagnosticUnavailableError,
    DimensionError,
    NumericalError,
)
from .problem import (
    GroupedDataset,
    SmoothnessConstants,
    projections,
    dist_to_subgradient,
    euclidean_gradient_U,
    group_objectives,
    group_riemannian_gradient,
    ky_fan_norm,
    min_objective,
    minimax_objective,
    riemannian_gradient_U,
    smoothness_constants,
    stationarity_measure,
    y_gradient,
)
from .simplex import (
    project_to_simplex,
    simplex_violation,
    uniform_weights,
    validate_weights,
)
from .stiefel import (
    load_point,
    orthonormality_error,
    polar_retract,
    project_to_tangent,
    random_stiefel,
    random_tangent,
    save_point,
    tangency_error,
    validate_stiefel,
)

__version__ = "0.1.0"

__all__ = [
    "ARPGDAParams",
    "DataError",
    "DatasetMeta",
    "DegenerateProblemError",
    "DiagnosticUnavailableError",
    "DimensionError",
    "GroupedDataset",
    "InequalityViolation",
    "IterationRecord",
    "NumericalError",
    "REPORT_SCHEMA",
    "RSGParams",
    "Schedules",
    "SmoothnessConstants",
    "SolveResult",
    "SolverState",
    "arpgda_step",
    "dataset_csv_text",
    "describe",
    "dist_to_subgradient",
    "euclidean_gradient_U",
    "gen_synthetic_blocks",
    "gen_synthetic_gaussian",
    "group_objectives",
    "group_riemannian_gradient",
    "initial_state",
    "ky_fan_norm",
    "load_csv_grouped",
    "load_point",
    "make_schedules",
    "min_objective",
    "minimax_objective",
    "orthonormality_error",
    "polar_retract",
    "preprocess",
    "project_to_simplex",
    "project_to_tangent",
    "projections",
    "random_stiefel",
    "random_tangent",
    "recommended_params",
    "riemannian_gradient_U",
    "rsg_step",
    "save_csv_grouped",
    "save_meta",
    "save_point",
    "simplex_violation",
    "smoothness_constants",
    "solve_arpgda",
    "solve_rsg",
    "stationarity_measure",
    "tangency_error",
    "uniform_weights",
    "validate_stiefel",
    "validate_weights",
    "y_gradient",
]
