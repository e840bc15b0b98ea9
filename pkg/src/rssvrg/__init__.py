"""Randomized-smoothing variance-reduced solvers for nonsmooth
composite finite sums, plus the ranking benchmark built on them."""

from .errors import ConfigurationError, SolverDivergedError
from .objective import (CompositeProblem, Regularizer, as_point,
                        component_subgradient, component_value,
                        evaluate_objective, prox_step)
from .smoothing import (DistributionConstants, PerturbationBatch,
                        SmoothingDistribution, constants_for,
                        estimate_smoothed_value, make_distribution,
                        sample_batch, smoothed_component_grad,
                        smoothed_full_grad)
from .solvers import (SOLVER_NAMES, EpochSchedule, RunTrace, SolverConfig,
                      epoch_budgets, run, variance_reduced_gradient)
from .ranking import (RankingInstance, generate_instance, to_problem,
                      export_csv, import_csv)
from .bench import (BoundInputs, ExperimentSpec, ReferenceBudget, StudyResult,
                    clamp_gap, compute_bound_D, compute_bound_Dprime,
                    dprime_coverage, estimate_variance_B, reference_optimum,
                    run_comparison, run_study, stage_threshold, write_traces)
from .kernels import available_backends, backend_name

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError", "SolverDivergedError",
    "CompositeProblem", "Regularizer", "as_point", "component_subgradient",
    "component_value", "evaluate_objective", "prox_step",
    "DistributionConstants", "PerturbationBatch", "SmoothingDistribution",
    "constants_for", "estimate_smoothed_value", "make_distribution",
    "sample_batch", "smoothed_component_grad", "smoothed_full_grad",
    "SOLVER_NAMES", "EpochSchedule", "RunTrace", "SolverConfig",
    "epoch_budgets", "run", "variance_reduced_gradient",
    "RankingInstance", "generate_instance", "to_problem", "export_csv",
    "import_csv",
    "BoundInputs", "ExperimentSpec", "ReferenceBudget", "StudyResult",
    "clamp_gap", "compute_bound_D", "compute_bound_Dprime", "dprime_coverage",
    "estimate_variance_B", "reference_optimum", "run_comparison", "run_study",
    "stage_threshold", "write_traces",
    "available_backends", "backend_name",
    "__version__",
]
