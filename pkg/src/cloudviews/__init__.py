"""Cloud cost models and materialized-view selection under pay-as-you-go pricing."""

from .bench import GapReport, GapRow, GenConfig, generate_instance, run_gap_experiment
from .exact import (
    EnumerationLimitExceeded,
    Objective,
    SolveResult,
    budget_bounds,
    budget_levels,
    pareto_sweep,
    solve_exact,
)
from .grasp import GraspParams, ViewIndicator, construct, grasp_solve, indicators, local_search
from .lpexport import export_lp
from .pricing import (
    Fleet,
    InstanceType,
    PiecewisePrice,
    PriceSegment,
    ProviderCatalog,
    StorageBillingMode,
    StoragePeriod,
    StorageTariff,
    bundled_catalog,
    bundled_catalog_names,
    catalog_from_dict,
    catalog_to_dict,
    compute_cost,
    eval_piecewise,
    load_catalog,
    storage_cost,
    transfer_cost,
)
from .problem import (
    CandidateView,
    CostBreakdown,
    GainMatrix,
    InvalidSelectionError,
    ProblemInstance,
    Query,
    Selection,
    Violation,
    baseline_breakdown,
    evaluate,
    greedy_assignment,
    instance_from_dict,
    instance_to_dict,
    load_instance,
    dump_instance,
    response_time,
    selection_from_dict,
    selection_to_dict,
    validate_selection,
)

__version__ = "0.1.0"
