"""Classical simulation laboratory for modified iterative amplitude estimation."""

from .confidence import (
    AmplitudeCI,
    BinomialSample,
    chernoff_halfwidth,
    chernoff_interval,
    clopper_pearson_interval,
)
from .estimator import (
    EstimationError,
    EstimationResult,
    EstimatorConfig,
    ModifiedIQAE,
    RoundRecord,
    run_modified_iqae,
    run_relative_iqae,
)
from .geometry import (
    AngleInterval,
    QUADRANT_MARGIN,
    RoundSchedule,
    SHOT_BUDGET_CONSTANT,
    alpha_schedule,
    find_next_k,
    gamma_from_amplitude,
    invariant_holds,
    k_max,
    n_max_for_round,
    quadrant_lower,
    quadrant_upper,
    round_count_bound,
    uniform_alpha_schedule,
    update_theta,
)
from .harness import AggregateRow, GridSpec, run_grid, run_single, write_grid_csvs
from .oracle import SimulatedOracle

__all__ = [
    "AmplitudeCI",
    "AngleInterval",
    "AggregateRow",
    "BinomialSample",
    "EstimationError",
    "EstimationResult",
    "EstimatorConfig",
    "GridSpec",
    "ModifiedIQAE",
    "QUADRANT_MARGIN",
    "RoundRecord",
    "RoundSchedule",
    "SHOT_BUDGET_CONSTANT",
    "SimulatedOracle",
    "alpha_schedule",
    "chernoff_halfwidth",
    "chernoff_interval",
    "clopper_pearson_interval",
    "find_next_k",
    "gamma_from_amplitude",
    "invariant_holds",
    "k_max",
    "n_max_for_round",
    "quadrant_lower",
    "quadrant_upper",
    "round_count_bound",
    "run_grid",
    "run_modified_iqae",
    "run_relative_iqae",
    "run_single",
    "uniform_alpha_schedule",
    "update_theta",
    "write_grid_csvs",
]

__version__ = "0.1.0"
