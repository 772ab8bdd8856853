"""Exact probabilities and Monte-Carlo checks for the self-adaptive (1,lambda) EA."""
from .exact import (
    JumpDistribution,
    RateThresholds,
    TailCheck,
    bernstein_bound,
    exact_jump_distribution,
    local_probabilities,
    rate_lower,
    rate_thresholds,
    rate_upper,
    tail_bound_check,
    threshold_L,
    threshold_U,
)
from .montecarlo import (
    DriftReport,
    average_fitness_drift,
    estimate_rate_increase_prob,
    potential,
    potential_drift_estimate,
    sample_generations,
)
from .occupancy import (
    OccupancyRow,
    PreconditionError,
    chain_occupancy,
    occupancy_check,
    rate_up_probabilities,
    simulate_birth_death,
)
