"""Sum-rate optimal binary power control for the single-cell uplink."""

from .ratecore import (
    ChannelState,
    LinkBudget,
    PowerAllocation,
    best_k_rate,
    best_k_rates,
    db_to_linear,
    sic_capacity,
    sic_perfect_capacity,
    sum_rate,
    sum_rate_received,
)
from .majorize import MajorizationVerdict, epsilon_transfer, majorizes
from .allocator import (
    AllocationResult,
    Policy,
    Region,
    epsilon_crossing,
    epsilon_limit,
    heuristic_wb_tdma,
    optimal_binary,
    tdma_sufficient,
    two_user_region,
)
from .scenario import CellInstance, Fading, ScenarioConfig, sample_cell, trial_rng

__version__ = "0.1.0"
