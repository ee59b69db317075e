"""Exhaustive verifiers for the allocation policies.

No allocation logic is shared with :mod:`binpower.allocator` (only its
result type); rates are evaluated by a separate vectorised implementation so that agreement between the two is
evidence rather than tautology.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Callable, Optional, Tuple

import numpy as np

from .ratecore import ChannelState, LinkBudget, PowerAllocation, best_k_rates
from .scenario import ScenarioConfig, sample_cell, trial_rng

__all__ = [
    "OracleViolation",
    "brute_force_binary",
    "grid_search_continuous",
    "grid_discretization_bound",
    "tie_frequency",
]

MAX_BRUTE_N = 20
MAX_GRID_N = 4
MAX_GRID_POINTS = 64


class OracleViolation(AssertionError):
    """An oracle found a result contradicting a structural guarantee."""


def _rates(received: np.ndarray, noise_var: float) -> np.ndarray:
    """Row-wise sum-rate for a matrix of received power vectors."""
    n = received.shape[1]
    others = received @ (1.0 - np.eye(n))
    return 0.5 * np.log1p(received / (noise_var + others)).sum(axis=1)


@lru_cache(maxsize=None)
def _subset_masks(n: int) -> np.ndarray:
    # by cardinality, then lexicographic within a cardinality
    rows = []
    for size in range(1, n + 1):
        for combo in itertools.combinations(range(n), size):
            row = np.zeros(n, dtype=bool)
            row[list(combo)] = True
            rows.append(row)
    masks = np.array(rows)
    masks.setflags(write=False)
    return masks


def brute_force_binary(h: ChannelState, b: LinkBudget):
    """Best binary allocation by enumerating all ``2**n - 1`` active sets.

    Ties go to the smallest set, then to the lexicographically smallest
    index set.
    """
    from .allocator import AllocationResult, Policy

    n = h.n
    if n > MAX_BRUTE_N:
        raise ValueError(f"brute force limited to n <= {MAX_BRUTE_N}, got {n}")
    masks = _subset_masks(n)
    rates = np.empty(len(masks))
    step = 1 << 14
    for start in range(0, len(masks), step):
        block = masks[start:start + step]
        rates[start:start + step] = _rates(block * (h.gains * b.peak_power), b.noise_var)
    best = int(np.argmax(rates))
    active = np.flatnonzero(masks[best])
    alloc = PowerAllocation.binary(n, active, b.peak_power)
    return AllocationResult(alloc, len(active), float(rates[best]), Policy.OPTIMAL)


def grid_discretization_bound(h: ChannelState, b: LinkBudget, points_per_axis: int) -> float:
    """Largest rate change between a power vector and its nearest grid point.

    Uses ``|dR/dx_i| <= n / (2 sigma2)`` in received-power coordinates and a
    per-axis distance of at most half a grid step.
    """
    step = b.peak_power / (points_per_axis - 1)
    n = h.n
    return 0.5 * step * float(h.gains.sum()) * n / (2.0 * b.noise_var)


def grid_search_continuous(
    h: ChannelState, b: LinkBudget, points_per_axis: int
) -> Tuple[np.ndarray, float]:
    """Maximise the sum-rate over the uniform power grid ``{0, ..., P}**n``.

    Returns the maximising power vector and its rate.  Raises
    :class:`OracleViolation` if the grid beats the best binary allocation,
    which would contradict binary optimality.
    """
    n, g = h.n, int(points_per_axis)
    if n > MAX_GRID_N:
        raise ValueError(f"grid search limited to n <= {MAX_GRID_N}, got {n}")
    if not 2 <= g <= MAX_GRID_POINTS:
        raise ValueError(f"points_per_axis must lie in [2, {MAX_GRID_POINTS}]")
    levels = np.linspace(0.0, b.peak_power, g)
    # one leading coordinate per block keeps memory at g**(n-1) rows
    tail = np.array(list(itertools.product(levels, repeat=n - 1))).reshape(g ** (n - 1), n - 1)
    best_rate, best_powers = -np.inf, None
    for lead in levels:
        powers = np.hstack([np.full((len(tail), 1), lead), tail])
        rates = _rates(powers * h.gains, b.noise_var)
        i = int(np.argmax(rates))
        if rates[i] > best_rate:
            best_rate, best_powers = float(rates[i]), powers[i].copy()
    binary = brute_force_binary(h, b).rate
    if best_rate > binary * (1 + 1e-12) + 1e-300:
        raise OracleViolation(f"grid rate {best_rate!r} exceeds best binary rate {binary!r}")
    return best_powers, best_rate


def _has_tie(rates: np.ndarray, rtol: float) -> bool:
    r = np.sort(rates)
    gaps = np.diff(r)
    return bool(np.any(gaps <= rtol * np.abs(r[1:])))


def tie_frequency(
    scenario: ScenarioConfig,
    trials: int,
    sampler: Optional[Callable[[np.random.Generator], np.ndarray]] = None,
    rtol: float = 1e-12,
) -> float:
    """Fraction of sampled states where two best-k rates coincide.

    ``sampler`` overrides cell generation and returns a gain vector; by
    default cells are drawn from ``scenario``.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    b = LinkBudget.from_db(scenario.snr_db)
    ties = 0
    for t in range(trials):
        rng = trial_rng(scenario.seed, t)
        if sampler is None:
            state = sample_cell(scenario, rng).state
        else:
            state = ChannelState(sampler(rng))
        if state.n > 1:
            ties += _has_tie(best_k_rates(state, b), rtol)
    return ties / trials
