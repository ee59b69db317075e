"""Binary power allocation policies.

Only users with the strongest channels are ever switched on, so a policy
is fully described by ``k_star``, the number of best users transmitting at
peak power.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .ratecore import (
    ChannelState,
    LinkBudget,
    PowerAllocation,
    best_k_rate,
    best_k_rates,
)

__all__ = [
    "Policy",
    "Region",
    "AllocationResult",
    "allocation_for_k",
    "optimal_binary",
    "heuristic_wb_tdma",
    "tdma_allocation",
    "wb_allocation",
    "tdma_sufficient",
    "two_user_region",
    "two_user_rates",
    "epsilon_crossing",
    "epsilon_limit",
]

# e - 1
TDMA_THRESHOLD = math.expm1(1.0)


class Policy(enum.Enum):
    OPTIMAL = "optimal"
    HEURISTIC = "heuristic"
    TDMA = "tdma"
    WB = "wb"


class Region(enum.Enum):
    USER1_ONLY = "user1_only"
    USER2_ONLY = "user2_only"
    BOTH = "both"
    BOUNDARY = "boundary"


@dataclass(frozen=True)
class AllocationResult:
    allocation: PowerAllocation
    k_star: int
    rate: float
    policy: Policy

    @property
    def active_set(self) -> frozenset:
        return self.allocation.active_set

    @property
    def rate_bits(self) -> float:
        return self.rate / math.log(2.0)


def allocation_for_k(h: ChannelState, k: int, b: LinkBudget, policy: Policy) -> AllocationResult:
    """Switch on the ``k`` best users at peak power."""
    alloc = PowerAllocation.binary(h.n, h.order[:k], b.peak_power)
    return AllocationResult(alloc, int(k), best_k_rate(h, k, b), policy)


def optimal_binary(h: ChannelState, b: LinkBudget) -> AllocationResult:
    """Sum-rate optimal power allocation.

    Evaluates the rate of every best-k allocation and keeps the first k
    that strictly improves on all smaller ones, i.e. the smallest maximizer.
    Cost is O(n log n) for the sort plus O(n^2) (O(n) for large cells) for
    the rates.
    """
    rates = best_k_rates(h, b)
    # argmax returns the first maximum: the strict-improvement scan
    k_star = int(np.argmax(rates)) + 1
    return allocation_for_k(h, k_star, b, Policy.OPTIMAL)


def tdma_allocation(h: ChannelState, b: LinkBudget) -> AllocationResult:
    return allocation_for_k(h, 1, b, Policy.TDMA)


def wb_allocation(h: ChannelState, b: LinkBudget) -> AllocationResult:
    return allocation_for_k(h, h.n, b, Policy.WB)


def heuristic_wb_tdma(h: ChannelState, b: LinkBudget) -> AllocationResult:
    """Better of the best user alone and all users on; ties go to TDMA."""
    tdma = tdma_allocation(h, b)
    wb = wb_allocation(h, b)
    best = wb if wb.rate > tdma.rate else tdma
    return AllocationResult(best.allocation, best.k_star, best.rate, Policy.HEURISTIC)


def tdma_sufficient(h: ChannelState, b: LinkBudget) -> bool:
    """True when the best gain alone guarantees that TDMA is optimal.

    The test is ``rho * h_max >= e - 1``; the boundary is included.
    """
    return bool(h.gains.max() * b.snr >= TDMA_THRESHOLD)


class TwoUserRates(NamedTuple):
    user1_only: float
    user2_only: float
    both: float


def two_user_rates(h1: float, h2: float, b: LinkBudget) -> TwoUserRates:
    if h1 < 0 or h2 < 0:
        raise ValueError("gains must be nonnegative")
    a, c = h1 * b.snr, h2 * b.snr
    both = 0.5 * (math.log1p(a / (1.0 + c)) + math.log1p(c / (1.0 + a)))
    return TwoUserRates(0.5 * math.log1p(a), 0.5 * math.log1p(c), both)


def two_user_region(h1: float, h2: float, b: LinkBudget, rtol: float = 1e-12) -> Region:
    """Closed-form optimal allocation for two users.

    User 1 alone wins when ``h1 > sqrt(1 + rho h2)/rho`` and ``h1 >= h2``;
    user 2 alone when the mirrored condition holds with ``h2 > h1``; both
    users transmit otherwise.  When the both-on rate ties the best
    single-user rate within ``rtol`` the point is reported as BOUNDARY.
    """
    rates = two_user_rates(h1, h2, b)
    single = max(rates.user1_only, rates.user2_only)
    if abs(rates.both - single) <= rtol * max(rates.both, single):
        return Region.BOUNDARY
    inv = 1.0 / b.snr
    if h1 > inv * math.sqrt(1.0 + h2 * b.snr) and h1 >= h2:
        return Region.USER1_ONLY
    if h2 > inv * math.sqrt(1.0 + h1 * b.snr) and h2 > h1:
        return Region.USER2_ONLY
    return Region.BOTH


def _check_rho_h(rho_h1: float):
    if not rho_h1 > 0 or not math.isfinite(rho_h1):
        raise ValueError("rho_h1 must be positive and finite")


def epsilon_crossing(n: int, rho_h1: float) -> float:
    """Cross-gain at which n equal links on and one link on give equal rate.

    ``((1+x) - (1+x)**(1/n)) / ((n-1) x ((1+x)**(1/n) - 1))`` with
    ``x = rho_h1``, evaluated through expm1/log1p.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    _check_rho_h(rho_h1)
    root_minus_one = math.expm1(math.log1p(rho_h1) / n)
    return (rho_h1 - root_minus_one) / ((n - 1) * rho_h1 * root_minus_one)


def epsilon_limit(rho_h1: float) -> float:
    """Large-n limit ``1 / ln(1 + rho_h1)`` of :func:`epsilon_crossing`."""
    _check_rho_h(rho_h1)
    return 1.0 / math.log1p(rho_h1)
