# ---
# jupyter:
#   jupytext:
#     formats: py:light
# ---

# # Checking the allocator against independent searches
#
# The oracle module enumerates every subset and also scans a continuous power
# grid.  Neither shares rate code with the allocator.

import numpy as np

from binpower import ChannelState, LinkBudget, optimal_binary
from binpower.majorize import epsilon_transfer, majorizes
from binpower.oracle import brute_force_binary, grid_discretization_bound, grid_search_continuous
from binpower.ratecore import sum_rate_received

rng = np.random.default_rng(7)
h = ChannelState(rng.exponential(size=8))
b = LinkBudget.from_snr(3.0)
fast, slow = optimal_binary(h, b), brute_force_binary(h, b)
print(fast.active_set == slow.active_set, fast.rate, slow.rate)

# A 33-point grid per axis over three users: the grid optimum lands on a
# 0/1 corner and does not beat the binary answer.

h3 = ChannelState([0.8, 0.3, 0.1])
powers, grid_rate = grid_search_continuous(h3, b, 33)
print(powers, grid_rate, optimal_binary(h3, b).rate, grid_discretization_bound(h3, b, 33))

# Spreading received power unevenly raises the sum-rate.  Moving mass from a
# smaller entry to a larger one yields a vector that majorizes the original.

x = np.array([1.0, 0.7, 0.4])
y = epsilon_transfer(x, 0, 2, 0.3)
print(y, majorizes(y, x).majorizes, sum_rate_received(y, 1.0) > sum_rate_received(x, 1.0))
