# ---
# jupyter:
#   jupytext:
#     formats: py:light
# ---

# # Binary power control in one cell
#
# Every user either transmits at peak power or stays silent.  The best
# choice always activates some number `k` of the strongest users, so the
# search is over `k` rather than over subsets.

import math

import numpy as np

from binpower import ChannelState, LinkBudget, best_k_rates, optimal_binary
from binpower.allocator import heuristic_wb_tdma, tdma_sufficient

# A small cell with one strong user and a handful of weak ones.

h = ChannelState([0.02, 0.9, 0.05, 0.04, 0.03])
for snr_db in (-20, -5, 10):
    b = LinkBudget.from_db(snr_db)
    r = optimal_binary(h, b)
    print(f"{snr_db:>4} dB  k*={r.k_star}  active={sorted(r.active_set)}  rate={r.rate:.4f} nats")

# The whole rate-versus-k curve is cheap to get.  At low SNR adding users
# keeps helping; at high SNR interference takes over and the curve peaks at one.

for snr_db in (-20, 10):
    print(snr_db, np.round(best_k_rates(h, LinkBudget.from_db(snr_db)), 5))

# If the best gain times the SNR reaches e - 1, serving that user alone is
# optimal without looking at anyone else.

b = LinkBudget.from_snr(2.0)
print(tdma_sufficient(h, b), h.gains.max() * b.snr, math.e - 1)

# The two-mode heuristic only compares "best user alone" against "everyone on".

print(heuristic_wb_tdma(h, LinkBudget.from_db(-5)).rate, optimal_binary(h, LinkBudget.from_db(-5)).rate)
