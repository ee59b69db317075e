# ---
# jupyter:
#   jupytext:
#     formats: py:light
# ---

# # Random cells and SNR sweeps
#
# Users fall uniformly in a disk with a Poisson count.  Gains combine bounded
# path loss with Rayleigh fading.  All policies see the same cells.

import io

from binpower.harness import run_kdist, run_sweep, write_sweep_csv
from binpower.scenario import ScenarioConfig, sample_cell, trial_rng

TRIALS = 200  # raise to 10**4 for smooth curves

cfg = ScenarioConfig(density=1.0, seed=3)
cell = sample_cell(cfg, trial_rng(cfg.seed, 0))
print(cell.n, cfg.mean_users, cell.gains.max())

# How many users does the optimum switch on?  Mostly everyone at low SNR and
# just one at high SNR.

for hist in run_kdist(cfg, [-20.0, 0.0, 20.0], TRIALS):
    print(hist.snr_db, hist.probability(1), max(hist.counts))

# A sweep writes one CSV row per SNR point and policy.

records = run_sweep(cfg, [-10.0, 10.0, 30.0], "optimal,heuristic,sic:0.9,sic:1.0", TRIALS)
buf = io.StringIO()
write_sweep_csv(records, buf)
print(buf.getvalue())

# With imperfect cancellation the residual interference grows with SNR, so the
# SIC curve flattens while the binary optimum keeps climbing.
