"""Monte Carlo experiment driver.

Every trial draws its cell from a stream keyed by ``(seed, trial)``, and the
same cell is reused for every SNR value and every policy.  Trials are
processed in fixed-size chunks whose results are concatenated in trial
order, so outputs do not depend on the number of worker processes.
"""

from __future__ import annotations

import csv
import io
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence

import numpy as np

from .allocator import (
    Policy,
    epsilon_crossing,
    epsilon_limit,
    optimal_binary,
    tdma_sufficient,
    Region,
    two_user_region,
)
from .majorize import epsilon_transfer, is_permutation, majorizes
from .oracle import brute_force_binary, grid_discretization_bound, grid_search_continuous
from .ratecore import (
    ChannelState,
    LinkBudget,
    best_k_rate_table,
    db_to_linear,
    sic_capacity_table,
    sum_rate_received,
)
from .scenario import ScenarioConfig, sample_cell, trial_rng

__all__ = [
    "PolicySpec",
    "SweepRecord",
    "KStarHistogram",
    "parse_policies",
    "snr_range",
    "run_kdist",
    "run_sweep",
    "run_sweep_trials",
    "run_verify",
    "VerifyReport",
    "write_sweep_csv",
    "read_sweep_csv",
    "write_kdist_csv",
    "read_kdist_csv",
]

SWEEP_HEADER = ["snr_db", "policy", "beta", "mean_rate_nats", "stderr", "trials"]
KDIST_HEADER = ["snr_db", "k_star", "count", "trials"]
CHUNK = 250


@dataclass(frozen=True)
class PolicySpec:
    name: str
    beta: Optional[float] = None

    def __post_init__(self):
        if self.name == "sic":
            if self.beta is None or not 0.0 <= self.beta <= 1.0:
                raise ValueError("sic policy needs beta in [0, 1]")
        elif self.name in {p.value for p in Policy}:
            if self.beta is not None:
                raise ValueError(f"policy {self.name!r} takes no beta")
        else:
            raise ValueError(f"unknown policy {self.name!r}")

    @property
    def label(self) -> str:
        return self.name if self.beta is None else f"sic:{self.beta!r}"


def parse_policies(text) -> List[PolicySpec]:
    """Parse ``"optimal,heuristic,sic:0.9"`` into policy specs."""
    items = text.split(",") if isinstance(text, str) else list(text)
    specs = []
    for item in items:
        item = item.strip().lower()
        if not item:
            continue
        name, _, beta = item.partition(":")
        specs.append(PolicySpec(name, float(beta) if beta else None))
    if not specs:
        raise ValueError("no policies given")
    return specs


def snr_range(lo: float, hi: float, step: float) -> List[float]:
    """Inclusive SNR grid in dB, free of accumulated rounding."""
    if step <= 0 or hi < lo:
        raise ValueError("need lo <= hi and step > 0")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + i * step, 10) for i in range(count)]


def _check_snr_list(snr_db) -> np.ndarray:
    values = np.asarray(list(snr_db), dtype=float)
    if values.size == 0 or not np.all(np.isfinite(values)):
        raise ValueError("SNR list must be nonempty and finite")
    return values


@dataclass(frozen=True)
class SweepRecord:
    snr_db: float
    policy: str
    beta: Optional[float]
    mean_rate: float
    stderr: float
    trials: int

    @property
    def label(self) -> str:
        return PolicySpec(self.policy, self.beta).label


@dataclass(frozen=True)
class KStarHistogram:
    snr_db: float
    counts: Dict[int, int]
    trials: int

    def probability(self, k: int) -> float:
        return self.counts.get(k, 0) / self.trials


def _policy_rates(rates: np.ndarray, state: ChannelState, rho: np.ndarray,
                  policies: Sequence[PolicySpec]) -> np.ndarray:
    """Per-SNR rate of every policy for one cell; shape (snr, policy)."""
    out = np.empty((rho.size, len(policies)))
    tdma, wb = rates[:, 0], rates[:, -1]
    for j, spec in enumerate(policies):
        if spec.name == "optimal":
            out[:, j] = rates.max(axis=1)
        elif spec.name == "heuristic":
            out[:, j] = np.where(wb > tdma, wb, tdma)
        elif spec.name == "tdma":
            out[:, j] = tdma
        elif spec.name == "wb":
            out[:, j] = wb
        else:
            out[:, j] = sic_capacity_table(state, rho, spec.beta)
    return out


def _sweep_chunk(cfg: ScenarioConfig, rho: np.ndarray, policies, start: int, stop: int):
    out = np.empty((stop - start, rho.size, len(policies)))
    for t in range(start, stop):
        state = sample_cell(cfg, trial_rng(cfg.seed, t)).state
        out[t - start] = _policy_rates(best_k_rate_table(state, rho), state, rho, policies)
    return out


def _kdist_chunk(cfg: ScenarioConfig, rho: np.ndarray, start: int, stop: int):
    out = np.empty((stop - start, rho.size), dtype=np.int64)
    for t in range(start, stop):
        state = sample_cell(cfg, trial_rng(cfg.seed, t)).state
        out[t - start] = np.argmax(best_k_rate_table(state, rho), axis=1) + 1
    return out


def _run_chunks(func: Callable, args: tuple, trials: int, workers: int) -> np.ndarray:
    bounds = [(s, min(s + CHUNK, trials)) for s in range(0, trials, CHUNK)]
    if workers <= 1 or len(bounds) == 1:
        parts = [func(*args, s, e) for s, e in bounds]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(func, *args, s, e) for s, e in bounds]
            parts = [f.result() for f in futures]
    return np.concatenate(parts, axis=0)


def run_kdist(cfg: ScenarioConfig, snr_list, trials: int, workers: int = 1) -> List[KStarHistogram]:
    """Histogram of the optimal number of active users at each SNR."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    snr_db = _check_snr_list(snr_list)
    kstars = _run_chunks(_kdist_chunk, (cfg, db_to_linear(snr_db)), trials, workers)
    hists = []
    for j, s in enumerate(snr_db):
        counts = Counter(int(k) for k in kstars[:, j])
        hists.append(KStarHistogram(float(s), dict(sorted(counts.items())), trials))
    return hists


def run_sweep_trials(cfg: ScenarioConfig, snr_grid, policies, trials: int,
                     workers: int = 1) -> np.ndarray:
    """Per-trial rates, shape ``(trials, snr, policy)``."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    specs = parse_policies(policies) if isinstance(policies, str) else list(policies)
    if not specs:
        raise ValueError("no policies given")
    rho = db_to_linear(_check_snr_list(snr_grid))
    return _run_chunks(_sweep_chunk, (cfg, rho, specs), trials, workers)


def run_sweep(cfg: ScenarioConfig, snr_grid, policies, trials: int,
              workers: int = 1) -> List[SweepRecord]:
    """Mean per-cell sum-rate and its standard error for each (SNR, policy).

    All policies are evaluated on the same cells.
    """
    specs = parse_policies(policies) if isinstance(policies, str) else list(policies)
    snr_db = _check_snr_list(snr_grid)
    rates = run_sweep_trials(cfg, snr_db, specs, trials, workers)
    mean = rates.mean(axis=0)
    if trials > 1:
        stderr = rates.std(axis=0, ddof=1) / math.sqrt(trials)
    else:
        stderr = np.zeros_like(mean)
    records = []
    for i, s in enumerate(snr_db):
        for j, spec in enumerate(specs):
            records.append(SweepRecord(float(s), spec.name, spec.beta,
                                       float(mean[i, j]), float(stderr[i, j]), trials))
    return records


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_sweep_csv(records: Iterable[SweepRecord], fh) -> None:
    """CSV with header ``snr_db,policy,beta,mean_rate_nats,stderr,trials``."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    for r in records:
        w.writerow([_fmt(r.snr_db), r.policy, "" if r.beta is None else _fmt(r.beta),
                    _fmt(r.mean_rate), _fmt(r.stderr), r.trials])


def read_sweep_csv(fh) -> List[SweepRecord]:
    reader = csv.reader(fh)
    header = next(reader)
    if header != SWEEP_HEADER:
        raise ValueError(f"unexpected header {header}")
    return [SweepRecord(float(s), p, float(b) if b else None, float(m), float(e), int(t))
            for s, p, b, m, e, t in reader]


def write_kdist_csv(hists: Iterable[KStarHistogram], fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(KDIST_HEADER)
    for hist in hists:
        for k, count in sorted(hist.counts.items()):
            w.writerow([_fmt(hist.snr_db), k, count, hist.trials])


def read_kdist_csv(fh) -> List[KStarHistogram]:
    reader = csv.reader(fh)
    header = next(reader)
    if header != KDIST_HEADER:
        raise ValueError(f"unexpected header {header}")
    grouped: Dict[float, dict] = {}
    trials: Dict[float, int] = {}
    for s, k, count, t in reader:
        snr = float(s)
        grouped.setdefault(snr, {})[int(k)] = int(count)
        trials[snr] = int(t)
    return [KStarHistogram(s, counts, trials[s]) for s, counts in grouped.items()]


def to_csv_text(writer: Callable, items) -> str:
    buf = io.StringIO()
    writer(items, buf)
    return buf.getvalue()


# --------------------------------------------------------------------------
# verification suites


@dataclass
class SuiteResult:
    name: str
    checked: int = 0
    violations: int = 0
    worst: float = 0.0
    notes: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.violations == 0 and self.checked > 0

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return (f"{status} {self.name}: checked={self.checked} "
                f"violations={self.violations} worst={self.worst:.3e}")


@dataclass
class VerifyReport:
    suites: List[SuiteResult]

    @property
    def ok(self) -> bool:
        return all(s.ok for s in self.suites)

    def __getitem__(self, name: str) -> SuiteResult:
        for s in self.suites:
            if s.name == name:
                return s
        raise KeyError(name)

    def text(self) -> str:
        lines = [s.line() for s in self.suites]
        for s in self.suites:
            lines += [f"  {s.name}: {note}" for note in s.notes[:5]]
        lines.append("verification " + ("passed" if self.ok else "FAILED"))
        return "\n".join(lines)


def _random_state(rng: np.random.Generator, max_n: int):
    n = int(rng.integers(1, max_n + 1))
    rho = float(10.0 ** rng.uniform(-3.0, 3.0))
    return ChannelState(rng.exponential(size=n)), LinkBudget.from_snr(rho)


def check_oracle_agreement(instances: int, max_n: int, seed: int,
                           allocator: Callable = optimal_binary) -> SuiteResult:
    """Allocator against exhaustive subset search, rates to 1e-12 relative."""
    res = SuiteResult("oracle_agreement")
    for t in range(instances):
        h, b = _random_state(trial_rng(seed, t, stream=1), max_n)
        got, want = allocator(h, b), brute_force_binary(h, b)
        dev = abs(got.rate - want.rate) / max(want.rate, 1e-300)
        res.checked += 1
        res.worst = max(res.worst, dev)
        prefix = want.active_set == frozenset(int(i) for i in h.order[:want.k_star])
        if dev > 1e-12 or not prefix:
            res.violations += 1
            res.notes.append(f"n={h.n} rho={b.snr:.4g} k={got.k_star} oracle_k={want.k_star}")
        elif got.active_set != want.active_set:
            res.notes.append(f"tie at n={h.n} rho={b.snr:.4g}")
    return res


def check_corner_dominance(instances: int, seed: int, points: int = 33,
                           allocator: Callable = optimal_binary) -> SuiteResult:
    """Continuous grid optimum sits on a binary corner and never beats the allocator."""
    res = SuiteResult("corner_dominance")
    for t in range(instances):
        rng = trial_rng(seed, t, stream=2)
        n = int(rng.integers(1, 4))
        h = ChannelState(rng.exponential(size=n))
        b = LinkBudget.from_snr(float(10.0 ** rng.uniform(-2.0, 2.0)))
        powers, grid_rate = grid_search_continuous(h, b, points)
        opt = allocator(h, b).rate
        bound = grid_discretization_bound(h, b, points)
        binary = bool(np.all((powers == 0.0) | (powers == b.peak_power)))
        excess = grid_rate - opt
        res.checked += 1
        res.worst = max(res.worst, excess / max(opt, 1e-300))
        if not binary or excess > bound or excess > 1e-12 * opt:
            res.violations += 1
            res.notes.append(f"n={n} rho={b.snr:.4g} argmax={powers.tolist()}")
    return res


def random_majorizing_pair(rng: np.random.Generator, max_n: int = 8, moves: int = 4):
    """``(x, y)`` with ``x`` majorizing ``y`` built from chained transfers."""
    n = int(rng.integers(2, max_n + 1))
    y = rng.exponential(size=n)
    x = y.copy()
    for _ in range(int(rng.integers(1, moves + 1))):
        i, j = rng.choice(n, size=2, replace=False)
        if x[i] < x[j]:
            i, j = j, i
        x = epsilon_transfer(x, int(i), int(j), float(rng.uniform(0.05, 1.0)) * x[j])
    return x, y


def check_schur(pairs: int, seed: int) -> SuiteResult:
    """Rate strictly increases along majorization of received powers."""
    res = SuiteResult("schur_convexity")
    for t in range(pairs):
        rng = trial_rng(seed, t, stream=3)
        x, y = random_majorizing_pair(rng)
        noise = float(10.0 ** rng.uniform(-2.0, 2.0))
        if not majorizes(x, y).majorizes or is_permutation(x, y):
            continue
        gap = sum_rate_received(x, noise) - sum_rate_received(y, noise)
        res.checked += 1
        res.worst = min(res.worst, gap) if res.checked > 1 else gap
        if not gap > 0:
            res.violations += 1
            res.notes.append(f"x={x.tolist()} y={y.tolist()} gap={gap:.3e}")
    return res


def check_tdma_linkage(states: int, seed: int, max_n: int = 50,
                       allocator: Callable = optimal_binary) -> SuiteResult:
    """Whenever the best gain clears ``(e-1)/rho`` the allocator picks TDMA."""
    res = SuiteResult("tdma_sufficiency")
    for t in range(states):
        rng = trial_rng(seed, t, stream=4)
        n = int(rng.integers(1, max_n + 1))
        d = 5.0 * np.sqrt(rng.random(n))
        h = ChannelState(rng.standard_exponential(n) / (1.0 + d**4))
        b = LinkBudget.from_db(float(rng.uniform(-30.0, 30.0)))
        res.checked += 1
        if tdma_sufficient(h, b):
            k = allocator(h, b).k_star
            if k != 1:
                res.violations += 1
                res.notes.append(f"n={n} rho={b.snr:.4g} k={k}")
    return res


def check_two_user(points: int = 100, rho: float = 1.0,
                   allocator: Callable = optimal_binary) -> SuiteResult:
    """Closed-form two-user regions against the allocator on a gain grid."""
    res = SuiteResult("two_user_regions")
    b = LinkBudget.from_snr(rho)
    axis = 5.0 * np.arange(1, points + 1) / points
    expected = {Region.USER1_ONLY: frozenset({0}), Region.USER2_ONLY: frozenset({1}),
                Region.BOTH: frozenset({0, 1})}
    for h1 in axis:
        for h2 in axis:
            region = two_user_region(float(h1), float(h2), b)
            if region is Region.BOUNDARY:
                continue
            res.checked += 1
            if allocator(ChannelState([h1, h2]), b).active_set != expected[region]:
                res.violations += 1
                res.notes.append(f"h=({h1:.4g},{h2:.4g}) region={region.value}")
    return res


def check_epsilon(max_n: int = 50) -> SuiteResult:
    """Crossing cross-gain increases with n and stays below its limit."""
    res = SuiteResult("epsilon_formulas")
    for x in np.logspace(-2, 2, 20):
        values = [epsilon_crossing(n, float(x)) for n in range(2, max_n + 1)]
        limit = epsilon_limit(float(x))
        res.checked += 1
        if not (np.all(np.diff(values) > 0) and values[-1] < limit):
            res.violations += 1
            res.notes.append(f"rho_h1={x:.4g}")
        res.worst = max(res.worst, limit - values[-1])
    return res


def run_verify(max_n: int = 12, trials: int = 10_000, seed: int = 0,
               allocator: Callable = optimal_binary) -> VerifyReport:
    """Run every structural check; ``allocator`` can be swapped for testing."""
    if max_n < 1 or max_n > 20:
        raise ValueError("max_n must lie in [1, 20]")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    suites = [
        check_oracle_agreement(trials, max_n, seed, allocator),
        check_corner_dominance(max(1, trials // 20), seed, allocator=allocator),
        check_schur(trials, seed),
        check_tdma_linkage(trials, seed, allocator=allocator),
        check_two_user(allocator=allocator),
        check_epsilon(),
    ]
    return VerifyReport(suites)
