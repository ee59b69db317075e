"""Sum-rate kernels for the single-cell uplink.

All rates are in nats per time-slot and carry the 1/2 prefactor of a real
Gaussian channel.  Internally the peak power is normalised to ``P = 1`` so
that the noise variance is ``1/rho``; every public result depends on the
channel gains only through the products ``rho * h``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

__all__ = [
    "ChannelState",
    "LinkBudget",
    "PowerAllocation",
    "sum_rate",
    "sum_rate_received",
    "best_k_rate",
    "best_k_rates",
    "sic_capacity",
    "sic_perfect_capacity",
    "best_k_rate_table",
    "sic_capacity_table",
    "db_to_linear",
]

# Series truncation for the large-n evaluation of all best-k rates.  Every
# ratio expanded is below 1/2, so the relative truncation error is below
# 2**(1 - _SERIES_TERMS) / (_SERIES_TERMS + 1).
_SERIES_TERMS = 52
_DIRECT_MAX_N = 64


def db_to_linear(snr_db):
    """Convert an SNR in dB to the linear ratio ``rho = 10**(snr_db/10)``."""
    return 10.0 ** (np.asarray(snr_db, dtype=float) / 10.0)


def _as_gains(values) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    if arr.size == 0:
        raise ValueError("channel vector is empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError("channel gains must be finite")
    if np.any(arr < 0):
        raise ValueError("channel gains must be nonnegative")
    return arr


@dataclass(frozen=True)
class ChannelState:
    """Channel power gains of the ``n`` users of a cell.

    ``order`` lists user indices by decreasing gain; ties keep ascending
    original index so the ordering is deterministic.
    """

    gains: np.ndarray
    order: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        gains = _as_gains(self.gains)
        gains.setflags(write=False)
        # stable sort of -g gives descending gains, ascending index on ties
        order = np.argsort(-gains, kind="stable")
        order.setflags(write=False)
        object.__setattr__(self, "gains", gains)
        object.__setattr__(self, "order", order)

    @property
    def n(self) -> int:
        return int(self.gains.size)

    @property
    def sorted_desc(self) -> np.ndarray:
        return self.gains[self.order]

    def __len__(self):
        return self.n


@dataclass(frozen=True)
class LinkBudget:
    """Peak power ``P``, noise variance ``sigma2`` and their ratio ``snr``."""

    peak_power: float = 1.0
    noise_var: float = 1.0

    def __post_init__(self):
        for name in ("peak_power", "noise_var"):
            value = float(getattr(self, name))
            if not np.isfinite(value) or value <= 0:
                raise ValueError(f"{name} must be positive and finite")
            object.__setattr__(self, name, value)

    @property
    def snr(self) -> float:
        return self.peak_power / self.noise_var

    @classmethod
    def from_snr(cls, rho: float, peak_power: float = 1.0) -> "LinkBudget":
        rho = float(rho)
        if not np.isfinite(rho) or rho <= 0:
            raise ValueError("snr must be positive and finite")
        return cls(peak_power=peak_power, noise_var=peak_power / rho)

    @classmethod
    def from_db(cls, snr_db: float, peak_power: float = 1.0) -> "LinkBudget":
        return cls.from_snr(float(db_to_linear(snr_db)), peak_power)


@dataclass(frozen=True)
class PowerAllocation:
    """Transmit powers, each in ``[0, peak_power]``."""

    powers: np.ndarray
    peak_power: float = 1.0

    def __post_init__(self):
        powers = np.array(self.powers, dtype=float).reshape(-1)
        if not np.all(np.isfinite(powers)):
            raise ValueError("powers must be finite")
        if np.any(powers < 0) or np.any(powers > self.peak_power):
            raise ValueError("powers must lie in [0, peak_power]")
        powers.setflags(write=False)
        object.__setattr__(self, "powers", powers)
        object.__setattr__(self, "peak_power", float(self.peak_power))

    @classmethod
    def binary(cls, n: int, active, peak_power: float = 1.0) -> "PowerAllocation":
        powers = np.zeros(n)
        powers[np.asarray(list(active), dtype=int)] = peak_power
        return cls(powers, peak_power)

    @property
    def is_binary(self) -> bool:
        p = self.powers
        return bool(np.all((p == 0.0) | (p == self.peak_power)))

    @property
    def active_set(self) -> Optional[frozenset]:
        if not self.is_binary:
            return None
        return frozenset(int(i) for i in np.flatnonzero(self.powers == self.peak_power))

    @property
    def k_star(self) -> Optional[int]:
        active = self.active_set
        return None if active is None else len(active)


def _exclusive_sums(x: np.ndarray):
    """Sums of the entries before and after each position."""
    before = np.concatenate(([0.0], np.cumsum(x[:-1])))
    after = np.concatenate((np.cumsum(x[:0:-1])[::-1], [0.0]))
    return before, after


def _received_rate(x: np.ndarray, noise_var: float) -> float:
    # interference built from partial sums, never as total - x_i
    before, after = _exclusive_sums(x)
    return 0.5 * float(np.sum(np.log1p(x / (noise_var + before + after))))


def sum_rate(h: ChannelState, p: PowerAllocation, b: LinkBudget) -> float:
    """Sum-rate of the cell with interference treated as noise.

    Parameters
    ----------
    h : ChannelState
        Channel power gains.
    p : PowerAllocation
        Transmit powers; must not exceed ``b.peak_power``.
    b : LinkBudget
        Peak power and noise variance.

    Returns
    -------
    float
        ``1/2 * sum_i ln(1 + h_i p_i / (sigma2 + sum_{j != i} h_j p_j))``.
    """
    if p.powers.shape != h.gains.shape:
        raise ValueError("channel and power vectors differ in length")
    if np.any(p.powers > b.peak_power * (1 + 1e-12)):
        raise ValueError("power exceeds the peak constraint")
    return _received_rate(h.gains * p.powers, b.noise_var)


def sum_rate_received(x, noise_var: float) -> float:
    """Sum-rate written as a function of the received powers ``x``."""
    x = np.array(x, dtype=float).reshape(-1)
    if x.size == 0 or not np.all(np.isfinite(x)):
        raise ValueError("received powers must be a finite nonempty vector")
    if np.any(x < 0):
        raise ValueError("received powers must be nonnegative")
    if not noise_var > 0:
        raise ValueError("noise variance must be positive")
    return _received_rate(x, float(noise_var))


def _best_k_rates_direct(g: np.ndarray, inv_rho: float) -> np.ndarray:
    n = g.size
    mask = np.tri(n, dtype=bool)
    # row k keeps users 1..k
    active = np.where(mask, g[None, :], 0.0)
    before = np.concatenate(([0.0], np.cumsum(g[:-1])))
    after = np.zeros((n, n))
    after[:, :-1] = np.cumsum(active[:, :0:-1], axis=1)[:, ::-1]
    ratio = np.where(mask, g[None, :] / (inv_rho + before[None, :] + after), 0.0)
    return 0.5 * np.log1p(ratio).sum(axis=1)


def _series_table(g: np.ndarray) -> np.ndarray:
    """Prefix power sums of the normalised gains below the strongest one.

    Row ``m - 1`` holds ``sum_{2 <= i <= k} (g_i/g_1)**m / m`` for each k.
    """
    u = g[1:] / g[0]
    powers = np.cumprod(np.broadcast_to(u, (_SERIES_TERMS, u.size)), axis=0)
    table = np.zeros((_SERIES_TERMS, g.size))
    table[:, 1:] = np.cumsum(powers, axis=1)
    table /= np.arange(1, _SERIES_TERMS + 1)[:, None]
    return table


def _best_k_rates_series(g: np.ndarray, inv_rho, table: Optional[np.ndarray] = None) -> np.ndarray:
    """All best-k rates in O(n) per SNR value.

    ``inv_rho`` may be an array; the result then has a trailing axis of
    length n for every entry.  The strongest user's term is exact; the rest
    use ln(1/(1-x)) = sum_m x**m/m with every x below 1/2.
    """
    if table is None:
        table = _series_table(g)
    inv_rho = np.asarray(inv_rho, dtype=float)[..., None]
    others = np.concatenate(([0.0], np.cumsum(g[1:])))
    first = np.log1p(g[0] / (inv_rho + others))
    z = g[0] / (inv_rho + g[0] + others)
    acc = np.broadcast_to(table[-1], z.shape)
    for m in range(_SERIES_TERMS - 2, -1, -1):
        acc = acc * z + table[m]
    return 0.5 * (first + acc * z)


def best_k_rates(h: ChannelState, b: LinkBudget, method: str = "auto") -> np.ndarray:
    """Rates ``R_1, ..., R_n`` obtained when only the k best users transmit.

    Parameters
    ----------
    h : ChannelState
    b : LinkBudget
    method : {"auto", "direct", "series"}
        ``direct`` evaluates every term (O(n^2)); ``series`` expands all but
        the strongest user's term in a power series (O(n)), exact to double
        precision.  ``auto`` picks ``direct`` for small cells.

    Returns
    -------
    np.ndarray
        Entry ``k - 1`` is ``R_k``.
    """
    g = h.sorted_desc * b.peak_power
    if method == "auto":
        method = "direct" if g.size <= _DIRECT_MAX_N else "series"
    if method == "direct":
        return _best_k_rates_direct(g, b.noise_var)
    if method == "series":
        if g[0] == 0.0:
            return np.zeros(g.size)
        return _best_k_rates_series(g, b.noise_var)
    raise ValueError(f"unknown method {method!r}")


def best_k_rate(h: ChannelState, k: int, b: LinkBudget) -> float:
    """Sum-rate when exactly the ``k`` best users transmit at full power."""
    if not 1 <= k <= h.n:
        raise ValueError(f"k must lie in [1, {h.n}], got {k}")
    g = h.sorted_desc[:k] * b.peak_power
    return _received_rate(g, b.noise_var)


def _sic_terms(g: np.ndarray, inv_rho: float, beta: float) -> np.ndarray:
    decoded, undecoded = _exclusive_sums(g)
    # residual interference: undecoded users plus (1 - beta) of decoded ones
    interference = inv_rho + undecoded + (1.0 - beta) * decoded
    return np.log1p(g / interference)


def sic_capacity(h: ChannelState, b: LinkBudget, beta: float) -> float:
    """Successive-decoding sum-rate with cancellation efficiency ``beta``.

    All users transmit at full power and are decoded strongest first; a
    fraction ``beta`` of each decoded user's power is removed before the
    next user is decoded.
    """
    beta = float(beta)
    if not 0.0 <= beta <= 1.0:
        raise ValueError("beta must lie in [0, 1]")
    g = h.sorted_desc * b.peak_power
    return 0.5 * float(np.sum(_sic_terms(g, b.noise_var, beta)))


def sic_perfect_capacity(h: ChannelState, b: LinkBudget) -> float:
    """Perfect-cancellation capacity ``1/2 ln(1 + rho * sum(h))``."""
    return 0.5 * float(np.log1p(b.snr * h.gains.sum()))


def best_k_rate_table(h: ChannelState, snr_values) -> np.ndarray:
    """Best-k rates for several SNR values at unit peak power.

    Row ``s`` equals ``best_k_rates(h, LinkBudget.from_snr(snr_values[s]))``
    bit for bit.
    """
    inv_rho = 1.0 / np.asarray(snr_values, dtype=float).reshape(-1)
    g = h.sorted_desc
    if g.size <= _DIRECT_MAX_N:
        return np.array([_best_k_rates_direct(g, float(s)) for s in inv_rho])
    if g[0] == 0.0:
        return np.zeros((inv_rho.size, g.size))
    table = _series_table(g)
    return np.array([_best_k_rates_series(g, s, table) for s in inv_rho])


def sic_capacity_table(h: ChannelState, snr_values, beta: float) -> np.ndarray:
    """:func:`sic_capacity` at unit peak power for several SNR values."""
    if not 0.0 <= beta <= 1.0:
        raise ValueError("beta must lie in [0, 1]")
    g = h.sorted_desc
    return np.array([0.5 * float(np.sum(_sic_terms(g, 1.0 / s, beta)))
                     for s in np.asarray(snr_values, dtype=float).reshape(-1)])
