"""Random single-cell instances: Poisson users in a disk, bounded path loss,
Rayleigh fast fading.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional

import numpy as np

from .ratecore import ChannelState, db_to_linear

__all__ = [
    "Fading",
    "ScenarioConfig",
    "CellInstance",
    "trial_rng",
    "sample_cell",
    "tdma_dominance_probability",
    "load_config",
    "parse_config",
]


class Fading(enum.Enum):
    RAYLEIGH = "rayleigh"
    NONE = "none"


@dataclass(frozen=True)
class ScenarioConfig:
    """Cell geometry, user density and channel law for Monte Carlo runs.

    ``fixed_n`` replaces the Poisson user count with a constant one.
    """

    radius: float = 5.0
    density: float = 1.0
    pathloss_exponent: float = 4.0
    fading: Fading = Fading.RAYLEIGH
    snr_db: float = 0.0
    seed: int = 0
    min_users: int = 1
    fixed_n: Optional[int] = None

    def __post_init__(self):
        if isinstance(self.fading, str):
            object.__setattr__(self, "fading", Fading(self.fading.lower()))
        if not self.radius > 0:
            raise ValueError("radius must be positive")
        if not self.density > 0:
            raise ValueError("density must be positive")
        if not self.pathloss_exponent > 2:
            raise ValueError("path-loss exponent must exceed 2")
        if self.min_users < 1:
            raise ValueError("min_users must be at least 1")
        if self.fixed_n is not None and self.fixed_n < 1:
            raise ValueError("fixed_n must be at least 1")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @property
    def mean_users(self) -> float:
        return self.density * np.pi * self.radius**2

    @property
    def snr(self) -> float:
        return float(db_to_linear(self.snr_db))

    def with_(self, **changes) -> "ScenarioConfig":
        return replace(self, **changes)


@dataclass(frozen=True)
class CellInstance:
    distances: np.ndarray
    angles: np.ndarray
    fastfade: np.ndarray
    state: ChannelState = field(repr=False)

    @property
    def gains(self) -> np.ndarray:
        return self.state.gains

    @property
    def n(self) -> int:
        return self.state.n


def trial_rng(seed: int, trial: int, stream: int = 0) -> np.random.Generator:
    """Independent generator for one trial.

    The stream depends only on ``(seed, stream, trial)``, never on the order
    in which trials are run.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(stream), int(trial)))
    return np.random.Generator(np.random.Philox(ss))


def _user_count(cfg: ScenarioConfig, rng: np.random.Generator) -> int:
    if cfg.fixed_n is not None:
        return cfg.fixed_n
    mean = cfg.mean_users
    while True:
        n = int(rng.poisson(mean))
        if n >= cfg.min_users:
            return n


def sample_cell(cfg: ScenarioConfig, rng: np.random.Generator) -> CellInstance:
    """Draw one cell: users, their distances to the base station, and gains.

    Each gain is ``E / (1 + d**alpha)`` with ``E`` a unit exponential under
    Rayleigh fading and ``E = 1`` without fading.
    """
    n = _user_count(cfg, rng)
    distances = cfg.radius * np.sqrt(rng.random(n))
    angles = rng.uniform(0.0, 2 * np.pi, n)
    if cfg.fading is Fading.RAYLEIGH:
        fastfade = rng.standard_exponential(n)
    else:
        fastfade = np.ones(n)
    gains = fastfade / (1.0 + distances**cfg.pathloss_exponent)
    return CellInstance(distances, angles, fastfade, ChannelState(gains))


def tdma_dominance_probability(cfg: ScenarioConfig, trials: int) -> float:
    """Estimated probability that no user meets ``h >= (e - 1)/rho``.

    When at least one user meets it, scheduling only the best user is
    optimal; the returned value is the chance that this guarantee is absent.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    threshold = np.expm1(1.0) / cfg.snr
    misses = 0
    for t in range(trials):
        cell = sample_cell(cfg, trial_rng(cfg.seed, t))
        misses += bool(cell.gains.max() < threshold)
    return misses / trials


_CONFIG_KEYS = {
    "radius": float,
    "density": float,
    "lambda": float,
    "alpha": float,
    "pathloss_exponent": float,
    "fading": str,
    "snr_db": float,
    "seed": int,
    "min_users": int,
    "fixed_n": int,
}
_ALIASES = {"lambda": "density", "alpha": "pathloss_exponent"}


def parse_config(text: str, base: Optional[ScenarioConfig] = None) -> ScenarioConfig:
    """Build a config from ``key = value`` lines; ``#`` starts a comment."""
    changes = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lower().replace("-", "_")
        if key not in _CONFIG_KEYS:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        changes[_ALIASES.get(key, key)] = _CONFIG_KEYS[key](value)
    base = base or ScenarioConfig()
    known = {f.name for f in fields(ScenarioConfig)}
    return replace(base, **{k: v for k, v in changes.items() if k in known})


def load_config(path, base: Optional[ScenarioConfig] = None) -> ScenarioConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"), base)
