"""Slotted two-user rendezvous engine.

Global slot ``t`` starts at user 1's local slot 0; user 2, ``drift`` slots
ahead, plays its local slot ``t + drift``. The time-to-rendezvous is the first
``t`` at which the two users share a channel, plus one.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .codec import codeword_length
from .hopping import (
    ChannelSet,
    ModularClockUser,
    MultiRadioUser,
    RandomUser,
    as_seed_sequence,
    two_primes_at_least,
)

__all__ = [
    "ALGORITHMS",
    "TrialConfig",
    "TrialResult",
    "build_user",
    "simulate",
    "run_trial",
    "qr_horizon",
    "sample_channel_sets",
    "sample_drift",
    "default_drift_period",
]

ALGORITHMS = ("quasi-random", "random", "modular-clock")

_FIRST_CHUNK = 64
_MAX_CHUNK = 1 << 15


@dataclass(frozen=True)
class TrialConfig:
    set1: ChannelSet
    set2: ChannelSet
    m1: int = 1
    m2: int = 1
    drift: int = 0
    algorithm: str = "quasi-random"
    seed: int = 0
    horizon: Optional[int] = None

    def __post_init__(self):
        if self.set1.N != self.set2.N:
            raise ValueError("both users must see the same total channel count N")
        if not set(self.set1) & set(self.set2):
            raise ValueError("channel sets have no common channel")
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.drift < 0:
            raise ValueError("drift must be non-negative")
        if not (1 <= self.m1 <= self.set1.n and 1 <= self.m2 <= self.set2.n):
            raise ValueError("radio counts must lie in [1, n]")

    @property
    def N(self) -> int:
        return self.set1.N


@dataclass(frozen=True)
class TrialResult:
    ttr: Optional[int]
    rendezvous_channel: Optional[int] = None
    rendezvous_radios: Optional[tuple[int, int]] = None
    horizon: Optional[int] = None

    @property
    def success(self) -> bool:
        return self.ttr is not None


def qr_horizon(n1: int, m1: int, n2: int, m2: int, N: int) -> int:
    """Guaranteed rendezvous horizon of the quasi-random scheme: M * p11 * p21 on the largest radio cells."""
    M = codeword_length(N)
    p11 = two_primes_at_least(-(-n1 // m1))[1]
    p21 = two_primes_at_least(-(-n2 // m2))[1]
    return M * p11 * p21


def _fallback_horizon(cfg: TrialConfig) -> int:
    # No guarantee: ~64x the random-algorithm ETTR, and never below the QR bound.
    common = len(set(cfg.set1) & set(cfg.set2))
    base = 64 * -(-cfg.set1.n * cfg.set2.n // common)
    return max(base, qr_horizon(cfg.set1.n, cfg.m1, cfg.set2.n, cfg.m2, cfg.N))


def build_user(algorithm: str, channels: ChannelSet, m: int, seed):
    if algorithm == "quasi-random":
        return MultiRadioUser.create(channels, m, seed)
    if algorithm == "random":
        return RandomUser(channels, m, seed)
    if algorithm == "modular-clock":
        return ModularClockUser(channels, m, seed)
    raise ValueError(f"unknown algorithm {algorithm!r}")


def simulate(user1, user2, drift: int, horizon: int) -> TrialResult:
    """Run two prepared users against each other for at most ``horizon`` slots."""
    t0 = 0
    chunk = _FIRST_CHUNK
    while t0 < horizon:
        count = min(chunk, horizon - t0)
        x1 = user1.block(t0, count)
        x2 = user2.block(t0 + drift, count)
        eq = x1[:, None, :] == x2[None, :, :]
        hit = eq.any(axis=(0, 1))
        if hit.any():
            t = int(np.argmax(hit))
            pairs = np.argwhere(eq[:, :, t])
            labels = x1[pairs[:, 0], t]
            best = int(np.argmin(labels))
            return TrialResult(
                ttr=t0 + t + 1,
                rendezvous_channel=int(labels[best]),
                rendezvous_radios=(int(pairs[best, 0]), int(pairs[best, 1])),
                horizon=horizon,
            )
        t0 += count
        chunk = min(chunk * 2, _MAX_CHUNK)
    return TrialResult(ttr=None, horizon=horizon)


def run_trial(config: TrialConfig) -> TrialResult:
    """Simulate one encounter; deterministic given the config (seed included)."""
    horizon = config.horizon
    if horizon is None:
        if config.algorithm == "quasi-random":
            horizon = qr_horizon(config.set1.n, config.m1, config.set2.n, config.m2, config.N)
        else:
            horizon = _fallback_horizon(config)
    s1, s2 = as_seed_sequence(config.seed).spawn(2)
    u1 = build_user(config.algorithm, config.set1, config.m1, s1)
    u2 = build_user(config.algorithm, config.set2, config.m2, s2)
    return simulate(u1, u2, config.drift, horizon)


def sample_channel_sets(N: int, n1: int, n2: int, G: int,
                        rng: np.random.Generator) -> tuple[ChannelSet, ChannelSet]:
    """Two random channel sets of sizes n1, n2 sharing exactly G labels."""
    if G < 1:
        raise ValueError("need at least one common channel")
    if G > min(n1, n2) or max(n1, n2) > N:
        raise ValueError(f"infeasible sizes n1={n1}, n2={n2}, G={G}, N={N}")
    if n1 + n2 - G > N:
        raise ValueError(f"n1 + n2 - G = {n1 + n2 - G} exceeds N = {N}")
    perm = rng.permutation(N)
    common = perm[:G]
    only1 = perm[G:n1]
    only2 = perm[n1:n1 + n2 - G]
    set1 = ChannelSet.of(np.concatenate([common, only1]), N)
    set2 = ChannelSet.of(np.concatenate([common, only2]), N)
    return set1, set2


def sample_drift(rng: np.random.Generator, period: int) -> int:
    if period < 1:
        raise ValueError("drift period must be >= 1")
    return int(rng.integers(0, period))


def default_drift_period(n1: int, m1: int, n2: int, m2: int, N: int) -> int:
    """One guaranteed-rendezvous cycle of the quasi-random scheme."""
    return qr_horizon(n1, m1, n2, m2, N)
