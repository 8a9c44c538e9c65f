"""Channel-hopping sequence generators.

All generators expose ``block(start, count)`` returning an ``(m, count)``
integer array of channel labels for local slots ``start .. start+count-1``
(one row per radio). The simulator only relies on that method.

Seeding
-------
A user is built from a 64-bit seed (or a :class:`numpy.random.SeedSequence`).
:func:`qrendezvous.sim.run_trial` spawns the trial seed into two children,
one per user; a multi-radio user spawns its child into one grandchild per
radio, in radio order. Each radio owns a single PCG64 stream consumed in a
fixed order:

1. the ID channel index, ``integers(n)``;
2. slopes/biases as one ``(M-1, 4)`` draw, row ``s-1`` holding
   ``r0, b0, r1, b1`` for position ``s``;
3. random-branch draws ``floor(u * n)`` with ``u = random()``, in slot order.

Because of (3), generating a block and stepping slot by slot consume the
stream identically.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .codec import TritCodeword, bit_length_for, codeword_length, make_codeword

__all__ = [
    "ChannelSet",
    "ModularClockParams",
    "QrUserState",
    "MultiRadioUser",
    "ModularClockUser",
    "RandomUser",
    "is_prime",
    "next_prime",
    "two_primes_at_least",
    "modular_clock_step",
    "qr_next",
    "random_step",
    "partition_round_robin",
    "multi_radio_next",
    "as_seed_sequence",
]

SeedLike = Union[int, np.random.SeedSequence]


def as_seed_sequence(seed: SeedLike) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return np.random.SeedSequence(seed)


@dataclass(frozen=True)
class ChannelSet:
    """Available channels c(0) < c(1) < ... < c(n-1), all in [0, N)."""

    channels: tuple[int, ...]
    N: int

    def __post_init__(self):
        chans = tuple(int(c) for c in self.channels)
        object.__setattr__(self, "channels", chans)
        if not chans:
            raise ValueError("channel set must be non-empty")
        if any(b <= a for a, b in zip(chans, chans[1:])):
            raise ValueError("channel labels must be strictly increasing")
        if chans[0] < 0 or chans[-1] >= self.N:
            raise ValueError(f"labels must lie in [0, {self.N})")

    @classmethod
    def of(cls, labels, N: int) -> "ChannelSet":
        return cls(tuple(sorted(set(int(c) for c in labels))), N)

    @property
    def n(self) -> int:
        return len(self.channels)

    def __len__(self) -> int:
        return len(self.channels)

    def __getitem__(self, k):
        return self.channels[k]

    def __iter__(self):
        return iter(self.channels)

    def __contains__(self, label) -> bool:
        return label in set(self.channels)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.channels, dtype=np.int64)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def next_prime(n: int) -> int:
    """Smallest prime >= n."""
    n = max(int(n), 2)
    while not is_prime(n):
        n += 1
    return n


def two_primes_at_least(n: int) -> tuple[int, int]:
    """The two smallest primes p0 < p1 with p0 >= n."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    p0 = next_prime(n)
    return p0, next_prime(p0 + 1)


@dataclass(frozen=True)
class ModularClockParams:
    p: int
    r: int
    b: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"period {self.p} is not prime")
        if not 1 <= self.r <= self.p - 1:
            raise ValueError(f"slope {self.r} outside [1, {self.p - 1}]")
        if not 0 <= self.b <= self.p - 1:
            raise ValueError(f"bias {self.b} outside [0, {self.p - 1}]")


def _random_index(rng: np.random.Generator, n: int) -> int:
    return int(rng.random() * n)


def modular_clock_step(channels: ChannelSet, params: ModularClockParams, t: int,
                       rng: np.random.Generator) -> int:
    """One slot of the modular clock: c(k) for k = (r*t + b) mod p if k < n, else a uniform draw."""
    n = channels.n
    if params.p < n:
        raise ValueError(f"period {params.p} smaller than channel count {n}")
    k = (params.r * int(t) + params.b) % params.p
    if k <= n - 1:
        return channels[k]
    return channels[_random_index(rng, n)]


class QrUserState:
    """Single-radio quasi-random hopping state.

    Slope/bias arrays have length M; entry 0 is unused (position 0 always
    holds the ID-channel trit) and is stored as 0.
    """

    def __init__(self, channels: ChannelSet, id_channel: int, codeword: TritCodeword,
                 p0: int, p1: int, r0, b0, r1, b1, rng: np.random.Generator):
        if id_channel not in channels:
            raise ValueError(f"ID channel {id_channel} not in the channel set")
        if not (p1 > p0 >= channels.n):
            raise ValueError(f"need p1 > p0 >= n, got p0={p0}, p1={p1}, n={channels.n}")
        self.channels = channels
        self.id_channel = int(id_channel)
        self.codeword = codeword
        self.p0, self.p1 = int(p0), int(p1)
        self.r0, self.b0 = np.asarray(r0, dtype=np.int64), np.asarray(b0, dtype=np.int64)
        self.r1, self.b1 = np.asarray(r1, dtype=np.int64), np.asarray(b1, dtype=np.int64)
        self.rng = rng
        self._labels = channels.as_array()
        w = codeword.as_array()
        self._w = w
        # per-position period/slope/bias, selected by the trit
        self._p = np.where(w == 1, self.p1, self.p0).astype(np.int64)
        self._r = np.where(w == 1, self.r1, self.r0)
        self._b = np.where(w == 1, self.b1, self.b0)

    @classmethod
    def create(cls, channels: ChannelSet, seed: SeedLike | np.random.Generator,
               id_channel: int | None = None, primes: tuple[int, int] | None = None) -> "QrUserState":
        """Draw the ID channel and per-position clock parameters from ``seed``.

        ``id_channel`` and ``primes`` override the random/default choices.
        """
        if isinstance(seed, np.random.Generator):
            rng = seed
        else:
            rng = np.random.default_rng(as_seed_sequence(seed))
        n = channels.n
        drawn = channels[int(rng.integers(n))]
        if id_channel is None:
            id_channel = drawn
        p0, p1 = primes if primes is not None else two_primes_at_least(n)
        M = codeword_length(channels.N)
        codeword = make_codeword(id_channel, bit_length_for(channels.N))
        params = np.zeros((M, 4), dtype=np.int64)
        params[1:] = rng.integers((1, 0, 1, 0), (p0, p0, p1, p1), size=(M - 1, 4))
        r0, b0, r1, b1 = params.T
        return cls(channels, id_channel, codeword, p0, p1, r0, b0, r1, b1, rng)

    @property
    def M(self) -> int:
        return self.codeword.M

    @property
    def n(self) -> int:
        return self.channels.n

    def clock_params(self, s: int) -> ModularClockParams | None:
        """Modular-clock parameters used at frame position ``s`` (None for the ID slot)."""
        w = self.codeword[s]
        if w == 2:
            return None
        if w == 1:
            return ModularClockParams(self.p1, int(self.r1[s]), int(self.b1[s]))
        return ModularClockParams(self.p0, int(self.r0[s]), int(self.b0[s]))

    def next(self, t: int) -> int:
        return qr_next(self, t)

    def block(self, start: int, count: int) -> np.ndarray:
        t = np.arange(start, start + count, dtype=np.int64)
        q, s = np.divmod(t, self.M)
        k = (self._r[s] * q + self._b[s]) % self._p[s]
        stay = self._w[s] == 2
        wild = ~stay & (k >= self.n)
        k[stay] = 0
        n_wild = int(wild.sum())
        if n_wild:
            k[wild] = (self.rng.random(n_wild) * self.n).astype(np.int64)
        out = self._labels[k]
        out[stay] = self.id_channel
        return out[None, :]


def qr_next(state: QrUserState, t: int) -> int:
    """Channel of the quasi-random sequence at local slot ``t``."""
    if t < 0:
        raise ValueError("slot index must be non-negative")
    q, s = divmod(int(t), state.M)
    params = state.clock_params(s)
    if params is None:
        return state.id_channel
    return modular_clock_step(state.channels, params, q, state.rng)


def random_step(channels: ChannelSet, m: int, rng: np.random.Generator) -> frozenset[int]:
    """``m`` distinct channels drawn uniformly without replacement."""
    if not 1 <= m <= channels.n:
        raise ValueError(f"cannot pick {m} distinct channels from {channels.n}")
    picks = rng.choice(channels.n, size=m, replace=False)
    return frozenset(channels[int(k)] for k in picks)


def partition_round_robin(channels: ChannelSet, m: int) -> list[ChannelSet]:
    """Deal c(0), c(1), ... to radios 0, 1, ..., m-1, 0, 1, ..."""
    if m < 1:
        raise ValueError(f"need at least one radio, got m={m}")
    if m > channels.n:
        raise ValueError(f"{m} radios but only {channels.n} channels")
    return [ChannelSet(channels.channels[k::m], channels.N) for k in range(m)]


class MultiRadioUser:
    """One independent quasi-random generator per round-robin cell."""

    def __init__(self, radios: Sequence[QrUserState]):
        if not radios:
            raise ValueError("need at least one radio")
        if len({r.M for r in radios}) != 1:
            raise ValueError("all radios must share the same N (same M)")
        self.radios = list(radios)

    @classmethod
    def create(cls, channels: ChannelSet, m: int, seed: SeedLike) -> "MultiRadioUser":
        cells = partition_round_robin(channels, m)
        children = as_seed_sequence(seed).spawn(m)
        return cls([QrUserState.create(cell, child) for cell, child in zip(cells, children)])

    @property
    def m(self) -> int:
        return len(self.radios)

    @property
    def M(self) -> int:
        return self.radios[0].M

    def next(self, t: int) -> frozenset[int]:
        return multi_radio_next(self.radios, t)

    def block(self, start: int, count: int) -> np.ndarray:
        return np.vstack([r.block(start, count) for r in self.radios])


def multi_radio_next(states: Sequence[QrUserState], t: int) -> frozenset[int]:
    return frozenset(qr_next(st, t) for st in states)


class ModularClockUser:
    """Plain modular clock per radio (prime = smallest prime >= cell size), indexed by the slot itself."""

    def __init__(self, channels: ChannelSet, m: int, seed: SeedLike):
        self.cells = partition_round_robin(channels, m)
        self.params = []
        self.rngs = []
        for cell, child in zip(self.cells, as_seed_sequence(seed).spawn(m)):
            rng = np.random.default_rng(child)
            p = next_prime(cell.n)
            r = int(rng.integers(1, p)) if p > 1 else 1
            self.params.append(ModularClockParams(p, r, int(rng.integers(0, p))))
            self.rngs.append(rng)

    @property
    def m(self) -> int:
        return len(self.cells)

    def block(self, start: int, count: int) -> np.ndarray:
        t = np.arange(start, start + count, dtype=np.int64)
        rows = []
        for cell, prm, rng in zip(self.cells, self.params, self.rngs):
            k = (prm.r * t + prm.b) % prm.p
            wild = k >= cell.n
            n_wild = int(wild.sum())
            if n_wild:
                k[wild] = (rng.random(n_wild) * cell.n).astype(np.int64)
            rows.append(cell.as_array()[k])
        return np.vstack(rows)


class RandomUser:
    """Uniform-random baseline: each slot, ``m`` distinct channels without replacement."""

    def __init__(self, channels: ChannelSet, m: int, seed: SeedLike):
        if not 1 <= m <= channels.n:
            raise ValueError(f"cannot pick {m} distinct channels from {channels.n}")
        self.channels = channels
        self._m = m
        self.rng = np.random.default_rng(as_seed_sequence(seed))
        self._labels = channels.as_array()

    @property
    def m(self) -> int:
        return self._m

    def next(self, t: int) -> frozenset[int]:
        return random_step(self.channels, self._m, self.rng)

    def block(self, start: int, count: int) -> np.ndarray:
        n, m = self.channels.n, self._m
        if m == 1:
            idx = self.rng.integers(0, n, size=(1, count))
        elif m == n:
            idx = np.broadcast_to(np.arange(n)[:, None], (n, count))
        else:
            keys = self.rng.random((count, n))
            idx = np.argpartition(keys, m - 1, axis=1)[:, :m].T
        return self._labels[idx]
