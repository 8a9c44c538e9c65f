"""4B5B ternary ID codewords.

A channel label is written in binary, split into nibbles (most significant
first), each nibble is replaced by its 4B5B code and the 6-trit delimiter
``200001`` is put in front. The resulting words form a strong ternary
symmetrization class, which :func:`verify_class` checks by brute force.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "TABLE_4B5B",
    "DELIMITER",
    "TritCodeword",
    "ValidationReport",
    "encode_4b5b",
    "bit_length_for",
    "codeword_length",
    "make_codeword",
    "zero_run_count",
    "verify_class",
]

# 4B data -> 5B code, indexed by the nibble value.
TABLE_4B5B: tuple[str, ...] = (
    "11110", "01001", "10100", "10101",
    "01010", "01011", "01110", "01111",
    "10010", "10011", "10110", "10111",
    "11010", "11011", "11100", "11101",
)

DELIMITER: tuple[int, ...] = (2, 0, 0, 0, 0, 1)


@dataclass(frozen=True)
class TritCodeword:
    """An M-trit word over {0, 1, 2}."""

    trits: tuple[int, ...]

    def __post_init__(self):
        trits = tuple(int(v) for v in self.trits)
        if not trits:
            raise ValueError("codeword must be non-empty")
        if any(v not in (0, 1, 2) for v in trits):
            raise ValueError(f"trits must be in {{0,1,2}}, got {trits}")
        object.__setattr__(self, "trits", trits)

    @property
    def M(self) -> int:
        return len(self.trits)

    def __len__(self) -> int:
        return len(self.trits)

    def __getitem__(self, s):
        return self.trits[s]

    def __iter__(self):
        return iter(self.trits)

    def __str__(self) -> str:
        return "".join(str(v) for v in self.trits)

    @classmethod
    def from_string(cls, text: str) -> "TritCodeword":
        return cls(tuple(int(ch) for ch in text.strip()))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.trits, dtype=np.int8)


def encode_4b5b(nibble: int) -> tuple[int, ...]:
    """Return the 5B code of a 4-bit value as a tuple of bits."""
    nibble = int(nibble)
    if not 0 <= nibble <= 15:
        raise ValueError(f"nibble out of range: {nibble}")
    return tuple(int(b) for b in TABLE_4B5B[nibble])


def bit_length_for(N: int) -> int:
    """ceil(log2 N), computed exactly."""
    if N < 2:
        raise ValueError(f"need at least 2 channels, got N={N}")
    return (int(N) - 1).bit_length()


def codeword_length(N: int) -> int:
    """Codeword length M = ceil(ceil(log2 N)/4)*5 + 6 for an N-channel network."""
    L = bit_length_for(N)
    return -(-L // 4) * 5 + 6


@lru_cache(maxsize=4096)
def make_codeword(x: int, L: int) -> TritCodeword:
    """Map an L-bit integer to its ternary codeword.

    The value sits in the low-order nibbles and the high-order nibble is
    zero-padded when L is not a multiple of 4; nibbles are emitted MSB first,
    so ``make_codeword(1, 4)`` is ``20000101001``.
    """
    x, L = int(x), int(L)
    if L < 1:
        raise ValueError(f"L must be >= 1, got {L}")
    if not 0 <= x < (1 << L):
        raise ValueError(f"x={x} does not fit in {L} bits")
    n_nibbles = -(-L // 4)
    trits = list(DELIMITER)
    for k in reversed(range(n_nibbles)):
        trits.extend(encode_4b5b((x >> (4 * k)) & 0xF))
    return TritCodeword(tuple(trits))


def zero_run_count(word: Iterable[int], run: int = 4) -> int:
    """Count cyclic starting positions of ``run`` consecutive 0 trits."""
    w = list(word)
    M = len(w)
    return sum(all(w[(s + k) % M] == 0 for k in range(run)) for s in range(M))


@dataclass
class ValidationReport:
    """Outcome of :func:`verify_class`; empty lists mean a valid class."""

    violations: list[tuple[int, int, int]] = field(default_factory=list)
    bad_heads: list[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations and not self.bad_heads

    def __bool__(self) -> bool:
        return self.ok


def verify_class(codewords: Sequence[Sequence[int]]) -> ValidationReport:
    """Check the strong ternary symmetrization conditions exhaustively.

    For every ordered pair (i, j) and shift d in [0, M) other than the trivial
    (i == j, d == 0), word i against word j rotated by d must satisfy

    (i)  some tau1 with (1, 0) and some tau2 with (0, 1), or
    (ii) some tau1 with (1, 1) and some tau2 where the trits differ.

    Every word must also start with a 2. Violations are reported as (i, j, d).
    """
    words = [tuple(int(v) for v in w) for w in codewords]
    if not words:
        return ValidationReport()
    lengths = {len(w) for w in words}
    if len(lengths) != 1:
        raise ValueError(f"codewords have mixed lengths {sorted(lengths)}")
    M = lengths.pop()
    W = np.asarray(words, dtype=np.int8)
    K = W.shape[0]

    report = ValidationReport(bad_heads=[i for i in range(K) if W[i, 0] != 2])
    A = W[:, None, :]
    a1, a0 = A == 1, A == 0
    diag = np.eye(K, dtype=bool)
    for d in range(M):
        # B[0, j, tau] = w_j((tau + d) mod M)
        B = np.roll(W, -d, axis=1)[None, :, :]
        b1, b0 = B == 1, B == 0
        cond_i = (a1 & b0).any(axis=2) & (a0 & b1).any(axis=2)
        cond_ii = (a1 & b1).any(axis=2) & (A != B).any(axis=2)
        bad = ~(cond_i | cond_ii)
        if d == 0:
            bad &= ~diag
        for i, j in zip(*np.nonzero(bad)):
            report.violations.append((int(i), int(j), d))
    report.violations.sort()
    return report
