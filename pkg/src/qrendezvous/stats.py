"""Trial aggregation and closed-form TTR bounds."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Iterable, Optional

import numpy as np

from .codec import codeword_length
from .hopping import two_primes_at_least
from .sim import TrialResult

__all__ = [
    "Z95",
    "SweepStats",
    "BoundSet",
    "AggregationError",
    "ettr_bound",
    "mttr_bounds",
    "aggregate",
]

Z95 = 1.96


class AggregationError(ValueError):
    """Raised when a result list cannot be summarised (failures or too few trials)."""


@dataclass(frozen=True)
class SweepStats:
    ettr: float
    ettr_ci95: float
    mttr_measured: int
    trials: int
    param_point: Any = None


@dataclass(frozen=True)
class BoundSet:
    mttr_thm1: int
    mttr_9mn1n2: int
    mttr_multi: int
    ettr_eq3: float
    ettr_random: float


def ettr_bound(n1: int, n2: int, G: int, N: int) -> float:
    """Single-radio quasi-random ETTR bound n1*n2/G + 9*M*n1*n2*(1 - G/(n1*n2))**M."""
    if G < 1:
        raise ValueError("G must be >= 1 (the users need a common channel)")
    if G > min(n1, n2):
        raise ValueError(f"G={G} exceeds min(n1, n2)")
    M = codeword_length(N)
    nn = n1 * n2
    return nn / G + 9 * M * nn * (1 - G / nn) ** M


def mttr_bounds(n1: int, m1: int, n2: int, m2: int, N: int, G: int = 1,
                p11: Optional[int] = None, p21: Optional[int] = None) -> BoundSet:
    """All MTTR/ETTR bounds for one parameter point.

    ``p11``/``p21`` default to the larger of the two primes picked for the
    largest radio cell of each user, as the hopping generators do.
    """
    M = codeword_length(N)
    c1, c2 = -(-n1 // m1), -(-n2 // m2)
    if p11 is None:
        p11 = two_primes_at_least(c1)[1]
    if p21 is None:
        p21 = two_primes_at_least(c2)[1]
    return BoundSet(
        mttr_thm1=M * p11 * p21,
        mttr_9mn1n2=9 * M * n1 * n2,
        mttr_multi=9 * M * c1 * c2,
        ettr_eq3=ettr_bound(n1, n2, G, N),
        ettr_random=n1 * n2 / G,
    )


def aggregate(results: Iterable[TrialResult | int], param_point: Any = None) -> SweepStats:
    """Mean TTR with a normal-approximation 95% half-width, and the max TTR."""
    ttrs = []
    for r in results:
        ttr = r.ttr if isinstance(r, TrialResult) else r
        if ttr is None:
            raise AggregationError("a trial did not rendezvous within its horizon")
        ttrs.append(int(ttr))
    if len(ttrs) < 2:
        raise AggregationError("need at least two trials")
    x = np.asarray(ttrs, dtype=float)
    return SweepStats(
        ettr=float(x.mean()),
        ettr_ci95=Z95 * float(x.std(ddof=1)) / math.sqrt(len(x)),
        mttr_measured=int(x.max()),
        trials=len(x),
        param_point=param_point,
    )
