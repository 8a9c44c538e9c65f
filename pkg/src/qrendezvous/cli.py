"""Experiment presets, CSV output and the ``qrendezvous`` command line."""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .codec import make_codeword
from .hopping import next_prime
from .sim import (
    ALGORITHMS,
    TrialConfig,
    default_drift_period,
    qr_horizon,
    run_trial,
    sample_channel_sets,
    sample_drift,
)
from .stats import AggregationError, aggregate, mttr_bounds

__all__ = [
    "PRESETS",
    "GridPoint",
    "ExperimentPreset",
    "ExperimentRow",
    "make_preset",
    "run_experiment",
    "emit_csv",
    "bound_violations",
    "format_csv",
    "parse_csv",
    "main",
]

PRESETS = ("sweep-N-fixed-G", "sweep-N-proportional", "sweep-radios", "sweep-G", "custom")

DEFAULT_DRAWS = 100
DEFAULT_TRIALS = 200


@dataclass(frozen=True)
class GridPoint:
    """One parameter point. ``n_range`` (lo, hi) draws n1 = n2 uniformly per channel-set draw."""

    label: str
    N: int
    n1: int
    n2: int
    G: int
    m1: int = 1
    m2: int = 1
    n_range: Optional[tuple[int, int]] = None

    @property
    def n1_max(self) -> int:
        return self.n_range[1] if self.n_range else self.n1

    @property
    def n2_max(self) -> int:
        return self.n_range[1] if self.n_range else self.n2

    def infeasible_reason(self) -> Optional[str]:
        n1, n2 = self.n1_max, self.n2_max
        lo = self.n_range[0] if self.n_range else min(n1, n2)
        if self.G < 1:
            return "G < 1"
        if self.G > lo:
            return f"G={self.G} exceeds the smallest channel set"
        if n1 + n2 - self.G > self.N:
            return f"n1+n2-G={n1 + n2 - self.G} exceeds N={self.N}"
        if self.m1 > (self.n_range[0] if self.n_range else self.n1) or \
                self.m2 > (self.n_range[0] if self.n_range else self.n2):
            return "more radios than channels"
        return None


@dataclass(frozen=True)
class ExperimentPreset:
    name: str
    grid: tuple[GridPoint, ...]
    trials: int = DEFAULT_TRIALS
    draws: int = DEFAULT_DRAWS
    seed: int = 0
    algorithms: tuple[str, ...] = ("quasi-random", "random")
    drift_period: Optional[int] = None

    def __post_init__(self):
        if self.name not in PRESETS:
            raise ValueError(f"unknown preset {self.name!r}")
        if not self.grid:
            raise ValueError("grid must be non-empty")
        if self.trials < 1 or self.draws < 1 or self.trials * self.draws < 2:
            raise ValueError("need at least two trials per point")
        bad = [a for a in self.algorithms if a not in ALGORITHMS]
        if bad:
            raise ValueError(f"unknown algorithms {bad}")


@dataclass
class ExperimentRow:
    preset: str
    point: str
    algorithm: str
    n1: int
    n2: int
    G: int
    m1: int
    m2: int
    N: int
    trials: int
    ettr: Optional[float] = None
    ci95: Optional[float] = None
    mttr_measured: Optional[int] = None
    mttr_bound: Optional[int] = None
    ettr_bound: Optional[float] = None
    status: str = "ok"
    note: str = ""


COLUMNS = tuple(f.name for f in dataclasses.fields(ExperimentRow))


def make_preset(name: str, *, N=None, n1=None, n2=None, G=None, m1=None, m2=None,
                trials: int = DEFAULT_TRIALS, draws: int = DEFAULT_DRAWS, seed: int = 0,
                algorithms: Sequence[str] = ("quasi-random", "random"),
                drift_period: Optional[int] = None) -> ExperimentPreset:
    """Build one of the named sweeps; keyword overrides replace its fixed (non-swept) values."""

    def pick(value, default):
        return default if value is None else value

    if name == "sweep-N-fixed-G":
        grid = [GridPoint(str(n), n, 16, 16, pick(G, 2), pick(m1, 2), pick(m2, 4), n_range=(14, 16))
                for n in (64, 96, 128, 160, 192)]
    elif name == "sweep-N-proportional":
        grid = [GridPoint(str(n), n, n // 2, n // 2, pick(G, n // 8), pick(m1, 3), pick(m2, 6))
                for n in (64, 96, 128, 160, 192)]
    elif name == "sweep-radios":
        radios = [(1, 1), (1, 2), (2, 2), (2, 3), (3, 3), (3, 4), (4, 4), (5, 5)]
        grid = [GridPoint(f"{a}x{b}", pick(N, 160), pick(n1, 40), pick(n2, 40), pick(G, 20), a, b)
                for a, b in radios]
    elif name == "sweep-G":
        grid = [GridPoint(str(g), pick(N, 160), pick(n1, 64), pick(n2, 64), g, pick(m1, 5), pick(m2, 5))
                for g in range(3, 28, 3)]
    elif name == "custom":
        grid = [GridPoint("custom", pick(N, 64), pick(n1, 16), pick(n2, 16), pick(G, 4),
                          pick(m1, 1), pick(m2, 1))]
    else:
        raise ValueError(f"unknown preset {name!r}")
    return ExperimentPreset(name, tuple(grid), trials=trials, draws=draws, seed=seed,
                            algorithms=tuple(algorithms), drift_period=drift_period)


def _bounds_for(point: GridPoint, algorithm: str) -> tuple[Optional[int], Optional[float]]:
    n1, n2 = point.n1_max, point.n2_max
    single = point.m1 == 1 and point.m2 == 1
    if algorithm == "quasi-random":
        b = mttr_bounds(n1, point.m1, n2, point.m2, point.N, point.G)
        return b.mttr_thm1, (b.ettr_eq3 if single else None)
    if algorithm == "random":
        return None, (n1 * n2 / point.G if single else None)
    if single and point.n_range is None:
        p1, p2 = next_prime(n1), next_prime(n2)
        if p1 != p2:
            return p1 * p2, None
    return None, None


def _run_point(preset: ExperimentPreset, index: int, point: GridPoint) -> list[ExperimentRow]:
    base = dict(preset=preset.name, point=point.label, n1=point.n1_max, n2=point.n2_max,
                G=point.G, m1=point.m1, m2=point.m2, N=point.N)
    reason = point.infeasible_reason()
    if reason:
        return [ExperimentRow(algorithm=a, trials=0, status="skipped", note=reason, **base)
                for a in preset.algorithms]

    ss = np.random.SeedSequence(preset.seed).spawn(index + 1)[index]
    rng = np.random.default_rng(ss)
    period = preset.drift_period or default_drift_period(
        point.n1_max, point.m1, point.n2_max, point.m2, point.N)

    # Channel sets, drifts and seeds are shared by all algorithms at this point.
    setups = []
    for _ in range(preset.draws):
        if point.n_range:
            n = int(rng.integers(point.n_range[0], point.n_range[1] + 1))
            n1 = n2 = n
        else:
            n1, n2 = point.n1, point.n2
        set1, set2 = sample_channel_sets(point.N, n1, n2, point.G, rng)
        for _ in range(preset.trials):
            setups.append((set1, set2, sample_drift(rng, period),
                           int(rng.integers(0, 2**63))))

    rows = []
    for algorithm in preset.algorithms:
        mttr_bound, e_bound = _bounds_for(point, algorithm)
        results = []
        violations = 0
        for set1, set2, drift, seed in setups:
            horizon = None
            if algorithm == "quasi-random":
                horizon = qr_horizon(set1.n, point.m1, set2.n, point.m2, point.N)
            elif mttr_bound is not None:
                horizon = mttr_bound
            res = run_trial(TrialConfig(set1, set2, point.m1, point.m2, drift, algorithm, seed, horizon))
            if mttr_bound is not None and (not res.success or res.ttr > mttr_bound):
                violations += 1
            results.append(res)
        row = ExperimentRow(algorithm=algorithm, trials=len(results), mttr_bound=mttr_bound,
                            ettr_bound=e_bound, **base)
        if point.n_range:
            row.note = f"n1=n2~U[{point.n_range[0]},{point.n_range[1]}] per draw"
        failures = sum(not r.success for r in results)
        if violations:
            row.status = "violation"
            row.note = f"{violations} trials exceeded the MTTR bound"
        elif failures:
            row.status = "no-rendezvous"
            row.note = f"{failures} trials did not rendezvous within the horizon"
        if not failures:
            try:
                st = aggregate(results)
            except AggregationError as exc:
                row.status, row.note = "error", str(exc)
            else:
                row.ettr, row.ci95, row.mttr_measured = st.ettr, st.ettr_ci95, st.mttr_measured
        rows.append(row)
    return rows


def run_experiment(preset: ExperimentPreset, workers: int = 1) -> list[ExperimentRow]:
    """Run every grid point; rows come back in grid order, algorithms in preset order."""
    args = [(preset, i, p) for i, p in enumerate(preset.grid)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_point_star, args))
    else:
        chunks = [_run_point(*a) for a in args]
    return [row for chunk in chunks for row in chunk]


def _run_point_star(args):
    return _run_point(*args)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".6g")
    return str(value)


def format_csv(rows: Sequence[ExperimentRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in rows:
        writer.writerow([_fmt(getattr(row, c)) for c in COLUMNS])
    return buf.getvalue()


def emit_csv(rows: Sequence[ExperimentRow], path) -> None:
    """Write rows atomically: either the full file appears or an OSError is raised."""
    text = format_csv(rows)
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".qrendezvous-", suffix=".csv")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


_INT_COLS = {"n1", "n2", "G", "m1", "m2", "N", "trials", "mttr_measured", "mttr_bound"}
_FLOAT_COLS = {"ettr", "ci95", "ettr_bound"}


def parse_csv(text: str) -> list[ExperimentRow]:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != COLUMNS:
        raise ValueError(f"unexpected header {reader.fieldnames}")
    rows = []
    for rec in reader:
        kw = {}
        for c in COLUMNS:
            v = rec[c]
            if c in _INT_COLS:
                kw[c] = int(v) if v != "" else None
            elif c in _FLOAT_COLS:
                kw[c] = float(v) if v != "" else None
            else:
                kw[c] = v
        rows.append(ExperimentRow(**kw))
    return rows


def bound_violations(rows: Sequence[ExperimentRow]) -> list[ExperimentRow]:
    return [r for r in rows
            if r.status == "violation"
            or (r.mttr_bound is not None and r.mttr_measured is not None
                and r.mttr_measured > r.mttr_bound)]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qrendezvous",
                                     description="Quasi-random rendezvous experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a sweep and write CSV")
    run.add_argument("--preset", choices=PRESETS, default="custom")
    run.add_argument("--N", type=int)
    run.add_argument("--n1", type=int)
    run.add_argument("--n2", type=int)
    run.add_argument("--G", type=int)
    run.add_argument("--m1", type=int)
    run.add_argument("--m2", type=int)
    run.add_argument("--trials", type=int, default=DEFAULT_TRIALS,
                     help="independent runs per channel-set draw")
    run.add_argument("--draws", type=int, default=DEFAULT_DRAWS,
                     help="channel-set draws per grid point")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--drift-period", type=int, default=None)
    run.add_argument("--algorithms", default="quasi-random,random",
                     help="comma-separated subset of " + ",".join(ALGORITHMS))
    run.add_argument("--out", default="-", help="output path, '-' for stdout")
    run.add_argument("--format", choices=("csv",), default="csv")
    run.add_argument("--workers", type=int, default=1)

    cw = sub.add_parser("codeword", help="print the ternary codeword of an ID")
    cw.add_argument("x", type=int)
    cw.add_argument("L", type=int)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)

    if args.command == "codeword":
        try:
            print(make_codeword(args.x, args.L))
        except ValueError as exc:
            parser.error(str(exc))
        return 0

    try:
        preset = make_preset(
            args.preset, N=args.N, n1=args.n1, n2=args.n2, G=args.G, m1=args.m1, m2=args.m2,
            trials=args.trials, draws=args.draws, seed=args.seed,
            algorithms=[a.strip() for a in args.algorithms.split(",") if a.strip()],
            drift_period=args.drift_period,
        )
    except ValueError as exc:
        parser.error(str(exc))
    rows = run_experiment(preset, workers=args.workers)
    if args.out == "-":
        sys.stdout.write(format_csv(rows))
    else:
        try:
            emit_csv(rows, args.out)
        except OSError as exc:
            print(f"qrendezvous: cannot write {args.out}: {exc}", file=sys.stderr)
            return 1
    bad = bound_violations(rows)
    for r in bad:
        print(f"qrendezvous: bound violated at {r.point} ({r.algorithm}): {r.note}", file=sys.stderr)
    return 1 if bad else 0
