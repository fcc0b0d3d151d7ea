"""
Timing harness: dense direct HP versus the incremental recursion.

The direct arm builds the dense ``S_l`` and solves it with a general LU
factorization, i.e. the plain O(l^3) route of writing ``g = S^{-1} y``.  It
deliberately does not use the banded solver.  The incremental arm runs
the O(l^2) recursion over the whole series.  BLAS is pinned to one thread
for both arms.
"""
from __future__ import annotations

import csv
import json
import os
import time
from dataclasses import asdict, dataclass

import numpy as np
from threadpoolctl import threadpool_limits

from . import linalg
from ._kernels import incremental_pass

DEFAULT_LENGTHS = (250, 500, 1000, 2000)
DEFAULT_REPEATS = 10
DEFAULT_SEED = 20201001
SEED_ENV = "HPFILT_SEED"


@dataclass
class BenchReport:
    lengths: list
    direct_seconds: list
    incremental_seconds: list
    repeats: int
    seed: int
    direct_slope: float
    incremental_slope: float

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=1)

    def write(self, destination, format="json"):
        with open(destination, "w", newline="", encoding="utf-8") as fh:
            if format == "json":
                fh.write(self.to_json() + "\n")
            elif format == "csv":
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["length", "direct_seconds", "incremental_seconds"])
                for row in zip(self.lengths, self.direct_seconds,
                               self.incremental_seconds):
                    w.writerow([row[0], repr(row[1]), repr(row[2])])
            else:
                raise ValueError(f"unknown format {format!r}")


def seed_from_env(default=DEFAULT_SEED) -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None or not raw.strip():
        return default
    return int(raw.strip(), 10)


def random_walk(length: int, seed: int) -> np.ndarray:
    return np.cumsum(np.random.default_rng(seed).standard_normal(length))


def direct_dense(y, eta):
    S = linalg.penalty_matrix(y.size, eta)
    return np.linalg.solve(S, y)


def incremental(y, eta):
    return incremental_pass(y, eta)[0]


def loglog_slope(lengths, seconds) -> float:
    """Least-squares slope of log(seconds) against log(length)."""
    if len(lengths) < 2:
        return float("nan")
    return float(np.polyfit(np.log(lengths), np.log(seconds), 1)[0])


def _mean_time(fn, y, eta, repeats):
    fn(y, eta)  # warm-up, excluded
    total = 0.0
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(y, eta)
        total += time.perf_counter() - t0
    return total / repeats


def run_bench(lengths=DEFAULT_LENGTHS, repeats=DEFAULT_REPEATS, seed=None,
              eta=14400.0, progress=None) -> BenchReport:
    lengths = [int(n) for n in lengths]
    if any(n < 3 for n in lengths):
        raise ValueError("every length must be >= 3")
    if any(b <= a for a, b in zip(lengths, lengths[1:])):
        raise ValueError("lengths must be strictly increasing")
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    if seed is None:
        seed = seed_from_env()

    direct, incr = [], []
    with threadpool_limits(limits=1):
        for n in lengths:
            y = random_walk(n, seed)
            direct.append(_mean_time(direct_dense, y, eta, repeats))
            incr.append(_mean_time(incremental, y, eta, repeats))
            if progress is not None:
                progress(n, direct[-1], incr[-1])
    return BenchReport(
        lengths=lengths,
        direct_seconds=direct,
        incremental_seconds=incr,
        repeats=repeats,
        seed=seed,
        direct_slope=loglog_slope(lengths, direct),
        incremental_slope=loglog_slope(lengths, incr),
    )
