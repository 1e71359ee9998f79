"""Latency measurement for singleton scoring.

Methodology: monotonic clock around individual score() calls, warm-up before
timing, median and p95 per (dim, k) cell. Absolute numbers are hardware
dependent; tests assert shape only (constancy across dims, linearity in k).
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass

import numpy as np

from .detector import fit, score

DEFAULT_DIMS = (10, 100, 500, 1000, 2000)
DEFAULT_KS = (1, 100, 1000)


@dataclass(frozen=True)
class BenchCell:
    """Per-sample scoring latency for one (dim, k) configuration."""

    dim: int
    k: int
    samples: int
    median_ms: float
    p95_ms: float
    mean_ms: float

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "k": self.k,
            "samples": self.samples,
            "median_ms": self.median_ms,
            "p95_ms": self.p95_ms,
            "mean_ms": self.mean_ms,
        }


def bench_cell(dim: int, k: int, samples: int = 10_000, warmup: int = 1_000,
               fit_count: int = 1_000, seed: int = 0) -> BenchCell:
    """Time `samples` singleton score() calls against a fitted summary."""
    rng = np.random.default_rng(seed)
    with warnings.catch_warnings():
        # The sweep deliberately includes k values outside the advisory range.
        warnings.simplefilter("ignore", UserWarning)
        summary = fit(rng.standard_normal((fit_count, dim)), k=k)
    probes = rng.standard_normal((warmup + samples, dim))
    probe_rows = [np.ascontiguousarray(probes[i]) for i in range(probes.shape[0])]
    for row in probe_rows[:warmup]:
        score(row, summary)
    elapsed_ns = np.empty(samples, dtype=np.float64)
    for i, row in enumerate(probe_rows[warmup:]):
        t0 = time.perf_counter_ns()
        score(row, summary)
        elapsed_ns[i] = time.perf_counter_ns() - t0
    ms = elapsed_ns / 1e6
    return BenchCell(
        dim=dim,
        k=k,
        samples=samples,
        median_ms=float(np.median(ms)),
        p95_ms=float(np.quantile(ms, 0.95)),
        mean_ms=float(ms.mean()),
    )


def bench_grid(dims=DEFAULT_DIMS, ks=DEFAULT_KS, samples: int = 10_000,
               warmup: int = 1_000, fit_count: int = 1_000,
               seed: int = 0) -> list[BenchCell]:
    """The full (dim, k) sweep used by the bench command."""
    cells = []
    for dim in dims:
        for k in ks:
            cells.append(bench_cell(dim, k, samples=samples, warmup=warmup,
                                    fit_count=fit_count, seed=seed))
    return cells


def linear_fit_r2(xs, ys) -> float:
    """R-squared of the least-squares line through (xs, ys)."""
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    slope, intercept = np.polyfit(x, y, 1)
    residual = y - (slope * x + intercept)
    total = y - y.mean()
    ss_tot = float((total * total).sum())
    if ss_tot == 0.0:
        return 1.0
    return 1.0 - float((residual * residual).sum()) / ss_tot
