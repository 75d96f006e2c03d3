"""Metrics extracted from probability traces and power-law scaling fits."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .ensemble import EnsembleTrace
from .propagator import ProbabilityTrace


@dataclass
class SearchMetrics:
    """Peak statistics of one trace.

    ``avg_running_time`` is the expected total time under repeated
    trials with recognizable outcomes: peak time divided by peak
    probability (geometric number of trials).
    """

    p_succ: float
    t_max: float
    avg_running_time: float
    stderr_p: float
    config: dict | None = None


@dataclass
class ScalingFit:
    """Least-squares line through (log N, log T)."""

    exponent: float
    intercept: float
    residual: float
    orders: tuple[int, ...]


def extract_metrics(
    trace: ProbabilityTrace | EnsembleTrace,
    refine: bool = True,
    config: dict | None = None,
) -> SearchMetrics:
    """Locate the first trace maximum and derive the running-time metrics.

    The grid peak is the earliest sample attaining the maximum. With
    ``refine`` (default) the peak is sharpened by the quadratic through
    the sample and its two neighbours, which removes the O(grid step^2)
    bias of the bare argmax; the refined probability is clamped to [0, 1].
    """
    if isinstance(trace, EnsembleTrace):
        trace = trace.trace
    p = trace.p
    if not np.any(p > 0):
        raise ValueError("degenerate trace: no positive probability")
    times = trace.grid.times()
    k = int(np.argmax(p))
    t_max = float(times[k])
    p_succ = float(p[k])
    if refine and 0 < k < p.size - 1:
        concavity = p[k - 1] - 2.0 * p[k] + p[k + 1]
        if concavity < 0:
            offset = 0.5 * (p[k - 1] - p[k + 1]) / concavity
            t_max = float(times[k] + offset * trace.grid.step)
            p_succ = float(p[k] - 0.25 * (p[k - 1] - p[k + 1]) * offset)
            p_succ = min(max(p_succ, float(p[k])), 1.0)
    return SearchMetrics(
        p_succ=p_succ,
        t_max=t_max,
        avg_running_time=t_max / p_succ,
        stderr_p=float(trace.stderr[k]),
        config=config,
    )


def expected_trials(p_succ: float) -> float:
    """Mean number of repetitions until success, 1/p_succ."""
    if not 0.0 < p_succ <= 1.0:
        raise ValueError("success probability must lie in (0, 1]")
    return 1.0 / p_succ


def fit_scaling(points: Sequence[tuple[float, float]]) -> ScalingFit:
    """Fit T = c * N^a through (N, T) pairs; the exponent is a."""
    if len(points) < 4:
        raise ValueError("need at least 4 points for a scaling fit")
    orders = np.array([n for n, _ in points], dtype=float)
    values = np.array([t for _, t in points], dtype=float)
    if np.any(np.diff(orders) <= 0):
        raise ValueError("orders must be strictly increasing")
    if np.any(values <= 0):
        raise ValueError("values must be positive for a log-log fit")
    log_n = np.log(orders)
    log_t = np.log(values)
    slope, intercept = np.polyfit(log_n, log_t, 1)
    resid = log_t - (slope * log_n + intercept)
    return ScalingFit(
        exponent=float(slope),
        intercept=float(intercept),
        residual=float(math.sqrt(np.mean(resid**2))),
        orders=tuple(int(n) for n, _ in points),
    )
