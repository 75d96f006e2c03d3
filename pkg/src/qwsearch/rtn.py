"""Random telegraph noise on graph links: sampling, queries, statistics.

Each link of a graph carries an independent two-state (+1/-1) Markov
process with switching rate ``mu``; switch counts over a window are
Poisson distributed and the stationary autocorrelation decays as
exp(-2*mu*|tau|). Trajectories are sampled event-driven (explicit switch
times), so the process value is exact at any query time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .graph import Edge, Graph


@dataclass(frozen=True)
class LinkTrajectory:
    """One telegraph signal: initial sign plus sorted switch times.

    The value at time t is ``initial_sign * (-1)**k`` where k counts the
    switches at or before t (right-continuous at switch instants).
    """

    initial_sign: int
    switch_times: np.ndarray
    horizon: float

    def __post_init__(self) -> None:
        if self.initial_sign not in (-1, 1):
            raise ValueError("initial_sign must be +1 or -1")
        if not (math.isfinite(self.horizon) and self.horizon > 0):
            raise ValueError("horizon must be positive and finite")
        ts = np.asarray(self.switch_times, dtype=np.float64)
        if ts.ndim != 1:
            raise ValueError("switch_times must be one-dimensional")
        if ts.size and (np.any(np.diff(ts) <= 0) or ts[0] <= 0 or ts[-1] >= self.horizon):
            raise ValueError("switch_times must be strictly increasing inside (0, horizon)")
        object.__setattr__(self, "switch_times", ts)


@dataclass(frozen=True)
class NoiseRealization:
    """Independent telegraph trajectories, one per link of a graph."""

    link_order: tuple[Edge, ...]
    trajectories: tuple[LinkTrajectory, ...]
    rate: float
    horizon: float
    seed: int

    def __post_init__(self) -> None:
        if len(self.trajectories) != len(self.link_order):
            raise ValueError("one trajectory per link required")

    @property
    def num_links(self) -> int:
        return len(self.link_order)


def _link_rng(seed: int, index: int) -> np.random.Generator:
    # Stream-splittable substream: reproducible for (seed, index) no matter
    # in which order links are sampled.
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(index,)))


def sample_trajectories(
    count: int, rate: float, horizon: float, seed: int
) -> tuple[LinkTrajectory, ...]:
    """Draw ``count`` independent telegraph trajectories.

    Switch times form a Poisson process of rate ``rate`` on [0, horizon):
    the switch count is Poisson(rate*horizon) and, given the count, the
    times are uniform order statistics (equivalent to exponential
    inter-arrivals). The initial sign is +1 or -1 with probability 1/2,
    the stationary law of the process.
    """
    if not (math.isfinite(rate) and rate >= 0):
        raise ValueError("rate must be finite and >= 0")
    if not (math.isfinite(horizon) and horizon > 0):
        raise ValueError("horizon must be finite and > 0")
    if count < 0:
        raise ValueError("count must be >= 0")
    out = []
    for i in range(count):
        rng = _link_rng(seed, i)
        sign = 1 if rng.random() < 0.5 else -1
        k = rng.poisson(rate * horizon) if rate > 0 else 0
        times = np.sort(rng.random(k) * horizon)
        if k:
            # Coincident float times would be a no-op switch pair; keep parity.
            uniq, counts = np.unique(times, return_counts=True)
            times = uniq[counts % 2 == 1]
            times = times[times > 0.0]
        out.append(LinkTrajectory(sign, times, horizon))
    return tuple(out)


def sample_realization(g: Graph, rate: float, horizon: float, seed: int) -> NoiseRealization:
    """Sample one noise realization for every link of ``g``.

    Fully determined by (seed, link index): link i gets the same
    trajectory as ``sample_trajectories(...)[i]`` for the same seed.
    """
    trajectories = sample_trajectories(g.num_links, rate, horizon, seed)
    return NoiseRealization(g.edges, trajectories, rate, horizon, seed)


def value_at(tr: LinkTrajectory, t: float) -> int:
    """Process value at time t, right-continuous at switch instants."""
    if not (0.0 <= t < tr.horizon):
        raise ValueError(f"t={t} outside [0, {tr.horizon})")
    flips = int(np.searchsorted(tr.switch_times, t, side="right"))
    return tr.initial_sign * (-1) ** (flips % 2)


def signs_at(tr: LinkTrajectory, times: np.ndarray) -> np.ndarray:
    """Vectorized ``value_at`` over an array of query times."""
    times = np.asarray(times, dtype=np.float64)
    if times.size and (times.min() < 0.0 or times.max() >= tr.horizon):
        raise ValueError("query times outside [0, horizon)")
    flips = np.searchsorted(tr.switch_times, times, side="right")
    return tr.initial_sign * np.where(flips % 2 == 0, 1, -1)


def merged_breakpoints(r: NoiseRealization, tol: float = 1e-12) -> np.ndarray:
    """Sorted union of all switch times with 0 and horizon as endpoints.

    Times closer than ``tol`` collapse to one breakpoint.
    """
    parts = [np.array([0.0, r.horizon])]
    parts.extend(tr.switch_times for tr in r.trajectories)
    ts = np.concatenate(parts)
    ts.sort(kind="stable")
    keep = np.empty(ts.size, dtype=bool)
    keep[0] = True
    keep[1:] = np.diff(ts) > tol
    out = ts[keep]
    out[-1] = r.horizon
    return out


def autocorrelation_estimate(
    trajectories: tuple[LinkTrajectory, ...] | list[LinkTrajectory],
    lag: float,
    probe_time: float = 0.0,
) -> float:
    """Sample mean of g(probe_time + lag) * g(probe_time).

    By stationarity the expectation is exp(-2*mu*lag). Needs at least
    100 trajectories for a meaningful estimate.
    """
    m = len(trajectories)
    if m < 100:
        raise ValueError(f"need at least 100 trajectories, got {m}")
    if lag < 0 or probe_time < 0:
        raise ValueError("lag and probe_time must be >= 0")
    if probe_time + lag >= trajectories[0].horizon:
        raise ValueError("probe_time + lag beyond trajectory horizon")
    total = 0
    for tr in trajectories:
        total += value_at(tr, probe_time + lag) * value_at(tr, probe_time)
    return total / m


def switch_count_chisquare(
    trajectories: tuple[LinkTrajectory, ...] | list[LinkTrajectory],
    rate: float,
    min_expected: float = 5.0,
) -> tuple[float, float, int]:
    """Chi-square goodness of fit of switch counts against Poisson(rate*horizon).

    Bins with expected occupancy below ``min_expected`` are pooled into the
    tail. Returns (statistic, p_value, degrees_of_freedom).
    """
    counts = np.array([tr.switch_times.size for tr in trajectories], dtype=np.int64)
    m = counts.size
    if m < 100:
        raise ValueError(f"need at least 100 trajectories, got {m}")
    lam = rate * trajectories[0].horizon
    if lam == 0:
        raise ValueError("chi-square test is degenerate at rate 0")
    # Upper bin edge: extend until the pooled tail is small but nonempty.
    kmax = int(stats.poisson.ppf(1.0 - 1e-9, lam)) + 1
    probs = stats.poisson.pmf(np.arange(kmax), lam)
    probs = np.append(probs, 1.0 - probs.sum())
    observed = np.bincount(np.minimum(counts, kmax), minlength=kmax + 1).astype(float)
    expected = m * probs
    # Pool sparse bins (both tails) into one category.
    keep = expected >= min_expected
    if keep.sum() < 2:
        raise ValueError("too few populated bins for a chi-square test")
    obs = np.append(observed[keep], observed[~keep].sum())
    exp = np.append(expected[keep], expected[~keep].sum())
    if exp[-1] < min_expected:
        obs[-2] += obs[-1]
        exp[-2] += exp[-1]
        obs, exp = obs[:-1], exp[:-1]
    statistic = float(((obs - exp) ** 2 / exp).sum())
    dof = obs.size - 1
    p_value = float(stats.chi2.sf(statistic, dof))
    return statistic, p_value, dof
