"""Walker propagation through static and piecewise-constant Hamiltonians.

All evolution uses exact exponentials of real symmetric matrices via
spectral decomposition; a constant segment therefore costs one
eigendecomposition no matter how many grid samples fall inside it.
Segment decompositions are batched in blocks to keep LAPACK call
overhead low without holding every segment matrix in memory.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .hamiltonian import HamiltonianSchedule

# Past 1/(10*mu) the step no longer resolves typical switch spacings.
STEP_RESOLUTION_FACTOR = 10.0


class StepResolutionWarning(UserWarning):
    """Fixed step too coarse for the noise switching rate."""


@dataclass(frozen=True)
class TimeGrid:
    """Uniform sampling times k * horizon / (samples - 1), k = 0..samples-1."""

    horizon: float
    samples: int

    def __post_init__(self) -> None:
        if not (math.isfinite(self.horizon) and self.horizon > 0):
            raise ValueError("horizon must be positive and finite")
        if self.samples < 2:
            raise ValueError("need at least 2 samples")

    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.horizon, self.samples)

    @property
    def step(self) -> float:
        return self.horizon / (self.samples - 1)


def default_grid(n: int, samples: int = 1024, horizon_factor: float = 4.0) -> TimeGrid:
    """Grid out to ``horizon_factor`` times the ideal search time pi*sqrt(n)/2."""
    return TimeGrid(horizon_factor * 0.5 * math.pi * math.sqrt(n), samples)


@dataclass(eq=False)
class ProbabilityTrace:
    """Target-node probability sampled on a grid, with per-sample stderr."""

    grid: TimeGrid
    p: np.ndarray
    stderr: np.ndarray

    def __post_init__(self) -> None:
        self.p = np.asarray(self.p, dtype=np.float64)
        self.stderr = np.asarray(self.stderr, dtype=np.float64)
        if self.p.shape != (self.grid.samples,) or self.stderr.shape != self.p.shape:
            raise ValueError("trace length must match the grid")
        if self.p.min() < -1e-12 or self.p.max() > 1.0 + 1e-12:
            raise ValueError("probabilities outside [0, 1]")


def uniform_state(n: int) -> np.ndarray:
    """Equal-weight superposition over all n nodes."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return np.full(n, 1.0 / math.sqrt(n), dtype=np.complex128)


def _check_state(psi: np.ndarray, n: int) -> np.ndarray:
    psi = np.asarray(psi, dtype=np.complex128)
    if psi.shape != (n,):
        raise ValueError(f"state must have shape ({n},)")
    if abs(np.linalg.norm(psi) - 1.0) > 1e-6:
        raise ValueError("state is not normalized")
    return psi


def _decompose(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    try:
        return np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - hard to trigger for symmetric input
        raise np.linalg.LinAlgError(
            f"eigendecomposition failed: {exc}; max |entry| = {np.abs(h).max():g}, "
            f"non-finite entries = {int(np.count_nonzero(~np.isfinite(h)))}"
        ) from exc


def evolve_static(
    h: np.ndarray,
    psi0: np.ndarray,
    grid: TimeGrid,
    target: int,
) -> ProbabilityTrace:
    """Sample |<target| exp(-i h t) |psi0>|^2 on the grid.

    One spectral decomposition of ``h`` is reused for every sample, so
    there is no error accumulation across the grid.
    """
    h = np.asarray(h, dtype=np.float64)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError("hamiltonian must be a square matrix")
    if not np.allclose(h, h.T, atol=1e-10):
        raise ValueError("hamiltonian must be symmetric")
    n = h.shape[0]
    if not (0 <= target < n):
        raise ValueError("target outside matrix dimension")
    psi0 = _check_state(psi0, n)
    evals, evecs = _decompose(h)
    coeffs = evecs.T @ psi0
    amps = np.exp(-1j * np.outer(grid.times(), evals)) @ (evecs[target] * coeffs)
    p = np.abs(amps) ** 2
    return ProbabilityTrace(grid, np.minimum(p, 1.0), np.zeros_like(p))


def _block_size(n: int) -> int:
    # ~30 MB of segment matrices per eigh batch.
    return max(64, min(8192, 4_000_000 // (n * n)))


def _sweep_schedule(
    schedule: HamiltonianSchedule,
    psi0: np.ndarray,
    times: np.ndarray,
    record_states: bool = False,
) -> tuple[np.ndarray, np.ndarray | None]:
    """Advance psi0 segment by segment, sampling the target amplitude.

    Grid samples inside a segment are computed from the state at segment
    entry through the segment's own exponential, so only segment-boundary
    states are chained.
    """
    n = schedule.graph.n
    target = schedule.params.target
    bps = schedule.breakpoints
    pos = np.searchsorted(times, bps, side="left")
    pos[-1] = times.size
    p = np.empty(times.size)
    states = np.empty((times.size, n), dtype=np.complex128) if record_states else None
    psi = psi0
    block = _block_size(n)
    for lo in range(0, schedule.num_segments, block):
        hi = min(lo + block, schedule.num_segments)
        evals, evecs = _decompose(schedule.matrices(lo, hi))
        for i in range(lo, hi):
            lam = evals[i - lo]
            vec = evecs[i - lo]
            coeffs = vec.T @ psi
            a, b = pos[i], pos[i + 1]
            if b > a:
                phases = np.exp(-1j * np.outer(times[a:b] - bps[i], lam)) * coeffs
                if record_states:
                    seg_states = phases @ vec.T
                    states[a:b] = seg_states
                    p[a:b] = np.abs(seg_states[:, target]) ** 2
                else:
                    p[a:b] = np.abs(phases @ vec[target]) ** 2
            psi = vec @ (np.exp(-1j * lam * (bps[i + 1] - bps[i])) * coeffs)
    return np.minimum(p, 1.0), states


def _check_grid(schedule: HamiltonianSchedule, grid: TimeGrid) -> None:
    if grid.horizon > schedule.horizon * (1 + 1e-12):
        raise ValueError(
            f"grid horizon {grid.horizon:g} exceeds schedule horizon {schedule.horizon:g}"
        )


def evolve_schedule_exact(
    schedule: HamiltonianSchedule,
    psi0: np.ndarray,
    grid: TimeGrid,
) -> ProbabilityTrace:
    """Exact time-ordered evolution: the product of every segment's exponential."""
    _check_grid(schedule, grid)
    psi0 = _check_state(psi0, schedule.graph.n)
    p, _ = _sweep_schedule(schedule, psi0, grid.times())
    return ProbabilityTrace(grid, p, np.zeros_like(p))


def _stepped_schedule(schedule: HamiltonianSchedule, step: float) -> HamiltonianSchedule:
    """Freeze the Hamiltonian at the start of each fixed step.

    A switch inside a step takes effect at the next step boundary, so the
    stepped evolution equals exact evolution of a schedule whose
    breakpoints are snapped up to the step grid (switch pairs landing in
    one step cancel). Boundaries where no sign changed are dropped.
    """
    if not (math.isfinite(step) and step > 0):
        raise ValueError("step must be positive and finite")
    horizon = schedule.horizon
    interior = schedule.breakpoints[1:-1]
    snapped = np.ceil(interior / step - 1e-9) * step
    snapped = np.unique(snapped[(snapped > 0.0) & (snapped < horizon)])
    bps = np.concatenate([[0.0], snapped, [horizon]])
    # Sign row at each new segment start = row of the original segment
    # containing that time.
    src = np.searchsorted(schedule.breakpoints, bps[:-1], side="right") - 1
    src = np.minimum(src, schedule.num_segments - 1)
    signs = schedule.link_signs[src]
    if signs.shape[0] > 1:
        changed = np.any(signs[1:] != signs[:-1], axis=1)
        keep = np.concatenate([[True], changed])
        signs = signs[keep]
        bps = np.concatenate([bps[:-1][keep], [horizon]])
    return HamiltonianSchedule(schedule.graph, schedule.params, bps, signs, schedule.rate)


def evolve_schedule_stepped(
    schedule: HamiltonianSchedule,
    psi0: np.ndarray,
    grid: TimeGrid,
    step: float,
) -> ProbabilityTrace:
    """Fixed-step evolution: H is frozen at each step start and applied exactly.

    Converges to ``evolve_schedule_exact`` as the step shrinks; identical
    to it when every switch time is already a step multiple.
    """
    _check_grid(schedule, grid)
    psi0 = _check_state(psi0, schedule.graph.n)
    if schedule.rate > 0 and step > 1.0 / (STEP_RESOLUTION_FACTOR * schedule.rate):
        warnings.warn(
            f"step {step:g} exceeds 1/({STEP_RESOLUTION_FACTOR:g}*mu); "
            "switches are under-resolved",
            StepResolutionWarning,
            stacklevel=2,
        )
    p, _ = _sweep_schedule(_stepped_schedule(schedule, step), psi0, grid.times())
    return ProbabilityTrace(grid, p, np.zeros_like(p))


def schedule_states(
    schedule: HamiltonianSchedule,
    psi0: np.ndarray,
    grid: TimeGrid,
) -> np.ndarray:
    """Full walker states at every grid sample under exact evolution."""
    _check_grid(schedule, grid)
    psi0 = _check_state(psi0, schedule.graph.n)
    _, states = _sweep_schedule(schedule, psi0, grid.times(), record_states=True)
    return states
