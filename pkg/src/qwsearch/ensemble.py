"""Monte Carlo averaging of the noisy walk over noise realizations.

Each trajectory samples an independent noise realization, propagates the
walker through it, and contributes one target-probability trace. The
ensemble mean estimates the open-system target population; per-sample
standard errors quantify the Monte Carlo fluctuation. Trajectory seeds
are derived from (master seed, trajectory index), so results are
bit-identical across runs and worker counts.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .graph import Graph
from .hamiltonian import (
    HamiltonianSchedule,
    SearchParameters,
    build_schedule,
    segment_matrices,
)
from .propagator import (
    ProbabilityTrace,
    TimeGrid,
    _sweep_schedule,
    _stepped_schedule,
    uniform_state,
)
from .rtn import sample_realization

# Above this expected event count per trajectory the fixed-step backend
# is cheaper than resolving every switch exactly.
AUTO_EVENT_LIMIT = 1.0e5

# Trajectories per worker task; fixed so reductions are identical for
# any worker count.
_CHUNK = 64

WORKERS_ENV_VAR = "QWSEARCH_WORKERS"


@dataclass
class EnsembleConfig:
    """One ensemble run: graph, search parameters, noise, and sampling."""

    graph: Graph
    params: SearchParameters
    rate: float
    trajectories: int
    seed: int
    grid: TimeGrid
    backend: str = "auto"
    step: float | None = None
    accumulate_density: bool = False

    def __post_init__(self) -> None:
        if not (math.isfinite(self.rate) and self.rate >= 0):
            raise ValueError("rate must be finite and >= 0")
        if self.trajectories < 1:
            raise ValueError("need at least one trajectory")
        if self.backend not in ("exact", "stepped", "auto"):
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.backend == "stepped" and self.step is None:
            raise ValueError("stepped backend needs an explicit step")


@dataclass(eq=False)
class EnsembleTrace:
    """Ensemble-averaged trace; ``density`` holds mean |psi><psi| if requested."""

    trace: ProbabilityTrace
    trajectories: int
    seed: int
    density: np.ndarray | None = None


def trajectory_seed(master_seed: int, index: int) -> int:
    """Derived integer seed for one trajectory, printable for replay."""
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=(index,))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def resolve_backend(cfg: EnsembleConfig) -> tuple[str, float | None]:
    """Pick exact or stepped propagation for the run.

    Auto selection uses the expected event count links*rate*horizon: the
    exact backend below AUTO_EVENT_LIMIT, otherwise a fixed step
    min(1/(20*rate), horizon/1e4).
    """
    if cfg.backend != "auto":
        return cfg.backend, cfg.step
    expected_events = cfg.graph.num_links * cfg.rate * cfg.grid.horizon
    if expected_events <= AUTO_EVENT_LIMIT or cfg.rate == 0:
        return "exact", None
    if cfg.step is not None:
        return "stepped", cfg.step
    return "stepped", min(1.0 / (20.0 * cfg.rate), cfg.grid.horizon / 1.0e4)


def _trajectory_schedule(cfg: EnsembleConfig, index: int) -> HamiltonianSchedule:
    seed = trajectory_seed(cfg.seed, index)
    realization = sample_realization(cfg.graph, cfg.rate, cfg.grid.horizon, seed)
    return build_schedule(cfg.graph, cfg.params, realization)


def _run_block(cfg: EnsembleConfig, start: int, stop: int) -> tuple[int, np.ndarray, np.ndarray | None]:
    backend, step = resolve_backend(cfg)
    times = cfg.grid.times()
    psi0 = uniform_state(cfg.graph.n)
    p_block = np.empty((stop - start, times.size))
    density = None
    if cfg.accumulate_density:
        density = np.zeros((times.size, cfg.graph.n, cfg.graph.n), dtype=np.complex128)
    for index in range(start, stop):
        try:
            schedule = _trajectory_schedule(cfg, index)
            if backend == "stepped":
                schedule = _stepped_schedule(schedule, step)
            p, states = _sweep_schedule(
                schedule, psi0, times, record_states=cfg.accumulate_density
            )
        except Exception as exc:
            raise RuntimeError(
                f"trajectory {index} (seed {trajectory_seed(cfg.seed, index)}) failed: {exc}"
            ) from exc
        p_block[index - start] = p
        if density is not None:
            density += states[:, :, None] * states[:, None, :].conj()
    return start, p_block, density


def run_ensemble(cfg: EnsembleConfig, workers: int | None = None) -> EnsembleTrace:
    """Average the noisy dynamics over ``cfg.trajectories`` realizations.

    The mean over trajectories of |<w|psi(t)>|^2 is exactly the target
    population of the ensemble-averaged density matrix, since averaging
    and taking that fixed matrix element commute. ``workers`` > 1 runs
    trajectory blocks in separate processes; the reduction is performed
    in trajectory-index order either way, so the result does not depend
    on scheduling.

    Any trajectory failure aborts the run; the error names the
    trajectory index and derived seed for standalone replay.
    """
    m = cfg.trajectories
    samples = cfg.grid.samples
    chunks = [(lo, min(lo + _CHUNK, m)) for lo in range(0, m, _CHUNK)]
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV_VAR, "1"))
    all_p = np.empty((m, samples))
    density_sum = None
    if workers > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_block, *zip(*[(cfg, lo, hi) for lo, hi in chunks])))
    else:
        results = [_run_block(cfg, lo, hi) for lo, hi in chunks]
    results.sort(key=lambda item: item[0])
    for start, p_block, density in results:
        all_p[start : start + p_block.shape[0]] = p_block
        if density is not None:
            density_sum = density if density_sum is None else density_sum + density
    mean = all_p.mean(axis=0)
    if m > 1:
        stderr = all_p.std(axis=0, ddof=1) / math.sqrt(m)
    else:
        stderr = np.zeros(samples)
    trace = ProbabilityTrace(cfg.grid, np.minimum(mean, 1.0), stderr)
    return EnsembleTrace(
        trace,
        trajectories=m,
        seed=cfg.seed,
        density=None if density_sum is None else density_sum / m,
    )


def noiseless_reference(cfg: EnsembleConfig) -> ProbabilityTrace:
    """The nu=0 trace for the same graph, coupling, and grid."""
    from .hamiltonian import noiseless_hamiltonian
    from .propagator import evolve_static

    quiet = replace(cfg.params, nu=0.0)
    h = noiseless_hamiltonian(cfg.graph, quiet)
    return evolve_static(h, uniform_state(cfg.graph.n), cfg.grid, quiet.target)


def semi_static_oracle(g: Graph, p: SearchParameters, grid: TimeGrid) -> ProbabilityTrace:
    """Exact zero-switching-rate limit by enumerating all sign configurations.

    Every link holds a frozen sign, each of the 2**links equally likely
    patterns contributes one static evolution, and the traces are
    averaged. Brute force, so the link count is capped at 20.
    """
    links = g.num_links
    if links > 20:
        raise ValueError(f"{links} links would need 2^{links} configurations; cap is 20")
    times = grid.times()
    psi0 = uniform_state(g.n)
    total = np.zeros(times.size)
    n_cfg = 2**links
    codes = np.arange(n_cfg, dtype=np.int64)
    signs = ((codes[:, None] >> np.arange(links)) & 1).astype(np.int8) * 2 - 1
    chunk = max(1, 2_000_000 // (g.n * g.n))
    for lo in range(0, n_cfg, chunk):
        sub = signs[lo : lo + chunk]
        evals, evecs = np.linalg.eigh(segment_matrices(g, p, sub))
        for k in range(sub.shape[0]):
            coeffs = evecs[k].T @ psi0
            amps = np.exp(-1j * np.outer(times, evals[k])) @ (evecs[k][p.target] * coeffs)
            total += np.abs(amps) ** 2
    mean = np.minimum(total / n_cfg, 1.0)
    return ProbabilityTrace(grid, mean, np.zeros_like(mean))
