"""Search Hamiltonians, noiseless and noisy.

The noiseless generator is ``gamma * L - |w><w|`` for Laplacian L and
target node w. Under link noise the Laplacian becomes time dependent:
a link (j, k) carrying sign g contributes weight 1 + nu*g, and the
diagonal compensates so every column still sums to zero (classical
probability conservation). At nu=1 a link with g=-1 is fully removed
and one with g=+1 is doubled: dynamical percolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import Graph, laplacian
from .rtn import NoiseRealization, merged_breakpoints, value_at


@dataclass(frozen=True)
class SearchParameters:
    """Coupling gamma, noise strength nu in [0, 1], and target node."""

    gamma: float
    nu: float
    target: int

    def __post_init__(self) -> None:
        if not (math.isfinite(self.gamma) and self.gamma >= 0):
            raise ValueError("gamma must be finite and >= 0")
        if not (0.0 <= self.nu <= 1.0):
            raise ValueError("nu must lie in [0, 1]")
        if self.target < 0:
            raise ValueError("target must be a node index")

    @classmethod
    def for_graph(cls, g: Graph, nu: float = 0.0, gamma: float | None = None) -> "SearchParameters":
        """Parameters with the graph's target and, unless given, its optimal gamma."""
        return cls(default_gamma(g) if gamma is None else gamma, nu, g.target)


def _is_complete(g: Graph) -> bool:
    return g.num_links == g.n * (g.n - 1) // 2


def _star_hub(g: Graph) -> int | None:
    """Hub index if the graph is a star, else None."""
    deg = g.degrees()
    hubs = np.flatnonzero(deg == g.n - 1)
    if g.n >= 3 and hubs.size == 1 and np.sum(deg == 1) == g.n - 1:
        return int(hubs[0])
    return None


def default_gamma(g: Graph) -> float:
    """Optimal noiseless coupling: 1/n on the complete graph and on the
    star with central target, 1 on the star with an external target."""
    if _is_complete(g):
        return 1.0 / g.n
    hub = _star_hub(g)
    if hub is not None:
        return 1.0 / g.n if g.target == hub else 1.0
    raise ValueError("no default coupling for this graph; pass gamma explicitly")


def oracle_projector(n: int, target: int) -> np.ndarray:
    p = np.zeros((n, n))
    p[target, target] = 1.0
    return p


def noiseless_hamiltonian(g: Graph, p: SearchParameters) -> np.ndarray:
    """gamma * L - |w><w| as a real symmetric matrix."""
    if p.target >= g.n:
        raise ValueError("target outside graph")
    return p.gamma * laplacian(g) - oracle_projector(g.n, p.target)


def noisy_laplacian(g: Graph, r: NoiseRealization, nu: float, t: float) -> np.ndarray:
    """Laplacian at time t with link (j,k) reweighted by 1 + nu*g_jk(t)."""
    if r.link_order != g.edges:
        raise ValueError("realization was sampled for a different graph")
    if not (0.0 <= nu <= 1.0):
        raise ValueError("nu must lie in [0, 1]")
    lap = np.zeros((g.n, g.n))
    for (i, j), tr in zip(g.edges, r.trajectories):
        w = 1.0 + nu * value_at(tr, t)
        lap[i, j] -= w
        lap[j, i] -= w
        lap[i, i] += w
        lap[j, j] += w
    return lap


@dataclass(eq=False)
class HamiltonianSchedule:
    """Piecewise-constant noisy Hamiltonian over one noise realization.

    ``breakpoints`` has K+1 sorted times from 0 to the horizon; segment i
    is constant on [breakpoints[i], breakpoints[i+1]) with link signs
    ``link_signs[i]``. Matrices are materialized on demand so that high
    event counts do not pin K full matrices in memory at once.
    """

    graph: Graph
    params: SearchParameters
    breakpoints: np.ndarray
    link_signs: np.ndarray
    rate: float

    @property
    def horizon(self) -> float:
        return float(self.breakpoints[-1])

    @property
    def num_segments(self) -> int:
        return len(self.breakpoints) - 1

    def matrices(self, start: int = 0, stop: int | None = None) -> np.ndarray:
        """Segment Hamiltonians [start, stop) stacked as a (k, n, n) array."""
        return segment_matrices(self.graph, self.params, self.link_signs[start:stop])

    def matrix(self, index: int) -> np.ndarray:
        if not (0 <= index < self.num_segments):
            raise IndexError(f"segment {index} outside [0, {self.num_segments})")
        return self.matrices(index, index + 1)[0]


def segment_matrices(g: Graph, p: SearchParameters, signs: np.ndarray) -> np.ndarray:
    """Hamiltonians gamma*L(signs) - |w><w| for a (k, links) sign batch."""
    n = g.n
    ii = np.fromiter((i for i, _ in g.edges), dtype=np.intp, count=g.num_links)
    jj = np.fromiter((j for _, j in g.edges), dtype=np.intp, count=g.num_links)
    weights = p.gamma * (1.0 + p.nu * signs.astype(np.float64))  # (k, links)
    incidence = np.zeros((g.num_links, n))
    incidence[np.arange(g.num_links), ii] = 1.0
    incidence[np.arange(g.num_links), jj] = 1.0
    out = np.zeros((signs.shape[0], n, n))
    out[:, ii, jj] = -weights
    out[:, jj, ii] = -weights
    diag = np.arange(n)
    out[:, diag, diag] = weights @ incidence
    out[:, p.target, p.target] -= 1.0
    return out


def build_schedule(g: Graph, p: SearchParameters, r: NoiseRealization) -> HamiltonianSchedule:
    """Assemble the piecewise-constant Hamiltonian for one realization.

    Segment boundaries are the merged switch times; signs are evaluated
    at each segment start (switches act right-continuously).
    """
    if r.link_order != g.edges:
        raise ValueError("realization was sampled for a different graph")
    bps = merged_breakpoints(r)
    starts = bps[:-1]
    signs = np.empty((starts.size, g.num_links), dtype=np.int8)
    for idx, tr in enumerate(r.trajectories):
        flips = np.searchsorted(tr.switch_times, starts, side="right")
        signs[:, idx] = tr.initial_sign * (1 - 2 * (flips & 1))
    return HamiltonianSchedule(g, p, bps, signs, r.rate)
