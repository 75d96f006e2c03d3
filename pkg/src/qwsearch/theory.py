"""Three-level reduction of star-graph search with an external target.

With unit coupling, the walk started from the uniform state never
leaves the span of the hub state |c>, the target state |w>, and the
symmetric combination of the remaining leaves. The full search
Hamiltonian restricted to that invariant subspace is a 3x3 matrix whose
two low-lying eigenvalues approach -1/sqrt(N) and +1/sqrt(N) for large
order N, with eigenvectors approaching (|w> +/- |e1>)/sqrt(2); the
resulting two-level beat transfers the walker onto the target after a
time pi*sqrt(N)/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .propagator import ProbabilityTrace, TimeGrid

# Reduced coordinates: index 0 = hub, 1 = target leaf, 2 = symmetric rest.
_HUB, _TARGET, _REST = 0, 1, 2


@dataclass(frozen=True)
class ReducedStarSystem:
    """3x3 invariant-subspace Hamiltonian and its embedding in node space."""

    n: int
    h_red: np.ndarray
    basis: np.ndarray  # (3, n) orthonormal rows

    def project(self, state: np.ndarray) -> np.ndarray:
        """Reduced coordinates of a full-space state."""
        return self.basis @ state

    def leakage(self, state: np.ndarray) -> float:
        """Norm of the state component outside the invariant subspace."""
        inside = self.basis.T @ (self.basis @ state)
        return float(np.linalg.norm(state - inside))


@dataclass(frozen=True)
class PerturbativeSpectrum:
    """Perturbative low-lying eigenpairs next to the exact 3x3 solution.

    Predicted energies are -1/sqrt(n) and +1/sqrt(n); predicted states
    are (|w> +/- |e1>)/sqrt(2) in reduced coordinates. ``h0_*`` hold the
    unperturbed spectrum, ``exact_*`` the dense 3x3 eigenpairs (ascending,
    eigenvectors in columns).
    """

    n: int
    energies_pred: np.ndarray  # (2,)
    states_pred: np.ndarray  # (2, 3) rows
    h0_energies: np.ndarray  # (3,)
    h0_states: np.ndarray  # (3, 3) columns
    exact_energies: np.ndarray  # (3,)
    exact_states: np.ndarray  # (3, 3) columns

    @property
    def gap_pred(self) -> float:
        return float(self.energies_pred[1] - self.energies_pred[0])

    @property
    def gap_exact(self) -> float:
        return float(self.exact_energies[1] - self.exact_energies[0])


def reduce_star(n: int) -> ReducedStarSystem:
    """Reduced Hamiltonian for order n, hub at node 0 and target at node 1."""
    if n < 3:
        raise ValueError("reduction needs n >= 3")
    root = math.sqrt(n - 2)
    h_red = np.array(
        [
            [n - 1.0, -1.0, -root],
            [-1.0, 0.0, 0.0],
            [-root, 0.0, 1.0],
        ]
    )
    basis = np.zeros((3, n))
    basis[_HUB, 0] = 1.0
    basis[_TARGET, 1] = 1.0
    basis[_REST, 2:] = 1.0 / root
    return ReducedStarSystem(n, h_red, basis)


def uniform_reduced(n: int) -> np.ndarray:
    """The uniform full-space state in reduced coordinates."""
    return np.array([1.0, 1.0, math.sqrt(n - 2)]) / math.sqrt(n)


def h0_matrix(n: int) -> np.ndarray:
    """Unperturbed part of h_red / n: the order-one hub block."""
    b = math.sqrt(n - 2) / n
    return np.array([[1.0, 0.0, -b], [0.0, 0.0, 0.0], [-b, 0.0, 0.0]])


def h1_matrix(n: int) -> np.ndarray:
    """Perturbation h_red / n - h0: all entries of order 1/n."""
    return np.array([[-1.0 / n, -1.0 / n, 0.0], [-1.0 / n, 0.0, 0.0], [0.0, 0.0, 1.0 / n]])


def h0_spectrum(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form spectrum of the unperturbed block.

    Returns (energies, vectors): energy 0 with the bare target state, and
    (1 -/+ sqrt(1 + 4/n - 8/n^2))/2 with vectors proportional to
    -sqrt(n)*E*|hub> + |rest> (their large-n form; normalized here).
    Vectors are columns, ordered (e0, e1, e2).
    """
    if n < 3:
        raise ValueError("spectrum needs n >= 3")
    disc = math.sqrt(1.0 + 4.0 / n - 8.0 / n**2)
    e1 = (1.0 - disc) / 2.0
    e2 = (1.0 + disc) / 2.0
    energies = np.array([0.0, e1, e2])
    vectors = np.zeros((3, 3))
    vectors[_TARGET, 0] = 1.0
    for col, energy in ((1, e1), (2, e2)):
        v = np.array([-math.sqrt(n) * energy, 0.0, 1.0])
        vectors[:, col] = v / np.linalg.norm(v)
    return energies, vectors


def perturbed_pairs(n: int) -> PerturbativeSpectrum:
    """Leading-order eigenpairs of the search generator at large order."""
    if n < 10:
        raise ValueError("perturbative pairing needs n >= 10")
    h0_energies, h0_states = h0_spectrum(n)
    e1_vec = h0_states[:, 1]
    w_vec = h0_states[:, 0]
    states_pred = np.vstack([(w_vec + e1_vec), (w_vec - e1_vec)]) / math.sqrt(2.0)
    energies_pred = np.array([-1.0, 1.0]) / math.sqrt(n)
    exact_energies, exact_states = np.linalg.eigh(reduce_star(n).h_red)
    return PerturbativeSpectrum(
        n=n,
        energies_pred=energies_pred,
        states_pred=states_pred,
        h0_energies=h0_energies,
        h0_states=h0_states,
        exact_energies=exact_energies,
        exact_states=exact_states,
    )


def apply_full_hamiltonian(n: int, state: np.ndarray) -> np.ndarray:
    """Matrix-free action of the unit-coupling star search Hamiltonian.

    Hub at node 0, target at node 1. O(n) per application, so reduction
    checks stay cheap at orders where the dense matrix would not fit.
    """
    out = np.empty_like(state, dtype=np.result_type(state, float))
    out[0] = (n - 1) * state[0] - state[1:].sum()
    out[1:] = state[1:] - state[0]
    out[1] -= state[1]
    return out


def reduction_error(n: int) -> float:
    """Worst-case mismatch between the 3x3 reduction and the full operator.

    Checks that the full Hamiltonian maps each basis vector into the
    subspace and that its projection reproduces h_red.
    """
    system = reduce_star(n)
    images = np.vstack([apply_full_hamiltonian(n, row) for row in system.basis])
    err = float(np.abs(system.basis @ images.T - system.h_red).max())
    for row in images:
        err = max(err, system.leakage(row) / max(np.linalg.norm(row), 1.0))
    return err


def asymptotic_trace(n: int, grid: TimeGrid) -> ProbabilityTrace:
    """Two-level prediction for the target probability.

    Uses the exact low-lying eigenpairs of the reduced 3x3 Hamiltonian
    and drops the high-lying third level, whose weight in the uniform
    state is O(1/n).
    """
    if n < 10:
        raise ValueError("asymptotic trace needs n >= 10")
    system = reduce_star(n)
    energies, states = np.linalg.eigh(system.h_red)
    start = uniform_reduced(n)
    times = grid.times()
    amps = np.zeros(times.size, dtype=np.complex128)
    for i in range(2):
        weight = states[:, i] @ start
        amps += np.exp(-1j * energies[i] * times) * (weight * states[_TARGET, i])
    p = np.minimum(np.abs(amps) ** 2, 1.0)
    return ProbabilityTrace(grid, p, np.zeros_like(p))
