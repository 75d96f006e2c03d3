"""Continuous-time quantum-walk spatial search on graphs with link telegraph noise."""

from .analysis import ScalingFit, SearchMetrics, expected_trials, extract_metrics, fit_scaling
from .ensemble import (
    EnsembleConfig,
    EnsembleTrace,
    noiseless_reference,
    run_ensemble,
    semi_static_oracle,
    trajectory_seed,
)
from .graph import Graph, complete_graph, laplacian, load_edge_list, star_graph
from .hamiltonian import (
    HamiltonianSchedule,
    SearchParameters,
    build_schedule,
    default_gamma,
    noiseless_hamiltonian,
    noisy_laplacian,
)
from .propagator import (
    ProbabilityTrace,
    TimeGrid,
    default_grid,
    evolve_schedule_exact,
    evolve_schedule_stepped,
    evolve_static,
    uniform_state,
)
from .rtn import (
    LinkTrajectory,
    NoiseRealization,
    autocorrelation_estimate,
    merged_breakpoints,
    sample_realization,
    sample_trajectories,
    value_at,
)
from .theory import (
    PerturbativeSpectrum,
    ReducedStarSystem,
    asymptotic_trace,
    h0_spectrum,
    perturbed_pairs,
    reduce_star,
)

__version__ = "0.1.0"
