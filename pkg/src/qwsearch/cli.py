"""Command-line front end: traces, parameter sweeps, spectra, noise checks.

Every data command emits CSV with the full configuration echoed in
``#`` comment lines; identical invocations reproduce identical files.
Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 I/O failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

import numpy as np

from .analysis import extract_metrics
from .ensemble import (
    EnsembleConfig,
    WORKERS_ENV_VAR,
    noiseless_reference,
    resolve_backend,
    run_ensemble,
)
from .graph import Graph, complete_graph, load_edge_list, star_graph
from .hamiltonian import SearchParameters, default_gamma
from .propagator import TimeGrid, default_grid
from .rtn import autocorrelation_estimate, sample_trajectories, switch_count_chisquare
from .theory import asymptotic_trace, perturbed_pairs, reduce_star, reduction_error

GRAPH_KINDS = ("complete", "star-central", "star-external")


def _int_list(text: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from exc
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _float_list(text: str) -> list[float]:
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad float list {text!r}") from exc
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def build_graph(kind: str, n: int | None) -> Graph:
    """Resolve a --graph value: a named family or an edge-list path."""
    if kind in GRAPH_KINDS:
        if n is None:
            raise ValueError(f"--n is required for graph kind {kind!r}")
        if kind == "complete":
            return complete_graph(n)
        return star_graph(n, kind.removeprefix("star-"))
    path = Path(kind)
    if not path.exists():
        raise ValueError(f"unknown graph kind or missing edge-list file: {kind!r}")
    g = load_edge_list(path)
    if n is not None and n != g.n:
        raise ValueError(f"--n {n} does not match edge list order {g.n}")
    return g


def _fmt(x: float) -> str:
    return f"{x:.10g}"


def _write(out: str | None, lines: list[str]) -> None:
    text = "\n".join(lines) + "\n"
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _config_comments(args: argparse.Namespace, extra: dict) -> list[str]:
    pairs = {**{k: v for k, v in sorted(vars(args).items()) if k != "func"}, **extra}
    return ["# qwsearch " + args.command] + [f"# {key}={value}" for key, value in pairs.items()]


def _ensemble_for(args: argparse.Namespace, g: Graph, mu: float, nu: float) -> EnsembleConfig:
    params = SearchParameters.for_graph(g, nu=nu, gamma=args.gamma)
    grid = default_grid(g.n, samples=args.grid_samples, horizon_factor=args.horizon_factor)
    return EnsembleConfig(
        graph=g,
        params=params,
        rate=mu,
        trajectories=args.trajectories,
        seed=args.seed,
        grid=grid,
        backend=args.backend,
        step=args.step,
    )


def cmd_trace(args: argparse.Namespace) -> int:
    if len(args.n) != 1 or len(args.mu) != 1 or len(args.nu) != 1:
        raise ValueError("trace takes a single n, mu, and nu")
    g = build_graph(args.graph, args.n[0])
    cfg = _ensemble_for(args, g, args.mu[0], args.nu[0])
    result = run_ensemble(cfg, workers=args.workers)
    reference = noiseless_reference(cfg)
    backend, step = resolve_backend(cfg)
    lines = _config_comments(
        args, {"gamma_used": _fmt(cfg.params.gamma), "backend_used": backend, "step_used": step}
    )
    lines.append("t,p_mean,p_stderr,p_noiseless")
    times = cfg.grid.times()
    for k in range(times.size):
        lines.append(
            f"{_fmt(times[k])},{_fmt(result.trace.p[k])},"
            f"{_fmt(result.trace.stderr[k])},{_fmt(reference.p[k])}"
        )
    _write(args.out, lines)
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    lines = _config_comments(args, {})
    lines.append("N,mu,nu,gamma,p_succ,p_stderr,t_max,avg_T,M,seed")
    for n in args.n:
        g = build_graph(args.graph, n)
        for mu in args.mu:
            for nu in args.nu:
                cfg = _ensemble_for(args, g, mu, nu)
                metrics = extract_metrics(run_ensemble(cfg, workers=args.workers))
                lines.append(
                    ",".join(
                        [
                            str(g.n),
                            _fmt(mu),
                            _fmt(nu),
                            _fmt(cfg.params.gamma),
                            _fmt(metrics.p_succ),
                            _fmt(metrics.stderr_p),
                            _fmt(metrics.t_max),
                            _fmt(metrics.avg_running_time),
                            str(cfg.trajectories),
                            str(cfg.seed),
                        ]
                    )
                )
    _write(args.out, lines)
    return 0


def cmd_theory(args: argparse.Namespace) -> int:
    lines = _config_comments(args, {})
    lines.append("N,E0_exact,E1_exact,gap,overlap_lambda0,one_minus_psucc_pred,h_red_ok")
    for n in args.n:
        system = reduce_star(n)
        energies = np.linalg.eigvalsh(system.h_red)
        ok = 1 if reduction_error(n) < 1e-10 else 0
        if n >= 10:
            spectrum = perturbed_pairs(n)
            overlap = abs(spectrum.states_pred[0] @ spectrum.exact_states[:, 0])
            grid = default_grid(n, samples=args.grid_samples, horizon_factor=2.0)
            deficit = 1.0 - extract_metrics(asymptotic_trace(n, grid)).p_succ
            tail = f"{_fmt(overlap)},{_fmt(deficit)},{ok}"
        else:
            tail = f",,{ok}"
        lines.append(
            f"{n},{_fmt(energies[0])},{_fmt(energies[1])},"
            f"{_fmt(energies[1] - energies[0])},{tail}"
        )
    _write(args.out, lines)
    return 0


def cmd_rtn_check(args: argparse.Namespace) -> int:
    if args.count < 1000:
        raise ValueError("rtn-check needs at least 1000 trajectories")
    trajectories = sample_trajectories(args.count, args.mu, args.horizon, args.seed)
    lines = _config_comments(args, {})
    if args.mu > 0:
        statistic, p_value, dof = switch_count_chisquare(trajectories, args.mu)
        lines.append(f"switch-count chi-square: stat={_fmt(statistic)} dof={dof} p={_fmt(p_value)}")
    else:
        lines.append("switch-count chi-square: skipped (rate 0)")
    lines.append("tau,autocorr,expected,residual_sigma")
    scale = args.mu if args.mu > 0 else 1.0
    stderr = 1.0 / math.sqrt(args.count)
    for factor in (0.1, 0.5, 1.0):
        tau = factor / scale
        if tau >= args.horizon:
            continue
        estimate = autocorrelation_estimate(trajectories, tau)
        expected = math.exp(-2.0 * args.mu * tau)
        residual = (estimate - expected) / stderr
        lines.append(f"{_fmt(tau)},{_fmt(estimate)},{_fmt(expected)},{_fmt(residual)}")
    _write(args.out, lines)
    return 0


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", default="-", help="output path, or - for stdout")
    parser.add_argument("--seed", type=int, default=0, help="master seed")


def _add_ensemble_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--graph", required=True, help="complete | star-central | star-external | edge-list path")
    parser.add_argument("--n", type=_int_list, help="graph order, or comma list for sweeps")
    parser.add_argument("--mu", type=_float_list, required=True, help="switching rate(s)")
    parser.add_argument("--nu", type=_float_list, required=True, help="noise strength(s) in [0,1]")
    parser.add_argument("--gamma", type=float, default=None, help="coupling override (default: graph optimum)")
    parser.add_argument("--trajectories", type=int, default=10000, help="noise realizations per point")
    parser.add_argument("--grid-samples", type=int, default=1024)
    parser.add_argument("--horizon-factor", type=float, default=4.0, help="window in units of pi*sqrt(N)/2")
    parser.add_argument("--backend", choices=("exact", "stepped", "auto"), default="auto")
    parser.add_argument("--step", type=float, default=None, help="fixed step for the stepped backend")
    parser.add_argument(
        "--workers",
        type=int,
        default=int(os.environ.get(WORKERS_ENV_VAR, str(os.cpu_count() or 1))),
        help=f"worker processes (default: {WORKERS_ENV_VAR} or CPU count)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qwsearch",
        description="Quantum-walk spatial search with telegraph noise on the links.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_trace = sub.add_parser("trace", help="ensemble p_w(t) at one parameter point")
    _add_ensemble_flags(p_trace)
    _add_common(p_trace)
    p_trace.set_defaults(func=cmd_trace)

    p_sweep = sub.add_parser("sweep", help="success metrics over N/mu/nu grids")
    _add_ensemble_flags(p_sweep)
    _add_common(p_sweep)
    p_sweep.set_defaults(func=cmd_sweep)

    p_theory = sub.add_parser("theory", help="reduced star-graph spectrum vs order")
    p_theory.add_argument("--n", type=_int_list, required=True)
    p_theory.add_argument("--grid-samples", type=int, default=2048)
    _add_common(p_theory)
    p_theory.set_defaults(func=cmd_theory)

    p_rtn = sub.add_parser("rtn-check", help="telegraph-noise statistics self-test")
    p_rtn.add_argument("--mu", type=float, required=True)
    p_rtn.add_argument("--horizon", type=float, default=5.0)
    p_rtn.add_argument("--count", type=int, default=100000)
    _add_common(p_rtn)
    p_rtn.set_defaults(func=cmd_rtn_check)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"qwsearch: configuration error: {exc}", file=sys.stderr)
        return 2
    except (np.linalg.LinAlgError, FloatingPointError, RuntimeError) as exc:
        print(f"qwsearch: numerical failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"qwsearch: i/o failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    raise SystemExit(main())
