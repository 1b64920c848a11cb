"""Command-line front end.

Subcommands::

    design    run a designer (geometric | iterative | lyapunov) on a scenario
    simulate  replay a stored field against a system and summarize
    compare   tabulate figures of merit across completed run directories
    plot      render figures from a run directory's CSV/JSON artifacts

Every ``design`` run produces a self-describing directory: the field and
all reportable series as CSV, ``scenario.json`` (constants), ``metadata.json``
(the full run descriptor), ``summary.json`` (headline numbers), plus
``system.json``/``initial.json`` so the run can be replayed with
``simulate --run-dir``.  Exit codes: 0 success, 2 configuration error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import io as pbio
from .dynamics import ControlField, TimeGrid, propagate
from .errors import CalibrationError, ConfigError, NumericalError
from .geometric import design_bitflip_sequence, offresonance_report, plan_field, plan_grid
from .iterative import Objective, OptimConfig, optimize
from .lyapunov import KickSpec, LyapunovConfig, detect_plateaus, run_lyapunov, scan_kappa
from .operators import ControlSystem
from .pulses import fluence, spectral_second_moment, spectrum
from .scenarios import (
    bell_report_quantities,
    build_bell_scenario,
    build_qd_scenario,
    get_scenario,
    qd_excitation_series,
)
from .states import (
    BlochVector,
    DensityMatrix,
    PureState,
    bloch_to_density,
    density_to_bloch,
    phase_invariant_pure_distance,
    pure_to_density,
    state_from_json_dict,
    state_to_json_dict,
)
from .operators import build_pauli_basis

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _parse_targets(text: str):
    """1-based comma list from the command line to 0-based indices."""
    try:
        idx = [int(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise ConfigError(f"cannot parse --targets {text!r}") from exc
    if not idx:
        raise ConfigError("--targets must name at least one subsystem")
    return [i - 1 for i in idx]


def _ensure_outdir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_common(out: Path, scenario, field: ControlField, meta: dict):
    pbio.write_field_csv(out / "field.csv", field)
    omega, mags, peaks = spectrum(field)
    pbio.write_spectrum_csv(out / "spectrum.csv", omega, mags)
    meta = dict(meta)
    meta["version"] = __version__
    meta["spectral_peaks"] = peaks
    pbio.write_json(out / "metadata.json", meta)
    pbio.write_json(out / "scenario.json", scenario.constants_dict())
    pbio.write_json(out / "system.json", scenario.system.to_json_dict())
    pbio.write_json(out / "initial.json", state_to_json_dict(scenario.initial))
    return omega, mags


def _bell_trajectory_summary(scenario, field: ControlField, out: Path | None):
    """Propagate, write the population/coherence/distance series, summarize."""
    traj = propagate(scenario.system, field, scenario.initial)
    series = bell_report_quantities(traj, pure_to_density(scenario.design_target))
    if out is not None:
        pbio.write_series_csv(out / "trajectory.csv", series)
    final = traj.final
    summary = {
        "final_distance": float(series["distance"][-1]),
        "final_overlap": float(abs(np.vdot(scenario.design_target.amplitudes,
                                            final.amplitudes)) ** 2),
        "final_rho14_abs": float(series["rho14_abs"][-1]),
        "stated_target_distance": float(
            phase_invariant_pure_distance(final, scenario.target)
        ),
        "fluence": fluence(field),
        "spectral_second_moment": spectral_second_moment(field),
    }
    return summary


def _qd_trajectory_summary(scenario, field: ControlField, out: Path | None,
                           targets=(0, 2)):
    series = qd_excitation_series(scenario, field)
    if out is not None:
        pbio.write_series_csv(out / "trajectory.csv", series)
    finals = np.array([series[f"p_dot{k + 1}"][-1] for k in range(scenario.dot_count)])
    fid = np.array([finals[k] if k in targets else 1.0 - finals[k]
                    for k in range(scenario.dot_count)])
    # observable value under the per-dot convention
    diag = np.asarray(scenario.observable.matrix.diagonal().real)
    expect = 0.0
    for k in range(scenario.dot_count):
        block = diag[2 * k : 2 * k + 2]
        expect += block[0] * (1 - finals[k]) + block[1] * finals[k]
    summary = {
        "final_excitations": finals.tolist(),
        "per_dot_fidelity": fid.tolist(),
        "min_per_dot_fidelity": float(fid.min()),
        "per_dot_expectation_sum": float(expect),
        "fluence": fluence(field),
        "spectral_second_moment": spectral_second_moment(field),
    }
    return summary


def cmd_design(args) -> int:
    scenario = get_scenario(args.scenario)
    out = _ensure_outdir(args.out)
    meta = {
        "command": "design",
        "scenario": args.scenario,
        "method": args.method,
    }

    if args.method == "iterative":
        grid = TimeGrid(0.0, args.tf if args.tf else _default_tf(scenario),
                        args.nt if args.nt else _default_nt(scenario))
        cfg_kwargs = {}
        if args.alpha is not None:
            cfg_kwargs["alpha"] = args.alpha
        if args.beta is not None:
            cfg_kwargs["beta"] = args.beta
        if args.lam is not None:
            cfg_kwargs["lam"] = args.lam
        cfg = scenario.optim_config(grid, max_iterations=args.iters, **cfg_kwargs)
        objective = scenario.design_objective()
        field, log, _ = optimize(scenario.system, objective, cfg)
        meta.update(
            alpha=cfg.alpha, beta=cfg.beta, **{"lambda": cfg.lam},
            tf=grid.tf, nt=grid.steps, iterations=args.iters,
        )
        _write_common(out, scenario, field, meta)
        pbio.write_convergence_csv(out / "convergence.csv", log)
        summary = _summarize(scenario, field, out)
        summary["iterations_run"] = len(log) - 1
        summary["final_J"] = log.objective[-1]
        summary["final_figure_of_merit"] = log.figure_of_merit[-1]

    elif args.method == "geometric":
        if args.scenario != "qd5":
            raise ConfigError("the geometric designer ships for the qd5 scenario")
        targets = _parse_targets(args.targets) if args.targets else [0, 2]
        duration = args.duration
        if args.duration_ps is not None:
            from .scenarios import ps_to_internal

            duration = ps_to_internal(args.duration_ps)
        if duration is None:
            raise ConfigError("geometric design needs --duration or --duration-ps")
        plan = design_bitflip_sequence(
            scenario, targets, pulse_shape=args.pulse, pulse_duration=duration,
            simultaneous=args.simultaneous,
        )
        report = offresonance_report(plan, scenario, steps=args.nt)
        field = report["field"]
        meta.update(
            targets=[t + 1 for t in targets],
            pulse=args.pulse,
            duration=duration,
            simultaneous=args.simultaneous,
            plan=plan.to_json_dict(),
            calibrated_amplitudes=[p.amplitude for p in plan.pulses],
        )
        _write_common(out, scenario, field, meta)
        pbio.write_offresonance_csv(out / "offresonance.csv", report)
        summary = _summarize(scenario, field, out, targets=tuple(targets))
        summary["max_nontarget_excitation"] = float(
            max(report["excitation"][k] for k in range(scenario.dot_count)
                if k not in targets)
        )
        summary["min_target_transfer"] = float(
            min(report["excitation"][k] for k in targets)
        )

    elif args.method == "lyapunov":
        if args.scenario != "bell":
            raise ConfigError("the feedback designer ships for the bell scenario")
        from .scenarios import BELL_KICK_AMPLITUDE, BELL_KICK_FRACTION

        default_grid = scenario.lyapunov_grid()
        grid = TimeGrid(0.0, args.tf if args.tf else default_grid.tf,
                        args.nt if args.nt else default_grid.steps)
        if args.no_kick:
            kick = None
        else:
            if args.seed is None:
                raise ConfigError("the random kick needs an explicit --seed (or use --no-kick)")
            kick = KickSpec(
                duration=args.kick_duration
                if args.kick_duration is not None
                else BELL_KICK_FRACTION * (grid.tf - grid.t0),
                amplitude=args.kick_amplitude
                if args.kick_amplitude is not None
                else BELL_KICK_AMPLITUDE,
                seed=args.seed,
            )
        cfg = scenario.lyapunov_config(grid, kappa=args.kappa, kick=kick,
                                       representation=args.rep or "bloch")
        field, traj, v_series = run_lyapunov(scenario.system, cfg, scenario.initial)
        meta.update(
            kappa=cfg.kappa,
            representation=cfg.representation,
            tf=grid.tf,
            nt=grid.steps,
            kick=None if kick is None else {
                "duration": kick.duration, "amplitude": kick.amplitude, "seed": kick.seed,
            },
            plateaus=detect_plateaus(grid.points, v_series),
        )
        _write_common(out, scenario, field, meta)
        pbio.write_vseries_csv(out / "vseries.csv", grid.points, v_series)
        summary = _summarize(scenario, field, out)
        summary["initial_V"] = float(v_series[0])
        summary["post_kick_V"] = float(v_series[min(len(v_series) - 1, _kick_steps(kick, grid))])
        summary["final_V"] = float(v_series[-1])

    else:
        raise ConfigError(f"unknown method {args.method!r}")

    pbio.write_json(out / "summary.json", summary)
    if args.plot:
        from .plotting import render_run_directory

        render_run_directory(out)
    print(f"design written to {out}")
    return EXIT_OK


def _kick_steps(kick, grid):
    if kick is None:
        return 0
    return int(round(kick.duration / grid.dt))


def _default_tf(scenario):
    return scenario.default_grid().tf


def _default_nt(scenario):
    return scenario.default_grid().steps


def _summarize(scenario, field, out, targets=(0, 2)):
    if scenario.name == "bell":
        return _bell_trajectory_summary(scenario, field, out)
    return _qd_trajectory_summary(scenario, field, out, targets=targets)


def cmd_simulate(args) -> int:
    if args.run_dir:
        run = Path(args.run_dir)
        meta = pbio.read_json(run / "metadata.json")
        scenario = get_scenario(meta["scenario"])
        field = pbio.read_field_csv(run / "field.csv")
        out = _ensure_outdir(args.out) if args.out else None
        rep = args.rep or "pure"
        summary = _simulate_summary(scenario, field, rep)
        if out is not None:
            _summarize(scenario, field, out, targets=tuple(
                t - 1 for t in meta.get("targets", [1, 3])
            ))
            pbio.write_json(out / "summary.json", summary)
        print_summary(summary)
        return EXIT_OK

    if not (args.system and args.field and args.initial):
        raise ConfigError("simulate needs --run-dir, or --system + --field + --initial")
    system = ControlSystem.from_json_dict(pbio.read_json(args.system))
    field = pbio.read_field_csv(args.field)
    if args.nt is not None and field.grid.steps != args.nt:
        raise ConfigError(
            f"field file has {field.grid.steps} steps but --nt {args.nt} was requested"
        )
    initial = state_from_json_dict(pbio.read_json(args.initial))
    rep = args.rep or "pure"
    basis = build_pauli_basis(system.dim) if rep == "bloch" else None
    initial = _coerce_rep(initial, rep, basis)
    traj = propagate(system, field, initial, basis=basis)
    summary = {"fluence": fluence(field), "representation": rep}
    if args.target:
        target = state_from_json_dict(pbio.read_json(args.target))
        summary.update(_distance_summary(traj.final, target, rep, basis))
    if args.out:
        out = _ensure_outdir(args.out)
        _write_generic_trajectory(out / "trajectory.csv", traj)
        pbio.write_json(out / "summary.json", summary)
    print_summary(summary)
    return EXIT_OK


def _simulate_summary(scenario, field, rep):
    """Scenario summary in the requested representation."""
    summary = {"representation": rep, "fluence": fluence(field)}
    if scenario.name == "bell":
        basis = build_pauli_basis(4) if rep == "bloch" else None
        initial = _coerce_rep(scenario.initial, rep, basis)
        traj = propagate(scenario.system, field, initial, basis=basis)
        target = _coerce_rep(scenario.design_target, rep, basis)
        summary.update(_distance_summary(traj.final, target, rep, basis))
    else:
        summary.update(_qd_trajectory_summary(scenario, field, None))
    return summary


def _coerce_rep(state, rep, basis):
    if rep == "pure":
        if not isinstance(state, PureState):
            raise ConfigError("initial state is not pure; choose --rep density or bloch")
        return state
    if rep == "density":
        return state if isinstance(state, DensityMatrix) else pure_to_density(state)
    if rep == "bloch":
        if isinstance(state, BlochVector):
            return state
        rho = state if isinstance(state, DensityMatrix) else pure_to_density(state)
        return density_to_bloch(rho, basis)
    raise ConfigError(f"unknown representation {rep!r}")


def _distance_summary(final, target, rep, basis):
    from .states import state_distance

    if rep == "pure":
        return {
            "final_distance": float(
                np.sqrt(max(0.0, 2 - 2 * abs(np.vdot(target.amplitudes, final.amplitudes))))
            ),
            "final_overlap": float(abs(np.vdot(target.amplitudes, final.amplitudes)) ** 2),
        }
    if rep == "density":
        t = target if isinstance(target, DensityMatrix) else pure_to_density(target)
        return {
            "final_distance": float(state_distance(final, t)),
            "final_overlap": float(np.trace(t.rho @ final.rho).real),
        }
    t = target if isinstance(target, BlochVector) else density_to_bloch(
        target if isinstance(target, DensityMatrix) else pure_to_density(target), basis
    )
    overlap = float(np.dot(t.components, final.components) + 1.0 / final.dim)
    return {"final_distance": float(state_distance(final, t)), "final_overlap": overlap}


def _write_generic_trajectory(path, traj):
    cols = {"t": traj.grid.points}
    if traj.representation == "pure":
        dim = traj.states[0].dim
        for i in range(dim):
            cols[f"p{i + 1}"] = [abs(s.amplitudes[i]) ** 2 for s in traj.states]
    elif traj.representation == "density":
        dim = traj.states[0].dim
        for i in range(dim):
            cols[f"rho{i + 1}{i + 1}"] = [s.rho[i, i].real for s in traj.states]
    else:
        dim = len(traj.states[0].components)
        for i in range(min(dim, 16)):
            cols[f"s{i + 1}"] = [s.components[i] for s in traj.states]
    pbio.write_series_csv(path, cols)


def cmd_compare(args) -> int:
    rows = []
    scenarios = set()
    for run in args.runs:
        run = Path(run)
        meta = pbio.read_json(run / "metadata.json")
        summary = pbio.read_json(run / "summary.json")
        scenarios.add(meta["scenario"])
        row = {
            "run": str(run),
            "scenario": meta["scenario"],
            "method": meta["method"],
            "fluence": summary.get("fluence"),
            "spectral_second_moment": summary.get("spectral_second_moment"),
        }
        if meta["scenario"] == "bell":
            row["final_distance"] = summary.get("final_distance")
            row["time_to_threshold"] = _time_to_threshold(run, args.threshold)
        else:
            row["min_per_dot_fidelity"] = summary.get("min_per_dot_fidelity")
            row["max_nontarget_excitation"] = summary.get("max_nontarget_excitation")
        rows.append(row)
    if len(scenarios) > 1:
        raise ConfigError(f"cannot compare runs from different scenarios: {sorted(scenarios)}")

    out = _ensure_outdir(args.out)
    pbio.write_json(out / "comparison.json", {"threshold": args.threshold, "rows": rows})
    names = sorted({k for row in rows for k in row})
    import csv as _csv

    with (out / "comparison.csv").open("w", newline="") as fh:
        writer = _csv.DictWriter(fh, fieldnames=names)
        writer.writeheader()
        writer.writerows(rows)
    for row in rows:
        print(row)
    return EXIT_OK


def _time_to_threshold(run_dir: Path, threshold: float):
    traj = run_dir / "trajectory.csv"
    if not traj.exists():
        return None
    series = pbio.read_series_csv(traj)
    if "distance" not in series:
        return None
    d = series["distance"]
    t = series["t"]
    hits = np.nonzero(d <= threshold)[0]
    return float(t[hits[0]]) if hits.size else None


def cmd_plot(args) -> int:
    from .plotting import render_run_directory

    written = render_run_directory(args.run_dir)
    if not written:
        raise ConfigError(f"{args.run_dir}: no renderable artifacts found")
    for p in written:
        print(p)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pulsebench",
        description="design and benchmark control pulses for finite-dimensional quantum systems",
    )
    parser.add_argument("--version", action="version", version=f"pulsebench {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("design", help="run a pulse designer on a scenario")
    p.add_argument("--scenario", required=True, help="bell or qd5")
    p.add_argument("--method", required=True, choices=["geometric", "iterative", "lyapunov"])
    p.add_argument("--out", required=True, help="output run directory")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--tf", type=float, default=None, help="final time (internal units)")
    p.add_argument("--nt", type=int, default=None, help="grid steps")
    p.add_argument("--iters", type=int, default=500, help="iterative: iteration count")
    p.add_argument("--targets", default=None, help="geometric: 1-based dot list, e.g. 1,3")
    p.add_argument("--pulse", default="gaussian", choices=["gaussian", "square"])
    p.add_argument("--duration", type=float, default=None, help="per-pulse length (internal)")
    p.add_argument("--duration-ps", type=float, default=None, help="per-pulse length (ps)")
    p.add_argument("--simultaneous", action="store_true", help="overlap the pulses")
    p.add_argument("--kappa", type=float, default=None, help="lyapunov: gain (default: scan)")
    p.add_argument("--seed", type=int, default=None, help="lyapunov: kick seed")
    p.add_argument("--kick-duration", type=float, default=None)
    p.add_argument("--kick-amplitude", type=float, default=None)
    p.add_argument("--no-kick", action="store_true")
    p.add_argument("--rep", default=None, choices=["pure", "density", "bloch"])
    p.add_argument("--plot", action="store_true", help="render figures after the run")
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("simulate", help="replay a field file and summarize")
    p.add_argument("--run-dir", default=None, help="completed design directory to replay")
    p.add_argument("--system", default=None, help="system JSON file")
    p.add_argument("--field", default=None, help="field CSV file")
    p.add_argument("--initial", default=None, help="initial state JSON file")
    p.add_argument("--target", default=None, help="optional target state JSON file")
    p.add_argument("--rep", default=None, choices=["pure", "density", "bloch"])
    p.add_argument("--nt", type=int, default=None, help="expected grid steps (consistency check)")
    p.add_argument("--out", default=None, help="optional output directory")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="compare completed run directories")
    p.add_argument("runs", nargs="+", help="two or more run directories")
    p.add_argument("--out", required=True)
    p.add_argument("--threshold", type=float, default=0.2,
                   help="distance threshold for time-to-threshold")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("plot", help="render figures from a run directory")
    p.add_argument("run_dir")
    p.set_defaults(func=cmd_plot)
    return parser


def print_summary(summary: dict):
    for key in sorted(summary):
        print(f"{key}: {summary[key]}")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage, which matches the config-error code
        return int(exc.code) if exc.code else 0
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (CalibrationError, NumericalError, NotImplementedError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
