"""Figure rendering for run directories.

Every plot function takes arrays (or a run directory) and writes a PNG next
to the delimited output it visualizes.  Rendering is strictly a consumer of
the CSV/JSON artifacts: numbers on disk stay the source of truth.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from . import io as pbio

FIGSIZE = (7.0, 4.2)
DPI = 150


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)
    return Path(path)


def plot_field(path, field, title="control field"):
    fig, ax = plt.subplots(figsize=FIGSIZE)
    t = field.grid.interval_starts
    for m in range(field.channels):
        ax.plot(t, field.samples[m], lw=0.8, label=f"f{m + 1}" if field.channels > 1 else None)
    ax.set_xlabel("t")
    ax.set_ylabel("f(t)")
    ax.set_title(title)
    if field.channels > 1:
        ax.legend()
    return _save(fig, path)


def plot_spectrum(path, omega, magnitudes, title="field spectrum"):
    fig, ax = plt.subplots(figsize=FIGSIZE)
    for ch in range(magnitudes.shape[0]):
        ax.plot(omega, magnitudes[ch], lw=0.9,
                label=f"channel {ch + 1}" if magnitudes.shape[0] > 1 else None)
    ax.set_xlabel("angular frequency")
    ax.set_ylabel("|F|")
    ax.set_title(title)
    if magnitudes.shape[0] > 1:
        ax.legend()
    return _save(fig, path)


def plot_bell_trajectory(path, series, title="populations and coherence"):
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7.0, 6.0), sharex=True)
    t = series["t"]
    for k in range(1, 5):
        ax1.plot(t, series[f"rho{k}{k}"], lw=0.9, label=rf"$\rho_{{{k}{k}}}$")
    ax1.plot(t, series["rho14_abs"], "k--", lw=1.1, label=r"$|\rho_{14}|$")
    ax1.set_ylabel("population / coherence")
    ax1.legend(ncol=3, fontsize=8)
    ax1.set_title(title)
    ax2.plot(t, series["distance"], "C3", lw=1.0)
    ax2.set_ylabel("distance to target")
    ax2.set_xlabel("t")
    return _save(fig, path)


def plot_qd_trajectory(path, series, title="per-dot excited populations"):
    fig, ax = plt.subplots(figsize=FIGSIZE)
    t = series["t"]
    for name in series:
        if name.startswith("p_dot"):
            ax.plot(t, series[name], lw=0.9, label=name.replace("p_dot", "dot "))
    ax.set_xlabel("t")
    ax.set_ylabel("excited population")
    ax.set_ylim(-0.02, 1.02)
    ax.legend(ncol=3, fontsize=8)
    ax.set_title(title)
    return _save(fig, path)


def plot_convergence(path, log_columns, title="iterative convergence"):
    fig, ax = plt.subplots(figsize=FIGSIZE)
    it = log_columns["iter"]
    ax.plot(it, log_columns["J"], lw=1.0, label="J")
    ax.plot(it, log_columns["figure_of_merit"], lw=1.0, label="terminal figure")
    ax.set_xlabel("iteration")
    ax.set_ylabel("objective")
    ax.legend()
    ax.set_title(title)
    return _save(fig, path)


def plot_vseries(path, times, v_series, title="descent potential"):
    fig, ax = plt.subplots(figsize=FIGSIZE)
    ax.plot(times, v_series, lw=1.0)
    ax.set_xlabel("t")
    ax.set_ylabel("V(t)")
    ax.set_title(title)
    return _save(fig, path)


def plot_offresonance(path, report, title="final per-dot excitation"):
    fig, ax = plt.subplots(figsize=FIGSIZE)
    dots = np.arange(1, len(report["excitation"]) + 1)
    colors = ["C3" if (d - 1) in report["targets"] else "C0" for d in dots]
    ax.bar(dots, report["excitation"], color=colors)
    ax.set_xlabel("dot")
    ax.set_ylabel("excited population")
    ax.set_xticks(dots)
    ax.set_ylim(0, 1.05)
    ax.set_title(title + "  (red = targets)")
    return _save(fig, path)


def render_run_directory(run_dir) -> list:
    """Render every figure the artifacts in ``run_dir`` support.

    Reads only the CSV/JSON files; returns the list of written PNG paths.
    """
    run_dir = Path(run_dir)
    written = []
    field_csv = run_dir / "field.csv"
    if field_csv.exists():
        field = pbio.read_field_csv(field_csv)
        written.append(plot_field(run_dir / "field.png", field))
    spec_csv = run_dir / "spectrum.csv"
    if spec_csv.exists():
        omega, mags = pbio.read_spectrum_csv(spec_csv)
        written.append(plot_spectrum(run_dir / "spectrum.png", omega, mags))
    traj_csv = run_dir / "trajectory.csv"
    if traj_csv.exists():
        series = pbio.read_series_csv(traj_csv)
        if "rho14_abs" in series:
            written.append(plot_bell_trajectory(run_dir / "trajectory.png", series))
        elif any(n.startswith("p_dot") for n in series):
            written.append(plot_qd_trajectory(run_dir / "trajectory.png", series))
    conv_csv = run_dir / "convergence.csv"
    if conv_csv.exists():
        cols = pbio.read_series_csv(conv_csv)
        written.append(plot_convergence(run_dir / "convergence.png", cols))
    v_csv = run_dir / "vseries.csv"
    if v_csv.exists():
        cols = pbio.read_series_csv(v_csv)
        written.append(plot_vseries(run_dir / "vseries.png", cols["t"], cols["V"]))
    off_csv = run_dir / "offresonance.csv"
    if off_csv.exists():
        cols = pbio.read_series_csv(off_csv)
        report = {
            "excitation": cols["excitation"],
            "infidelity": cols["infidelity"],
            "targets": (),
        }
        meta = run_dir / "metadata.json"
        if meta.exists():
            targets = pbio.read_json(meta).get("targets")
            if targets:
                report["targets"] = tuple(int(t) for t in targets)
        written.append(plot_offresonance(run_dir / "offresonance.png", report))
    return [str(p) for p in written]
