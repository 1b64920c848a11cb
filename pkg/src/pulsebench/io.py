"""Delimited and JSON file formats shared by the CLI and the test suite.

All numeric CSV output carries 17 significant digits (round-trip exact for
float64).  ControlField CSV is the contract format: header ``t,f1,...,fM``,
one row per interval start (left-endpoint convention), so a file with Nt
rows describes Nt piecewise-constant intervals; the grid end point is the
last time plus one spacing.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .dynamics import ControlField, TimeGrid
from .errors import ConfigError

FLOAT_FMT = "%.17g"


def _fmt(x) -> str:
    return FLOAT_FMT % float(x)


def write_field_csv(path, field: ControlField):
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t"] + [f"f{m + 1}" for m in range(field.channels)])
        for k, t in enumerate(field.grid.interval_starts):
            writer.writerow([_fmt(t)] + [_fmt(v) for v in field.samples[:, k]])


def read_field_csv(path) -> ControlField:
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if not header or header[0] != "t":
            raise ConfigError(f"{path}: not a field CSV (header must start with 't')")
        channels = len(header) - 1
        times = []
        rows = []
        for row in reader:
            if not row:
                continue
            times.append(float(row[0]))
            rows.append([float(v) for v in row[1:]])
    if len(times) < 1:
        raise ConfigError(f"{path}: field CSV has no samples")
    times = np.asarray(times)
    if len(times) == 1:
        raise ConfigError(f"{path}: cannot infer grid spacing from a single row")
    dts = np.diff(times)
    if np.max(np.abs(dts - dts[0])) > 1e-9 * max(abs(dts[0]), 1e-300):
        raise ConfigError(f"{path}: field CSV times are not uniformly spaced")
    dt = float(dts[0])
    grid = TimeGrid(float(times[0]), float(times[0]) + dt * len(times), len(times))
    samples = np.asarray(rows, dtype=float).T
    if samples.shape[0] != channels:
        raise ConfigError(f"{path}: row width disagrees with header")
    return ControlField(grid, samples)


def write_series_csv(path, columns: dict):
    """Write named 1-D arrays of equal length as CSV columns."""
    path = Path(path)
    names = list(columns)
    arrays = [np.asarray(columns[n]).ravel() for n in names]
    length = len(arrays[0])
    for n, a in zip(names, arrays):
        if len(a) != length:
            raise ConfigError(f"series column {n!r} has length {len(a)} != {length}")
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(names)
        for i in range(length):
            writer.writerow([_fmt(a[i]) for a in arrays])


def read_series_csv(path) -> dict:
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        cols = {name: [] for name in header}
        for row in reader:
            if not row:
                continue
            for name, val in zip(header, row):
                cols[name].append(float(val))
    return {name: np.asarray(vals) for name, vals in cols.items()}


def write_convergence_csv(path, log):
    write_series_csv(
        path,
        {
            "iter": np.asarray(log.iterations, dtype=float),
            "J": log.objective,
            "figure_of_merit": log.figure_of_merit,
            "fluence": log.fluence,
        },
    )


def write_vseries_csv(path, times, v_series):
    write_series_csv(path, {"t": times, "V": v_series})


def write_spectrum_csv(path, omega, magnitudes):
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["omega", "channel", "magnitude"])
        for ch in range(magnitudes.shape[0]):
            for w, m in zip(omega, magnitudes[ch]):
                writer.writerow([_fmt(w), str(ch + 1), _fmt(m)])


def read_spectrum_csv(path):
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        omega, chans, mags = [], [], []
        for row in reader:
            if not row:
                continue
            omega.append(float(row[0]))
            chans.append(int(row[1]))
            mags.append(float(row[2]))
    omega = np.asarray(omega)
    chans = np.asarray(chans)
    mags = np.asarray(mags)
    n_ch = chans.max()
    per = [mags[chans == c + 1] for c in range(n_ch)]
    return omega[chans == 1], np.vstack(per)


def write_json(path, data: dict):
    path = Path(path)
    with path.open("w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path) -> dict:
    with Path(path).open() as fh:
        return json.load(fh)


def write_offresonance_csv(path, report):
    """Per-dot excitation/infidelity table: ``dot,excitation,infidelity``."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["dot", "excitation", "infidelity"])
        for k, (exc, inf) in enumerate(zip(report["excitation"], report["infidelity"])):
            writer.writerow([str(k + 1), _fmt(exc), _fmt(inf)])
