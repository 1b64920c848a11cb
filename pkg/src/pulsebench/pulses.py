"""Parametric pulses, grid sampling, fluence and spectrum analysis.

A :class:`PulseSpec` is an analytic description (envelope times cosine
carrier); :func:`sample_pulse` turns one or more specs into the
piecewise-constant :class:`~pulsebench.dynamics.ControlField` the
propagators consume.  Gaussian envelopes are truncated at three FWHM from
center and clamped to zero outside their support so that sequenced pulses
compose without tail overlap.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np

from .dynamics import ControlField, TimeGrid
from .errors import ResolutionError

GAUSSIAN_TRUNCATION_FWHM = 3.0
CARRIER_RESOLUTION_FACTOR = 5.0  # require dt < pi / (factor * omega)
PEAK_FLOOR_FRACTION = 0.05


@dataclass(frozen=True)
class PulseSpec:
    """Envelope * cos(carrier) pulse on a finite support.

    envelope: "square" or "gaussian".  Gaussian pulses need ``center`` and
    ``fwhm``; the square envelope fills the whole support.
    """

    envelope: str
    amplitude: float
    carrier_frequency: float = 0.0
    carrier_phase: float = 0.0
    t_start: float = 0.0
    t_end: float = 1.0
    center: float | None = None
    fwhm: float | None = None

    def __post_init__(self):
        if self.envelope not in ("square", "gaussian"):
            raise ValueError(f"unknown envelope {self.envelope!r}")
        if not self.t_end > self.t_start:
            raise ValueError("pulse support must have positive length")
        if self.envelope == "gaussian":
            if self.fwhm is None or self.fwhm <= 0:
                raise ValueError("gaussian envelope requires fwhm > 0")
            if self.center is None:
                object.__setattr__(self, "center", 0.5 * (self.t_start + self.t_end))

    def envelope_values(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        inside = (t >= self.t_start) & (t < self.t_end)
        if self.envelope == "square":
            return np.where(inside, self.amplitude, 0.0)
        arg = 4.0 * np.log(2.0) * (t - self.center) ** 2 / self.fwhm**2
        env = self.amplitude * np.exp(-arg)
        trunc = np.abs(t - self.center) <= GAUSSIAN_TRUNCATION_FWHM * self.fwhm
        return np.where(inside & trunc, env, 0.0)

    def values(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return self.envelope_values(t) * np.cos(self.carrier_frequency * t + self.carrier_phase)

    def envelope_area(self) -> float:
        """Analytic integral of the envelope over its support (tails ignored)."""
        if self.envelope == "square":
            return self.amplitude * (self.t_end - self.t_start)
        return self.amplitude * self.fwhm * np.sqrt(np.pi / (4.0 * np.log(2.0)))

    def to_json_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json_dict(cls, data: dict) -> "PulseSpec":
        return cls(**data)


def required_steps(grid_span: float, carrier_frequency: float) -> int:
    """Smallest step count satisfying the carrier resolution rule."""
    if carrier_frequency <= 0:
        return 1
    max_dt = np.pi / (CARRIER_RESOLUTION_FACTOR * carrier_frequency)
    return int(np.ceil(grid_span / max_dt))


def sample_pulse(specs, grid: TimeGrid) -> ControlField:
    """Sample one spec or a list of specs additively onto a single channel.

    The grid must resolve every carrier: ``dt < pi / (5 * omega)``.
    Samples use the left-endpoint convention of :class:`ControlField`.
    """
    if isinstance(specs, PulseSpec):
        specs = [specs]
    specs = list(specs)
    for spec in specs:
        omega = abs(spec.carrier_frequency)
        if omega > 0 and grid.dt >= np.pi / (CARRIER_RESOLUTION_FACTOR * omega):
            need = required_steps(grid.tf - grid.t0, omega)
            raise ResolutionError(
                f"grid dt={grid.dt:.6g} under-resolves carrier omega={omega:.6g}; "
                f"need at least {need} steps",
                required_steps=need,
            )
    t = grid.interval_starts
    total = np.zeros_like(t)
    for spec in specs:
        total = total + spec.values(t)
    return ControlField(grid, total[None, :])


def fluence(field: ControlField) -> float:
    """Integrated squared field, summed over channels.

    Exact for the stored piecewise-constant samples: every sample covers its
    full interval, so the integral is the plain rectangle sum.  The
    optimizer's energy penalty uses this same quantity, which keeps its
    bookkeeping exactly consistent with the reported fluence.
    """
    dt = field.grid.dt
    sq = field.samples**2
    return float(np.sum(sq) * dt)


def spectrum(field: ControlField):
    """One-sided DFT magnitude of each channel on the angular-frequency axis.

    Returns ``(omega, magnitudes, peaks)`` where ``omega`` has length
    ``steps//2 + 1``, ``magnitudes`` has shape ``(channels, len(omega))``
    with ``|DFT| * dt`` scaling, and ``peaks`` lists for every channel up to
    five local-maximum frequencies above 5% of that channel's global
    maximum, strongest first.
    """
    if field.grid.steps < 2:
        raise ValueError("spectrum needs at least 2 samples")
    dt = field.grid.dt
    nt = field.grid.steps
    mags = np.abs(np.fft.rfft(field.samples, axis=1)) * dt
    omega = 2.0 * np.pi * np.fft.rfftfreq(nt, d=dt)
    peaks = []
    for ch in range(mags.shape[0]):
        m = mags[ch]
        floor = PEAK_FLOOR_FRACTION * m.max() if m.max() > 0 else np.inf
        idx = [
            j
            for j in range(1, len(m) - 1)
            if m[j] >= m[j - 1] and m[j] > m[j + 1] and m[j] > floor
        ]
        if len(m) >= 2 and m[0] > m[1] and m[0] > floor:
            idx.append(0)
        idx.sort(key=lambda j: -m[j])
        peaks.append([(float(omega[j]), float(m[j])) for j in idx[:5]])
    return omega, mags, peaks


def spectral_second_moment(field: ControlField) -> float:
    """Magnitude-weighted second moment of the spectrum, summed over channels.

    A compact measure of spectral complexity: spiky pulses spread power to
    high frequencies and score larger.
    """
    omega, mags, _ = spectrum(field)
    power = mags**2
    total = power.sum()
    if total == 0:
        return 0.0
    return float((power * omega[None, :] ** 2).sum() / total)
