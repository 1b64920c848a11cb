"""Single-pass pulse design by instantaneous descent of a quadratic potential.

The potential is the squared distance to a drift-evolved target trajectory.
In the coherence-vector picture, a system ``ds/dt = (A0 + f A1) s`` tracking
``ds_d/dt = A0 s_d`` admits the explicit law

    ``f(t) = kappa * s_d(t)^T A1 s(t)``,   kappa > 0,

which makes ``V = ||s - s_d||^2`` non-increasing: both A-matrices are
antisymmetric, so the drift terms cancel and ``dV/dt = -2 f^2 / kappa``.

The law is evaluated on the model state, the resulting sample is held for
one grid interval, and the realized samples are recorded -- the output is an
ordinary open-loop pulse that plain propagation reproduces exactly.

Initial states with a vanishing law (e.g. a control matrix element of zero
between target and initial state) stall at ``f = 0``; a short seeded random
kick at the start of the window is the supported way out.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import ControlField, TimeGrid, Trajectory
from .errors import ConfigError, DimensionError, RepresentationError
from .operators import ControlSystem, PauliBasis, adjoint_generators, build_pauli_basis, expm_hermitian
from .states import (
    BlochVector,
    DensityMatrix,
    PureState,
    State,
    density_to_bloch,
    pure_to_density,
    state_distance,
)

STALL_FIELD_EPS = 1e-14
STALL_STEPS = 100


@dataclass(frozen=True)
class KickSpec:
    """Seeded uniform random samples in [-amplitude, amplitude] on [t0, t0+duration]."""

    duration: float
    amplitude: float
    seed: int

    def __post_init__(self):
        if self.duration < 0 or self.amplitude < 0:
            raise ConfigError("kick duration and amplitude must be non-negative")


@dataclass(frozen=True)
class LyapunovConfig:
    kappa: float
    grid: TimeGrid
    target: State
    representation: str = "bloch"
    kick: KickSpec | None = None

    def __post_init__(self):
        if not self.kappa > 0:
            raise ConfigError("kappa must be positive")
        if self.representation not in ("bloch", "density", "pure"):
            raise ConfigError(f"unknown representation {self.representation!r}")
        if self.kick is not None and self.kick.duration >= self.grid.tf - self.grid.t0:
            raise ConfigError("kick must be shorter than the full window")


def lyapunov_potential(state: State, target: State) -> float:
    """Squared representation-norm distance to the target."""
    return state_distance(state, target) ** 2


def control_law(s: np.ndarray, s_d: np.ndarray, a1: np.ndarray, kappa: float) -> float:
    """kappa * s_d^T A1 s; zero whenever s = s_d by antisymmetry of A1."""
    s = np.asarray(s, dtype=float)
    s_d = np.asarray(s_d, dtype=float)
    if s.shape != s_d.shape or a1.shape != (s.size, s.size):
        raise DimensionError("control law operands have inconsistent shapes")
    return float(kappa * (s_d @ a1 @ s))


def target_trajectory(target: State, system: ControlSystem, grid: TimeGrid,
                      basis: PauliBasis | None = None):
    """Drift-evolved target states at every grid point, in the target's rep."""
    if isinstance(target, BlochVector):
        if basis is None:
            basis = build_pauli_basis(system.dim)
        a0, _ = adjoint_generators(system, basis)
        step = expm_hermitian(1j * a0, scale=-1j * grid.dt).real
        out = [target]
        s = target.components
        for _ in range(grid.steps):
            s = step @ s
            out.append(BlochVector(s, dim=target.dim))
        return out
    if isinstance(target, PureState):
        step = expm_hermitian(system.drift.matrix, scale=-1j * grid.dt)
        out = [target]
        c = target.amplitudes
        for _ in range(grid.steps):
            c = step @ c
            out.append(PureState(c))
        return out
    if isinstance(target, DensityMatrix):
        step = expm_hermitian(system.drift.matrix, scale=-1j * grid.dt)
        out = [target]
        rho = target.rho
        for _ in range(grid.steps):
            rho = step @ rho @ step.conj().T
            out.append(DensityMatrix(0.5 * (rho + rho.conj().T)))
        return out
    raise RepresentationError(f"cannot evolve target of type {type(target).__name__}")


def _kick_samples(kick: KickSpec | None, grid: TimeGrid):
    """(n_kick_steps, samples) for the leading kick window."""
    if kick is None or kick.duration == 0.0 or kick.amplitude == 0.0:
        n = 0 if kick is None or kick.duration == 0.0 else int(round(kick.duration / grid.dt))
        return n, np.zeros(n)
    n = int(round(kick.duration / grid.dt))
    n = min(n, grid.steps)
    rng = np.random.Generator(np.random.PCG64(kick.seed))
    return n, rng.uniform(-kick.amplitude, kick.amplitude, size=n)


def run_lyapunov(system: ControlSystem, config: LyapunovConfig, initial: State,
                 stall_warn=None):
    """Integrate the closed loop and record the realized open-loop pulse.

    Returns ``(field, trajectory, v_series)``.  ``v_series`` is an array of
    length steps+1 with the potential at every grid point.  Outside the kick
    window the recorded field is the explicit law evaluated at each interval
    start.  A vanishing law with the potential still large triggers the
    ``stall_warn`` callback once (degenerate initial state; configure a
    kick).
    """
    if system.channel_count != 1:
        raise ConfigError("the explicit law drives a single control channel")
    grid = config.grid
    rep = config.representation
    n_kick, kick_vals = _kick_samples(config.kick, grid)

    if rep == "bloch":
        basis = build_pauli_basis(system.dim)
        a0, ams = adjoint_generators(system, basis)
        a1 = ams[0]
        state = _to_rep(initial, rep, basis)
        target = _to_rep(config.target, rep, basis)
        targets = target_trajectory(target, system, grid, basis)

        def law(s, sd):
            return control_law(s.components, sd.components, a1, config.kappa)

        def step(s, f):
            a = a0 + f * a1
            m = expm_hermitian(1j * a, scale=-1j * grid.dt).real
            return BlochVector(m @ s.components, dim=s.dim)

    else:
        basis = None
        h1 = system.controls[0].matrix
        state = _to_rep(initial, rep, basis)
        target = _to_rep(config.target, rep, basis)
        targets = target_trajectory(target, system, grid)

        if rep == "density":
            def law(rho, rho_d):
                z = np.trace(rho_d.rho @ (h1 @ rho.rho - rho.rho @ h1))
                return float(config.kappa * (-1j * z).real)

            def step(rho, f):
                u = expm_hermitian(system.hamiltonian([f]), scale=-1j * grid.dt)
                m = u @ rho.rho @ u.conj().T
                return DensityMatrix(0.5 * (m + m.conj().T))

        else:
            # amplitude-vector variant of the law (phase-sensitive potential)
            def law(psi, psi_d):
                return float(config.kappa * np.vdot(psi_d.amplitudes, h1 @ psi.amplitudes).imag)

            def step(psi, f):
                u = expm_hermitian(system.hamiltonian([f]), scale=-1j * grid.dt)
                return PureState(u @ psi.amplitudes)

    samples = np.zeros(grid.steps)
    states = [state]
    v_series = np.empty(grid.steps + 1)
    v_series[0] = lyapunov_potential(state, targets[0])
    stall_run = 0
    stalled = False
    for k in range(grid.steps):
        if k < n_kick:
            f = float(kick_vals[k])
        else:
            f = law(state, targets[k])
            if abs(f) < STALL_FIELD_EPS and v_series[k] > 1e-9:
                stall_run += 1
                if stall_run >= STALL_STEPS and not stalled:
                    stalled = True
                    if stall_warn is not None:
                        stall_warn(
                            "control law vanished for "
                            f"{STALL_STEPS} consecutive steps with V={v_series[k]:.3e}; "
                            "the target-control matrix element is degenerate, configure a kick"
                        )
            else:
                stall_run = 0
        samples[k] = f
        state = step(state, f)
        states.append(state)
        v_series[k + 1] = lyapunov_potential(state, targets[k + 1])

    field = ControlField(grid, samples[None, :])
    traj = Trajectory(grid, states, rep)
    return field, traj, v_series


def _to_rep(state: State, rep: str, basis: PauliBasis | None):
    if rep == "bloch":
        if isinstance(state, BlochVector):
            return state
        if isinstance(state, PureState):
            state = pure_to_density(state)
        return density_to_bloch(state, basis)
    if rep == "density":
        if isinstance(state, DensityMatrix):
            return state
        if isinstance(state, PureState):
            return pure_to_density(state)
        raise RepresentationError("convert coherence vectors to density explicitly first")
    if isinstance(state, PureState):
        return state
    raise RepresentationError("the amplitude-vector law needs pure initial and target states")


def detect_plateaus(times: np.ndarray, v_series: np.ndarray, min_fraction: float = 0.05,
                    max_relative_drop: float = 0.01):
    """Maximal intervals where V decreases by less than a relative fraction.

    An interval [t_i, t_j] qualifies when it spans at least ``min_fraction``
    of the full window and ``V_i - V_j < max_relative_drop * V_i``.  Returns
    a list of (t_start, t_end) pairs, merged to maximal extent.
    """
    times = np.asarray(times, dtype=float)
    v = np.asarray(v_series, dtype=float)
    span = times[-1] - times[0]
    min_len = min_fraction * span
    plateaus = []
    i = 0
    n = len(times)
    while i < n - 1:
        j = i
        vi = v[i]
        floor = vi - max_relative_drop * abs(vi)
        while j + 1 < n and v[j + 1] >= floor:
            j += 1
        if times[j] - times[i] >= min_len:
            plateaus.append((float(times[i]), float(times[j])))
            i = j + 1
        else:
            i += 1
    merged = []
    for p in plateaus:
        if merged and p[0] <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], p[1]))
        else:
            merged.append(p)
    return merged


def scan_kappa(system: ControlSystem, grid: TimeGrid, target: State, initial: State,
               kick: KickSpec | None, candidates=None, fraction: float = 0.1):
    """Pick kappa from a coarse log grid by greatest V-drop early in the window.

    Integrates the closed loop over the leading ``fraction`` of the window
    for each candidate and returns the kappa with the largest decrease
    ``V(0) - V(t_frac)``.
    """
    if candidates is None:
        candidates = np.logspace(-2, 1, 7)
    steps = max(2, int(round(grid.steps * fraction)))
    sub = TimeGrid(grid.t0, grid.t0 + steps * grid.dt, steps)
    best_kappa, best_drop = float(candidates[0]), -np.inf
    for kappa in candidates:
        cfg = LyapunovConfig(kappa=float(kappa), grid=sub, target=target, kick=kick)
        _, _, v = run_lyapunov(system, cfg, initial)
        drop = v[0] - v[-1]
        if drop > best_drop:
            best_drop, best_kappa = drop, float(kappa)
    return best_kappa
