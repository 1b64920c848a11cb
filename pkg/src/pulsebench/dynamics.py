"""Piecewise-constant time propagation of states and unitaries.

Control fields are stored with the left-endpoint convention: sample ``k``
holds on the interval ``[t_k, t_{k+1})``.  Each interval is propagated by
the exact exponential of the frozen Hamiltonian, so unitarity (and trace /
coherence-length preservation) is limited only by the eigendecomposition,
not by the step size.  Step-size error therefore lives entirely in how well
the piecewise-constant field approximates an intended smooth one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, RepresentationError
from .operators import (
    ControlSystem,
    Operator,
    PauliBasis,
    adjoint_generators,
    batched_unitaries,
    expm_hermitian,
)
from .states import BlochVector, DensityMatrix, PureState, State


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid of ``steps`` intervals covering [t0, tf]."""

    t0: float
    tf: float
    steps: int

    def __post_init__(self):
        if not self.tf > self.t0:
            raise ValueError(f"tf={self.tf} must exceed t0={self.t0}")
        if self.steps < 1:
            raise ValueError("grid needs at least one step")

    @property
    def dt(self) -> float:
        return (self.tf - self.t0) / self.steps

    @property
    def points(self) -> np.ndarray:
        """All steps+1 grid points, t0 through tf."""
        return self.t0 + self.dt * np.arange(self.steps + 1)

    @property
    def interval_starts(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.steps)


@dataclass(frozen=True)
class ControlField:
    """Per-channel piecewise-constant samples on a time grid."""

    grid: TimeGrid
    samples: np.ndarray  # shape (channels, steps)

    def __post_init__(self):
        s = np.atleast_2d(np.asarray(self.samples, dtype=float))
        object.__setattr__(self, "samples", s)
        if s.shape[1] != self.grid.steps:
            raise DimensionError(
                f"field has {s.shape[1]} samples per channel, grid has {self.grid.steps} steps"
            )
        if not np.all(np.isfinite(s)):
            raise ValueError("field samples contain non-finite values")

    @property
    def channels(self) -> int:
        return self.samples.shape[0]

    @classmethod
    def zero(cls, grid: TimeGrid, channels: int = 1) -> "ControlField":
        return cls(grid, np.zeros((channels, grid.steps)))

    @classmethod
    def from_function(cls, grid: TimeGrid, func, channels: int = 1) -> "ControlField":
        """Sample ``func(t)`` at interval left endpoints (vectorized or scalar)."""
        t = grid.interval_starts
        vals = np.asarray(func(t), dtype=float)
        if vals.ndim == 1:
            vals = np.tile(vals, (channels, 1))
        return cls(grid, vals)


@dataclass(frozen=True)
class Trajectory:
    """Time-indexed states (or operators), chronological, steps+1 entries."""

    grid: TimeGrid
    states: tuple
    representation: str  # pure | density | bloch | unitary

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        if len(self.states) != self.grid.steps + 1:
            raise DimensionError("trajectory must hold one state per grid point")

    @property
    def final(self):
        return self.states[-1]

    @property
    def initial(self):
        return self.states[0]


def _check_dissipator(dissipator):
    if dissipator is not None:
        raise NotImplementedError(
            "dissipative evolution is not implemented; the hook only reserves the interface"
        )


def _check_field(system: ControlSystem, field: ControlField):
    if field.channels != system.channel_count:
        raise DimensionError(
            f"field drives {field.channels} channels, system has {system.channel_count}"
        )


def step_unitaries(system: ControlSystem, field: ControlField) -> list:
    """Interval propagators U_k = exp(-i H[f(t_k)] dt), k = 0..steps-1."""
    dt = field.grid.dt
    out = []
    for k in range(field.grid.steps):
        h = system.hamiltonian(field.samples[:, k])
        out.append(expm_hermitian(h, scale=-1j * dt))
    return out


def _ordered_product(us: np.ndarray) -> np.ndarray:
    """Product us[K-1] @ ... @ us[0] by pairwise (log-depth) reduction."""
    while us.shape[0] > 1:
        k = us.shape[0]
        paired = np.matmul(us[1 : k - k % 2 : 2], us[0 : k - k % 2 : 2])
        if k % 2:
            us = np.concatenate([paired, us[-1:]])
        else:
            us = paired
    return us[0]


def evolution_operator(system: ControlSystem, field: ControlField,
                       chunk: int = 8192) -> Operator:
    """Total propagator U(tf) without storing the trajectory.

    Builds the interval exponentials in vectorized batches and multiplies
    them with a pairwise tree, which is orders of magnitude faster than a
    per-step Python loop on long grids; used heavily by pulse calibration.
    """
    _check_field(system, field)
    dt = field.grid.dt
    h0 = system.drift.matrix
    h1s = np.array([c.matrix for c in system.controls])
    n = system.dim
    u_total = np.eye(n, dtype=complex)
    for start in range(0, field.grid.steps, chunk):
        f = field.samples[:, start : start + chunk]
        h = h0[None, :, :] + np.einsum("mk,mij->kij", f, h1s)
        us = batched_unitaries(h, dt)
        u_total = _ordered_product(us) @ u_total
    return Operator(u_total, unitary=True)


def propagate(
    system: ControlSystem,
    field: ControlField,
    initial: State,
    direction: str = "forward",
    basis: PauliBasis | None = None,
    dissipator=None,
    affine_term=None,
) -> Trajectory:
    """Propagate a state through a piecewise-constant field.

    Pure states are advanced by ``c <- U_k c``, density matrices by
    ``rho <- U_k rho U_k^dagger`` and coherence vectors by the orthogonal
    propagator ``exp(A[f_k] dt)``.  ``direction="backward"`` solves the
    final-value problem: ``initial`` is the state at ``tf`` and the inverse
    interval propagators are applied from tf down to t0.  The returned
    trajectory is always chronological (index 0 is t0).

    ``dissipator`` and ``affine_term`` reserve the open-system interface;
    passing either raises ``NotImplementedError``.
    """
    _check_dissipator(dissipator)
    if affine_term is not None:
        raise NotImplementedError("affine coherence-vector term (dissipative) is not implemented")
    _check_field(system, field)
    if direction not in ("forward", "backward"):
        raise ValueError(f"unknown direction {direction!r}")
    if isinstance(initial, BlochVector):
        if basis is None:
            raise RepresentationError("coherence-vector propagation requires the Pauli basis")
        return _propagate_bloch(system, field, initial, direction, basis)
    if isinstance(initial, PureState):
        return _propagate_pure(system, field, initial, direction)
    if isinstance(initial, DensityMatrix):
        return _propagate_density(system, field, initial, direction)
    raise RepresentationError(f"cannot propagate {type(initial).__name__}")


def _propagate_pure(system, field, initial, direction):
    if initial.dim != system.dim:
        raise DimensionError("initial state dimension differs from system dimension")
    dt = field.grid.dt
    steps = field.grid.steps
    states = [None] * (steps + 1)
    if direction == "forward":
        c = initial.amplitudes
        states[0] = initial
        for k in range(steps):
            u = expm_hermitian(system.hamiltonian(field.samples[:, k]), scale=-1j * dt)
            c = u @ c
            states[k + 1] = PureState(c)
    else:
        c = initial.amplitudes
        states[steps] = initial
        for k in range(steps - 1, -1, -1):
            u = expm_hermitian(system.hamiltonian(field.samples[:, k]), scale=-1j * dt)
            c = u.conj().T @ c
            states[k] = PureState(c)
    return Trajectory(field.grid, states, "pure")


def _propagate_density(system, field, initial, direction):
    if initial.dim != system.dim:
        raise DimensionError("initial state dimension differs from system dimension")
    dt = field.grid.dt
    steps = field.grid.steps
    states = [None] * (steps + 1)
    if direction == "forward":
        rho = initial.rho
        states[0] = initial
        for k in range(steps):
            u = expm_hermitian(system.hamiltonian(field.samples[:, k]), scale=-1j * dt)
            rho = u @ rho @ u.conj().T
            states[k + 1] = DensityMatrix(0.5 * (rho + rho.conj().T))
    else:
        rho = initial.rho
        states[steps] = initial
        for k in range(steps - 1, -1, -1):
            u = expm_hermitian(system.hamiltonian(field.samples[:, k]), scale=-1j * dt)
            rho = u.conj().T @ rho @ u
            states[k] = DensityMatrix(0.5 * (rho + rho.conj().T))
    return Trajectory(field.grid, states, "density")


def _propagate_bloch(system, field, initial, direction, basis):
    if initial.dim != system.dim:
        raise DimensionError("initial state dimension differs from system dimension")
    a0, ams = adjoint_generators(system, basis)
    dt = field.grid.dt
    steps = field.grid.steps
    states = [None] * (steps + 1)

    def ortho_step(k):
        a = a0.copy()
        for fm, am in zip(field.samples[:, k], ams):
            a += fm * am
        # A antisymmetric => iA Hermitian; exp(A dt) = exp(-i (iA) dt)
        return expm_hermitian(1j * a, scale=-1j * dt).real

    if direction == "forward":
        s = initial.components
        states[0] = initial
        for k in range(steps):
            s = ortho_step(k) @ s
            states[k + 1] = BlochVector(s, dim=initial.dim)
    else:
        s = initial.components
        states[steps] = initial
        for k in range(steps - 1, -1, -1):
            s = ortho_step(k).T @ s
            states[k] = BlochVector(s, dim=initial.dim)
    return Trajectory(field.grid, states, "bloch")


def propagate_unitary(system: ControlSystem, field: ControlField, dissipator=None) -> Trajectory:
    """Propagate the full evolution operator, U(t0) = I."""
    _check_dissipator(dissipator)
    _check_field(system, field)
    dt = field.grid.dt
    n = system.dim
    u = np.eye(n, dtype=complex)
    ops = [Operator(u, unitary=True)]
    for k in range(field.grid.steps):
        step = expm_hermitian(system.hamiltonian(field.samples[:, k]), scale=-1j * dt)
        u = step @ u
        ops.append(Operator(u, unitary=True))
    return Trajectory(field.grid, ops, "unitary")


def to_rotating_frame(traj: Trajectory, frame_generator: Operator) -> Trajectory:
    """Map each state by exp(+i G t) (interaction picture of ``G``).

    Pure and density trajectories only; convert coherence-vector
    trajectories explicitly first.
    """
    if traj.representation not in ("pure", "density"):
        raise RepresentationError(
            f"rotating frame needs a pure or density trajectory, got {traj.representation!r}"
        )
    g = frame_generator.matrix
    out = []
    for t, state in zip(traj.grid.points, traj.states):
        u = expm_hermitian(0.5 * (g + g.conj().T), scale=1j * t)
        if traj.representation == "pure":
            out.append(PureState(u @ state.amplitudes))
        else:
            rho = u @ state.rho @ u.conj().T
            out.append(DensityMatrix(0.5 * (rho + rho.conj().T)))
    return Trajectory(traj.grid, out, traj.representation)
