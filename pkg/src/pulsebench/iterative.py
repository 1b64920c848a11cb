"""Monotonically convergent iterative pulse optimization.

The scheme alternates a *final-value* sweep for a costate (an observable or
adjoint state propagated backward from its terminal condition) with an
*initial-value* sweep for the system state, updating the control field
inside each sweep:

* backward sweep, interval k+1 -> k:
  ``f~[k] = (1 - beta) f[k] + (beta / lam) g(costate[k+1], state[k+1])``
  then step the costate back with the frozen field ``f~[k]``;
* forward sweep, interval k -> k+1:
  ``f'[k] = (1 - alpha) f~[k] + (alpha / lam) g(costate[k], state[k])``
  then step the state forward with ``f'[k]``,

where ``g`` is the representation-specific pairing of
:func:`gradient_kernel` and the stored trajectory from the opposite sweep
supplies the missing argument.  With ``0 <= alpha, beta < 2`` the objective

    ``J = <terminal figure> - lam * fluence``

is non-decreasing for the exactly integrated scheme; the piecewise-constant
discretization used here preserves that in practice to well below 1e-9
relative per accepted iteration (the per-criterion tolerance used by the
test suite).

For terminal observables with negative eigenvalues the backward terminal
condition on *amplitude-vector* sweeps is built from the spectrum-shifted
operator ``A + c I`` (smallest shift making it positive semidefinite).  The
shift adds a state-independent constant to the terminal figure, so logged
objective *differences* -- and hence monotonicity -- are unaffected, while
the convergence guarantee applies.  Commutator (density/gate) sweeps are
exactly invariant under such shifts and use the operator as given.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .dynamics import ControlField, TimeGrid
from .errors import ConfigError, DimensionError
from .operators import ControlSystem, Operator, batched_unitaries
from .states import DensityMatrix, PureState, State
from .pulses import fluence
from . import _fast2


@dataclass(frozen=True)
class Objective:
    """What the optimizer drives toward.

    kind:
        ``observable`` -- maximize ``<A_F>`` at the final time;
        ``state_overlap`` -- maximize overlap with a pure target
        (internally the projector observable onto the target);
        ``gate`` -- maximize ``Re Tr(U_target^dagger U(t_F)) / N``.

    ``blocks`` declares a direct-sum structure (list of sub-dimensions) for
    uncoupled subsystems sharing the control field: every block is
    propagated with its own normalized amplitude vector and the terminal
    figure is the *sum* of per-block expectations.
    """

    kind: str
    initial: State | Operator | None
    terminal: Operator | State
    blocks: tuple | None = None

    def __post_init__(self):
        if self.kind not in ("observable", "state_overlap", "gate"):
            raise ConfigError(f"unknown objective kind {self.kind!r}")
        if self.kind == "observable" and not self.terminal.hermitian:
            raise ConfigError("observable objective requires a Hermitian terminal operator")
        if self.blocks is not None:
            object.__setattr__(self, "blocks", tuple(int(b) for b in self.blocks))


@dataclass(frozen=True)
class OptimConfig:
    """Iteration parameters; ``0 <= alpha, beta < 2`` and ``lam > 0``."""

    alpha: float
    beta: float
    lam: float
    grid: TimeGrid
    max_iterations: int
    trial_field: ControlField
    objective_tolerance: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.alpha < 2.0):
            raise ConfigError(f"alpha={self.alpha} outside [0, 2)")
        if not (0.0 <= self.beta < 2.0):
            raise ConfigError(f"beta={self.beta} outside [0, 2)")
        if not self.lam > 0:
            raise ConfigError("lam must be positive")
        if self.max_iterations < 0:
            raise ConfigError("max_iterations must be >= 0")
        if self.trial_field.grid != self.grid:
            raise ConfigError("trial field must live on the configured grid")


@dataclass
class ConvergenceLog:
    """Per-iteration objective records; row 0 is the trial field."""

    iterations: list = dataclass_field(default_factory=list)
    objective: list = dataclass_field(default_factory=list)
    figure_of_merit: list = dataclass_field(default_factory=list)
    fluence: list = dataclass_field(default_factory=list)

    def append(self, iteration, j, fom, flu):
        self.iterations.append(int(iteration))
        self.objective.append(float(j))
        self.figure_of_merit.append(float(fom))
        self.fluence.append(float(flu))

    def rows(self):
        return list(zip(self.iterations, self.objective, self.figure_of_merit, self.fluence))

    def __len__(self):
        return len(self.iterations)


def gradient_kernel(kind: str, costate, state, h_m: np.ndarray) -> float:
    """Real field-update pairing for one channel at one instant.

    ``Im <chi|H_m|psi>`` for amplitude vectors, ``Re(-i Tr(A_v [H_m, rho]))``
    for density matrices, ``Re(-i Tr(U_A^dagger H_m U_S))`` for gate sweeps.
    These are the exact functional derivatives of the terminal figure in
    their respective formulations, except that the amplitude-vector pairing
    carries half the derivative (the quadratic terminal figure contributes
    twice); lam values are therefore per-formulation.
    """
    if kind in ("pure", "state_overlap"):
        return float(np.vdot(costate, h_m @ state).imag)
    if kind in ("density", "observable"):
        z = np.trace(costate @ (h_m @ state - state @ h_m))
        return float((-1j * z).real)
    if kind == "gate":
        z = np.trace(costate.conj().T @ h_m @ state)
        return float((-1j * z).real)
    raise ConfigError(f"unknown kernel kind {kind!r}")


class _AmplitudeSweeps:
    """Pure-state sweeps over one or more direct-sum blocks sharing the field."""

    def __init__(self, h0_stack, h1_stack, initial, terminal_raw, terminal_shifted):
        self.h0 = h0_stack            # (B, d, d)
        self.h1 = h1_stack            # (M, B, d, d)
        self.initial = initial        # (B, d)
        self.a_raw = terminal_raw     # (B, d, d)
        self.a_shift = terminal_shifted
        self.state_traj = None
        self.costate_traj = None

    def allocate(self, steps):
        b, d = self.initial.shape
        self.state_traj = np.empty((steps + 1, b, d), dtype=complex)
        self.costate_traj = np.empty((steps + 1, b, d), dtype=complex)

    def _kernel(self, costate, state):
        z = np.einsum("bi,mbij,bj->m", costate.conj(), self.h1, state)
        return z.imag

    def _step(self, f, dt):
        h = self.h0 + np.einsum("m,mbij->bij", f, self.h1)
        return batched_unitaries(h, dt)

    def initial_forward(self, samples, dt):
        psi = self.initial.copy()
        self.state_traj[0] = psi
        for k in range(samples.shape[1]):
            u = self._step(samples[:, k], dt)
            psi = np.einsum("bij,bj->bi", u, psi)
            self.state_traj[k + 1] = psi

    def backward_sweep(self, f_old, f_tilde, beta, lam, dt):
        steps = f_old.shape[1]
        chi = np.einsum("bij,bj->bi", self.a_shift, self.state_traj[steps])
        self.costate_traj[steps] = chi
        for k in range(steps - 1, -1, -1):
            g = self._kernel(chi, self.state_traj[k + 1])
            f_tilde[:, k] = (1.0 - beta) * f_old[:, k] + (beta / lam) * g
            u = self._step(f_tilde[:, k], dt)
            chi = np.einsum("bji,bj->bi", u.conj(), chi)
            self.costate_traj[k] = chi

    def forward_sweep(self, f_tilde, f_new, alpha, lam, dt):
        steps = f_tilde.shape[1]
        psi = self.initial.copy()
        self.state_traj[0] = psi
        for k in range(steps):
            g = self._kernel(self.costate_traj[k], psi)
            f_new[:, k] = (1.0 - alpha) * f_tilde[:, k] + (alpha / lam) * g
            u = self._step(f_new[:, k], dt)
            psi = np.einsum("bij,bj->bi", u, psi)
            self.state_traj[k + 1] = psi

    def figure_of_merit(self):
        psi = self.state_traj[-1]
        vals = np.einsum("bi,bij,bj->b", psi.conj(), self.a_raw, psi)
        return float(vals.real.sum())

    def final_states(self):
        return [PureState(v) for v in self.state_traj[-1]]


def _pauli_components(h_stack):
    """(a, v1, v2, v3) arrays for a (B, 2, 2) Hermitian stack: h = a I + v.sigma."""
    a = 0.5 * (h_stack[:, 0, 0] + h_stack[:, 1, 1]).real
    v3 = 0.5 * (h_stack[:, 0, 0] - h_stack[:, 1, 1]).real
    v1 = h_stack[:, 0, 1].real
    v2 = -h_stack[:, 0, 1].imag
    return a, v1, v2, v3


class _AmplitudeSweeps2(_AmplitudeSweeps):
    """Two-level specialization: step unitaries from precomputed Pauli parts.

    The Hamiltonian of every block is linear in the channel values, so its
    Pauli decomposition is a cheap affine update per step; the closed-form
    SU(2) exponential and the state/costate updates then run on flat (B,)
    component arrays with no per-step matrix assembly.  When numba is
    importable the whole sweep loop runs compiled (identical arithmetic).
    """

    def __init__(self, h0_stack, h1_stack, initial, terminal_raw, terminal_shifted):
        super().__init__(h0_stack, h1_stack, initial, terminal_raw, terminal_shifted)
        self._c0 = _pauli_components(h0_stack)
        self._c1 = [_pauli_components(h) for h in h1_stack]
        # control matrix entries, flattened per channel for the kernel
        self._h1_elems = [
            (h[:, 0, 0], h[:, 0, 1], h[:, 1, 0], h[:, 1, 1]) for h in h1_stack
        ]
        # packed copies for the compiled kernels
        self._comps0 = np.ascontiguousarray(np.array(self._c0))            # (4, B)
        self._comps1 = np.ascontiguousarray(np.array([np.array(c) for c in self._c1]))  # (M, 4, B)
        m, b = h1_stack.shape[0], h1_stack.shape[1]
        h1e = np.empty((m, b, 4), dtype=complex)
        for i, h in enumerate(h1_stack):
            h1e[i, :, 0] = h[:, 0, 0]
            h1e[i, :, 1] = h[:, 0, 1]
            h1e[i, :, 2] = h[:, 1, 0]
            h1e[i, :, 3] = h[:, 1, 1]
        self._h1e = h1e

    def _unitary_parts(self, f, dt):
        a, v1, v2, v3 = (c.copy() for c in self._c0)
        for fm, (a1, w1, w2, w3) in zip(f, self._c1):
            a += fm * a1
            v1 += fm * w1
            v2 += fm * w2
            v3 += fm * w3
        w = np.sqrt(v1 * v1 + v2 * v2 + v3 * v3)
        phase = np.exp(-1j * a * dt)
        c = np.cos(w * dt)
        sw = dt * np.sinc(w * dt / np.pi)
        isw = -1j * sw
        u00 = phase * (c + isw * v3)
        u11 = phase * (c - isw * v3)
        u01 = phase * isw * (v1 - 1j * v2)
        u10 = phase * isw * (v1 + 1j * v2)
        return u00, u01, u10, u11

    def _kernel2(self, chi0, chi1, psi0, psi1):
        out = np.empty(len(self._h1_elems))
        for m, (e00, e01, e10, e11) in enumerate(self._h1_elems):
            z = np.conj(chi0) * (e00 * psi0 + e01 * psi1) + np.conj(chi1) * (
                e10 * psi0 + e11 * psi1
            )
            out[m] = z.sum().imag
        return out

    def initial_forward(self, samples, dt):
        if _fast2.HAVE_NUMBA:
            psi = np.ascontiguousarray(self.initial)
            _fast2.forward_fixed(samples, dt, self._comps0, self._comps1, psi, self.state_traj)
            return
        psi0 = self.initial[:, 0].copy()
        psi1 = self.initial[:, 1].copy()
        st = self.state_traj
        st[0, :, 0], st[0, :, 1] = psi0, psi1
        for k in range(samples.shape[1]):
            u00, u01, u10, u11 = self._unitary_parts(samples[:, k], dt)
            psi0, psi1 = u00 * psi0 + u01 * psi1, u10 * psi0 + u11 * psi1
            st[k + 1, :, 0], st[k + 1, :, 1] = psi0, psi1

    def backward_sweep(self, f_old, f_tilde, beta, lam, dt):
        steps = f_old.shape[1]
        psi_t = self.state_traj[steps]
        chi = np.einsum("bij,bj->bi", self.a_shift, psi_t)
        if _fast2.HAVE_NUMBA:
            _fast2.backward_update(
                f_old, f_tilde, beta, lam, dt, self._comps0, self._comps1,
                self._h1e, np.ascontiguousarray(chi), self.state_traj, self.costate_traj,
            )
            return
        chi0, chi1 = chi[:, 0].copy(), chi[:, 1].copy()
        ct = self.costate_traj
        ct[steps, :, 0], ct[steps, :, 1] = chi0, chi1
        st = self.state_traj
        for k in range(steps - 1, -1, -1):
            g = self._kernel2(chi0, chi1, st[k + 1, :, 0], st[k + 1, :, 1])
            f_tilde[:, k] = (1.0 - beta) * f_old[:, k] + (beta / lam) * g
            u00, u01, u10, u11 = self._unitary_parts(f_tilde[:, k], dt)
            # chi <- U^dagger chi
            chi0, chi1 = (
                np.conj(u00) * chi0 + np.conj(u10) * chi1,
                np.conj(u01) * chi0 + np.conj(u11) * chi1,
            )
            ct[k, :, 0], ct[k, :, 1] = chi0, chi1

    def forward_sweep(self, f_tilde, f_new, alpha, lam, dt):
        steps = f_tilde.shape[1]
        if _fast2.HAVE_NUMBA:
            psi = np.ascontiguousarray(self.initial)
            _fast2.forward_update(
                f_tilde, f_new, alpha, lam, dt, self._comps0, self._comps1,
                self._h1e, psi, self.state_traj, self.costate_traj,
            )
            return
        psi0 = self.initial[:, 0].copy()
        psi1 = self.initial[:, 1].copy()
        st = self.state_traj
        ct = self.costate_traj
        st[0, :, 0], st[0, :, 1] = psi0, psi1
        for k in range(steps):
            g = self._kernel2(ct[k, :, 0], ct[k, :, 1], psi0, psi1)
            f_new[:, k] = (1.0 - alpha) * f_tilde[:, k] + (alpha / lam) * g
            u00, u01, u10, u11 = self._unitary_parts(f_new[:, k], dt)
            psi0, psi1 = u00 * psi0 + u01 * psi1, u10 * psi0 + u11 * psi1
            st[k + 1, :, 0], st[k + 1, :, 1] = psi0, psi1


class _CommutatorSweeps:
    """Density-matrix sweeps: state rho forward, observable A_v backward."""

    def __init__(self, h0, h1_list, rho0, a_f):
        self.h0 = h0
        self.h1 = np.array(h1_list)   # (M, d, d)
        self.rho0 = rho0
        self.a_f = a_f
        self.state_traj = None
        self.costate_traj = None

    def allocate(self, steps):
        d = self.rho0.shape[0]
        self.state_traj = np.empty((steps + 1, d, d), dtype=complex)
        self.costate_traj = np.empty((steps + 1, d, d), dtype=complex)

    def _kernel(self, a_v, rho):
        z = np.einsum("ij,mjk,ki->m", a_v, self.h1, rho) - np.einsum(
            "ij,jk,mki->m", a_v, rho, self.h1
        )
        return (-1j * z).real

    def _step(self, f, dt):
        h = self.h0 + np.tensordot(f, self.h1, axes=1)
        return batched_unitaries(h[None], dt)[0]

    def initial_forward(self, samples, dt):
        rho = self.rho0.copy()
        self.state_traj[0] = rho
        for k in range(samples.shape[1]):
            u = self._step(samples[:, k], dt)
            rho = u @ rho @ u.conj().T
            self.state_traj[k + 1] = rho

    def backward_sweep(self, f_old, f_tilde, beta, lam, dt):
        steps = f_old.shape[1]
        a_v = self.a_f.copy()
        self.costate_traj[steps] = a_v
        for k in range(steps - 1, -1, -1):
            g = self._kernel(a_v, self.state_traj[k + 1])
            f_tilde[:, k] = (1.0 - beta) * f_old[:, k] + (beta / lam) * g
            u = self._step(f_tilde[:, k], dt)
            a_v = u.conj().T @ a_v @ u
            self.costate_traj[k] = a_v

    def forward_sweep(self, f_tilde, f_new, alpha, lam, dt):
        steps = f_tilde.shape[1]
        rho = self.rho0.copy()
        self.state_traj[0] = rho
        for k in range(steps):
            g = self._kernel(self.costate_traj[k], rho)
            f_new[:, k] = (1.0 - alpha) * f_tilde[:, k] + (alpha / lam) * g
            u = self._step(f_new[:, k], dt)
            rho = u @ rho @ u.conj().T
            self.state_traj[k + 1] = rho

    def figure_of_merit(self):
        return float(np.trace(self.a_f @ self.state_traj[-1]).real)

    def final_states(self):
        rho = self.state_traj[-1]
        return [DensityMatrix(0.5 * (rho + rho.conj().T))]


class _GateSweeps:
    """Unitary-process sweeps: U_S forward from I, U_A backward from the target."""

    def __init__(self, h0, h1_list, u_target):
        self.h0 = h0
        self.h1 = np.array(h1_list)
        self.u_target = u_target
        self.state_traj = None
        self.costate_traj = None

    def allocate(self, steps):
        d = self.u_target.shape[0]
        self.state_traj = np.empty((steps + 1, d, d), dtype=complex)
        self.costate_traj = np.empty((steps + 1, d, d), dtype=complex)

    def _kernel(self, u_a, u_s):
        z = np.einsum("ji,mjk,ki->m", u_a.conj(), self.h1, u_s)
        return (-1j * z).real

    def _step(self, f, dt):
        h = self.h0 + np.tensordot(f, self.h1, axes=1)
        return batched_unitaries(h[None], dt)[0]

    def initial_forward(self, samples, dt):
        u_s = np.eye(self.u_target.shape[0], dtype=complex)
        self.state_traj[0] = u_s
        for k in range(samples.shape[1]):
            u = self._step(samples[:, k], dt)
            u_s = u @ u_s
            self.state_traj[k + 1] = u_s

    def backward_sweep(self, f_old, f_tilde, beta, lam, dt):
        steps = f_old.shape[1]
        u_a = self.u_target.copy()
        self.costate_traj[steps] = u_a
        for k in range(steps - 1, -1, -1):
            g = self._kernel(u_a, self.state_traj[k + 1])
            f_tilde[:, k] = (1.0 - beta) * f_old[:, k] + (beta / lam) * g
            u = self._step(f_tilde[:, k], dt)
            u_a = u.conj().T @ u_a
            self.costate_traj[k] = u_a

    def forward_sweep(self, f_tilde, f_new, alpha, lam, dt):
        steps = f_tilde.shape[1]
        u_s = np.eye(self.u_target.shape[0], dtype=complex)
        self.state_traj[0] = u_s
        for k in range(steps):
            g = self._kernel(self.costate_traj[k], u_s)
            f_new[:, k] = (1.0 - alpha) * f_tilde[:, k] + (alpha / lam) * g
            u = self._step(f_new[:, k], dt)
            u_s = u @ u_s
            self.state_traj[k + 1] = u_s

    def figure_of_merit(self):
        n = self.u_target.shape[0]
        return float(np.trace(self.u_target.conj().T @ self.state_traj[-1]).real / n)

    def final_states(self):
        return [Operator(self.state_traj[-1], unitary=True)]


def _split_blocks(matrix: np.ndarray, blocks, what: str):
    """Cut a block-diagonal matrix into its blocks, checking off-block zeros."""
    out = []
    offset = 0
    n = matrix.shape[0]
    mask = np.ones_like(matrix, dtype=bool)
    for b in blocks:
        mask[offset : offset + b, offset : offset + b] = False
        out.append(matrix[offset : offset + b, offset : offset + b])
        offset += b
    if offset != n:
        raise DimensionError(f"blocks {blocks} do not tile dimension {n}")
    stray = np.max(np.abs(matrix[mask])) if mask.any() else 0.0
    if stray > 1e-12:
        raise ConfigError(f"{what} has off-block elements up to {stray:.3e}; not block-diagonal")
    return out


def _psd_shift(a: np.ndarray) -> np.ndarray:
    lo = float(np.min(np.linalg.eigvalsh(a)))
    if lo >= 0.0:
        return a
    return a + (-lo) * np.eye(a.shape[0])


def _build_sweeps(system: ControlSystem, objective: Objective):
    h0 = system.drift.matrix
    h1_list = [c.matrix for c in system.controls]

    if objective.kind == "gate":
        u_t = objective.terminal.matrix
        if u_t.shape[0] != system.dim:
            raise DimensionError("gate target dimension differs from system dimension")
        return _GateSweeps(h0, h1_list, u_t)

    if objective.kind == "state_overlap":
        target = objective.terminal
        a_f = np.outer(target.amplitudes, target.amplitudes.conj())
    else:
        a_f = objective.terminal.matrix
    if a_f.shape[0] != system.dim:
        raise DimensionError("terminal operator dimension differs from system dimension")

    initial = objective.initial
    if isinstance(initial, DensityMatrix):
        if objective.blocks is not None:
            raise ConfigError("direct-sum blocks are supported for amplitude-vector sweeps only")
        return _CommutatorSweeps(h0, h1_list, initial.rho, a_f)

    if not isinstance(initial, PureState):
        raise ConfigError("observable/state objectives need a pure or density initial state")

    blocks = objective.blocks or (system.dim,)
    h0_blocks = _split_blocks(h0, blocks, "drift")
    h1_blocks = [_split_blocks(h, blocks, "control") for h in h1_list]
    a_blocks = _split_blocks(a_f, blocks, "terminal operator")
    psi_blocks = []
    offset = 0
    for b in blocks:
        seg = initial.amplitudes[offset : offset + b]
        norm = np.linalg.norm(seg)
        if norm < 1e-12:
            raise ConfigError("an initial-state direct-sum block is identically zero")
        # blocks are independent subsystems: each one propagates normalized
        psi_blocks.append(seg / norm)
        offset += b
    if len(set(blocks)) != 1:
        raise ConfigError("direct-sum blocks must share one dimension")
    d = blocks[0]
    h0_stack = np.array(h0_blocks)
    h1_stack = np.array(h1_blocks)  # (M, B, d, d)
    a_raw = np.array(a_blocks)
    a_shift = np.array([_psd_shift(a) for a in a_blocks])
    cls = _AmplitudeSweeps2 if d == 2 else _AmplitudeSweeps
    return cls(h0_stack, h1_stack, np.array(psi_blocks), a_raw, a_shift)


def optimize(system: ControlSystem, objective: Objective, config: OptimConfig):
    """Run the interleaved-sweep optimization.

    Returns ``(best_field, log, final_states)`` where ``best_field`` is the
    field of the best logged objective, ``log`` row 0 describes the trial
    field, and ``final_states`` are the terminal states reached by the best
    field's forward sweep (one per direct-sum block).
    """
    sweeps = _build_sweeps(system, objective)
    grid = config.grid
    dt = grid.dt
    steps = grid.steps
    if config.trial_field.channels != system.channel_count:
        raise ConfigError("trial field channel count differs from system")
    sweeps.allocate(steps)

    f = config.trial_field.samples.copy()
    f_tilde = np.empty_like(f)
    f_new = np.empty_like(f)

    log = ConvergenceLog()
    sweeps.initial_forward(f, dt)

    def record(iteration, samples):
        flu = float(np.sum(samples**2) * dt)
        fom = sweeps.figure_of_merit()
        j = fom - config.lam * flu
        log.append(iteration, j, fom, flu)
        return j

    best_j = record(0, f)
    best_f = f.copy()
    best_final = sweeps.final_states()

    for it in range(1, config.max_iterations + 1):
        sweeps.backward_sweep(f, f_tilde, config.beta, config.lam, dt)
        sweeps.forward_sweep(f_tilde, f_new, config.alpha, config.lam, dt)
        f, f_new = f_new, f
        j = record(it, f)
        if j > best_j:
            best_j = j
            best_f = f.copy()
            best_final = sweeps.final_states()
        if config.objective_tolerance > 0 and it >= 1:
            if abs(log.objective[-1] - log.objective[-2]) < config.objective_tolerance:
                break

    return ControlField(grid, best_f), log, best_final


def objective_value(system: ControlSystem, objective: Objective, field: ControlField, lam: float) -> float:
    """J = terminal figure of merit minus ``lam`` times the fluence.

    Evaluated by plain forward propagation of ``field``; the optimizer's
    logged values agree with this definition exactly.
    """
    sweeps = _build_sweeps(system, objective)
    sweeps.allocate(field.grid.steps)
    sweeps.initial_forward(field.samples, field.grid.dt)
    return sweeps.figure_of_merit() - lam * fluence(field)


def terminal_figure_of_merit(system: ControlSystem, objective: Objective, field: ControlField) -> float:
    """Terminal figure alone (no fluence penalty) under plain propagation."""
    sweeps = _build_sweeps(system, objective)
    sweeps.allocate(field.grid.steps)
    sweeps.initial_forward(field.samples, field.grid.dt)
    return sweeps.figure_of_merit()
