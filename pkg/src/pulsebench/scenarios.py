"""The two shipped case studies with all of their published constants.

* :func:`build_qd_scenario` -- five uncoupled two-level quantum dots with
  resonance energies 1.32, 1.35, 1.375, 1.38, 1.397 eV, driven by one
  global field, modelled on the dimension-10 direct *sum* (not product)
  space.  The design goal is a simultaneous bit flip of dots 1 and 3,
  encoded in the diagonal observable ``diag(0,1,0,-1,0,1,0,-1,0,-1)``
  whose per-dot sum peaks exactly when dots 1 and 3 are excited and the
  rest stay in the ground state.
* :func:`build_bell_scenario` -- two weakly coupled spins,
  ``H[f] = f (0.9 sx(1) + sx(2)) + 0.1 sz x sz``, steered from |00> to the
  maximally entangled state (|00> + |11>)/sqrt(2) within 200 time units.

Internal units are dimensionless with hbar = 1.  The quantum-dot scenario
pins them to laboratory units through hbar = 0.6582119 eV fs: energies in
eV are used literally, which makes one internal time unit 0.6582119 fs.

Per-dot expectations follow the independent-subsystem convention: every
2x2 block propagates with its own normalized amplitude vector and the
observable value is the *sum* of per-block expectations (a single globally
normalized 10-vector would weight each dot by 1/5 and admit unphysical
inter-dot coherences).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import ControlField, TimeGrid, Trajectory
from .errors import ConfigError
from .iterative import Objective, OptimConfig
from .lyapunov import KickSpec, LyapunovConfig
from .operators import ControlSystem, Operator
from .pulses import required_steps
from .states import DensityMatrix, PureState, pure_to_density


HBAR_EV_FS = 0.6582119   # hbar in eV * fs; fixes the eV <-> internal conversion
QD_DOT_ENERGIES_EV = (1.32, 1.35, 1.375, 1.38, 1.397)
QD_OBSERVABLE_DIAGONAL = (0, 1, 0, -1, 0, 1, 0, -1, 0, -1)

# iterative-run constants for the five-dot study
QD_TRIAL_AMPLITUDE = 0.559
QD_ALPHA = 1.0
QD_BETA = 1.0
QD_LAMBDA = 4.0
QD_DEFAULT_TF = 3000.0     # ~2 ps in internal units; long enough to resolve
                           # the closest dot spacing (0.005) several times over
QD_DEFAULT_STEPS = 8000

# Bell-state study constants
BELL_COUPLING = 0.1
BELL_SX1_WEIGHT = 0.9
BELL_ALPHA = 1.0
BELL_BETA = 1.0
BELL_LAMBDA = 1.0
BELL_DEFAULT_TF = 200.0
BELL_DEFAULT_STEPS = 4000
# seed field for the iterative run: the scheme has an exact fixed point at
# f = 0 (the control matrix element between |00> and the target vanishes),
# so the trial field must be nonzero; two weak tones at and below the drift
# gap steer both parity sectors and give the fastest observed convergence
BELL_TRIAL_TONES = ((0.05, 0.2), (0.05, 0.1))  # (amplitude, angular frequency)
# feedback-design defaults: the initial state is an equilibrium of the
# explicit law, and weak kicks leave the state inside an essentially flat
# region where the law re-stalls immediately; an order-unity kick over 5%
# of the window is the smallest tested scale that kicks the system out far
# enough for the descent (and its plateaus) to be visible.  The law is
# integrated on a finer grid than the optimizer so that the held-sample
# discretization cannot masquerade as descent.
BELL_KICK_FRACTION = 0.05
BELL_KICK_AMPLITUDE = 1.0
BELL_KICK_SEED = 7
BELL_LYAPUNOV_STEPS = 40000


def fs_to_internal(t_fs: float) -> float:
    return t_fs / HBAR_EV_FS


def ps_to_internal(t_ps: float) -> float:
    return fs_to_internal(1000.0 * t_ps)


def internal_to_ps(t_internal: float) -> float:
    return t_internal * HBAR_EV_FS / 1000.0


_SX = np.array([[0, 1], [1, 0]], dtype=complex)
_SZ = np.array([[1, 0], [0, -1]], dtype=complex)
_I2 = np.eye(2, dtype=complex)


def _qd_block_control() -> np.ndarray:
    return np.array([[0, 1 - 1j], [1 + 1j, 0]], dtype=complex) / np.sqrt(2)


@dataclass(frozen=True)
class QuantumDotScenario:
    name: str
    system: ControlSystem
    observable: Operator
    initial: PureState
    dot_energies_ev: tuple
    block_dims: tuple

    @property
    def dot_count(self) -> int:
        return len(self.dot_energies_ev)

    @property
    def transition_frequencies(self) -> tuple:
        """Per-dot angular frequencies in internal units (= energies in eV)."""
        return self.dot_energies_ev

    def block_system(self, dot_index: int) -> ControlSystem:
        """The isolated 2-level system of one dot (0-based index)."""
        eps = self.dot_energies_ev[dot_index]
        return ControlSystem(
            drift=Operator.hermitian_from(np.diag([0.0, eps])),
            controls=(Operator.hermitian_from(_qd_block_control()),),
        )

    def dot_populations(self, state: PureState) -> np.ndarray:
        """Per-dot excited-state populations, each block separately normalized."""
        c = state.amplitudes
        out = np.empty(self.dot_count)
        for k in range(self.dot_count):
            seg = c[2 * k : 2 * k + 2]
            out[k] = abs(seg[1]) ** 2 / (abs(seg[0]) ** 2 + abs(seg[1]) ** 2)
        return out

    def per_dot_expectation(self, state: PureState) -> float:
        """Sum over dots of the block observable on the normalized block state."""
        c = state.amplitudes
        a = self.observable.matrix
        total = 0.0
        for k in range(self.dot_count):
            seg = c[2 * k : 2 * k + 2]
            block = a[2 * k : 2 * k + 2, 2 * k : 2 * k + 2]
            total += (np.vdot(seg, block @ seg).real / np.vdot(seg, seg).real)
        return float(total)

    def per_dot_fidelities(self, state: PureState, targets: tuple = (0, 2)) -> np.ndarray:
        """Per-dot overlap with the bit-flip target (excited on ``targets``)."""
        pops = self.dot_populations(state)
        out = np.empty(self.dot_count)
        for k in range(self.dot_count):
            out[k] = pops[k] if k in targets else 1.0 - pops[k]
        return out

    def bitflip_unitary(self, targets: tuple = (0, 2)) -> Operator:
        """X on target blocks, identity elsewhere (the direct-sum optimum)."""
        blocks = [_SX if k in targets else _I2 for k in range(self.dot_count)]
        full = np.zeros((2 * self.dot_count,) * 2, dtype=complex)
        for k, b in enumerate(blocks):
            full[2 * k : 2 * k + 2, 2 * k : 2 * k + 2] = b
        return Operator(full, hermitian=True, unitary=True)

    def bitflip_objective(self) -> Objective:
        return Objective(
            kind="observable",
            initial=self.initial,
            terminal=self.observable,
            blocks=self.block_dims,
        )

    def design_objective(self) -> Objective:
        return self.bitflip_objective()

    def default_grid(self, tf: float | None = None, steps: int | None = None) -> TimeGrid:
        tf = QD_DEFAULT_TF if tf is None else tf
        if steps is None:
            steps = max(QD_DEFAULT_STEPS, required_steps(tf, max(self.dot_energies_ev)))
        return TimeGrid(0.0, tf, steps)

    def trial_field(self, grid: TimeGrid) -> ControlField:
        return ControlField.from_function(grid, lambda t: QD_TRIAL_AMPLITUDE * np.sin(t))

    def optim_config(self, grid: TimeGrid | None = None, max_iterations: int = 500,
                     alpha: float = QD_ALPHA, beta: float = QD_BETA,
                     lam: float = QD_LAMBDA) -> OptimConfig:
        grid = self.default_grid() if grid is None else grid
        return OptimConfig(
            alpha=alpha, beta=beta, lam=lam, grid=grid,
            max_iterations=max_iterations, trial_field=self.trial_field(grid),
        )

    def constants_dict(self) -> dict:
        return {
            "scenario": self.name,
            "hbar_ev_fs": HBAR_EV_FS,
            "dot_energies_ev": list(self.dot_energies_ev),
            "observable_diagonal": list(QD_OBSERVABLE_DIAGONAL),
            "block_dims": list(self.block_dims),
            "trial_field": {"amplitude": QD_TRIAL_AMPLITUDE, "form": "amplitude*sin(t)"},
            "defaults": {
                "alpha": QD_ALPHA, "beta": QD_BETA, "lambda": QD_LAMBDA,
                "tf": QD_DEFAULT_TF, "steps": QD_DEFAULT_STEPS,
            },
            "units": "hbar=1, energies in eV, 1 time unit = 0.6582119 fs",
        }


def build_qd_scenario() -> QuantumDotScenario:
    """Five uncoupled dots on the dimension-10 direct-sum space."""
    n_dots = len(QD_DOT_ENERGIES_EV)
    dim = 2 * n_dots
    h0 = np.zeros((dim, dim), dtype=complex)
    h1 = np.zeros((dim, dim), dtype=complex)
    block = _qd_block_control()
    for k, eps in enumerate(QD_DOT_ENERGIES_EV):
        h0[2 * k + 1, 2 * k + 1] = eps
        h1[2 * k : 2 * k + 2, 2 * k : 2 * k + 2] = block
    system = ControlSystem(
        drift=Operator.hermitian_from(h0),
        controls=(Operator.hermitian_from(h1),),
    )
    observable = Operator.hermitian_from(np.diag(np.asarray(QD_OBSERVABLE_DIAGONAL, dtype=float)))
    # all dots in the ground state, uniform block weights (blocks renormalize)
    c0 = np.zeros(dim, dtype=complex)
    c0[0::2] = 1.0 / np.sqrt(n_dots)
    return QuantumDotScenario(
        name="qd5",
        system=system,
        observable=observable,
        initial=PureState(c0),
        dot_energies_ev=QD_DOT_ENERGIES_EV,
        block_dims=(2,) * n_dots,
    )


@dataclass(frozen=True)
class BellScenario:
    """Two coupled spins steered toward a maximally entangled state.

    The stated target is ``(|00> + |11>)/sqrt(2)``.  The model conserves the
    two-spin flip parity ``sx (x) sx`` (it commutes with both drift and
    control), the initial state |00> carries exactly half its weight in each
    parity sector, and the stated target lies entirely in the even sector --
    so its overlap can never exceed 1/2 from |00>, no matter the field.  The
    maximally entangled state that *is* exactly reachable carries the same
    50/50 parity split: ``(|00> + i|11>)/sqrt(2)``.  Design runs therefore
    drive toward :attr:`design_target`, which reproduces all the reported
    endpoint behavior (populations at 1/2 and corner coherence 1/2);
    :attr:`target` keeps the stated state for reference metrics.
    """

    name: str
    system: ControlSystem
    initial: PureState
    target: PureState
    design_target: PureState

    def parity_operator(self) -> Operator:
        return Operator.hermitian_from(np.kron(_SX, _SX))

    def parity_sector_weights(self, state: PureState):
        """(even, odd) weights under the conserved flip parity."""
        p = self.parity_operator().matrix
        w, v = np.linalg.eigh(p)
        even = v[:, w > 0]
        odd = v[:, w < 0]
        c = state.amplitudes
        return (
            float(np.linalg.norm(even.conj().T @ c) ** 2),
            float(np.linalg.norm(odd.conj().T @ c) ** 2),
        )

    def projector_objective(self) -> Objective:
        """Projector onto the stated target (overlap capped at 1/2 from |00>)."""
        return Objective(kind="state_overlap", initial=self.initial, terminal=self.target)

    def design_objective(self) -> Objective:
        """Projector onto the reachable maximally entangled state."""
        return Objective(kind="state_overlap", initial=self.initial, terminal=self.design_target)

    def target_density(self) -> DensityMatrix:
        return pure_to_density(self.target)

    def default_grid(self, tf: float = BELL_DEFAULT_TF, steps: int = BELL_DEFAULT_STEPS) -> TimeGrid:
        return TimeGrid(0.0, tf, steps)

    def lyapunov_grid(self, tf: float = BELL_DEFAULT_TF,
                      steps: int = BELL_LYAPUNOV_STEPS) -> TimeGrid:
        return TimeGrid(0.0, tf, steps)

    def trial_field(self, grid: TimeGrid, tones=BELL_TRIAL_TONES) -> ControlField:
        return ControlField.from_function(
            grid, lambda t: sum(a * np.sin(w * t) for a, w in tones)
        )

    def optim_config(self, grid: TimeGrid | None = None, max_iterations: int = 500,
                     alpha: float = BELL_ALPHA, beta: float = BELL_BETA,
                     lam: float = BELL_LAMBDA) -> OptimConfig:
        grid = self.default_grid() if grid is None else grid
        return OptimConfig(
            alpha=alpha, beta=beta, lam=lam, grid=grid,
            max_iterations=max_iterations, trial_field=self.trial_field(grid),
        )

    def default_kick(self, grid: TimeGrid, seed: int = BELL_KICK_SEED,
                     amplitude: float = BELL_KICK_AMPLITUDE) -> KickSpec:
        return KickSpec(
            duration=BELL_KICK_FRACTION * (grid.tf - grid.t0),
            amplitude=amplitude,
            seed=seed,
        )

    def lyapunov_config(self, grid: TimeGrid | None = None, kappa: float | None = None,
                        kick="default", representation: str = "bloch",
                        seed: int = BELL_KICK_SEED) -> LyapunovConfig:
        """Feedback-design configuration against the reachable target.

        ``kick="default"`` installs the documented seeded kick; pass
        ``kick=None`` to run without one (the degenerate stall case).
        An unset ``kappa`` is picked by the coarse scan and recorded in run
        metadata.
        """
        from .lyapunov import scan_kappa

        grid = self.lyapunov_grid() if grid is None else grid
        if kick == "default":
            kick = self.default_kick(grid, seed=seed)
        if kappa is None:
            kappa = scan_kappa(self.system, grid, pure_to_density(self.design_target),
                               pure_to_density(self.initial), kick)
        return LyapunovConfig(kappa=kappa, grid=grid, target=self._rep_target(representation),
                              representation=representation, kick=kick)

    def _rep_target(self, representation: str):
        if representation == "pure":
            return self.design_target
        return pure_to_density(self.design_target)

    def constants_dict(self) -> dict:
        return {
            "scenario": self.name,
            "drift": f"{BELL_COUPLING} * sz x sz",
            "control": f"{BELL_SX1_WEIGHT} * sx(1) + sx(2)",
            "initial": "|00>",
            "stated_target": "(|00> + |11>)/sqrt(2)",
            "design_target": "(|00> + i|11>)/sqrt(2)",
            "design_target_note": (
                "flip parity sx(x)sx is conserved; the stated target's overlap "
                "from |00> is capped at 1/2, the i-phase state is exactly reachable"
            ),
            "trial_field": {
                "tones": [list(t) for t in BELL_TRIAL_TONES],
                "form": "sum of amplitude*sin(frequency*t)",
            },
            "defaults": {
                "alpha": BELL_ALPHA, "beta": BELL_BETA, "lambda": BELL_LAMBDA,
                "tf": BELL_DEFAULT_TF, "steps": BELL_DEFAULT_STEPS,
                "kick_fraction": BELL_KICK_FRACTION,
                "kick_amplitude": BELL_KICK_AMPLITUDE,
                "kick_seed": BELL_KICK_SEED,
            },
            "units": "dimensionless, hbar=1",
        }


def build_bell_scenario() -> BellScenario:
    """Two coupled spins with a single global transverse control."""
    h0 = BELL_COUPLING * np.kron(_SZ, _SZ)
    h1 = BELL_SX1_WEIGHT * np.kron(_SX, _I2) + np.kron(_I2, _SX)
    system = ControlSystem(
        drift=Operator.hermitian_from(h0),
        controls=(Operator.hermitian_from(h1),),
    )
    initial = PureState.basis_state(4, 0)
    target = PureState(np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2))
    design_target = PureState(np.array([1, 0, 0, 1j], dtype=complex) / np.sqrt(2))
    return BellScenario(name="bell", system=system, initial=initial, target=target,
                        design_target=design_target)


def bell_report_quantities(traj: Trajectory, target: DensityMatrix):
    """Population, corner-coherence and distance series for a 4-level run.

    Returns a dict of arrays: ``t``, ``rho11`` .. ``rho44``, ``rho14_abs``
    and ``distance`` (Hilbert-Schmidt distance to the target state).
    """
    times = traj.grid.points
    pops = np.empty((4, len(times)))
    coh = np.empty(len(times))
    dist = np.empty(len(times))
    for i, state in enumerate(traj.states):
        if isinstance(state, PureState):
            rho = np.outer(state.amplitudes, state.amplitudes.conj())
        elif isinstance(state, DensityMatrix):
            rho = state.rho
        else:
            raise ConfigError("report needs a pure or density trajectory")
        pops[:, i] = np.diag(rho).real
        coh[i] = abs(rho[0, 3])
        dist[i] = np.linalg.norm(rho - target.rho)
    out = {"t": times, "rho14_abs": coh, "distance": dist}
    for k in range(4):
        out[f"rho{k + 1}{k + 1}"] = pops[k]
    return out


def qd_excitation_series(scenario: QuantumDotScenario, field: ControlField,
                         max_rows: int = 4001) -> dict:
    """Per-dot excited-population time series under one shared field.

    The dots never couple, so all blocks propagate in one batched pass.
    Long grids are downsampled to at most ``max_rows`` rows (the final
    point is always included).
    """
    from .operators import batched_unitaries

    steps = field.grid.steps
    dt = field.grid.dt
    stride = max(1, int(np.ceil(steps / (max_rows - 1))))
    n = scenario.dot_count
    h0 = np.zeros((n, 2, 2), dtype=complex)
    for k, eps in enumerate(scenario.dot_energies_ev):
        h0[k, 1, 1] = eps
    h1 = np.broadcast_to(_qd_block_control(), (n, 2, 2))
    psi = np.zeros((n, 2), dtype=complex)
    psi[:, 0] = 1.0
    times = [field.grid.t0]
    pops = [np.zeros(n)]
    for k in range(steps):
        h = h0 + field.samples[0, k] * h1
        u = batched_unitaries(h, dt)
        psi = np.einsum("bij,bj->bi", u, psi)
        if (k + 1) % stride == 0 or k == steps - 1:
            times.append(field.grid.t0 + (k + 1) * dt)
            pops.append(np.abs(psi[:, 1]) ** 2 / np.sum(np.abs(psi) ** 2, axis=1))
    pops = np.array(pops)
    out = {"t": np.asarray(times)}
    for k in range(n):
        out[f"p_dot{k + 1}"] = pops[:, k]
    return out


def get_scenario(name: str):
    if name == "qd5":
        return build_qd_scenario()
    if name == "bell":
        return build_bell_scenario()
    raise ConfigError(f"unknown scenario {name!r}; available: bell, qd5")
