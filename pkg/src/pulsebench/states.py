"""State representations and lossless conversions between them.

A quantum state can be carried three ways: as a complex amplitude vector
(:class:`PureState`), as a density matrix (:class:`DensityMatrix`), or as the
real vector of expectation values in the generalized Pauli basis
(:class:`BlochVector`).  Conversions are explicit operations, never implicit:
which representation a computation runs in is part of its definition, and
the choice genuinely matters for control design.

The constant identity component ``Tr(rho)/sqrt(N)`` of a coherence vector is
never stored; reconstruction re-adds ``I/N``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DimensionError, NormalizationError, RepresentationError
from .operators import Operator, PauliBasis

NORM_TOL = 1e-10
NORM_ERROR_TOL = 1e-6
PURITY_EXTRACT_TOL = 1e-6


@dataclass(frozen=True)
class PureState:
    """Normalized complex amplitude vector."""

    amplitudes: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.amplitudes, dtype=complex).ravel()
        object.__setattr__(self, "amplitudes", c)
        norm = np.linalg.norm(c)
        if abs(norm - 1.0) > NORM_ERROR_TOL:
            raise NormalizationError(f"pure state norm {norm:.8f} is not 1")

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    @classmethod
    def basis_state(cls, dim: int, index: int) -> "PureState":
        c = np.zeros(dim, dtype=complex)
        c[index] = 1.0
        return cls(c)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite state operator."""

    rho: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.rho, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"density matrix must be square, got {m.shape}")
        object.__setattr__(self, "rho", m)
        if np.max(np.abs(m - m.conj().T)) > NORM_TOL:
            raise NormalizationError("density matrix is not Hermitian")
        if abs(np.trace(m).real - 1.0) > NORM_ERROR_TOL:
            raise NormalizationError(f"density matrix trace {np.trace(m).real:.8f} is not 1")
        if np.min(np.linalg.eigvalsh(m)) < -1e-8:
            raise NormalizationError("density matrix has a significantly negative eigenvalue")

    @property
    def dim(self) -> int:
        return self.rho.shape[0]


@dataclass(frozen=True)
class BlochVector:
    """Real coherence vector of length N**2 - 1 in the fixed basis order."""

    components: np.ndarray
    dim: int

    def __post_init__(self):
        s = np.asarray(self.components, dtype=float).ravel()
        object.__setattr__(self, "components", s)
        n = self.dim
        if s.shape[0] != n * n - 1:
            raise DimensionError(f"coherence vector for dim {n} must have {n * n - 1} entries")
        bound = np.sqrt(1.0 - 1.0 / n)
        if np.linalg.norm(s) > bound + 1e-8:
            raise NormalizationError(
                f"coherence vector length {np.linalg.norm(s):.8f} exceeds pure-state bound {bound:.8f}"
            )


State = Union[PureState, DensityMatrix, BlochVector]


def pure_to_density(state: PureState) -> DensityMatrix:
    """Rank-1 projector ``rho = c c^dagger``."""
    c = state.amplitudes
    return DensityMatrix(np.outer(c, c.conj()))


def density_to_bloch(state: DensityMatrix, basis: PauliBasis) -> BlochVector:
    """Coherence components ``s_k = Tr(s_k rho)`` in the fixed basis order."""
    if state.dim != basis.dim:
        raise DimensionError("state and basis dimensions differ")
    s = np.einsum("kab,ba->k", basis.elements, state.rho)
    return BlochVector(s.real, dim=state.dim)


def bloch_to_density(state: BlochVector, basis: PauliBasis, warn=None) -> DensityMatrix:
    """Reconstruct ``rho = I/N + sum_k s_k sigma_k``.

    A coherence vector outside the physical ball is reported through the
    optional ``warn`` callback (intermediate numerical states may drift
    slightly) but still reconstructed.
    """
    if state.dim != basis.dim:
        raise DimensionError("state and basis dimensions differ")
    n = state.dim
    bound = np.sqrt(1.0 - 1.0 / n)
    length = np.linalg.norm(state.components)
    if length > bound + NORM_TOL and warn is not None:
        warn(f"coherence vector length {length:.6f} outside physical ball (bound {bound:.6f})")
    rho = np.eye(n, dtype=complex) / n
    rho = rho + np.tensordot(state.components, basis.elements, axes=1)
    return DensityMatrix(0.5 * (rho + rho.conj().T))


def density_to_pure(state: DensityMatrix) -> PureState:
    """Extract the pure state from a (numerically) rank-1 density matrix.

    Refuses when the purity ``Tr rho^2`` is below ``1 - 1e-6``.
    """
    purity = np.trace(state.rho @ state.rho).real
    if purity < 1.0 - PURITY_EXTRACT_TOL:
        raise RepresentationError(
            f"cannot extract a pure state: purity {purity:.8f} < {1 - PURITY_EXTRACT_TOL}"
        )
    w, v = np.linalg.eigh(state.rho)
    c = v[:, -1]
    return PureState(c / np.linalg.norm(c))


def state_distance(a: State, b: State) -> float:
    """Norm distance between two states in the same representation.

    Euclidean norm on amplitude vectors, Hilbert-Schmidt norm on density
    matrices, Euclidean norm on coherence vectors.  The density and
    coherence values coincide for corresponding states because the Pauli
    basis is orthonormal.
    """
    if type(a) is not type(b):
        raise RepresentationError(
            f"cannot compare {type(a).__name__} with {type(b).__name__}; convert first"
        )
    if a.dim != b.dim:
        raise DimensionError("state dimensions differ")
    if isinstance(a, PureState):
        return float(np.linalg.norm(a.amplitudes - b.amplitudes))
    if isinstance(a, DensityMatrix):
        return float(np.linalg.norm(a.rho - b.rho))
    return float(np.linalg.norm(a.components - b.components))


def phase_invariant_pure_distance(a: PureState, b: PureState) -> float:
    """min over phi of ||a - e^{i phi} b|| = sqrt(2 - 2|<a|b>|).

    Global phase is unphysical; this is the metric used for acceptance
    thresholds on pure targets.
    """
    if a.dim != b.dim:
        raise DimensionError("state dimensions differ")
    overlap = abs(np.vdot(a.amplitudes, b.amplitudes))
    return float(np.sqrt(max(0.0, 2.0 - 2.0 * overlap)))


def observable_expectation(a: Operator, state: State, basis: PauliBasis | None = None) -> float:
    """Real expectation value of a Hermitian observable.

    Accepts any representation; coherence vectors require the basis used to
    produce them.
    """
    if not a.hermitian:
        raise ValueError("expectation requires a Hermitian observable")
    if isinstance(state, PureState):
        if state.dim != a.dim:
            raise DimensionError("operator and state dimensions differ")
        val = np.vdot(state.amplitudes, a.matrix @ state.amplitudes)
        return float(val.real)
    if isinstance(state, DensityMatrix):
        if state.dim != a.dim:
            raise DimensionError("operator and state dimensions differ")
        return float(np.trace(a.matrix @ state.rho).real)
    if basis is None:
        raise RepresentationError("coherence-vector expectation requires the Pauli basis")
    if state.dim != a.dim:
        raise DimensionError("operator and state dimensions differ")
    a_vec = np.einsum("kab,ba->k", basis.elements, a.matrix).real
    return float(a_vec @ state.components + np.trace(a.matrix).real / a.dim)


def state_to_json_dict(state: State) -> dict:
    if isinstance(state, PureState):
        return {
            "rep": "pure",
            "re": state.amplitudes.real.tolist(),
            "im": state.amplitudes.imag.tolist(),
        }
    if isinstance(state, DensityMatrix):
        return {
            "rep": "density",
            "re": state.rho.real.tolist(),
            "im": state.rho.imag.tolist(),
        }
    return {"rep": "bloch", "dim": state.dim, "s": state.components.tolist()}


def state_from_json_dict(data: dict) -> State:
    rep = data.get("rep")
    if rep == "pure":
        return PureState(np.asarray(data["re"], dtype=float) + 1j * np.asarray(data["im"], dtype=float))
    if rep == "density":
        return DensityMatrix(np.asarray(data["re"], dtype=float) + 1j * np.asarray(data["im"], dtype=float))
    if rep == "bloch":
        return BlochVector(np.asarray(data["s"], dtype=float), dim=int(data["dim"]))
    raise RepresentationError(f"unknown state rep {rep!r}")
