"""Dense Hermitian operators, the generalized Pauli basis, and Lie-algebra tools.

Everything downstream (propagation, optimization, feedback design) is built
on three ingredients defined here:

* :class:`Operator` -- a validated dense complex matrix (Hamiltonians,
  observables, unitaries, density matrices).
* :func:`build_pauli_basis` -- the ``N**2 - 1`` traceless Hermitian matrices
  that turn density matrices into real coherence vectors.  The orthonormal
  convention ``Tr(s_j s_k) = delta_jk`` is used for every dimension,
  including N=2 (so the single-qubit coherence ball has radius 1/sqrt(2)).
* :func:`adjoint_representation` -- the real antisymmetric generator of the
  coherence-vector flow induced by a Hermitian matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import DimensionError

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10
RANK_TOL = 1e-10


def _as_square_matrix(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix contains non-finite entries")
    return m


@dataclass(frozen=True)
class Operator:
    """Dense complex square matrix with optional Hermitian/unitary flags.

    The flags are validated at construction time: a Hermitian operator must
    satisfy ``max|M - M^\\dagger| < 1e-12`` and a unitary one
    ``max|M M^\\dagger - I| < 1e-10``.
    """

    matrix: np.ndarray
    hermitian: bool = False
    unitary: bool = False

    def __post_init__(self):
        m = _as_square_matrix(self.matrix)
        object.__setattr__(self, "matrix", m)
        if self.hermitian and np.max(np.abs(m - m.conj().T)) >= HERMITIAN_TOL:
            raise ValueError("operator flagged hermitian is not Hermitian")
        if self.unitary:
            err = np.max(np.abs(m @ m.conj().T - np.eye(m.shape[0])))
            if err >= UNITARY_TOL:
                raise ValueError(f"operator flagged unitary deviates from unitarity by {err:.3e}")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def hermitian_from(cls, matrix) -> "Operator":
        """Build a Hermitian operator, symmetrizing tiny numerical residue."""
        m = _as_square_matrix(matrix)
        m = 0.5 * (m + m.conj().T)
        return cls(m, hermitian=True)

    def dagger(self) -> "Operator":
        return Operator(self.matrix.conj().T, hermitian=self.hermitian, unitary=self.unitary)

    def to_json_dict(self) -> dict:
        return {
            "dim": self.dim,
            "re": self.matrix.real.tolist(),
            "im": self.matrix.imag.tolist(),
        }

    @classmethod
    def from_json_dict(cls, data: dict, hermitian: bool = False) -> "Operator":
        m = np.asarray(data["re"], dtype=float) + 1j * np.asarray(data["im"], dtype=float)
        if m.shape != (data["dim"], data["dim"]):
            raise DimensionError("operator JSON dim field does not match entries")
        if hermitian:
            return cls.hermitian_from(m)
        return cls(m)


@dataclass(frozen=True)
class PauliBasis:
    """Ordered orthonormal traceless Hermitian basis of an N-level system.

    Element order is fixed: all sigma-x(r,s) for 1 <= r < s <= N in
    lexicographic (r, s) order, then all sigma-y(r,s) likewise, then the
    diagonal sigma-z(r) for r = 1..N-1.  Coherence vectors are only
    meaningful relative to this order.
    """

    dim: int
    elements: np.ndarray  # shape (N**2 - 1, N, N)
    labels: tuple = field(default=())

    def __len__(self) -> int:
        return self.elements.shape[0]


def build_pauli_basis(dim: int) -> PauliBasis:
    """Return the generalized Pauli basis for an ``dim``-level system.

    The basis consists of, for levels 1 <= r < s <= N,

    * ``sx(r,s) = (|r><s| + |s><r|) / sqrt(2)``
    * ``sy(r,s) = i(-|r><s| + |s><r|) / sqrt(2)``

    and for 1 <= r <= N-1 the diagonal

    * ``sz(r) = sqrt(1/(r + r^2)) (sum_{k<=r} |k><k| - r |r+1><r+1|)``.

    All elements are traceless and orthonormal under the Hilbert-Schmidt
    inner product, ``Tr(s_j s_k) = delta_jk``.
    """
    if dim < 2:
        raise DimensionError(f"Pauli basis requires dim >= 2, got {dim}")
    n = dim
    mats = []
    labels = []
    for r in range(n):
        for s in range(r + 1, n):
            m = np.zeros((n, n), dtype=complex)
            m[r, s] = 1.0 / np.sqrt(2)
            m[s, r] = 1.0 / np.sqrt(2)
            mats.append(m)
            labels.append(f"x{r + 1},{s + 1}")
    for r in range(n):
        for s in range(r + 1, n):
            m = np.zeros((n, n), dtype=complex)
            m[r, s] = -1j / np.sqrt(2)
            m[s, r] = 1j / np.sqrt(2)
            mats.append(m)
            labels.append(f"y{r + 1},{s + 1}")
    for r in range(1, n):
        m = np.zeros((n, n), dtype=complex)
        norm = np.sqrt(1.0 / (r + r * r))
        for k in range(r):
            m[k, k] = norm
        m[r, r] = -r * norm
        mats.append(m)
        labels.append(f"z{r}")
    return PauliBasis(dim=n, elements=np.array(mats), labels=tuple(labels))


@dataclass(frozen=True)
class ControlSystem:
    """Bilinear control model ``H[f] = H0 + sum_m f_m(t) H_m``."""

    drift: Operator
    controls: tuple

    def __post_init__(self):
        controls = tuple(self.controls)
        object.__setattr__(self, "controls", controls)
        if not self.drift.hermitian:
            raise ValueError("drift Hamiltonian must be flagged Hermitian")
        for c in controls:
            if not c.hermitian:
                raise ValueError("control Hamiltonians must be flagged Hermitian")
            if c.dim != self.drift.dim:
                raise DimensionError("control dimension differs from drift dimension")

    @property
    def dim(self) -> int:
        return self.drift.dim

    @property
    def channel_count(self) -> int:
        return len(self.controls)

    def hamiltonian(self, f) -> np.ndarray:
        """Dense H[f] for one vector of channel values."""
        h = self.drift.matrix.copy()
        for fm, cm in zip(np.atleast_1d(f), self.controls):
            h = h + fm * cm.matrix
        return h

    def to_json_dict(self) -> dict:
        return {
            "dim": self.dim,
            "drift": self.drift.to_json_dict(),
            "controls": [c.to_json_dict() for c in self.controls],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "ControlSystem":
        drift = Operator.from_json_dict(data["drift"], hermitian=True)
        controls = tuple(Operator.from_json_dict(c, hermitian=True) for c in data["controls"])
        return cls(drift=drift, controls=controls)


def expm_hermitian(h: np.ndarray, scale: complex = -1j) -> np.ndarray:
    """exp(scale * h) for Hermitian ``h`` via eigendecomposition.

    With the default ``scale=-1j`` this is the one-step unitary propagator;
    eigendecomposition keeps it unitary to machine precision, unlike a
    Pade approximant.
    """
    if h.shape == (2, 2):
        return _expm2_hermitian(h, scale)
    w, v = np.linalg.eigh(h)
    return (v * np.exp(scale * w)) @ v.conj().T


def _expm2_hermitian(h: np.ndarray, scale: complex) -> np.ndarray:
    # closed form for 2x2: H = a I + v.sigma, exp(s H) = e^{sa}(cosh' I + ...)
    a = 0.5 * (h[0, 0] + h[1, 1]).real
    v3 = 0.5 * (h[0, 0] - h[1, 1]).real
    v1 = h[0, 1].real
    v2 = -h[0, 1].imag
    w = np.sqrt(v1 * v1 + v2 * v2 + v3 * v3)
    # scale is purely real or purely imaginary in practice; handle generally
    if w < 1e-300:
        c, s_over_w = np.exp(scale * 0.0), scale
    else:
        c = 0.5 * (np.exp(scale * w) + np.exp(-scale * w))
        s_over_w = 0.5 * (np.exp(scale * w) - np.exp(-scale * w)) / w
    pref = np.exp(scale * a)
    u = np.empty((2, 2), dtype=complex)
    u[0, 0] = pref * (c + s_over_w * v3)
    u[1, 1] = pref * (c - s_over_w * v3)
    u[0, 1] = pref * s_over_w * (v1 - 1j * v2)
    u[1, 0] = pref * s_over_w * (v1 + 1j * v2)
    return u


def batched_unitaries(h: np.ndarray, dt: float) -> np.ndarray:
    """exp(-i h dt) for a stack of Hermitian matrices, shape (B, d, d).

    2x2 stacks go through the closed Pauli form (no per-matrix Python
    overhead); larger dimensions use the batched eigendecomposition.
    """
    d = h.shape[-1]
    if d == 2:
        a = 0.5 * (h[:, 0, 0] + h[:, 1, 1]).real
        v3 = 0.5 * (h[:, 0, 0] - h[:, 1, 1]).real
        v1 = h[:, 0, 1].real
        v2 = -h[:, 0, 1].imag
        w = np.sqrt(v1 * v1 + v2 * v2 + v3 * v3)
        phase = np.exp(-1j * a * dt)
        c = np.cos(w * dt)
        sw = dt * np.sinc(w * dt / np.pi)  # sin(w dt)/w, safe at w = 0
        u = np.empty_like(h)
        u[:, 0, 0] = phase * (c - 1j * sw * v3)
        u[:, 1, 1] = phase * (c + 1j * sw * v3)
        u[:, 0, 1] = phase * (-1j * sw) * (v1 - 1j * v2)
        u[:, 1, 0] = phase * (-1j * sw) * (v1 + 1j * v2)
        return u
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * w * dt)[:, None, :]) @ np.conjugate(np.swapaxes(v, 1, 2))


def matrix_exponential(a) -> Operator:
    """exp(A) for a dense square matrix.

    Hermitian and skew-Hermitian arguments go through an eigendecomposition
    (exact unitarity for skew-Hermitian input, which then carries the
    ``unitary`` flag); anything else falls back to scaling-and-squaring.
    """
    a = _as_square_matrix(a)
    herm_err = np.max(np.abs(a - a.conj().T)) if a.size else 0.0
    skew_err = np.max(np.abs(a + a.conj().T)) if a.size else 0.0
    if skew_err < HERMITIAN_TOL:
        # a = -i h with h Hermitian
        h = (1j * a + (1j * a).conj().T) * 0.5
        return Operator(expm_hermitian(h, scale=-1j), unitary=True)
    if herm_err < HERMITIAN_TOL:
        h = 0.5 * (a + a.conj().T)
        return Operator(expm_hermitian(h, scale=1.0))
    return Operator(scipy.linalg.expm(a))


def adjoint_representation(h: Operator, basis: PauliBasis) -> np.ndarray:
    """Coherence-vector generator of ``rho -> -i[h, rho]``.

    Returns the real matrix ``A[j, k] = Tr(s_j (-i)[h, s_k])``, which is
    antisymmetric whenever ``h`` is Hermitian.  The coherence vector of any
    density matrix then obeys ``ds/dt = A s`` under evolution generated by
    ``h`` (the identity component of rho is annihilated by the commutator).
    """
    if not h.hermitian:
        raise ValueError("adjoint representation requires a Hermitian operator")
    if h.dim != basis.dim:
        raise DimensionError("operator and basis dimensions differ")
    sig = basis.elements
    hm = h.matrix
    comm = -1j * (hm[None, :, :] @ sig - sig @ hm[None, :, :])
    a = np.einsum("jab,kba->jk", sig, comm)
    return a.real


def adjoint_generators(system: ControlSystem, basis: PauliBasis):
    """(A0, [A1..AM]) adjoint matrices for a control system."""
    a0 = adjoint_representation(system.drift, basis)
    ams = [adjoint_representation(c, basis) for c in system.controls]
    return a0, ams


def _traceless(m: np.ndarray) -> np.ndarray:
    n = m.shape[0]
    return m - (np.trace(m) / n) * np.eye(n)


def dynamical_lie_algebra_dim(system: ControlSystem, max_depth: int = 12):
    """Dimension of the Lie algebra generated by {-iH0, -iH_m}.

    Generators are projected onto the traceless part (the identity component
    only contributes a global phase), normalized, vectorized over the real
    and imaginary parts, and closed under commutators with the generator
    set.  Rank is measured by singular values above 1e-10.

    Returns ``(dim, closed)``; ``closed`` is False when ``max_depth`` rounds
    did not reach closure, in which case ``dim`` is a lower bound.
    """
    n = system.dim
    gens = [-1j * system.drift.matrix] + [-1j * c.matrix for c in system.controls]
    gens = [_traceless(g) for g in gens]
    gens = [g / np.linalg.norm(g) for g in gens if np.linalg.norm(g) > RANK_TOL]
    if not gens:
        return 0, True

    def orthonormal_rows(mats):
        vecs = np.array([np.concatenate([m.real.ravel(), m.imag.ravel()]) for m in mats])
        _, s, vt = np.linalg.svd(vecs, full_matrices=False)
        rows = vt[s > RANK_TOL]
        out = []
        for row in rows:
            re = row[: n * n].reshape(n, n)
            im = row[n * n:].reshape(n, n)
            out.append(re + 1j * im)
        return out

    basis = orthonormal_rows(gens)
    rank = len(basis)
    for _ in range(max_depth):
        new = []
        for g in gens:
            for b in basis:
                c = g @ b - b @ g
                nc = np.linalg.norm(c)
                if nc > RANK_TOL:
                    new.append(c / nc)
        basis = orthonormal_rows(basis + new)
        if len(basis) == rank:
            return rank, True
        rank = len(basis)
    return rank, False
