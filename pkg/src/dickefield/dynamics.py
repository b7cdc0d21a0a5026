"""Time evolution: exact phase propagator for phi0 Nz Rz and an eigendecomposition oracle for the full model."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .field import FieldState, PolarizationQubit, qubit_to_field
from .hamiltonians import (
    DiagonalHamiltonian,
    DimensionError,
    ModelParams,
    build_effective_hamiltonian,
    build_full_hamiltonian,
    check_full_dimension,
    common_stark_shift,
    free_ground_energy,
    EffectiveParams,
    MAX_AMPLITUDES,
    is_hermitian,
)
from .spin import CoherentSpinParams, DickeState, coherent_spin_state, m_values, two_j_of


@dataclass(frozen=True)
class JointState:
    """Amplitudes over (m, n+, n-), m ascending from -J."""

    j: float
    n_max: int
    amplitudes: np.ndarray

    def __post_init__(self):
        two_j = two_j_of(self.j)
        amps = np.asarray(self.amplitudes, dtype=complex)
        shape = (two_j + 1, self.n_max + 1, self.n_max + 1)
        if amps.size != math.prod(shape):
            raise ValueError(f"expected {shape} amplitudes, got {amps.shape}")
        object.__setattr__(self, "j", two_j / 2)
        object.__setattr__(self, "amplitudes", amps.reshape(shape))

    @classmethod
    def product(cls, atoms: DickeState, field: FieldState) -> JointState:
        amps = np.multiply.outer(atoms.amplitudes, field.grid)
        return cls(atoms.j, field.n_max, amps)

    @property
    def vector(self) -> np.ndarray:
        return self.amplitudes.reshape(-1)

    @property
    def matrix(self) -> np.ndarray:
        """(2J+1) x (n_max+1)^2 view used for Schmidt decompositions."""
        return self.amplitudes.reshape(self.amplitudes.shape[0], -1)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self, tol: float = 1e-12) -> bool:
        return abs(self.norm**2 - 1.0) <= tol

    def inner(self, other: JointState) -> complex:
        if other.amplitudes.shape != self.amplitudes.shape:
            raise ValueError("shape mismatch")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def expect_rz(self) -> float:
        p = np.abs(self.amplitudes) ** 2
        return float(np.einsum("mab,m->", p, m_values(self.j)) / p.sum())

    def expect_nz(self) -> float:
        p = np.abs(self.amplitudes) ** 2
        n = np.arange(self.n_max + 1)
        nz = np.subtract.outer(n, n)
        return float(np.einsum("mab,ab->", p, nz) / p.sum())


@dataclass(frozen=True)
class FullAtomState:
    """Amplitudes over (4 levels)^N x two-mode lattice, atoms first."""

    n_atoms: int
    n_max: int
    amplitudes: np.ndarray

    def __post_init__(self):
        dim = check_full_dimension(self.n_atoms, self.n_max)
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != dim:
            raise ValueError(f"expected {dim} amplitudes, got {amps.size}")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def evolve_diagonal(state: JointState, h: DiagonalHamiltonian, t: float) -> JointState:
    if h.energies.shape != state.amplitudes.shape:
        raise ValueError("Hamiltonian and state live on different lattices")
    return JointState(state.j, state.n_max, np.exp(-1j * t * h.energies) * state.amplitudes)


def evolve_effective(state: JointState, phi0: float, t: float) -> JointState:
    """exp(-i phi0 t Nz Rz) applied as a pure phase per basis point."""
    h = build_effective_hamiltonian(EffectiveParams(phi0, state.j), state.n_max)
    return evolve_diagonal(state, h, t)


class FullPropagator:
    """exp(-iHt) for a time-independent Hermitian H via blockwise eigendecomposition.

    H is split into the connected components of its sparsity graph (the
    excitation-number sectors of the atom-field model) and each block is
    diagonalized once; later calls only exponentiate eigenvalues.
    """

    def __init__(self, h, hermitian_tol: float = 1e-10):
        h = sp.csr_matrix(h)
        if h.shape[0] != h.shape[1]:
            raise ValueError("Hamiltonian must be square")
        if h.shape[0] > MAX_AMPLITUDES:
            raise DimensionError(f"dimension {h.shape[0]} exceeds the guard of {MAX_AMPLITUDES}")
        if not is_hermitian(h, hermitian_tol):
            raise ValueError("Hamiltonian is not Hermitian")
        self.h = h
        self.dim = h.shape[0]
        pattern = sp.csr_matrix((np.ones(h.nnz), h.indices, h.indptr), shape=h.shape)
        _, labels = connected_components(pattern, directed=False)
        self._labels = labels
        self._blocks: dict[int, tuple[np.ndarray, np.ndarray, np.ndarray]] = {}

    def _block(self, label: int):
        if label not in self._blocks:
            idx = np.flatnonzero(self._labels == label)
            dense = self.h[idx][:, idx].toarray()
            evals, evecs = np.linalg.eigh(dense)
            self._blocks[label] = (idx, evals, evecs)
        return self._blocks[label]

    def apply(self, vector: np.ndarray, t: float) -> np.ndarray:
        vector = np.asarray(vector, dtype=complex)
        out = np.zeros_like(vector)
        for label in np.unique(self._labels[np.flatnonzero(vector)]):
            idx, evals, evecs = self._block(label)
            coeffs = evecs.conj().T @ vector[idx]
            out[idx] = evecs @ (np.exp(-1j * evals * t) * coeffs)
        return out

    def __call__(self, state: FullAtomState, t: float) -> FullAtomState:
        if state.amplitudes.size != self.dim:
            raise ValueError("state dimension does not match the Hamiltonian")
        return FullAtomState(state.n_atoms, state.n_max, self.apply(state.amplitudes, t))


def evolve_full(state: FullAtomState, h, t: float) -> FullAtomState:
    return FullPropagator(h)(state, t)


def ground_indices(n_atoms: int) -> np.ndarray:
    """Atomic basis index (base 4) of every g-/g+ configuration, ordered like the 2^N product basis."""
    idx = np.arange(2**n_atoms)
    bits = np.stack([(idx >> (n_atoms - 1 - k)) & 1 for k in range(n_atoms)], axis=1)
    weights = 4 ** np.arange(n_atoms - 1, -1, -1)
    return bits @ weights


def _dicke_weights(n_atoms: int) -> tuple[np.ndarray, np.ndarray]:
    idx = np.arange(2**n_atoms)
    counts = np.array([bin(i).count("1") for i in idx])
    binom = np.array([math.comb(n_atoms, k) for k in range(n_atoms + 1)], dtype=float)
    return counts, np.sqrt(binom)


def embed_ground_manifold(state: JointState) -> FullAtomState:
    """Symmetric Dicke x Fock state as a (4 levels)^N x Fock vector."""
    n_atoms = two_j_of(state.j)
    counts, sq = _dicke_weights(n_atoms)
    field_dim = (state.n_max + 1) ** 2
    full = np.zeros((4**n_atoms, field_dim), dtype=complex)
    full[ground_indices(n_atoms)] = state.matrix[counts] / sq[counts, None]
    return FullAtomState(n_atoms, state.n_max, full)


def project_ground_manifold(state: FullAtomState) -> JointState:
    """Component on the symmetric ground manifold (not renormalized)."""
    n_atoms = state.n_atoms
    counts, sq = _dicke_weights(n_atoms)
    rows = state.amplitudes.reshape(4**n_atoms, -1)[ground_indices(n_atoms)]
    dicke = np.zeros((n_atoms + 1, rows.shape[1]), dtype=complex)
    np.add.at(dicke, counts, rows)
    dicke /= sq[:, None]
    return JointState(n_atoms / 2, state.n_max, dicke)


def ground_population(state: FullAtomState) -> float:
    rows = state.amplitudes.reshape(4**state.n_atoms, -1)[ground_indices(state.n_atoms)]
    return float(np.sum(np.abs(rows) ** 2))


@dataclass(frozen=True)
class DispersiveComparison:
    n_atoms: int
    delta_over_omega: float
    phi0t: float
    infidelity: float  # averaged over one bare-detuning period at the target time
    infidelity_at_t: float
    leakage: float  # largest excited-manifold population among the sampled times


def compare_full_effective(
    n_atoms: int,
    delta_over_omega: float,
    *,
    omega: float = 1.0,
    phi0t: float = math.pi / 2,
    theta: float = math.pi / 2,
    phi: float = 0.0,
    qubit: PolarizationQubit | None = None,
    samples: int = 16,
) -> DispersiveComparison:
    """Ground-manifold infidelity between the four-level model and phi0 Nz Rz.

    The full state is projected on the symmetric ground manifold, the bare
    lab-frame energies and the common ac-Stark phase are removed, and the
    result is compared with exact effective evolution at the same time.
    Excited-state admixture oscillates at roughly the detuning, so the
    infidelity is averaged over `samples` equally spaced times spanning one
    period 2*pi/delta that start at t = phi0t/phi0.
    """
    qubit = qubit or PolarizationQubit(1 / math.sqrt(2), 1 / math.sqrt(2))
    p = ModelParams.from_detuning(delta_over_omega * omega, omega, n_atoms, n_max=1)
    phi0 = EffectiveParams.from_model(p).phi0
    t0 = phi0t / phi0

    atoms = coherent_spin_state(p.j, CoherentSpinParams(theta, phi))
    initial = JointState.product(atoms, qubit_to_field(qubit, p.n_max))
    propagator = FullPropagator(build_full_hamiltonian(p))
    full0 = embed_ground_manifold(initial)
    known = free_ground_energy(p).energies + common_stark_shift(p).energies

    period = 2 * math.pi / abs(p.delta)
    infid, leak = [], []
    for k in range(samples):
        t = t0 + k * period / samples
        full_t = propagator(full0, t)
        ground = project_ground_manifold(full_t)
        compensated = JointState(ground.j, ground.n_max, ground.amplitudes * np.exp(1j * t * known))
        target = evolve_effective(initial, phi0, t)
        infid.append(1.0 - abs(target.inner(compensated)) ** 2)
        leak.append(1.0 - ground_population(full_t))
    return DispersiveComparison(
        n_atoms, delta_over_omega, phi0t, float(np.mean(infid)), float(infid[0]), float(max(leak))
    )
