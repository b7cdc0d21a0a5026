"""Full four-level, dispersive ground-manifold, and effective spin-spin Hamiltonians (hbar = 1)."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .field import annihilation_matrix
from .spin import m_values, two_j_of

# per-atom level ordering of the brute-force basis
G_MINUS, G_PLUS, E_MINUS, E_PLUS = range(4)
LEVELS = ("g-", "g+", "e-", "e+")

MAX_AMPLITUDES = 10**7


class DimensionError(ValueError):
    """Requested Hilbert space is beyond the brute-force guard."""


def full_dimension(n_atoms: int, n_max: int) -> int:
    return 4**n_atoms * (n_max + 1) ** 2


def check_full_dimension(n_atoms: int, n_max: int) -> int:
    dim = full_dimension(n_atoms, n_max)
    if dim > MAX_AMPLITUDES:
        raise DimensionError(
            f"4^{n_atoms} x {(n_max + 1) ** 2} = {dim} amplitudes exceeds the guard of {MAX_AMPLITUDES}"
        )
    return dim


@dataclass(frozen=True)
class ModelParams:
    omega1: float
    omega2: float
    omega_f: float
    rabi_plus: complex
    rabi_minus: complex
    delta: float
    n_atoms: int
    n_max: int = 1

    def __post_init__(self):
        if self.delta == 0:
            raise ValueError("detuning must be non-zero")
        scale = max(abs(self.omega1), abs(self.omega2), abs(self.omega_f), abs(self.delta))
        tol = 1e-12 * scale
        if abs(self.omega1 - self.omega_f - self.delta) > tol or abs(self.omega2 - self.omega_f - self.delta) > tol:
            raise ValueError(
                "equal detuning required: omega1 - omega_f = omega2 - omega_f = delta "
                f"(got {self.omega1 - self.omega_f}, {self.omega2 - self.omega_f}, {self.delta})"
            )
        if self.n_atoms < 1:
            raise ValueError("n_atoms must be >= 1")
        if self.n_max < 0:
            raise ValueError("n_max must be non-negative")
        object.__setattr__(self, "rabi_plus", complex(self.rabi_plus))
        object.__setattr__(self, "rabi_minus", complex(self.rabi_minus))

    @classmethod
    def from_detuning(
        cls, delta: float, rabi: complex, n_atoms: int, n_max: int = 1, omega_f: float | None = None
    ) -> ModelParams:
        """Equal couplings on both transitions; omega_f defaults to |delta|."""
        omega_f = abs(delta) if omega_f is None else omega_f
        return cls(omega_f + delta, omega_f + delta, omega_f, rabi, rabi, delta, n_atoms, n_max)

    @property
    def j(self) -> float:
        return self.n_atoms / 2

    @property
    def is_dispersive(self) -> bool:
        rabi = max(abs(self.rabi_plus), abs(self.rabi_minus))
        return abs(self.delta) >= 10 * rabi * math.sqrt(self.n_max + 1)

    @property
    def equal_couplings(self) -> bool:
        return math.isclose(abs(self.rabi_plus), abs(self.rabi_minus), rel_tol=1e-12, abs_tol=0.0)


@dataclass(frozen=True)
class EffectiveParams:
    phi0: float
    j: float

    def __post_init__(self):
        if not math.isfinite(self.phi0):
            raise ValueError("phi0 must be finite")
        object.__setattr__(self, "j", two_j_of(self.j) / 2)

    @classmethod
    def from_model(cls, p: ModelParams) -> EffectiveParams:
        if not p.equal_couplings:
            raise ValueError("the effective Hamiltonian needs |rabi_plus| == |rabi_minus|")
        return cls(abs(p.rabi_plus) ** 2 / p.delta, p.j)


@dataclass(frozen=True)
class DiagonalHamiltonian:
    """Operator diagonal in the (m, n+, n-) basis; energies indexed the same way."""

    j: float
    n_max: int
    energies: np.ndarray

    @property
    def dim(self) -> int:
        return self.energies.size

    def matrix(self) -> np.ndarray:
        return np.diag(self.energies.reshape(-1)).astype(complex)

    def __sub__(self, other: DiagonalHamiltonian) -> DiagonalHamiltonian:
        if other.energies.shape != self.energies.shape:
            raise ValueError("shape mismatch")
        return DiagonalHamiltonian(self.j, self.n_max, self.energies - other.energies)


def _joint_grids(j, n_max: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    n = np.arange(n_max + 1)
    return np.meshgrid(m_values(j), n, n, indexing="ij")


def build_effective_hamiltonian(e: EffectiveParams, n_max: int) -> DiagonalHamiltonian:
    """phi0 * Nz * Rz."""
    m, n_plus, n_minus = _joint_grids(e.j, n_max)
    return DiagonalHamiltonian(e.j, n_max, e.phi0 * (n_plus - n_minus) * m)


def build_dispersive_hamiltonian(p: ModelParams) -> DiagonalHamiltonian:
    """Ground-manifold ac-Stark Hamiltonian, common photon-number term included.

    -(|W-|^2/D) n- (N/2 + Rz) - (|W+|^2/D) n+ (N/2 - Rz)
    """
    m, n_plus, n_minus = _joint_grids(p.j, p.n_max)
    n_gplus = p.j + m
    n_gminus = p.j - m
    energies = -(abs(p.rabi_minus) ** 2 / p.delta) * n_minus * n_gplus - (
        abs(p.rabi_plus) ** 2 / p.delta
    ) * n_plus * n_gminus
    return DiagonalHamiltonian(p.j, p.n_max, energies)


def common_stark_shift(p: ModelParams) -> DiagonalHamiltonian:
    """-(W^2/D)(N/2)(n+ + n-): the part of the dispersive Hamiltonian absent from phi0 Nz Rz."""
    if not p.equal_couplings:
        raise ValueError("common Stark term is only defined for equal couplings")
    m, n_plus, n_minus = _joint_grids(p.j, p.n_max)
    energies = -(abs(p.rabi_plus) ** 2 / p.delta) * p.j * (n_plus + n_minus) + 0.0 * m
    return DiagonalHamiltonian(p.j, p.n_max, energies)


def free_ground_energy(p: ModelParams) -> DiagonalHamiltonian:
    """Bare atomic plus field energy of ground-manifold states in the lab frame."""
    m, n_plus, n_minus = _joint_grids(p.j, p.n_max)
    energies = -0.5 * p.omega1 * (p.j + m) - 0.5 * p.omega2 * (p.j - m) + p.omega_f * (n_plus + n_minus)
    return DiagonalHamiltonian(p.j, p.n_max, energies)


def _site_operator(op: sp.spmatrix, site: int, n_atoms: int) -> sp.csr_matrix:
    left = sp.identity(4**site, format="csr")
    right = sp.identity(4 ** (n_atoms - site - 1), format="csr")
    return sp.kron(sp.kron(left, op), right, format="csr")


def level_counts(n_atoms: int) -> np.ndarray:
    """(4^N, 4) array: how many atoms occupy each level, per atomic basis index."""
    idx = np.arange(4**n_atoms)
    digits = np.stack([(idx // 4 ** (n_atoms - 1 - k)) % 4 for k in range(n_atoms)], axis=1)
    return np.stack([(digits == lvl).sum(axis=1) for lvl in range(4)], axis=1)


def build_full_hamiltonian(p: ModelParams) -> sp.csr_matrix:
    """Sparse lab-frame Hamiltonian on (4 levels)^N x two-mode Fock lattice.

    Atoms come first in the Kronecker order (atom 1 most significant), the
    field (n+ major, n- minor) last.
    """
    check_full_dimension(p.n_atoms, p.n_max)
    n_atoms, n_max = p.n_atoms, p.n_max
    field_dim = (n_max + 1) ** 2

    counts = level_counts(n_atoms)
    atomic = 0.5 * p.omega1 * (counts[:, E_MINUS] - counts[:, G_PLUS]) + 0.5 * p.omega2 * (
        counts[:, E_PLUS] - counts[:, G_MINUS]
    )
    a = annihilation_matrix(n_max)
    eye_f = np.eye(n_max + 1)
    n_field = np.add.outer(np.arange(n_max + 1), np.arange(n_max + 1)).reshape(-1)
    diag = np.add.outer(atomic, p.omega_f * n_field).reshape(-1)
    h = sp.diags(diag.astype(complex), format="csr")

    a_plus = sp.csr_matrix(np.kron(a, eye_f))
    a_minus = sp.csr_matrix(np.kron(eye_f, a))
    raise_minus = sp.csr_matrix(([1.0], ([E_MINUS], [G_PLUS])), shape=(4, 4))  # |e-><g+|
    raise_plus = sp.csr_matrix(([1.0], ([E_PLUS], [G_MINUS])), shape=(4, 4))  # |e+><g-|

    coupling = sp.csr_matrix((4**n_atoms * field_dim,) * 2, dtype=complex)
    for site in range(n_atoms):
        coupling = coupling + p.rabi_minus * sp.kron(_site_operator(raise_minus, site, n_atoms), a_minus)
        coupling = coupling + p.rabi_plus * sp.kron(_site_operator(raise_plus, site, n_atoms), a_plus)
    h = h + coupling + coupling.conj().T
    return sp.csr_matrix(h)


def is_hermitian(h, tol: float = 1e-12) -> bool:
    if sp.issparse(h):
        diff = (h - h.conj().T).tocoo()
        return diff.nnz == 0 or float(np.max(np.abs(diff.data))) <= tol
    h = np.asarray(h)
    return h.shape[0] == h.shape[1] and np.allclose(h, h.conj().T, rtol=0.0, atol=tol)
