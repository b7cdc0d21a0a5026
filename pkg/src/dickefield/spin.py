"""Collective ground-state spin J = N/2 in the Dicke basis.

Amplitude vectors are laid out in ascending m, so index 0 is m = -J (all
atoms in g-) and index 2J is m = +J (all atoms in g+).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

NORM_TOL = 1e-12


def two_j_of(j) -> int:
    """Return 2j as an int, rejecting negative or non-half-integer j."""
    twice = 2 * float(j)
    rounded = round(twice)
    if rounded < 0 or abs(twice - rounded) > 1e-9:
        raise ValueError(f"j must be a non-negative half-integer, got {j!r}")
    return int(rounded)


def m_values(j) -> np.ndarray:
    two_j = two_j_of(j)
    return np.arange(two_j + 1) - two_j / 2


@dataclass(frozen=True)
class DickeState:
    j: float
    amplitudes: np.ndarray

    def __post_init__(self):
        two_j = two_j_of(self.j)
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (two_j + 1,):
            raise ValueError(
                f"expected {two_j + 1} amplitudes for j={self.j}, got shape {amps.shape}"
            )
        object.__setattr__(self, "j", two_j / 2)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def m(self) -> np.ndarray:
        return m_values(self.j)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm**2 - 1.0) <= tol

    def normalized(self) -> DickeState:
        n = self.norm
        if n == 0:
            raise ValueError("cannot normalize the zero vector")
        return DickeState(self.j, self.amplitudes / n)

    def inner(self, other: DickeState) -> complex:
        """<self|other>."""
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True)
class CoherentSpinParams:
    theta: float
    phi: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.theta <= math.pi) or math.isnan(self.theta):
            raise ValueError(f"theta must lie in [0, pi], got {self.theta!r}")
        object.__setattr__(self, "phi", math.remainder(self.phi, 2 * math.pi))


def ground_state(j) -> DickeState:
    """|-J>: every atom in g-."""
    amps = np.zeros(two_j_of(j) + 1, dtype=complex)
    amps[0] = 1.0
    return DickeState(j, amps)


def basis_state(j, m) -> DickeState:
    two_j = two_j_of(j)
    idx = round(float(m) + two_j / 2)
    if not 0 <= idx <= two_j or abs(float(m) + two_j / 2 - idx) > 1e-9:
        raise ValueError(f"m={m!r} is not a valid projection for j={j!r}")
    amps = np.zeros(two_j + 1, dtype=complex)
    amps[idx] = 1.0
    return DickeState(j, amps)


def apply_rz(state: DickeState) -> DickeState:
    return DickeState(state.j, state.m * state.amplitudes)


def apply_rminus(state: DickeState) -> DickeState:
    j, m = state.j, state.m
    # coefficient for |m> -> |m-1>
    coeff = np.sqrt(np.clip((j + m) * (j - m + 1), 0.0, None))
    out = np.zeros_like(state.amplitudes)
    out[:-1] = coeff[1:] * state.amplitudes[1:]
    return DickeState(j, out)


def apply_rplus(state: DickeState) -> DickeState:
    j, m = state.j, state.m
    # coefficient for |m> -> |m+1>
    coeff = np.sqrt(np.clip((j - m) * (j + m + 1), 0.0, None))
    out = np.zeros_like(state.amplitudes)
    out[1:] = coeff[:-1] * state.amplitudes[:-1]
    return DickeState(j, out)


def rz_matrix(j) -> np.ndarray:
    return np.diag(m_values(j)).astype(complex)


def rplus_matrix(j) -> np.ndarray:
    """Dense R+ built column by column from the ladder action."""
    dim = two_j_of(j) + 1
    mat = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        e = np.zeros(dim, dtype=complex)
        e[col] = 1.0
        mat[:, col] = apply_rplus(DickeState(j, e)).amplitudes
    return mat


def rminus_matrix(j) -> np.ndarray:
    return rplus_matrix(j).conj().T


def _log_binomial(n: int, k: np.ndarray) -> np.ndarray:
    lg = np.vectorize(math.lgamma)
    return math.lgamma(n + 1) - lg(k + 1.0) - lg(n - k + 1.0)


def coherent_spin_state(j, params: CoherentSpinParams) -> DickeState:
    """Atomic coherent state |theta, phi> obtained by rotating |-J>.

    Coefficients are assembled as log-magnitude plus phase so that
    J of several hundred does not overflow the binomial factors.
    """
    two_j = two_j_of(j)
    k = np.arange(two_j + 1, dtype=float)  # k = J + m atoms in g+
    c = math.cos(params.theta / 2)
    s = math.sin(params.theta / 2)
    log_mag = 0.5 * _log_binomial(two_j, k)
    log_c = math.log(c) if c > 0 else -np.inf
    log_s = math.log(s) if s > 0 else -np.inf
    # 0 * log(0) is taken as 0 (empty power)
    with np.errstate(invalid="ignore"):
        log_mag = log_mag + np.where(two_j - k > 0, (two_j - k) * log_c, 0.0)
        log_mag = log_mag + np.where(k > 0, k * log_s, 0.0)
    amps = np.exp(log_mag) * np.exp(-1j * params.phi * k)
    return DickeState(two_j / 2, amps)


def coherent_overlap_analytic(j, theta: float, phi_plus: float, phi_minus: float) -> complex:
    """Closed-form <theta, phi_plus | theta, phi_minus>.

    With phi0t = (phi_plus - phi_minus)/2 this is
    exp(2iJ phi0t) [cos(phi0t) - i cos(theta) sin(phi0t)]^(2J).
    """
    two_j = two_j_of(j)
    x = 0.5 * (phi_plus - phi_minus)
    base = complex(math.cos(x), -math.cos(theta) * math.sin(x))
    return complex(np.exp(1j * two_j * x) * base**two_j)


def product_expansion(n_atoms: int, params: CoherentSpinParams) -> tuple[complex, complex]:
    """Single-atom amplitudes (g-, g+) whose N-fold product is |theta, phi>."""
    if n_atoms < 1:
        raise ValueError("n_atoms must be >= 1")
    g_minus = complex(math.cos(params.theta / 2))
    g_plus = math.sin(params.theta / 2) * np.exp(-1j * params.phi)
    return g_minus, complex(g_plus)


def product_tensor(qubit: tuple[complex, complex] | np.ndarray, n_atoms: int) -> np.ndarray:
    """Kronecker power of a single-atom (g-, g+) vector; atom 1 is the most significant index."""
    vec = np.asarray(qubit, dtype=complex)
    out = np.ones(1, dtype=complex)
    for _ in range(n_atoms):
        out = np.kron(out, vec)
    return out


def _excitation_counts(n_atoms: int) -> np.ndarray:
    """Number of g+ atoms for every product-basis index (bit 1 = g+)."""
    idx = np.arange(2**n_atoms)
    return np.array([bin(i).count("1") for i in idx])


def symmetric_projection(tensor: np.ndarray, n_atoms: int) -> DickeState:
    """Project a 2^N product-basis vector onto the symmetric Dicke sector.

    <m|psi> = binom(N, k)^(-1/2) * sum over configurations with k = J+m atoms in g+.
    """
    tensor = np.asarray(tensor, dtype=complex)
    if tensor.shape != (2**n_atoms,):
        raise ValueError(f"expected 2^{n_atoms} amplitudes, got {tensor.shape}")
    counts = _excitation_counts(n_atoms)
    sums = np.bincount(counts, weights=tensor.real, minlength=n_atoms + 1) + 1j * np.bincount(
        counts, weights=tensor.imag, minlength=n_atoms + 1
    )
    binom = np.array([math.comb(n_atoms, k) for k in range(n_atoms + 1)], dtype=float)
    return DickeState(n_atoms / 2, sums / np.sqrt(binom))


def dicke_to_product(state: DickeState) -> np.ndarray:
    """Embed a Dicke-sector state into the 2^N product basis."""
    n_atoms = two_j_of(state.j)
    counts = _excitation_counts(n_atoms)
    binom = np.array([math.comb(n_atoms, k) for k in range(n_atoms + 1)], dtype=float)
    return state.amplitudes[counts] / np.sqrt(binom[counts])

