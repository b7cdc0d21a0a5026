"""Two orthogonally polarized modes (+, -) on a truncated Fock lattice.

Amplitudes are stored flat over (n+, n-) in [0, n_max]^2, row-major in n+
then n-, i.e. index = n+ * (n_max + 1) + n-.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

NORM_TOL = 1e-12
CUTOFF_TOL = 1e-10


class TruncationWarning(UserWarning):
    pass


def field_index(n_plus: int, n_minus: int, n_max: int) -> int:
    if not (0 <= n_plus <= n_max and 0 <= n_minus <= n_max):
        raise IndexError(f"({n_plus}, {n_minus}) outside the n_max={n_max} lattice")
    return n_plus * (n_max + 1) + n_minus


@dataclass(frozen=True)
class FieldState:
    n_max: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.n_max < 0:
            raise ValueError("n_max must be non-negative")
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != (self.n_max + 1) ** 2:
            raise ValueError(f"expected {(self.n_max + 1) ** 2} amplitudes, got {amps.size}")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_grid(cls, grid: np.ndarray) -> FieldState:
        grid = np.asarray(grid)
        return cls(grid.shape[0] - 1, grid.reshape(-1))

    @property
    def grid(self) -> np.ndarray:
        """Amplitudes as an (n_max+1, n_max+1) array indexed [n+, n-]."""
        return self.amplitudes.reshape(self.n_max + 1, self.n_max + 1)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm**2 - 1.0) <= tol

    def normalized(self) -> FieldState:
        n = self.norm
        if n == 0:
            raise ValueError("cannot normalize the zero vector")
        return FieldState(self.n_max, self.amplitudes / n)

    def mean_photons(self) -> tuple[float, float]:
        p = np.abs(self.grid) ** 2
        n = np.arange(self.n_max + 1)
        w = p.sum()
        return float((p.sum(axis=1) @ n) / w), float((p.sum(axis=0) @ n) / w)


@dataclass(frozen=True)
class PolarizationQubit:
    """alpha |1+, 0-> + beta |0+, 1->."""

    alpha: complex
    beta: complex

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "beta", complex(self.beta))

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.alpha, self.beta], dtype=complex)

    @property
    def norm_squared(self) -> float:
        return abs(self.alpha) ** 2 + abs(self.beta) ** 2


def qubit_to_field(q: PolarizationQubit, n_max: int = 1) -> FieldState:
    if n_max < 1:
        raise ValueError("n_max must be >= 1 to hold a single photon")
    if abs(q.norm_squared - 1.0) > 1e-9:
        raise ValueError(f"polarization qubit is not normalized (|a|^2+|b|^2 = {q.norm_squared})")
    grid = np.zeros((n_max + 1, n_max + 1), dtype=complex)
    grid[1, 0] = q.alpha
    grid[0, 1] = q.beta
    return FieldState.from_grid(grid)


def field_to_qubit(state: FieldState) -> tuple[complex, complex]:
    """Amplitudes on |1+,0-> and |0+,1-> (no renormalization)."""
    g = state.grid
    return complex(g[1, 0]), complex(g[0, 1])


def _poisson_amplitudes(alpha: complex, n_max: int) -> np.ndarray:
    amps = np.empty(n_max + 1, dtype=complex)
    amps[0] = math.exp(-abs(alpha) ** 2 / 2)
    for n in range(1, n_max + 1):
        amps[n] = amps[n - 1] * alpha / math.sqrt(n)
    return amps


def poisson_tail(mean: float, n_max: int) -> float:
    """P(n > n_max) for a Poisson distribution, summed term by term from the tail."""
    if mean == 0:
        return 0.0
    log_term = -mean + (n_max + 1) * math.log(mean) - math.lgamma(n_max + 2)
    term = math.exp(log_term)
    total = 0.0
    n = n_max + 1
    while term > 0:
        total += term
        n += 1
        term *= mean / n
        if n > mean and term <= total * 1e-17:
            break
    return total


class CoherentField(NamedTuple):
    state: FieldState
    deficit: float  # 1 - truncated norm^2

    @property
    def adequate(self) -> bool:
        return self.deficit <= CUTOFF_TOL


def two_mode_coherent(alpha: complex, beta: complex, n_max: int) -> CoherentField:
    """Truncated |alpha, beta>; amplitudes are not renormalized after truncation."""
    grid = np.outer(_poisson_amplitudes(complex(alpha), n_max), _poisson_amplitudes(complex(beta), n_max))
    tp = poisson_tail(abs(alpha) ** 2, n_max)
    tm = poisson_tail(abs(beta) ** 2, n_max)
    deficit = tp + tm - tp * tm
    result = CoherentField(FieldState.from_grid(grid), deficit)
    if not result.adequate:
        warnings.warn(
            f"two-mode coherent state truncated at n_max={n_max} loses weight {deficit:.3e}",
            TruncationWarning,
            stacklevel=2,
        )
    return result


def _occupations(n_max: int) -> tuple[np.ndarray, np.ndarray]:
    n = np.arange(n_max + 1)
    return np.meshgrid(n, n, indexing="ij")


def apply_nz(state: FieldState) -> FieldState:
    n_plus, n_minus = _occupations(state.n_max)
    return FieldState.from_grid((n_plus - n_minus) * state.grid)


def apply_nminus(state: FieldState) -> tuple[FieldState, float]:
    """a-^dag a+ : moves a photon from + to -.

    Returns the image and the squared weight that would have landed
    outside the lattice (n- = n_max + 1).
    """
    g = state.grid
    n_plus, n_minus = _occupations(state.n_max)
    coeff = np.sqrt(n_plus * (n_minus + 1.0))
    moved = coeff * g
    out = np.zeros_like(g)
    out[:-1, 1:] = moved[1:, :-1]
    dropped = float(np.sum(np.abs(moved[1:, -1]) ** 2))
    return FieldState.from_grid(out), dropped


def apply_nplus(state: FieldState) -> tuple[FieldState, float]:
    """a+^dag a- : moves a photon from - to +."""
    g = state.grid
    n_plus, n_minus = _occupations(state.n_max)
    coeff = np.sqrt(n_minus * (n_plus + 1.0))
    moved = coeff * g
    out = np.zeros_like(g)
    out[1:, :-1] = moved[:-1, 1:]
    dropped = float(np.sum(np.abs(moved[-1, 1:]) ** 2))
    return FieldState.from_grid(out), dropped


def annihilation_matrix(n_max: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), k=1).astype(complex)


def mode_operators(n_max: int) -> tuple[np.ndarray, np.ndarray]:
    """Dense (a+, a-) on the two-mode lattice."""
    a = annihilation_matrix(n_max)
    eye = np.eye(n_max + 1)
    return np.kron(a, eye), np.kron(eye, a)


def nz_matrix(n_max: int) -> np.ndarray:
    ap, am = mode_operators(n_max)
    return ap.conj().T @ ap - am.conj().T @ am


def nminus_matrix(n_max: int) -> np.ndarray:
    ap, am = mode_operators(n_max)
    return am.conj().T @ ap


def nplus_matrix(n_max: int) -> np.ndarray:
    ap, am = mode_operators(n_max)
    return ap.conj().T @ am


def total_photons(n_max: int) -> np.ndarray:
    n_plus, n_minus = _occupations(n_max)
    return (n_plus + n_minus).reshape(-1)


# Linear polarization basis on the single-photon block:
# |x> = (|1+,0-> + |0+,1->)/sqrt2,  |y> = (|1+,0-> - |0+,1->)/sqrt2
LINEAR_POLARIZATIONS = {
    "x": np.array([1.0, 1.0]) / math.sqrt(2),
    "y": np.array([1.0, -1.0]) / math.sqrt(2),
}


class PolarizationOutcome(NamedTuple):
    label: str
    probability: float
    state: FieldState | None  # None when the outcome has probability zero

    @property
    def possible(self) -> bool:
        return self.state is not None


def polarization_ket(label: str, n_max: int = 1) -> FieldState:
    a, b = LINEAR_POLARIZATIONS[label]
    return qubit_to_field(PolarizationQubit(a, b), n_max)


def _project_polarization(state: FieldState, label: str, zero_tol: float) -> PolarizationOutcome:
    ket = polarization_ket(label, state.n_max)
    amp = np.vdot(ket.amplitudes, state.amplitudes)
    prob = float(abs(amp) ** 2 / state.norm**2)
    if prob <= zero_tol:
        return PolarizationOutcome(label, prob, None)
    post = FieldState(state.n_max, ket.amplitudes * (amp / abs(amp)))
    return PolarizationOutcome(label, prob, post)


def polarization_projector_x(state: FieldState, zero_tol: float = 1e-15) -> PolarizationOutcome:
    return _project_polarization(state, "x", zero_tol)


def polarization_projector_y(state: FieldState, zero_tol: float = 1e-15) -> PolarizationOutcome:
    return _project_polarization(state, "y", zero_tol)


def measure_linear_polarization(state: FieldState) -> dict[str, PolarizationOutcome]:
    """Both outcomes of an x/y polarization measurement."""
    return {label: _project_polarization(state, label, 1e-15) for label in LINEAR_POLARIZATIONS}
