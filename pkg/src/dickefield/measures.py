"""Fidelities, reduced states and bipartite entanglement."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import JointState

EIG_CLAMP = 1e-12


@dataclass(frozen=True)
class DensityOperator:
    matrix: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.matrix, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValueError("density operator must be a square matrix")
        if not np.allclose(rho, rho.conj().T, rtol=0.0, atol=1e-12):
            raise ValueError("density operator is not Hermitian")
        if abs(np.trace(rho).real - 1.0) > 1e-10:
            raise ValueError(f"density operator trace is {np.trace(rho).real}, expected 1")
        if np.linalg.eigvalsh(rho).min() < -1e-10:
            raise ValueError("density operator has negative eigenvalues")
        object.__setattr__(self, "matrix", rho)

    @classmethod
    def pure(cls, vector: np.ndarray) -> DensityOperator:
        v = np.asarray(vector, dtype=complex).reshape(-1)
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        ev = np.linalg.eigvalsh(self.matrix)
        return np.where(ev < EIG_CLAMP, 0.0, ev)

    def purity(self) -> float:
        return float(np.real(np.vdot(self.matrix, self.matrix)))


def _as_vector(x) -> np.ndarray:
    if hasattr(x, "amplitudes"):
        x = x.amplitudes
    return np.asarray(x, dtype=complex).reshape(-1)


def _psd_sqrt(rho: np.ndarray) -> np.ndarray:
    ev, vecs = np.linalg.eigh(rho)
    return (vecs * np.sqrt(np.clip(ev, 0.0, None))) @ vecs.conj().T


def fidelity(a, b) -> float:
    """|<a|b>|^2 for pure states (normalized first), Uhlmann fidelity otherwise."""
    if isinstance(a, DensityOperator) or isinstance(b, DensityOperator):
        if not isinstance(a, DensityOperator):
            a, b = b, a
        if not isinstance(b, DensityOperator):
            v = _as_vector(b)
            if v.size != a.dim:
                raise ValueError("dimension mismatch")
            v = v / np.linalg.norm(v)
            return float(np.clip(np.real(np.vdot(v, a.matrix @ v)), 0.0, 1.0))
        if b.dim != a.dim:
            raise ValueError("dimension mismatch")
        # rank-1 operand: square roots of round-off eigenvalues would leak ~1e-9 into the result
        for pure, other in ((a, b), (b, a)):
            ev, vecs = np.linalg.eigh(pure.matrix)
            if ev[-1] > 1.0 - 1e-12:
                v = vecs[:, -1]
                return float(np.clip(np.real(np.vdot(v, other.matrix @ v)), 0.0, 1.0))
        s = _psd_sqrt(a.matrix)
        inner = np.linalg.eigvalsh(s @ b.matrix @ s)
        return float(np.clip(np.sum(np.sqrt(np.clip(inner, 0.0, None))) ** 2, 0.0, 1.0))
    va, vb = _as_vector(a), _as_vector(b)
    if va.size != vb.size:
        raise ValueError("dimension mismatch")
    ov = np.vdot(va, vb) / (np.linalg.norm(va) * np.linalg.norm(vb))
    return float(min(abs(ov) ** 2, 1.0))


def partial_trace(joint: JointState, keep: str) -> DensityOperator:
    """Reduced state of "atoms" ((2J+1)-dim) or "field" ((n_max+1)^2-dim)."""
    psi = joint.matrix / joint.norm
    if keep == "atoms":
        rho = psi @ psi.conj().T
    elif keep == "field":
        rho = psi.T @ psi.conj()
    else:
        raise ValueError(f"keep must be 'atoms' or 'field', got {keep!r}")
    return DensityOperator(0.5 * (rho + rho.conj().T))


def von_neumann_entropy(rho: DensityOperator) -> float:
    """Entropy in bits."""
    ev = rho.eigenvalues()
    ev = ev[ev > 0]
    return float(max(0.0, -np.sum(ev * np.log2(ev))))


def schmidt_coefficients(matrix: np.ndarray) -> np.ndarray:
    return np.linalg.svd(np.asarray(matrix, dtype=complex), compute_uv=False)


def bipartite_entropy(vector: np.ndarray, dims: tuple[int, int]) -> float:
    """Entanglement entropy (bits) of a normalized pure state on dims[0] x dims[1]."""
    s = schmidt_coefficients(np.asarray(vector).reshape(dims))
    p = s**2
    p = p[p > EIG_CLAMP]
    return float(max(0.0, -np.sum(p * np.log2(p))))


def entanglement_entropy(joint: JointState, tol: float = 1e-9) -> float:
    """Atom-field entanglement entropy in bits from the Schmidt spectrum."""
    if not joint.is_normalized(tol):
        raise ValueError(f"entanglement entropy needs a normalized state (norm^2 = {joint.norm**2})")
    return bipartite_entropy(joint.matrix, joint.matrix.shape)
