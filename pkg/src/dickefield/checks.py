"""Dense-matrix residuals of the spin and field su(2) algebras."""
from __future__ import annotations

import numpy as np

from .field import FieldState, apply_nminus, apply_nplus, apply_nz, nminus_matrix, nplus_matrix, nz_matrix, total_photons
from .spin import rminus_matrix, rplus_matrix, rz_matrix


def _comm(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def _maxabs(x: np.ndarray) -> float:
    return float(np.max(np.abs(x))) if x.size else 0.0


def spin_residuals(j) -> dict[str, float]:
    rz, rp, rm = rz_matrix(j), rplus_matrix(j), rminus_matrix(j)
    jj = (rz.shape[0] - 1) / 2
    casimir = rz @ rz + 0.5 * (rp @ rm + rm @ rp)
    return {
        "lower_raise": _maxabs(_comm(rm, rp) + 2 * rz),
        "z_raise": _maxabs(_comm(rz, rp) - rp),
        "z_lower": _maxabs(_comm(rz, rm) + rm),
        "casimir": _maxabs(casimir - jj * (jj + 1) * np.eye(rz.shape[0])),
    }


def field_residuals(n_max: int, z_scale: float = 1.0) -> dict[str, float]:
    """Residuals of [N-,N+] = -2Z and [Z,N+/-] = +/-N+/- with Z = z_scale * Nz.

    Restricted to total photon number < n_max, where truncation is invisible.
    Nz = n+ - n- only closes this algebra for z_scale = 1/2.
    """
    z = z_scale * nz_matrix(n_max)
    npl, nmi = nplus_matrix(n_max), nminus_matrix(n_max)
    keep = np.flatnonzero(total_photons(n_max) < n_max)
    sub = np.ix_(keep, keep)
    return {
        "lower_raise": _maxabs((_comm(nmi, npl) + 2 * z)[sub]),
        "z_raise": _maxabs((_comm(z, npl) - npl)[sub]),
        "z_lower": _maxabs((_comm(z, nmi) + nmi)[sub]),
    }


def field_action_residual(n_max: int, rng: np.random.Generator) -> float:
    """[N-, N+] psi + Nz psi via the operator actions, for a random state below the cutoff."""
    amps = rng.normal(size=(n_max + 1) ** 2) + 1j * rng.normal(size=(n_max + 1) ** 2)
    amps[total_photons(n_max) >= n_max] = 0.0
    psi = FieldState(n_max, amps / np.linalg.norm(amps))
    a, _ = apply_nplus(psi)
    a, _ = apply_nminus(a)
    b, _ = apply_nminus(psi)
    b, _ = apply_nplus(b)
    return _maxabs(a.amplitudes - b.amplitudes + apply_nz(psi).amplitudes)


def algebra_report(j_max: float = 8.0, n_max_max: int = 6, seed: int = 0) -> dict[str, float]:
    rng = np.random.default_rng(seed)
    spins = [spin_residuals(k / 2) for k in range(1, int(round(2 * j_max)) + 1)]
    fields = [field_residuals(n) for n in range(1, n_max_max + 1)]
    halved = [field_residuals(n, 0.5) for n in range(1, n_max_max + 1)]
    return {
        "spin_commutator_residual": max(max(r["lower_raise"], r["z_raise"], r["z_lower"]) for r in spins),
        "spin_casimir_residual": max(r["casimir"] for r in spins),
        "field_commutator_residual_nz": max(max(r.values()) for r in fields),
        "field_commutator_residual_half_nz": max(max(r.values()) for r in halved),
        "field_action_residual": max(field_action_residual(n, rng) for n in range(1, n_max_max + 1)),
    }
