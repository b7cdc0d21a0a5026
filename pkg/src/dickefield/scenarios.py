"""Dispatch validated configurations to the protocol drivers and collect run records."""
from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, NamedTuple

import numpy as np

from . import __version__
from .checks import algebra_report
from .config import ScenarioConfig
from .dynamics import JointState, compare_full_effective
from .field import CUTOFF_TOL, PolarizationQubit
from .hamiltonians import DimensionError
from .protocols import run_field_cat, run_ghz, run_holography, run_mesoscopic_cat, run_trapping
from .spin import m_values


class NumericalGuardError(RuntimeError):
    """A numerical safety limit (photon cutoff, dimension) was violated."""


class Scalar(NamedTuple):
    value: Any
    formula: str


@dataclass
class RunRecord:
    scenario: str
    config: dict
    scalars: dict[str, Scalar]
    states: dict | None = None
    version: str = __version__
    duration_s: float | None = None

    def to_dict(self) -> dict:
        out = {
            "scenario": self.scenario,
            "version": self.version,
            "config": self.config,
            "scalars": {k: {"value": s.value, "formula": s.formula} for k, s in self.scalars.items()},
        }
        if self.states is not None:
            out["states"] = self.states
        if self.duration_s is not None:
            out["duration_s"] = self.duration_s
        return out


def _qubit(cfg: ScenarioConfig) -> PolarizationQubit:
    alpha = cfg.alpha if cfg.alpha is not None else 1 / math.sqrt(2)
    beta = cfg.beta if cfg.beta is not None else 1 / math.sqrt(2)
    norm = math.sqrt(abs(alpha) ** 2 + abs(beta) ** 2)
    return PolarizationQubit(alpha / norm, beta / norm)


def _joint_dump(joint: JointState) -> dict:
    m = m_values(joint.j)
    n = np.arange(joint.n_max + 1)
    basis = [[float(mm), int(a), int(b)] for mm in m for a in n for b in n]
    return {"basis": ["m", "n_plus", "n_minus"], "labels": basis, "amplitudes": joint.vector}


def _cat(cfg: ScenarioConfig) -> tuple[dict, dict]:
    phi0, t = cfg.phi0_and_time()
    j = cfg.n_atoms / 2
    res = run_mesoscopic_cat(j, cfg.theta, cfg.phi, _qubit(cfg), phi0, t)
    x, y = res.outcomes["x"], res.outcomes["y"]
    scalars = {
        "phi0t": Scalar(phi0 * t, "phi0 * t"),
        "probability_x": Scalar(x.probability, "|<x|field>|^2, x = (|1+,0-> + |0+,1->)/sqrt2"),
        "probability_y": Scalar(y.probability, "|<y|field>|^2, y = (|1+,0-> - |0+,1->)/sqrt2"),
        "overlap_closed_form": Scalar(
            res.branch_overlap, "<theta,phi+phi0t|theta,phi-phi0t> = exp(2iJ phi0t)[cos(phi0t) - i cos(theta) sin(phi0t)]^(2J)"
        ),
        "overlap_numeric": Scalar(res.branch_overlap_numeric, "inner product of the two coherent-state vectors"),
        "branch_phase_plus": Scalar(res.branch_phases[0], "+phi0t J on alpha |theta,phi+phi0t>|1+,0->"),
        "branch_phase_minus": Scalar(res.branch_phases[1], "-phi0t J on beta |theta,phi-phi0t>|0+,1->"),
        "evolution_closed_form_fidelity": Scalar(
            res.closed_form_fidelity,
            "|<closed form|exp(-i phi0t Nz Rz)|theta,phi>|psi_f>|^2, closed form = alpha e^{i phi0t J}|theta,phi+phi0t>|1,0> + beta e^{-i phi0t J}|theta,phi-phi0t>|0,1>",
        ),
        "atomic_cat_fidelity_x": Scalar(
            x.closed_form_fidelity, "fidelity of the x-conditioned atomic state with alpha e^{i phi0t J}|theta,phi+phi0t> + beta e^{-i phi0t J}|theta,phi-phi0t>"
        ),
        "entropy_bits": Scalar(res.entropy, "von Neumann entropy of the atomic reduced state, log2"),
    }
    states = {"joint": _joint_dump(res.joint)}
    if x.state is not None:
        states["atoms_after_x"] = {"basis": ["m"], "labels": [float(v) for v in m_values(j)], "amplitudes": x.state.amplitudes}
    return scalars, states


def _ghz(cfg: ScenarioConfig) -> tuple[dict, dict]:
    phi0, t = cfg.phi0_and_time()
    res = run_ghz(cfg.n_atoms, cfg.theta, cfg.phi, _qubit(cfg), phi0, t)
    scalars = {
        "phi0t": Scalar(phi0 * t, "phi0 * t"),
        "ghz_fidelity": Scalar(res.ghz_fidelity, "|<GHZ reference|x-conditioned product-basis state>|^2, reference from symmetric orthogonalization of the branches"),
        "branch_overlap": Scalar(res.branch_overlap, "prod_j <theta,phi+phi0t|theta,phi-phi0t>_j"),
        "single_atom_overlap": Scalar(res.single_atom_overlap, "cos^2(theta/2) + sin^2(theta/2) e^{2i phi0t}"),
        "probability_x": Scalar(res.probability, "|<x|field>|^2"),
        "entropy_bits": Scalar(res.entropy, "atom-field entanglement before detection, log2"),
    }
    labels = ["".join("+" if (i >> (cfg.n_atoms - 1 - k)) & 1 else "-" for k in range(cfg.n_atoms)) for i in range(2**cfg.n_atoms)]
    states = {"ghz": {"basis": ["g-/g+ per atom"], "labels": labels, "amplitudes": res.state}}
    return scalars, states


def _trapping(cfg: ScenarioConfig) -> tuple[dict, dict]:
    if cfg.phi0t is None and cfg.omega is None:
        phi0, t = 1.0, math.pi
    else:
        phi0, t = cfg.phi0_and_time()
    res = run_trapping(cfg.n_atoms, cfg.theta, cfg.phi, _qubit(cfg), phi0, t)
    scalars = {
        "phi0t": Scalar(res.phi0t, "phi0 * t"),
        "field_fidelity_initial": Scalar(res.fidelity_initial, "<psi_f|rho_field|psi_f>, psi_f = alpha|1+,0-> + beta|0+,1->"),
        "field_fidelity_flipped": Scalar(res.fidelity_flipped, "<psi'|rho_field|psi'>, psi' = alpha|1+,0-> - beta|0+,1->"),
        "field_purity": Scalar(res.field_purity, "Tr rho_field^2"),
        "entropy_bits": Scalar(res.entropy, "atom-field entanglement after the interaction, log2"),
        "case": Scalar(res.case, "identity for even N at phi0t = pi, phase-flip for odd N"),
    }
    return scalars, {"field": {"basis": ["n_plus", "n_minus"], "density_matrix": res.field.matrix}}


def _holography(cfg: ScenarioConfig) -> tuple[dict, dict]:
    phi0, t = cfg.phi0_and_time()
    j = cfg.n_atoms / 2
    res = run_holography(j, cfg.theta, cfg.phi, _qubit(cfg), phi0, t)
    retrieved = res.retrieved
    scalars = {
        "phi0t": Scalar(phi0 * t, "phi0 * t"),
        "success_probability": Scalar(res.success_probability, "|<-J|theta,phi>|^2 probability of finding every atom in g-"),
        "success_probability_closed_form": Scalar(math.cos(cfg.theta / 2) ** (4 * j), "cos(theta/2)^(4J)"),
        "phase_correction": Scalar(res.phase_correction, "2 J phi0 t"),
        "retrieved_alpha": Scalar(None if retrieved is None else retrieved.alpha, "alpha e^{i phi0t J}"),
        "retrieved_beta": Scalar(None if retrieved is None else retrieved.beta, "beta e^{-i phi0t J}"),
        "corrected_fidelity": Scalar(res.corrected_fidelity, "fidelity of the phase-corrected retrieved qubit with the stored one"),
    }
    return scalars, {"m_distribution": {"basis": ["m"], "labels": [float(v) for v in m_values(j)], "populations": res.m_distribution}}


def _field_cat(cfg: ScenarioConfig) -> tuple[dict, dict]:
    phi0, t = cfg.phi0_and_time()
    n_max = cfg.n_max if cfg.n_max is not None else 20
    angle = cfg.atom_basis_angle if cfg.atom_basis_angle is not None else math.pi / 2
    res = run_field_cat(cfg.alpha, cfg.beta, cfg.theta, cfg.phi, phi0, t, n_max, angle)
    if not res.cutoff_adequate:
        raise NumericalGuardError(
            f"photon cutoff n_max={n_max} drops weight {res.deficit:.3e} > {CUTOFF_TOL:g}; raise --n-max"
        )
    u0, u1 = res.outcomes
    scalars = {
        "phi0t": Scalar(phi0 * t, "phi0 * t"),
        "evolution_closed_form_fidelity": Scalar(
            res.closed_form_fidelity,
            "cos(theta/2)|g-,alpha e^{i phi0t/2},beta e^{-i phi0t/2}> + e^{-i phi} sin(theta/2)|g+,alpha e^{-i phi0t/2},beta e^{i phi0t/2}>",
        ),
        "truncation_deficit": Scalar(res.deficit, "1 - truncated norm^2 of |alpha,beta>"),
        "probability_u0": Scalar(u0.probability, "atom found in cos(a/2)|g-> + sin(a/2)|g+>"),
        "probability_u1": Scalar(u1.probability, "atom found in -sin(a/2)|g-> + cos(a/2)|g+>"),
        "field_cat_fidelity_u0": Scalar(u0.closed_form_fidelity, "conditional field vs direct two-coherent-state superposition"),
        "field_cat_fidelity_u1": Scalar(u1.closed_form_fidelity, "conditional field vs direct two-coherent-state superposition"),
    }
    return scalars, {"joint": _joint_dump(res.joint)}


def _validate_effective(cfg: ScenarioConfig) -> tuple[dict, dict]:
    phi0t = cfg.phi0t if cfg.phi0t is not None else math.pi / 2
    theta = cfg.theta if cfg.theta is not None else math.pi / 2
    phi = cfg.phi if cfg.phi is not None else 0.0
    omega = cfg.omega if cfg.omega is not None else 1.0
    runs = [
        compare_full_effective(cfg.n_atoms, r, omega=omega, phi0t=phi0t, theta=theta, phi=phi, qubit=_qubit(cfg))
        for r in cfg.delta_ratios
    ]
    scalars: dict[str, Scalar] = {"phi0t": Scalar(phi0t, "phi0 * t")}
    for run in runs:
        tag = f"{run.delta_over_omega:g}"
        scalars[f"infidelity_r{tag}"] = Scalar(
            run.infidelity, "1 - |<effective|ground-manifold projection of full, phases removed>|^2, averaged over one period 2pi/delta"
        )
        scalars[f"leakage_r{tag}"] = Scalar(run.leakage, "population outside the atomic ground manifold")
    for a, b in zip(runs, runs[1:]):
        scalars[f"infidelity_ratio_r{a.delta_over_omega:g}_r{b.delta_over_omega:g}"] = Scalar(
            a.infidelity / b.infidelity, "dispersive scaling: (delta_b/delta_a)^2 expected"
        )
    return scalars, {}


def _algebra_check(cfg: ScenarioConfig) -> tuple[dict, dict]:
    n_max = cfg.n_max if cfg.n_max is not None else 6
    report = algebra_report(cfg.j_max, n_max, cfg.seed)
    formulas = {
        "spin_commutator_residual": "max |[R-,R+] + 2Rz|, |[Rz,R+/-] -/+ R+/-| over J = 1/2..j_max",
        "spin_casimir_residual": "max |Rz^2 + (R+R- + R-R+)/2 - J(J+1)|",
        "field_commutator_residual_nz": "max |[N-,N+] + 2Nz|, |[Nz,N+/-] -/+ N+/-| below the cutoff, Nz = n+ - n-",
        "field_commutator_residual_half_nz": "same relations with Nz/2 in place of Nz",
        "field_action_residual": "random-state check of [N-,N+] = -Nz through the operator actions",
    }
    return {k: Scalar(v, formulas[k]) for k, v in report.items()}, {}


_DISPATCH = {
    "cat": _cat,
    "ghz": _ghz,
    "trapping": _trapping,
    "holography": _holography,
    "field-cat": _field_cat,
    "validate-effective": _validate_effective,
    "algebra-check": _algebra_check,
}


def _run_point(cfg: ScenarioConfig) -> RunRecord:
    start = time.perf_counter()
    try:
        scalars, states = _DISPATCH[cfg.scenario](cfg)
    except DimensionError as exc:
        raise NumericalGuardError(f"{cfg.scenario}: {exc}") from exc
    except ValueError as exc:
        raise ValueError(f"{cfg.scenario}: {exc}") from exc
    record = RunRecord(cfg.scenario, cfg.echo(), scalars, states if cfg.dump_state else None)
    if cfg.timing:
        record.duration_s = time.perf_counter() - start
    return record


def sweep_points(cfg: ScenarioConfig) -> list[ScenarioConfig]:
    if cfg.sweep is None:
        return [cfg]
    return [cfg.at(cfg.sweep.name, v) for v in cfg.sweep.values()]


def run_scenario(cfg: ScenarioConfig) -> list[RunRecord]:
    """One record per sweep point, in grid order."""
    points = sweep_points(cfg)
    if cfg.jobs > 1 and len(points) > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            return list(pool.map(_run_point, points))
    return [_run_point(p) for p in points]
