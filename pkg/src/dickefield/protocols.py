"""End-to-end drivers: atomic cat, GHZ, field trapping, holographic storage and field cat states.

Every driver evolves numerically under phi0 Nz Rz and, next to the numeric
result, assembles the corresponding closed-form state so callers can check
one against the other.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .dynamics import JointState, evolve_effective
from .field import (
    LINEAR_POLARIZATIONS,
    FieldState,
    PolarizationQubit,
    qubit_to_field,
    two_mode_coherent,
)
from .measures import DensityOperator, entanglement_entropy, fidelity, partial_trace
from .spin import (
    CoherentSpinParams,
    DickeState,
    coherent_overlap_analytic,
    coherent_spin_state,
    product_expansion,
    product_tensor,
    two_j_of,
)

ZERO_PROBABILITY = 1e-15


@dataclass(frozen=True)
class AtomOutcome:
    """Atomic state conditioned on one linear-polarization detection."""

    label: str
    probability: float
    state: DickeState | None
    closed_form: DickeState | None

    @property
    def possible(self) -> bool:
        return self.state is not None

    @property
    def closed_form_fidelity(self) -> float:
        if self.state is None or self.closed_form is None:
            return float("nan")
        return fidelity(self.state, self.closed_form)


@dataclass(frozen=True)
class CatResult:
    joint: JointState
    closed_form: JointState
    outcomes: dict[str, AtomOutcome]
    branch_overlap: complex  # closed form <theta, phi+phi0t | theta, phi-phi0t>
    branch_overlap_numeric: complex
    branch_phases: tuple[float, float]
    entropy: float

    @property
    def closed_form_fidelity(self) -> float:
        return fidelity(self.joint, self.closed_form)


def _coherent_branches(j, theta: float, phi: float, phi0t: float) -> tuple[DickeState, DickeState]:
    plus = coherent_spin_state(j, CoherentSpinParams(theta, phi + phi0t))
    minus = coherent_spin_state(j, CoherentSpinParams(theta, phi - phi0t))
    return plus, minus


def cat_closed_form(j, theta: float, phi: float, qubit: PolarizationQubit, phi0t: float, n_max: int = 1) -> JointState:
    """alpha e^{i phi0t J} |theta,phi+phi0t>|1,0> + beta e^{-i phi0t J} |theta,phi-phi0t>|0,1>."""
    jj = two_j_of(j) / 2
    plus, minus = _coherent_branches(jj, theta, phi, phi0t)
    f10 = qubit_to_field(PolarizationQubit(1, 0), n_max)
    f01 = qubit_to_field(PolarizationQubit(0, 1), n_max)
    amps = qubit.alpha * cmath.exp(1j * phi0t * jj) * np.multiply.outer(plus.amplitudes, f10.grid)
    amps = amps + qubit.beta * cmath.exp(-1j * phi0t * jj) * np.multiply.outer(minus.amplitudes, f01.grid)
    return JointState(jj, n_max, amps)


def initial_joint(j, theta: float, phi: float, field: FieldState) -> JointState:
    return JointState.product(coherent_spin_state(j, CoherentSpinParams(theta, phi)), field)


def run_mesoscopic_cat(
    j, theta: float, phi: float, qubit: PolarizationQubit, phi0: float, t: float, n_max: int = 1
) -> CatResult:
    jj = two_j_of(j) / 2
    phi0t = phi0 * t
    joint = evolve_effective(initial_joint(jj, theta, phi, qubit_to_field(qubit, n_max)), phi0, t)
    plus, minus = _coherent_branches(jj, theta, phi, phi0t)
    branch_plus = qubit.alpha * cmath.exp(1j * phi0t * jj) * plus.amplitudes
    branch_minus = qubit.beta * cmath.exp(-1j * phi0t * jj) * minus.amplitudes

    outcomes = {}
    psi = joint.amplitudes
    for label, (a, b) in LINEAR_POLARIZATIONS.items():
        atoms = a * psi[:, 1, 0] + b * psi[:, 0, 1]
        prob = float(np.vdot(atoms, atoms).real)
        if prob <= ZERO_PROBABILITY:
            outcomes[label] = AtomOutcome(label, prob, None, None)
            continue
        closed = DickeState(jj, branch_plus + (b / a) * branch_minus)
        outcomes[label] = AtomOutcome(label, prob, DickeState(jj, atoms / math.sqrt(prob)), closed.normalized())

    return CatResult(
        joint=joint,
        closed_form=cat_closed_form(jj, theta, phi, qubit, phi0t, n_max),
        outcomes=outcomes,
        branch_overlap=coherent_overlap_analytic(jj, theta, phi + phi0t, phi - phi0t),
        branch_overlap_numeric=plus.inner(minus),
        branch_phases=(phi0t * jj, -phi0t * jj),
        entropy=entanglement_entropy(joint),
    )


def _lowdin_pair(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray] | None:
    """Symmetric orthogonalization of two normalized vectors; None when they are parallel."""
    s = np.vdot(a, b)
    if 1.0 - abs(s) < 1e-12:
        return None
    gram = np.array([[1.0, s], [np.conj(s), 1.0]])
    ev, vecs = np.linalg.eigh(gram)
    inv_sqrt = (vecs / np.sqrt(ev)) @ vecs.conj().T
    basis = np.stack([a, b], axis=1) @ inv_sqrt
    return basis[:, 0], basis[:, 1]


@dataclass(frozen=True)
class GhzResult:
    n_atoms: int
    state: np.ndarray  # 2^N product-basis amplitudes after the x detection
    probability: float
    reference: np.ndarray | None
    ghz_fidelity: float  # nan when the two branches coincide
    branch_overlap: complex  # <branch+ | branch->, N atoms
    single_atom_overlap: complex
    entropy: float  # atom-field entanglement before the detection
    cat: CatResult


def run_ghz(
    n_atoms: int, theta: float, phi: float, qubit: PolarizationQubit, phi0: float, t: float, outcome: str = "x"
) -> GhzResult:
    if n_atoms < 2:
        raise ValueError("GHZ generation needs at least two atoms")
    if outcome not in LINEAR_POLARIZATIONS:
        raise ValueError(f"unknown polarization outcome {outcome!r}")
    jj = n_atoms / 2
    phi0t = phi0 * t
    cat = run_mesoscopic_cat(jj, theta, phi, qubit, phi0, t)

    a = np.array(product_expansion(n_atoms, CoherentSpinParams(theta, phi + phi0t)))
    b = np.array(product_expansion(n_atoms, CoherentSpinParams(theta, phi - phi0t)))
    big_a = product_tensor(a, n_atoms)
    big_b = product_tensor(b, n_atoms)
    pa, pb = LINEAR_POLARIZATIONS[outcome]
    coeff_a = qubit.alpha * cmath.exp(1j * phi0t * jj)
    coeff_b = (pb / pa) * qubit.beta * cmath.exp(-1j * phi0t * jj)
    state = coeff_a * big_a + coeff_b * big_b
    state = state / np.linalg.norm(state)

    pair = _lowdin_pair(big_a, big_b)
    if pair is None:
        reference, ghz_fid = None, float("nan")
    else:
        phase_a = cmath.exp(1j * cmath.phase(coeff_a)) if coeff_a != 0 else 1.0
        phase_b = cmath.exp(1j * cmath.phase(coeff_b)) if coeff_b != 0 else 1.0
        reference = (phase_a * pair[0] + phase_b * pair[1]) / math.sqrt(2)
        ghz_fid = fidelity(reference, state)

    return GhzResult(
        n_atoms=n_atoms,
        state=state,
        probability=cat.outcomes[outcome].probability,
        reference=reference,
        ghz_fidelity=ghz_fid,
        branch_overlap=complex(np.vdot(big_a, big_b)),
        single_atom_overlap=complex(np.vdot(a, b)),
        entropy=cat.entropy,
        cat=cat,
    )


@dataclass(frozen=True)
class TrappingResult:
    n_atoms: int
    phi0t: float
    field: DensityOperator
    fidelity_initial: float
    fidelity_flipped: float
    entropy: float
    field_purity: float

    @property
    def case(self) -> str:
        if self.fidelity_initial >= 1 - 1e-9:
            return "identity"
        if self.fidelity_flipped >= 1 - 1e-9:
            return "phase-flip"
        return "neither"


def run_trapping(
    n_atoms: int, theta: float, phi: float, qubit: PolarizationQubit, phi0: float, t: float | None = None
) -> TrappingResult:
    """Field returned after the interaction; t defaults to phi0 t = pi."""
    if n_atoms < 1:
        raise ValueError("n_atoms must be >= 1")
    t = math.pi / phi0 if t is None else t
    jj = n_atoms / 2
    joint = evolve_effective(initial_joint(jj, theta, phi, qubit_to_field(qubit)), phi0, t)
    rho = partial_trace(joint, "field")
    flipped = PolarizationQubit(qubit.alpha, -qubit.beta)
    return TrappingResult(
        n_atoms=n_atoms,
        phi0t=phi0 * t,
        field=rho,
        fidelity_initial=fidelity(rho, qubit_to_field(qubit)),
        fidelity_flipped=fidelity(rho, qubit_to_field(flipped)),
        entropy=entanglement_entropy(joint),
        field_purity=rho.purity(),
    )


@dataclass(frozen=True)
class HologramResult:
    retrieved: PolarizationQubit | None  # None when the all-g- event cannot occur
    success_probability: float
    phase_correction: float  # 2 J phi0 t, known before readout
    corrected_fidelity: float
    m_distribution: np.ndarray  # atomic population over m, diagnostic
    expected: PolarizationQubit  # (alpha e^{i phi0t J}, beta e^{-i phi0t J})

    @property
    def success(self) -> bool:
        return self.retrieved is not None


def run_holography(
    j, theta: float, phi: float, qubit: PolarizationQubit, phi0: float, t: float
) -> HologramResult:
    """Store the qubit in the atomic coherence, then read out on the all-atoms-in-g- event."""
    jj = two_j_of(j) / 2
    phi0t = phi0 * t
    joint = evolve_effective(initial_joint(jj, theta, phi, qubit_to_field(qubit)), phi0, t)
    psi = joint.amplitudes
    field_amps = np.array([psi[0, 1, 0], psi[0, 0, 1]])
    prob = float(np.vdot(field_amps, field_amps).real)
    m_dist = np.sum(np.abs(psi) ** 2, axis=(1, 2))
    correction = 2 * jj * phi0t
    expected = PolarizationQubit(
        qubit.alpha * cmath.exp(1j * phi0t * jj), qubit.beta * cmath.exp(-1j * phi0t * jj)
    )
    if prob <= ZERO_PROBABILITY:
        return HologramResult(None, prob, correction, float("nan"), m_dist, expected)
    alpha_r, beta_r = field_amps / math.sqrt(prob)
    retrieved = PolarizationQubit(alpha_r, beta_r)
    corrected = np.array([alpha_r, beta_r * cmath.exp(1j * correction)])
    return HologramResult(retrieved, prob, correction, fidelity(qubit.vector, corrected), m_dist, expected)


@dataclass(frozen=True)
class FieldCatOutcome:
    label: str
    probability: float
    state: FieldState | None
    closed_form: FieldState

    @property
    def closed_form_fidelity(self) -> float:
        if self.state is None:
            return float("nan")
        return fidelity(self.state, self.closed_form)


@dataclass(frozen=True)
class FieldCatResult:
    joint: JointState
    closed_form: JointState
    deficit: float
    outcomes: tuple[FieldCatOutcome, FieldCatOutcome]

    @property
    def closed_form_fidelity(self) -> float:
        return fidelity(self.joint, self.closed_form)

    @property
    def cutoff_adequate(self) -> bool:
        return self.deficit <= 1e-10


def atom_measurement_basis(angle: float) -> tuple[np.ndarray, np.ndarray]:
    """Rotated single-atom basis over (g-, g+); angle pi/2 gives (g- +/- g+)/sqrt2."""
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    return np.array([c, s], dtype=complex), np.array([-s, c], dtype=complex)


def run_field_cat(
    alpha: complex,
    beta: complex,
    theta: float,
    phi: float,
    phi0: float,
    t: float,
    n_max: int = 20,
    atom_basis_angle: float = math.pi / 2,
) -> FieldCatResult:
    """One atom (J = 1/2) and a two-mode coherent field; measure the atom in a rotated basis."""
    phi0t = phi0 * t
    coherent = two_mode_coherent(alpha, beta, n_max)
    joint = evolve_effective(initial_joint(0.5, theta, phi, coherent.state), phi0, t)

    lower = two_mode_coherent(alpha * cmath.exp(0.5j * phi0t), beta * cmath.exp(-0.5j * phi0t), n_max).state
    upper = two_mode_coherent(alpha * cmath.exp(-0.5j * phi0t), beta * cmath.exp(0.5j * phi0t), n_max).state
    c_lower = math.cos(theta / 2)
    c_upper = cmath.exp(-1j * phi) * math.sin(theta / 2)
    closed = JointState(0.5, n_max, np.stack([c_lower * lower.grid, c_upper * upper.grid]))

    total = joint.norm**2
    outcomes = []
    for label, u in zip(("u0", "u1"), atom_measurement_basis(atom_basis_angle)):
        grid = np.conj(u[0]) * joint.amplitudes[0] + np.conj(u[1]) * joint.amplitudes[1]
        prob = float(np.vdot(grid, grid).real / total)
        direct = FieldState.from_grid(np.conj(u[0]) * c_lower * lower.grid + np.conj(u[1]) * c_upper * upper.grid)
        state = None if prob <= ZERO_PROBABILITY else FieldState.from_grid(grid).normalized()
        outcomes.append(FieldCatOutcome(label, prob, state, direct))
    return FieldCatResult(joint, closed, coherent.deficit, tuple(outcomes))
