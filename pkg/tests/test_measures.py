import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dickefield.dynamics import JointState, evolve_effective
from dickefield.field import FieldState, PolarizationQubit, qubit_to_field
from dickefield.measures import (
    DensityOperator,
    bipartite_entropy,
    entanglement_entropy,
    fidelity,
    partial_trace,
    schmidt_coefficients,
    von_neumann_entropy,
)
from dickefield.protocols import cat_closed_form
from dickefield.spin import CoherentSpinParams, coherent_overlap_analytic, coherent_spin_state


def random_vector(rng, dim):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_density(rng, dim, rank=None):
    g = rng.normal(size=(dim, rank or dim)) + 1j * rng.normal(size=(dim, rank or dim))
    rho = g @ g.conj().T
    return DensityOperator(rho / np.trace(rho).real)


def test_density_operator_validation():
    with pytest.raises(ValueError):
        DensityOperator(np.array([[1, 1], [0, 0]]))
    with pytest.raises(ValueError):
        DensityOperator(np.eye(2))
    with pytest.raises(ValueError):
        DensityOperator(np.diag([1.5, -0.5]))
    assert DensityOperator(np.eye(3) / 3).purity() == pytest.approx(1 / 3)


def test_fidelity_pure_cases():
    rng = np.random.default_rng(0)
    x = random_vector(rng, 5)
    assert fidelity(x, x) == pytest.approx(1.0)
    assert fidelity(x, 3j * x) == pytest.approx(1.0)
    assert fidelity(np.array([1, 0]), np.array([0, 1])) == 0.0
    with pytest.raises(ValueError):
        fidelity(np.ones(2), np.ones(3))


def test_fidelity_pure_vs_mixed_matches_expectation():
    rng = np.random.default_rng(1)
    for _ in range(20):
        psi = random_vector(rng, 4)
        rho = random_density(rng, 4)
        direct = np.real(np.conj(psi) @ rho.matrix @ psi)
        assert fidelity(psi, rho) == pytest.approx(direct, abs=1e-12)
        assert fidelity(rho, psi) == pytest.approx(direct, abs=1e-12)
        # Uhlmann route with a pure density operator agrees
        assert fidelity(DensityOperator.pure(psi), rho) == pytest.approx(direct, abs=1e-9)


def test_uhlmann_properties():
    rng = np.random.default_rng(2)
    a, b = random_density(rng, 3), random_density(rng, 3)
    assert fidelity(a, a) == pytest.approx(1.0, abs=1e-9)
    assert fidelity(a, b) == pytest.approx(fidelity(b, a), abs=1e-9)
    assert 0 <= fidelity(a, b) <= 1
    # commuting case: (sum sqrt(p q))^2
    p, q = np.array([0.2, 0.3, 0.5]), np.array([0.6, 0.1, 0.3])
    expected = np.sum(np.sqrt(p * q)) ** 2
    assert fidelity(DensityOperator(np.diag(p)), DensityOperator(np.diag(q))) == pytest.approx(expected)
    with pytest.raises(ValueError):
        fidelity(a, random_density(rng, 2))


def test_partial_trace_of_product_is_pure():
    atoms = coherent_spin_state(1.5, CoherentSpinParams(0.8, 0.1))
    joint = JointState.product(atoms, qubit_to_field(PolarizationQubit(0.6, 0.8)))
    for keep in ("atoms", "field"):
        assert partial_trace(joint, keep).purity() == pytest.approx(1.0, abs=1e-12)
        assert von_neumann_entropy(partial_trace(joint, keep)) == 0.0
    assert entanglement_entropy(joint) == 0.0
    with pytest.raises(ValueError):
        partial_trace(joint, "both")


def test_partial_trace_random_traces():
    rng = np.random.default_rng(3)
    amps = random_vector(rng, 3 * 9)
    joint = JointState(1, 2, amps)
    for keep, dim in (("atoms", 3), ("field", 9)):
        rho = partial_trace(joint, keep)
        assert rho.dim == dim
        assert np.trace(rho.matrix).real == pytest.approx(1.0, abs=1e-12)


def test_field_purity_half_at_quarter_turn():
    s = cat_closed_form(1, math.pi / 2, 0.0, PolarizationQubit(1 / math.sqrt(2), 1 / math.sqrt(2)), math.pi / 2)
    assert partial_trace(s, "field").purity() == pytest.approx(0.5, abs=1e-12)


def test_entropy_of_balanced_orthogonal_branches():
    amps = np.zeros((3, 2, 2), dtype=complex)
    amps[0, 1, 0] = 1 / math.sqrt(2)
    amps[2, 0, 1] = 1j / math.sqrt(2)
    joint = JointState(1, 1, amps)
    assert entanglement_entropy(joint) == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(schmidt_coefficients(joint.matrix)[:2], [1 / math.sqrt(2)] * 2)


def test_entropy_rejects_unnormalized():
    joint = JointState(0.5, 1, np.ones(8))
    with pytest.raises(ValueError):
        entanglement_entropy(joint)


@pytest.mark.parametrize("seed", range(5))
def test_entropy_cut_symmetry(seed):
    rng = np.random.default_rng(seed)
    joint = JointState(2, 2, random_vector(rng, 5 * 9))
    atoms = von_neumann_entropy(partial_trace(joint, "atoms"))
    field = von_neumann_entropy(partial_trace(joint, "field"))
    assert atoms == pytest.approx(field, abs=1e-9)
    assert entanglement_entropy(joint) == pytest.approx(atoms, abs=1e-9)


def test_bipartite_entropy_maximal():
    v = np.eye(4).reshape(-1) / 2
    assert bipartite_entropy(v, (4, 4)) == pytest.approx(2.0)


def test_entropy_invariant_under_diagonal_phase_on_balanced_support():
    # support only on n+ = n-, where Nz vanishes
    rng = np.random.default_rng(7)
    amps = np.zeros((4, 3, 3), dtype=complex)
    for k in range(3):
        amps[:, k, k] = rng.normal(size=4) + 1j * rng.normal(size=4)
    joint = JointState(1.5, 2, amps / np.linalg.norm(amps))
    before = entanglement_entropy(joint)
    after = entanglement_entropy(evolve_effective(joint, 0.9, 3.3))
    assert after == pytest.approx(before, abs=1e-12)


def test_entropy_invariant_under_local_phases():
    rng = np.random.default_rng(8)
    joint = JointState(1, 1, random_vector(rng, 12))
    local = np.exp(1j * rng.uniform(0, 6, size=3))[:, None, None] * joint.amplitudes
    assert entanglement_entropy(JointState(1, 1, local)) == pytest.approx(entanglement_entropy(joint), abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(
    two_j=st.integers(1, 12),
    theta=st.floats(0, math.pi),
    phi=st.floats(-3, 3),
    phi0t=st.floats(0, 2 * math.pi),
    angle=st.floats(0, math.pi / 2),
    rel=st.floats(-math.pi, math.pi),
)
def test_field_purity_formula(two_j, theta, phi, phi0t, angle, rel):
    j = two_j / 2
    q = PolarizationQubit(math.cos(angle), math.sin(angle) * complex(math.cos(rel), math.sin(rel)))
    s = cat_closed_form(j, theta, phi, q, phi0t)
    overlap = coherent_overlap_analytic(j, theta, phi + phi0t, phi - phi0t)
    expected = 1 - 2 * abs(q.alpha * q.beta) ** 2 * (1 - abs(overlap) ** 2)
    assert partial_trace(s, "field").purity() == pytest.approx(expected, abs=1e-10)


def test_closed_form_matches_evolution():
    q = PolarizationQubit(0.6, 0.8)
    atoms = coherent_spin_state(2, CoherentSpinParams(1.0, 0.3))
    joint = JointState.product(atoms, qubit_to_field(q))
    evolved = evolve_effective(joint, 1.0, 0.7)
    assert fidelity(evolved, cat_closed_form(2, 1.0, 0.3, q, 0.7)) == pytest.approx(1.0, abs=1e-12)
    assert isinstance(qubit_to_field(q), FieldState)
