import math
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dickefield.spin import (
    CoherentSpinParams,
    DickeState,
    apply_rminus,
    apply_rplus,
    apply_rz,
    basis_state,
    coherent_overlap_analytic,
    coherent_spin_state,
    dicke_to_product,
    ground_state,
    product_expansion,
    product_tensor,
    rminus_matrix,
    rplus_matrix,
    rz_matrix,
    symmetric_projection,
)

SPINS = [k / 2 for k in range(1, 17)]


@pytest.mark.parametrize("j, expected", [(0.5, [1, 0]), (1, [1, 0, 0])])
def test_ground_state(j, expected):
    np.testing.assert_array_equal(ground_state(j).amplitudes, expected)


def test_ground_state_large():
    g = ground_state(5)
    assert g.dim == 11
    assert g.amplitudes[0] == 1 and np.count_nonzero(g.amplitudes) == 1


@pytest.mark.parametrize("j", [-0.5, 0.3, 1.25])
def test_ground_state_rejects_bad_j(j):
    with pytest.raises(ValueError):
        ground_state(j)


def test_dicke_state_length_checked():
    with pytest.raises(ValueError):
        DickeState(1, np.ones(2))


def test_rz_eigenvalues():
    np.testing.assert_allclose(apply_rz(ground_state(1)).amplitudes, [-1, 0, 0])
    s = DickeState(0.5, np.array([0.3, 0.7j]))
    np.testing.assert_allclose(apply_rz(s).amplitudes, [-0.15, 0.35j])


def test_ladder_annihilates_extremes():
    for j in (0.5, 1, 3.5):
        assert np.all(apply_rminus(ground_state(j)).amplitudes == 0)
        assert np.all(apply_rplus(basis_state(j, j)).amplitudes == 0)


def test_ladder_matrix_elements():
    np.testing.assert_allclose(apply_rminus(basis_state(0.5, 0.5)).amplitudes, [1, 0])
    np.testing.assert_allclose(apply_rplus(basis_state(0.5, -0.5)).amplitudes, [0, 1])
    # sqrt((1+0)(1-0+1)) and sqrt((1+1)(1-1+1)) for J = 1
    np.testing.assert_allclose(apply_rminus(basis_state(1, 0)).amplitudes, [math.sqrt(2), 0, 0])
    np.testing.assert_allclose(apply_rplus(basis_state(1, -1)).amplitudes, [0, math.sqrt(2), 0])


@pytest.mark.parametrize("j", SPINS)
def test_ladder_against_formula(j):
    # every matrix element checked against sqrt((J-m)(J+m+1)) evaluated independently
    rp = rplus_matrix(j)
    dim = int(2 * j) + 1
    for col in range(dim):
        m = -j + col
        for row in range(dim):
            expected = math.sqrt((j - m) * (j + m + 1)) if row == col + 1 else 0.0
            assert rp[row, col] == pytest.approx(expected, abs=1e-14)


@pytest.mark.parametrize("j", SPINS)
def test_commutators_and_casimir(j):
    rz, rp, rm = rz_matrix(j), rplus_matrix(j), rminus_matrix(j)
    np.testing.assert_allclose(rm @ rp - rp @ rm, -2 * rz, atol=1e-12)
    np.testing.assert_allclose(rz @ rp - rp @ rz, rp, atol=1e-12)
    np.testing.assert_allclose(rz @ rm - rm @ rz, -rm, atol=1e-12)
    casimir = rz @ rz + 0.5 * (rp @ rm + rm @ rp)
    np.testing.assert_allclose(casimir, j * (j + 1) * np.eye(rz.shape[0]), atol=1e-12)


def test_theta_range_rejected():
    with pytest.raises(ValueError):
        CoherentSpinParams(-0.1, 0)
    with pytest.raises(ValueError):
        CoherentSpinParams(math.pi + 1e-9, 0)


@pytest.mark.parametrize("j", [0.5, 2, 7.5])
@pytest.mark.parametrize("phi", [0.0, 1.3])
def test_coherent_limits(j, phi):
    np.testing.assert_allclose(
        coherent_spin_state(j, CoherentSpinParams(0.0, phi)).amplitudes, ground_state(j).amplitudes, atol=1e-15
    )
    top = coherent_spin_state(j, CoherentSpinParams(math.pi, 0.0)).amplitudes
    assert abs(top[-1]) == pytest.approx(1.0, abs=1e-12)
    assert np.all(np.abs(top[:-1]) < 1e-12)


def test_coherent_half_spin_equator():
    s = coherent_spin_state(0.5, CoherentSpinParams(math.pi / 2, 0))
    np.testing.assert_allclose(s.amplitudes, [1 / math.sqrt(2), 1 / math.sqrt(2)], atol=1e-15)


def _coherent_direct(j, theta, phi):
    # straightforward evaluation with exact integer binomials
    two_j = int(2 * j)
    return np.array(
        [
            math.sqrt(math.comb(two_j, k)) * math.cos(theta / 2) ** (two_j - k) * (math.sin(theta / 2) * np.exp(-1j * phi)) ** k
            for k in range(two_j + 1)
        ]
    )


@pytest.mark.parametrize("j", [0.5, 1, 2.5, 6])
def test_coherent_matches_direct_formula(j):
    np.testing.assert_allclose(
        coherent_spin_state(j, CoherentSpinParams(1.1, 0.4)).amplitudes, _coherent_direct(j, 1.1, 0.4), atol=1e-13
    )


@pytest.mark.parametrize("j", [1, 10, 25, 50, 400])
def test_coherent_norm_large_j(j):
    s = coherent_spin_state(j, CoherentSpinParams(1.2, 0.7))
    assert np.all(np.isfinite(s.amplitudes))
    assert s.norm**2 == pytest.approx(1.0, abs=1e-12)


def test_overlap_special_points():
    for j in (0.5, 1, 3, 10):
        assert abs(coherent_overlap_analytic(j, math.pi / 2, 0.3 + math.pi / 2, 0.3 - math.pi / 2)) < 1e-14
        assert coherent_overlap_analytic(j, 1.0, 0.4, 0.4) == pytest.approx(1.0, abs=1e-15)


def test_overlap_matches_numeric_case():
    j, theta, x = 1, math.pi / 3, 0.7
    a = coherent_spin_state(j, CoherentSpinParams(theta, x))
    b = coherent_spin_state(j, CoherentSpinParams(theta, -x))
    assert coherent_overlap_analytic(j, theta, x, -x) == pytest.approx(a.inner(b), abs=1e-12)


@pytest.mark.parametrize("j", [0.5, 1, 2, 5, 10])
def test_overlap_grid(j):
    phi = 0.37
    for theta in np.arange(7) * math.pi / 6:
        for x in np.arange(0, math.pi + 1e-9, 0.1):
            a = coherent_spin_state(j, CoherentSpinParams(theta, phi + x))
            b = coherent_spin_state(j, CoherentSpinParams(theta, phi - x))
            analytic = coherent_overlap_analytic(j, theta, phi + x, phi - x)
            assert abs(analytic - a.inner(b)) < 1e-10
            modulus = abs(math.cos(x) ** 2 + math.cos(theta) ** 2 * math.sin(x) ** 2) ** j
            assert abs(abs(analytic) - modulus) < 1e-10


def test_product_expansion_trivial():
    assert product_expansion(3, CoherentSpinParams(0.0, 0.5)) == (1, 0)
    tensor = product_tensor(product_expansion(3, CoherentSpinParams(0.0, 0.5)), 3)
    assert tensor[0] == 1 and np.count_nonzero(tensor) == 1


def test_product_tensor_norm():
    tensor = product_tensor(product_expansion(3, CoherentSpinParams(1.1, 0.4)), 3)
    assert np.linalg.norm(tensor) == pytest.approx(1.0, abs=1e-14)


def _symmetrize_bruteforce(tensor, n):
    # <m| = binom(N,k)^(-1/2) sum over explicit configurations with k ones
    amps = []
    for k in range(n + 1):
        configs = [c for c in product((0, 1), repeat=n) if sum(c) == k]
        idx = [int("".join(map(str, c)), 2) for c in configs]
        amps.append(sum(tensor[i] for i in idx) / math.sqrt(len(configs)))
    return np.array(amps)


@pytest.mark.parametrize("n, theta, phi", [(2, math.pi / 2, 0.0), (3, 1.1, 0.4), (5, 2.0, -1.0)])
def test_product_expansion_symmetrizes_to_coherent_state(n, theta, phi):
    params = CoherentSpinParams(theta, phi)
    tensor = product_tensor(product_expansion(n, params), n)
    brute = _symmetrize_bruteforce(tensor, n)
    expected = coherent_spin_state(n / 2, params).amplitudes
    np.testing.assert_allclose(brute, expected, atol=1e-14)
    np.testing.assert_allclose(symmetric_projection(tensor, n).amplitudes, expected, atol=1e-14)
    np.testing.assert_allclose(dicke_to_product(coherent_spin_state(n / 2, params)), tensor, atol=1e-14)


@settings(max_examples=60, deadline=None)
@given(
    two_j=st.integers(1, 30),
    theta=st.floats(0, math.pi),
    phi=st.floats(-10, 10),
    x=st.floats(-4, 4),
)
def test_overlap_property(two_j, theta, phi, x):
    j = two_j / 2
    a = coherent_spin_state(j, CoherentSpinParams(theta, phi + x))
    b = coherent_spin_state(j, CoherentSpinParams(theta, phi - x))
    assert abs(coherent_overlap_analytic(j, theta, phi + x, phi - x) - a.inner(b)) < 1e-10
