"""Acceptance criteria, one test each, at the stated tolerances."""
import cmath
import math
import subprocess
import sys
import time

import numpy as np

from dickefield.checks import algebra_report
from dickefield.dynamics import JointState, compare_full_effective, evolve_effective
from dickefield.field import PolarizationQubit, qubit_to_field
from dickefield.measures import fidelity
from dickefield.protocols import cat_closed_form, run_field_cat, run_ghz, run_holography, run_trapping
from dickefield.spin import CoherentSpinParams, coherent_overlap_analytic, coherent_spin_state

SEED = 20240611


def random_qubit(rng):
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    v /= np.linalg.norm(v)
    return PolarizationQubit(v[0], v[1])


def test_1a_spin_algebra(acceptance):
    start = time.perf_counter()
    r = algebra_report(j_max=8, n_max_max=6)
    elapsed = time.perf_counter() - start
    spin = max(r["spin_commutator_residual"], r["spin_casimir_residual"])
    ok = acceptance("1a spin algebra", spin <= 1e-12 and elapsed < 5, f"residual {spin:.2e}, {elapsed:.2f}s")
    assert ok


def test_1b_field_algebra(acceptance):
    # relations checked as stated, with Nz = n+ - n-; the Nz/2 value is shown for diagnosis
    start = time.perf_counter()
    r = algebra_report(j_max=8, n_max_max=6)
    elapsed = time.perf_counter() - start
    field = r["field_commutator_residual_nz"]
    ok = acceptance(
        "1b field algebra",
        field <= 1e-12 and elapsed < 5,
        f"residual {field:.2e} (with Nz/2: {r['field_commutator_residual_half_nz']:.2e}), {elapsed:.2f}s",
    )
    assert ok


def test_2_overlap_formula(acceptance):
    start = time.perf_counter()
    worst = 0.0
    for j in (0.5, 1, 2, 5, 10):
        for theta in np.linspace(0, math.pi, 7):
            for phi0t in np.linspace(0, math.pi, 32):
                a = coherent_spin_state(j, CoherentSpinParams(theta, 0.3 + phi0t))
                b = coherent_spin_state(j, CoherentSpinParams(theta, 0.3 - phi0t))
                worst = max(worst, abs(coherent_overlap_analytic(j, theta, 0.3 + phi0t, 0.3 - phi0t) - a.inner(b)))
    zero = 0.0
    for j in (0.5, 1, 2, 5, 10):
        a = coherent_spin_state(j, CoherentSpinParams(math.pi / 2, 0.3 + math.pi / 2))
        b = coherent_spin_state(j, CoherentSpinParams(math.pi / 2, 0.3 - math.pi / 2))
        zero = max(zero, abs(coherent_overlap_analytic(j, math.pi / 2, 0.3 + math.pi / 2, 0.3 - math.pi / 2)), abs(a.inner(b)))
    elapsed = time.perf_counter() - start
    ok = acceptance(
        "2 overlap formula",
        worst <= 1e-10 and zero <= 1e-14 and elapsed < 5,
        f"max deviation {worst:.2e}, zero {zero:.2e}, {elapsed:.2f}s",
    )
    assert ok


def test_3_closed_form_evolution(acceptance):
    rng = np.random.default_rng(SEED)
    start = time.perf_counter()
    worst = 1.0
    for _ in range(50):
        j = rng.integers(1, 21) / 2
        theta, phi, phi0t = rng.uniform(0, math.pi), rng.uniform(-math.pi, math.pi), rng.uniform(0, 2 * math.pi)
        q = random_qubit(rng)
        joint = JointState.product(coherent_spin_state(j, CoherentSpinParams(theta, phi)), qubit_to_field(q))
        evolved = evolve_effective(joint, 1.0, phi0t)
        worst = min(worst, fidelity(evolved, cat_closed_form(j, theta, phi, q, phi0t)))
    elapsed = time.perf_counter() - start
    ok = acceptance("3 closed-form evolution", worst >= 1 - 1e-12 and elapsed < 10, f"min overlap 1 - {1 - worst:.2e}, {elapsed:.2f}s")
    assert ok


def test_4_ghz_point(acceptance):
    q = PolarizationQubit(1 / math.sqrt(2), 1j / math.sqrt(2))
    results = [run_ghz(n, math.pi / 2, 0.0, q, 1.0, math.pi / 2) for n in range(2, 9)]
    branch = max(abs(r.branch_overlap) for r in results)
    single = max(abs(r.single_atom_overlap) for r in results)
    fid = min(r.ghz_fidelity for r in results)
    entropy = max(abs(r.entropy - 1.0) for r in results)
    ok = acceptance(
        "4 GHZ point",
        branch <= 1e-14 and single <= 1e-14 and fid >= 1 - 1e-10 and entropy <= 1e-9,
        f"branch overlap {branch:.1e}, single-atom {single:.1e}, min fidelity 1 - {1 - fid:.1e}, entropy error {entropy:.1e}",
    )
    assert ok


def test_5_trapping_parity(acceptance):
    rng = np.random.default_rng(SEED + 5)
    start = time.perf_counter()
    even_fid, odd_fid, residual = 1.0, 1.0, 0.0
    for n in range(1, 9):
        r = run_trapping(n, rng.uniform(0, math.pi), rng.uniform(-math.pi, math.pi), random_qubit(rng), 1.0)
        if n % 2 == 0:
            even_fid = min(even_fid, r.fidelity_initial)
            residual = max(residual, r.entropy)
        else:
            odd_fid = min(odd_fid, r.fidelity_flipped)
    elapsed = time.perf_counter() - start
    ok = acceptance(
        "5 trapping parity",
        even_fid >= 1 - 1e-12 and odd_fid >= 1 - 1e-12 and residual <= 1e-12 and elapsed < 5,
        f"even 1 - {1 - even_fid:.1e} (entropy {residual:.1e}), odd flipped 1 - {1 - odd_fid:.1e}, {elapsed:.2f}s",
    )
    assert ok


def test_6_holography(acceptance):
    rng = np.random.default_rng(SEED + 6)
    prob_err, worst = 0.0, 1.0
    for _ in range(50):
        j = rng.integers(1, 21) / 2
        theta = rng.uniform(0, 0.9 * math.pi)
        r = run_holography(j, theta, rng.uniform(-math.pi, math.pi), random_qubit(rng), 1.0, rng.uniform(0, 2 * math.pi))
        prob_err = max(prob_err, abs(r.success_probability - math.cos(theta / 2) ** (4 * j)))
        worst = min(worst, r.corrected_fidelity)
    ok = acceptance(
        "6 holography",
        prob_err <= 1e-12 and worst >= 1 - 1e-12,
        f"success probability error {prob_err:.1e}, min corrected fidelity 1 - {1 - worst:.1e}",
    )
    assert ok


def test_7_field_cat(acceptance):
    start = time.perf_counter()
    alpha = math.sqrt(2) * cmath.exp(0.4j)
    beta = math.sqrt(2) * cmath.exp(-1.1j)
    r = run_field_cat(alpha, beta, 1.2, 0.5, 1.0, 0.9, n_max=20)
    elapsed = time.perf_counter() - start
    fid = r.closed_form_fidelity
    ok = acceptance(
        "7 field cat",
        fid >= 1 - 1e-10 and r.deficit < 1e-10 and elapsed < 10,
        f"overlap 1 - {1 - fid:.1e}, deficit {r.deficit:.1e}, {elapsed:.2f}s",
    )
    assert ok


def test_8_dispersive_scaling(acceptance):
    start = time.perf_counter()
    ratios = {}
    for n in (1, 2):
        low = compare_full_effective(n, 1e2, phi0t=math.pi / 2)
        high = compare_full_effective(n, 1e3, phi0t=math.pi / 2)
        ratios[n] = low.infidelity / high.infidelity
    elapsed = time.perf_counter() - start
    ok = acceptance(
        "8 dispersive scaling",
        all(50 <= v <= 200 for v in ratios.values()) and elapsed < 60,
        ", ".join(f"N={n} ratio {v:.1f}" for n, v in ratios.items()) + f", {elapsed:.2f}s",
    )
    assert ok


def test_9_determinism(acceptance):
    argv = [
        sys.executable, "-m", "dickefield", "cat", "--n-atoms", "3", "--theta", "1.1", "--phi", "0.2",
        "--alpha", "0.6", "--beta", "0.8i", "--phi0t", "0.9", "--dump-state", "--sweep", "phi0t:0:3:8",
    ]
    first = subprocess.run(argv, capture_output=True, check=True).stdout
    second = subprocess.run(argv, capture_output=True, check=True).stdout
    ok = acceptance("9 determinism", first == second and len(first) > 0, f"{len(first)} bytes, identical={first == second}")
    assert ok
