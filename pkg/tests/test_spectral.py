import numpy as np
import pytest
from scipy.stats import unitary_group

from aiiiwalk.disorder import make_staggered, make_uniform
from aiiiwalk.spectral import (
    QuasienergySpectrum,
    check_chiral,
    check_sublattice,
    circular_distance,
    eigenphases,
    gap_at,
    mirror_check,
    quasienergies,
    symmetry_report,
    wrap_phase,
)
from aiiiwalk.walk import SIGMA2, AngleField, SpinAxis, build_unitary_matrix, coin_matrix, shift_matrix, spin_operator, sublattice_operator

from conftest import random_field

CENTERS = (0.0, np.pi, np.pi / 2, -np.pi / 2)


def binary_field(rng, n, theta=np.pi / 8):
    return AngleField(np.zeros(n), theta * rng.choice([-1.0, 1.0], n))


def test_chiral_random_static(rng):
    for _ in range(5):
        assert check_chiral(build_unitary_matrix(binary_field(rng, 16), 16)) < 1e-12


def test_chiral_holds_with_phi(rng):
    assert check_chiral(build_unitary_matrix(random_field(rng, 12), 12)) < 1e-12


def test_chiral_of_shift():
    T = shift_matrix(10)
    C = spin_operator(SIGMA2, 10)
    np.testing.assert_allclose(C @ T @ C, T.conj().T, atol=1e-15)
    assert check_chiral(T) < 1e-12


def test_chiral_fails_for_generic_unitary():
    U = unitary_group.rvs(16, random_state=3)
    assert check_chiral(U) > 0.1


def test_chiral_shape_errors():
    with pytest.raises(ValueError):
        check_chiral(np.eye(5))
    with pytest.raises(ValueError):
        check_sublattice(np.eye(6))


def test_sublattice(rng):
    U = build_unitary_matrix(random_field(rng, 8), 8)
    assert check_sublattice(U) < 1e-12
    U2 = U @ U
    S = sublattice_operator(8)
    assert check_sublattice(U2) > 0.1
    assert np.max(np.abs(S @ U2 - U2 @ S)) < 1e-12
    R = coin_matrix(SpinAxis.AXIS1, rng.uniform(-1, 1, 8))
    assert np.max(np.abs(S @ R - R @ S)) < 1e-12


def test_v_operator_chiral_with_sublattice(rng):
    # (sigma_2 S) V (sigma_2 S) = V^dagger for V = iU
    U = build_unitary_matrix(binary_field(rng, 12), 12)
    V = 1j * U
    G = spin_operator(SIGMA2, 12) @ sublattice_operator(12)
    np.testing.assert_allclose(G @ V @ G, V.conj().T, atol=1e-12)


def test_wrap_and_distance():
    np.testing.assert_allclose(wrap_phase([np.pi, -np.pi, 3 * np.pi, 0.5]), [np.pi, np.pi, np.pi, 0.5])
    assert circular_distance(np.pi - 0.1, -np.pi + 0.1) == pytest.approx(0.2)
    assert circular_distance(0.3, 0.3 + 2 * np.pi) == pytest.approx(0.0)


def test_eigenphase_convention():
    # U = exp(-i eps) on a diagonal matrix
    eps = np.array([0.3, -1.2, 2.9, np.pi])
    np.testing.assert_allclose(eigenphases(np.diag(np.exp(-1j * eps))), np.sort(eps), atol=1e-14)


def test_spectrum_invariants(rng):
    spec = quasienergies(binary_field(rng, 20), 20)
    assert spec.eigenphases.size == 40
    assert np.all(np.diff(spec.eigenphases) >= 0)
    assert np.all(spec.eigenphases > -np.pi) and np.all(spec.eigenphases <= np.pi)


def test_clean_gapless_plane_wave_pairs():
    spec = quasienergies(AngleField.clean(8), 8)
    for c in CENTERS:
        assert gap_at(spec, c) < 1e-12
    assert mirror_check(spec)["mirror_residual_0"] < 1e-12


def test_uniform_gaps_zero_and_pi():
    spec = quasienergies(make_uniform(np.pi / 4, 64), 64)
    # clean dispersion cos(eps) = cos(theta) cos(k): nearest level to 0 sits at theta
    assert gap_at(spec, 0) == pytest.approx(np.pi / 2, abs=1e-10)
    assert gap_at(spec, np.pi) == pytest.approx(np.pi / 2, abs=1e-10)
    assert gap_at(spec, np.pi / 2) < spec.level_spacing
    assert gap_at(spec, -np.pi / 2) < spec.level_spacing


def test_staggered_gaps_half_pi():
    spec = quasienergies(make_staggered(np.pi / 4, 64), 64)
    assert gap_at(spec, np.pi / 2) > 10 * spec.level_spacing
    assert gap_at(spec, -np.pi / 2) > 10 * spec.level_spacing
    assert gap_at(spec, 0) < spec.level_spacing
    assert gap_at(spec, np.pi) < spec.level_spacing


def test_uniform_gap_dispersion_oracle_n256():
    # levels from cos(eps) = cos(theta) cos(k), k = 2 pi m / N, two bands +-eps
    n, theta = 256, np.pi / 4
    k = 2 * np.pi * np.arange(n) / n
    e = np.arccos(np.cos(theta) * np.cos(k))
    oracle = QuasienergySpectrum(wrap_phase(np.concatenate([e, -e])), n)
    spec = quasienergies(make_uniform(theta, n), n)
    np.testing.assert_allclose(spec.eigenphases, oracle.eigenphases, atol=1e-10)
    for c in CENTERS:
        assert gap_at(spec, c) == pytest.approx(gap_at(oracle, c), abs=1e-10)
    assert gap_at(spec, 0) > 0.5


def test_gap_monotone_in_theta_bar():
    n = 64
    gaps = [gap_at(quasienergies(make_uniform(t, n), n), 0) for t in (0, np.pi / 16, np.pi / 8, np.pi / 4)]
    spacing = 2 * np.pi / (2 * n)
    assert all(b >= a - spacing for a, b in zip(gaps, gaps[1:]))


def test_mirror_random_static(rng):
    m = mirror_check(quasienergies(binary_field(rng, 32), 32))
    assert m["passed"]
    assert m["mirror_residual_0"] < 1e-9 and m["mirror_residual_pi_shift"] < 1e-9


def test_mirror_fails_for_generic_unitary():
    U = unitary_group.rvs(64, random_state=7)
    m = mirror_check(QuasienergySpectrum(eigenphases(U), 32))
    assert not m["passed"]
    assert m["mirror_residual_0"] > 1e-3


def test_mirror_of_v_spectrum(rng):
    spec = quasienergies(binary_field(rng, 32), 32)
    v = spec.shifted(np.pi / 2)
    m = mirror_check(v)
    assert m["passed"]
    # the (0, pi) pair of V sits at (-pi/2, pi/2) of U
    assert gap_at(v, 0) == pytest.approx(gap_at(spec, np.pi / 2), abs=1e-12)
    assert gap_at(v, np.pi) == pytest.approx(gap_at(spec, -np.pi / 2), abs=1e-12)


def test_experiment_form_same_multiset(rng):
    field = binary_field(rng, 24)
    a = quasienergies(field, 24, "floquet")
    b = quasienergies(field, 24, "experiment")
    np.testing.assert_allclose(a.eigenphases, b.eigenphases, atol=1e-10)


def test_symmetry_report(rng):
    r = symmetry_report(binary_field(rng, 16), 16)
    for v in vars(r).values():
        assert 0 <= v < 1e-9


def test_csv_export(tmp_path, rng):
    from aiiiwalk.spectral import export_csv

    spec = quasienergies(binary_field(rng, 8), 8)
    export_csv(spec, tmp_path / "e.csv")
    rows = (tmp_path / "e.csv").read_text().splitlines()
    assert rows[0] == "index,eigenphase"
    assert len(rows) == 17
    np.testing.assert_array_equal([float(r.split(",")[1]) for r in rows[1:]], spec.eigenphases)
