import math

import numpy as np
import pytest
import scipy.integrate
from hypothesis import given, strategies as st

from twistlab import harmonic as hm
from twistlab import lie
from twistlab.rng import make_rng

from conftest import haar, seeds

# Independent oracle values: exact rational sums over the SU3 weight lattice,
# mpmath quadrature of the SU2 law and the SU3 Weyl determinant formula.
SU3_INVERSE_DIM = {50: 3.1251322751322751, 100: 3.4122379549462883, 200: 3.6677588753838754, 1000: 4.0991795378801135}
SU2_FIRST_BIN_MASS = 4.90150090820271759e-4
SU2_SERIES_N10 = {1.0: 1.3363726541761564, 2.0: 0.66011747253824747}
SU3_WEYL_AT = (0.3, 1.1, -1.4)
SU3_WEYL_CHARACTERS = {
    (1, 0): 1.5788997534514244 + 0.20127783673431478j,
    (1, 1): 1.5334371990094141 + 0.0j,
    (2, 1): -0.031268048439316742 + 0.9442419757746327j,
    (3, 0): -0.32269342396948607 + 1.4971569878978227j,
}


def test_dimensions():
    assert [hm.dim_irrep(hm.IrrepLabel.su2(d)) for d in (1, 2, 5)] == [1, 2, 5]
    dims = {lab: hm.dim_irrep(hm.IrrepLabel.su3(*lab)) for lab in [(0, 0), (1, 0), (1, 1), (2, 0), (3, 0), (2, 2)]}
    assert dims == {(0, 0): 1, (1, 0): 3, (1, 1): 8, (2, 0): 6, (3, 0): 10, (2, 2): 27}


def test_irrep_labels_sorted_and_complete():
    labs = hm.irrep_labels(lie.su3(), 10)
    assert [hm.dim_irrep(m) for m in labs] == sorted(hm.dim_irrep(m) for m in labs)
    assert {m.label for m in labs} == {(0, 0), (1, 0), (0, 1), (2, 0), (0, 2), (1, 1), (3, 0), (0, 3)}


def test_bad_labels():
    with pytest.raises(ValueError):
        hm.IrrepLabel.su2(0)
    with pytest.raises(ValueError):
        hm.IrrepLabel.su3(-1, 2)


def test_su3_characters_against_weyl_formula():
    g = lie.element(lie.su3(), np.diag(np.exp(1j * np.array(SU3_WEYL_AT))))
    for lab, val in SU3_WEYL_CHARACTERS.items():
        assert abs(hm.character(hm.IrrepLabel.su3(*lab), g) - val) < 1e-13


@given(seeds, st.sampled_from([(1, 0), (0, 1), (1, 1), (2, 0), (0, 3)]))
def test_su3_irrep_matrix_trace_and_homomorphism(seed, lab):
    mu = hm.IrrepLabel.su3(*lab)
    g, h = haar(lie.su3(), seed, 0), haar(lie.su3(), seed, 1)
    pg, ph = hm.irrep_matrix(mu, g), hm.irrep_matrix(mu, h)
    np.testing.assert_allclose(hm.irrep_matrix(mu, lie.multiply(g, h)), pg @ ph, atol=1e-12)
    assert abs(np.trace(pg) - hm.character(mu, g)) < 1e-12


@given(seeds, st.integers(1, 6))
def test_su2_irrep_matrix(seed, d):
    mu = hm.IrrepLabel.su2(d)
    g, h = haar(lie.su2(), seed, 0), haar(lie.su2(), seed, 1)
    pg = hm.irrep_matrix(mu, g)
    np.testing.assert_allclose(hm.irrep_matrix(mu, lie.multiply(g, h)), pg @ hm.irrep_matrix(mu, h), atol=1e-12)
    np.testing.assert_allclose(pg.conj().T @ pg, np.eye(d), atol=1e-12)
    assert abs(np.trace(pg) - hm.character(mu, g)) < 1e-12


def test_su2_character_limits():
    assert hm.su2_character_theta(4, 0.0) == pytest.approx(4)
    assert hm.su2_character_theta(4, math.pi) == pytest.approx(-4)
    assert hm.su2_character_theta(3, 1e-9) == pytest.approx(3)


def test_su2_character_orthonormality_weyl_integration():
    for d1 in range(1, 5):
        for d2 in range(1, 5):
            f = lambda t: hm.su2_weyl_weight(t) * hm.su2_character_theta(d1, t) * hm.su2_character_theta(d2, t)  # noqa: E731
            val = scipy.integrate.quad(f, 0, math.pi)[0]
            assert val == pytest.approx(float(d1 == d2), abs=1e-10)


def test_su3_weyl_weight_normalized():
    val = scipy.integrate.dblquad(lambda b, a: hm.su3_weyl_weight(a, b), -math.pi, math.pi, -math.pi, math.pi)[0]
    assert val == pytest.approx(1.0, abs=1e-8)


def test_su2_exact_law():
    edges = np.linspace(0, np.pi, 101)
    m = hm.su2_exact_bin_masses(edges)
    assert m[0] == pytest.approx(SU2_FIRST_BIN_MASS, rel=1e-12)
    assert m.sum() == pytest.approx(1.0, abs=1e-14)
    t = np.linspace(0.1, 3.0, 7)
    np.testing.assert_allclose(hm.density_su2_closed(t) * hm.su2_weyl_weight(t), (np.pi - t) * np.sin(t) / np.pi)


def test_series_partial_sums_frozen():
    for t, v in SU2_SERIES_N10.items():
        assert hm.density_series(lie.su2(), t, 10) == pytest.approx(v, abs=1e-14)


@pytest.mark.parametrize("theta", [1.0, 2.0, math.pi / 2])
def test_series_converges_to_closed_form(theta):
    val = hm.density_series(lie.su2(), theta, 100_000)
    assert abs(val - hm.density_su2_closed(theta)) < 1e-3
    smoothed = hm.density_series(lie.su2(), theta, 20_000, smoothing="abel")
    assert abs(smoothed - hm.density_su2_closed(theta)) < 1e-3


def test_series_rejects_singular_points():
    with pytest.raises(ValueError):
        hm.density_series(lie.su2(), 0.0, 100)


def test_closed_form_profile_normalized():
    prof = hm.closed_form_profile(np.linspace(0, np.pi, 101))
    assert abs(prof.normalization() - 1) <= prof.declared_error + 1e-12


def test_mc_histogram_small_and_worker_independent():
    a = hm.mc_class_histogram(lie.su2(), 100_000, 20, seed=5, workers=1)
    b = hm.mc_class_histogram(lie.su2(), 100_000, 20, seed=5, workers=3)
    np.testing.assert_array_equal(a.extra["counts"], b.extra["counts"])
    assert a.normalization() == pytest.approx(1.0)
    exact = hm.su2_exact_bin_masses(a.extra["edges"])
    assert hm.total_variation(a.extra["probabilities"], exact) < 0.02


def test_mc_histogram_torus_point_mass():
    prof = hm.mc_class_histogram(lie.torus(1), 10_000, 10, seed=0)
    assert prof.extra["point_mass"]


def test_su3_inverse_dim_sums_frozen():
    for N, v in SU3_INVERSE_DIM.items():
        assert hm.inverse_dim_sum(lie.su3(), N) == pytest.approx(v, rel=1e-14)


def test_su3_tail_estimate_brackets_lattice_sum():
    # the extrapolated remainder beyond 200 must exceed what the lattice
    # actually adds up to dimension 1000
    gained = SU3_INVERSE_DIM[1000] - SU3_INVERSE_DIM[200]
    assert hm.su3_inverse_dim_tail(200) > gained
    assert hm.su3_inverse_dim_tail(1000) < hm.su3_inverse_dim_tail(200)


def test_su2_inverse_dim_sum_is_harmonic():
    assert hm.inverse_dim_sum(lie.su2(), 4) == pytest.approx(1 + 1 / 2 + 1 / 3 + 1 / 4)


@pytest.mark.parametrize("lab", [(2,), (3,)])
def test_integration_identity_su2(lab):
    mu = hm.IrrepLabel(lie.su2(), lab)
    g = haar(lie.su2(), 11)
    mean, exact, z = hm.integration_identity_check(g, mu, 200_000, seed=1)
    assert z < 4
    assert abs(mean.imag) < 1e-12


def test_integration_identity_trivial():
    g = haar(lie.su3(), 1)
    mean, exact, z = hm.integration_identity_check(g, hm.IrrepLabel.su3(0, 0), 1000, seed=0)
    assert mean == 1 and exact == 1


@given(seeds, st.integers(2, 4))
def test_twist_multiplies_matrix_coefficients(seed, d):
    mu = hm.IrrepLabel.su2(d)
    rng = make_rng(seed, 5)
    L = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    g, h = haar(lie.su2(), seed, 0), haar(lie.su2(), seed, 1)
    lhs, rhs, err = hm.peter_weyl_t2_check(mu, L, g, h)
    assert err < 1e-11
