import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from twistlab import lie
from twistlab import quaternion as qt
from twistlab import solvers as sv
from twistlab.io import to_jsonable
from twistlab.rng import make_rng

from conftest import haar, seeds, specs
from fd import exp_right


@given(specs, seeds)
def test_solve_fiber_h_on_commutators(spec, seed):
    g, h = haar(spec, seed, 0), haar(spec, seed, 1)
    k = lie.commutator(g, h)
    res = sv.solve_fiber_h(g, k)
    assert res.residual < 1e-9
    assert lie.commutator(g, res.solution[0]).distance(k) < 1e-9


def test_solve_fiber_h_no_solution():
    su2 = lie.su2()
    g = sv.torus_element(su2, [0.2])
    k = sv.torus_element(su2, [2.5])
    with pytest.raises(sv.NoSolutionForThisG):
        sv.solve_fiber_h(g, k)
    assert sv.solve_fiber_h(g, k, raise_on_failure=False).solution is None


@given(specs, seeds)
def test_newton_projection_from_nearby_start(spec, seed):
    rng = make_rng(seed, 3)
    g, h = haar(spec, seed, 0), haar(spec, seed, 1)
    k = lie.commutator(g, h)
    g0 = exp_right(g, 0.05 * rng.standard_normal(spec.dim))
    h0 = exp_right(h, 0.05 * rng.standard_normal(spec.dim))
    res = sv.project_to_fiber(g0, h0, k)
    gp, hp = res.solution
    assert lie.commutator(gp, hp).distance(k) <= 1e-10
    assert res.iterations <= 20


def test_newton_stalls_at_commuting_pair_toward_its_own_torus():
    su2 = lie.su2()
    g, h = sv.torus_element(su2, [0.4]), sv.torus_element(su2, [1.1])
    with pytest.raises(sv.NoConvergence):
        sv.project_to_fiber(g, h, sv.torus_element(su2, [2.0]))


@given(seeds)
def test_exact_fiber_sampler_lands_on_fiber(seed):
    rng = make_rng(seed)
    k = lie.commutator(haar(lie.su2(), seed, 1), haar(lie.su2(), seed, 2))
    g, h = sv.sample_fiber(k, rng)
    assert lie.commutator(g, h).distance(k) < 1e-9


def test_exact_fiber_sampler_matches_band_rejection():
    # oracle: Haar pairs whose commutator class lies within 0.01 of theta
    theta = 2.0
    k = lie.element(lie.su2(), np.diag(np.exp([1j * theta, -1j * theta])))
    rng = np.random.default_rng(2024)
    n = 3_000_000
    p = rng.standard_normal((n, 4))
    q = rng.standard_normal((n, 4))
    p /= np.linalg.norm(p, axis=1, keepdims=True)
    q /= np.linalg.norm(q, axis=1, keepdims=True)
    c = qt.qmul(qt.qmul(p, q), qt.qmul(qt.qconj(p), qt.qconj(q)))
    sel = np.abs(np.arccos(np.clip(c[:, 0], -1, 1)) - theta) < 0.01
    band_g = 2 * p[sel, 0]
    band_gh = 2 * qt.qmul(p[sel], q[sel])[:, 0]
    srng = make_rng(5)
    draws = [sv.sample_fiber(k, srng) for _ in range(4000)]
    s_g = np.array([np.trace(g.matrix).real for g, _ in draws])
    s_gh = np.array([np.trace(g.matrix @ h.matrix).real for g, h in draws])
    assert stats.ks_2samp(band_g, s_g).pvalue > 1e-3
    assert stats.ks_2samp(band_gh, s_gh).pvalue > 1e-3


def test_fiber_sampler_rejects_identity():
    with pytest.raises(sv.FiberSamplingStarvation):
        sv.sample_fiber(lie.identity(lie.su2()), make_rng(0))


def test_su3_fiber_points():
    spec = lie.su3()
    k = lie.commutator(haar(spec, 1, 0), haar(spec, 1, 1))
    g, h = sv.sample_fiber(k, make_rng(2))
    assert lie.commutator(g, h).distance(k) < 1e-8


@given(specs, seeds, st.sampled_from(["multistart", "direct"]))
def test_torus_commutator(spec, seed, strategy):
    rng = make_rng(seed, 4)
    n = haar(spec, seed, 5)
    res = sv.solve_torus_commutator(n, rng, strategy=strategy)
    lam, h = res.solution
    assert res.residual <= 1e-8
    assert lie.commutator(lam, h).distance(n) <= 1e-8
    np.testing.assert_allclose(np.abs(np.diag(lam.matrix)), 1.0, atol=1e-10)
    assert np.abs(lam.matrix - np.diag(np.diag(lam.matrix))).max() < 1e-10


def test_torus_commutator_in_conjugated_torus():
    spec = lie.su3()
    u = haar(spec, 1, 0)
    n = haar(spec, 1, 1)
    lam, h = sv.solve_torus_commutator(n, make_rng(0), torus=u).solution
    lam0 = lie.multiply(lie.multiply(lie.inverse(u), lam), u).matrix
    assert np.abs(lam0 - np.diag(np.diag(lam0))).max() < 1e-8


def test_torus_commutator_identity_target():
    e = lie.identity(lie.su3())
    res = sv.solve_torus_commutator(e, make_rng(0))
    assert res.residual == 0 and res.solution[0].distance(e) == 0


def test_solve_result_serializes():
    n = haar(lie.su2(), 3)
    res = sv.solve_torus_commutator(n, make_rng(0))
    data = json.loads(json.dumps(to_jsonable(res.record())))
    assert data["found"] and data["strategy"] == "multistart"


def test_unit_triangle():
    A = np.array([1.0, 0.8 * np.exp(0.3j), 0.7j])
    x = sv.unit_triangle(A)
    assert abs(np.sum(A * x)) < 1e-12
    np.testing.assert_allclose(np.abs(x), 1.0)
    assert abs(np.prod(x) - 1) < 1e-12
    assert sv.unit_triangle(np.array([3.0, 1.0, 1.0])) is None
    y = sv.unit_triangle(np.array([1.0, 1.0, 0.0]))
    assert abs(1.0 * y[0] + 1.0 * y[1]) < 1e-12 and abs(np.prod(y) - 1) < 1e-12


@given(seeds)
def test_su2_psi_g_zero_always_exists(seed):
    g, k = haar(lie.su2(), seed, 0), haar(lie.su2(), seed, 1)
    res = sv.psi_g_su2_zero(g, k)
    assert res.ok and res.residual < 1e-12


@given(seeds)
def test_su3_polynomial_and_character_forms_agree(seed):
    rng = make_rng(seed, 9)
    g, k = haar(lie.su3(), seed, 0), haar(lie.su3(), seed, 1)
    t = rng.uniform(-np.pi, np.pi, 2)
    lam = np.exp(1j * np.array([t[0], t[1], -t.sum()]))
    e1, e2 = sv.su3_system(g, k, *lam)
    r = sv.psi_g_characters_residual(g, k, lam)
    assert abs(abs(e1) - r[0]) < 1e-12
    assert abs(e2 - np.conj(e1)) < 1e-12


def test_su3_system_validates_input():
    g, k = haar(lie.su3(), 0), haar(lie.su3(), 1)
    with pytest.raises(ValueError):
        sv.su3_system(g, k, 1.0, 1.0, 2.0)


@given(seeds)
def test_su3_newton_agrees_with_triangle_test(seed):
    g, k = haar(lie.su3(), seed, 0), haar(lie.su3(), seed, 1)
    res = sv.su3_solve_system(g, k, make_rng(seed, 2))
    assert res.ok == (sv.psi_g_exact_min(g, k) == 0)


def test_su3_exact_minimum_matches_grid():
    for seed in range(5):
        g, k = haar(lie.su3(), seed, 0), haar(lie.su3(), seed, 1)
        # the grid can only overestimate the minimum
        assert sv.psi_g_grid_min(g, k, 200) >= sv.psi_g_exact_min(g, k) - 1e-12
        assert sv.psi_g_grid_min(g, k, 400) - sv.psi_g_exact_min(g, k) < 0.05


def test_su3_certified_pair_without_zero():
    g, k, grid_min, exact_min = sv.find_su3_no_zero_pair(make_rng(0), candidates=300)
    assert grid_min > 1e-3 and exact_min > 1e-3


@pytest.mark.parametrize("a", [0.3 + 0.4j, 0.9, -0.5j, 0.0])
def test_quaternion_critical_set(a):
    D = sv.quaternion_Dg(a)
    rng = make_rng(1)
    c = math.sqrt(1 - abs(a) ** 2)
    center = np.array([a.real if isinstance(a, complex) else a, -np.imag(a), 0, 0])
    for _ in range(10):
        lam, z = np.exp(1j * rng.uniform(-np.pi, np.pi, 2))
        l, q = sv.critical_point(a, lam, z)
        assert D.contains(l, q)
        v = sv.psi_tilde(l, q)
        assert v.distance(sv.critical_value(a, lam, z)) < 1e-15
        assert abs(np.linalg.norm(v.array() - center) - c) < 1e-12
        assert D.jacobian_rank(l, q) <= 2
        assert D.jacobian_rank(*D.random_point(rng)) == 3


def test_quaternion_parametrization_dimensions():
    assert sv.parametrization_rank(0.5, "point", 1, 1) == 2
    assert sv.parametrization_rank(0.5, "value", 1, 1) == 1
    assert sv.parametrization_rank(1.0, "point", 1, 1) == 1
    assert sv.parametrization_rank(1.0, "value", 1, 1) == 0
    # at a = 0 the critical set is still a two-torus
    assert sv.parametrization_rank(0.0, "point", 1, 1) == 2
    assert sv.parametrization_rank(0.0, "value", 1, 1) == 1


def test_quaternion_model_rejects_large_a():
    with pytest.raises(ValueError):
        sv.quaternion_Dg(1.5)


def test_newton_leaves_torus_toward_off_torus_target():
    su2 = lie.su2()
    g, h = sv.torus_element(su2, [0.4]), sv.torus_element(su2, [1.1])
    k = lie.commutator(haar(su2, 3, 0), haar(su2, 3, 1))
    res = sv.project_to_fiber(g, h, k)
    assert lie.commutator(*res.solution).distance(k) <= 1e-10
