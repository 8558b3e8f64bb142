import numpy as np
import pytest
from hypothesis import given

from twistlab import lie
from twistlab import solvers as sv
from twistlab import surface as sf
from twistlab import transversality as tv
from twistlab.rng import make_rng

from conftest import haar, seeds, specs
from fd import exp_right, left_derivative, pair_derivative


def rel_err(a, b):
    return np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-300)


@given(specs, seeds)
def test_dp_matches_finite_differences(spec, seed):
    g, h = haar(spec, seed, 0), haar(spec, seed, 1)
    v = make_rng(seed, 2).standard_normal(2 * spec.dim)
    J = tv.dp_commutator(g, h).matrix
    assert rel_err(J @ v, pair_derivative(lie.commutator, g, h, v)) < 1e-5


@given(specs, seeds)
def test_dpsi_torus_matches_finite_differences(spec, seed):
    rng = make_rng(seed, 3)
    lam = sv.torus_element(spec, rng.uniform(-np.pi, np.pi, spec.rank))
    h = haar(spec, seed, 4)
    v = rng.standard_normal(spec.rank + spec.dim)
    t = tv.torus_algebra_basis(spec)
    fd = pair_derivative(lie.commutator, lam, h, np.concatenate([t.T @ v[: spec.rank], v[spec.rank :]]))
    assert rel_err(tv.dpsi_torus(lam, h).matrix @ v, fd) < 1e-5


def _tuple(seed, spec=None):
    spec = spec or lie.su2()
    rep = sf.random_rep(sf.closed_genus2(spec), make_rng(seed, 9))
    g, h, k, l = (rep[n] for n in ("a1", "b1", "a2", "b2"))
    return g, h, k, l, lie.commutator(g, h), lie.identity(spec)


@given(seeds)
def test_dpsi_m_matches_finite_differences(seed):
    g, h, k, l, m, kc = _tuple(seed)
    L = tv.dpsi_m(g, h, k, l, m, kc)
    d = g.spec.dim
    c = make_rng(seed, 1).standard_normal(L.domain_basis.shape[0])
    b = c @ L.domain_basis

    def f(t):
        gg, hh = exp_right(g, t * b[:d]), exp_right(h, t * b[d : 2 * d])
        kk = exp_right(k, t * b[2 * d : 3 * d])
        return tv.psi_m(gg, hh, kk, l, lie.commutator(gg, hh), kc)

    assert rel_err(L.matrix @ c, left_derivative(f)) < 1e-5


def test_dpsi_m_rejects_inconsistent_tuple():
    g, h, k, l, m, kc = _tuple(1)
    with pytest.raises(ValueError):
        tv.dpsi_m(g, h, k, l, haar(lie.su2(), 5), kc)


def test_dpsi_m_rank_matches_subspace_sum():
    for seed in range(10):
        g, h, k, l, m, kc = _tuple(seed)
        L = tv.dpsi_m(g, h, k, l, m, kc)
        assert tv.numerical_rank(L.matrix) == tv.subspace_sum_dim(g, h, k, l, m, kc) == 3


def test_subspace_sum_drops_for_central_elements():
    su2 = lie.su2()
    minus = lie.element(su2, -np.eye(2))
    e = lie.identity(su2)
    h, l = haar(su2, 1), haar(su2, 2)
    assert tv.subspace_sum_dim(minus, h, minus, l, e, e) < 3


@given(specs, seeds)
def test_twisted_vectors_are_in_the_kernel(spec, seed):
    g, h = haar(spec, seed, 0), haar(spec, seed, 1)
    J = tv.dp_commutator(g, h).matrix
    for side in (1, 2):
        for n in (-3, -1, 1, 2, 5):
            R = tv.twisted_eval(g, h, n, side)
            assert R.shape[0] == spec.rank
            assert np.abs(J @ R.T).max() < 1e-9


@pytest.mark.parametrize("n", [1, 2, 3, -1, -2])
def test_twisted_vector_is_pushforward_of_centralizer_flow(n):
    # at (g, h g^n) the curve (g e^{ty}, h g^n) stays in a fiber when y
    # centralizes h g^n; pushing it through (g, h) -> (g, h g^-n) gives the
    # twisted vector at (g, h)
    spec = lie.su2()
    g, h = haar(spec, 1, 0), haar(spec, 1, 1)
    R = tv.twisted_eval(g, h, n, 2)
    y = R[0, :3]
    w = lie.multiply(h, tv._power(g, n))
    assert np.linalg.norm(lie.adjoint_matrix(w) @ y - y) < 1e-12

    def second(t):
        gt = exp_right(g, t * y)
        return lie.multiply(w, tv._power(lie.inverse(gt), n))

    np.testing.assert_allclose(R[0, 3:], left_derivative(second), atol=1e-8)


def test_kernel_dimension_of_dp():
    su2 = lie.su2()
    g, h = haar(su2, 3, 0), haar(su2, 3, 1)
    assert tv.kernel_basis(tv.dp_commutator(g, h)).shape[0] == 3
    e = lie.identity(su2)
    assert tv.kernel_basis(tv.dp_commutator(e, e)).shape[0] == 6


def test_span_covers_kernel_on_random_pairs():
    su2 = lie.su2()
    covered = [tv.span_covers_kernel(haar(su2, s, 0), haar(su2, s, 1), 5).covered for s in range(50)]
    assert all(covered)


def test_commuting_regular_pair_is_not_covered():
    su2 = lie.su2()
    g = sv.torus_element(su2, [0.4])
    h = sv.torus_element(su2, [1.3])
    rep = tv.span_covers_kernel(g, h, 5)
    assert rep.stratum == "commuting"
    assert rep.kernel_dim == 4 and rep.span_dim == 2
    assert not rep.covered


def test_identity_pair_is_covered_by_centralizer_directions():
    e = lie.identity(lie.su2())
    rep = tv.span_covers_kernel(e, e, 1)
    assert rep.stratum == "identity"
    assert rep.kernel_dim == 6 and rep.covered


def test_classify_pair():
    su2 = lie.su2()
    assert tv.classify_pair(haar(su2, 0), haar(su2, 1)) == "generic"
    assert tv.classify_pair(lie.element(su2, -np.eye(2)), haar(su2, 1)) == "singular"


@given(specs, seeds)
def test_torus_critical_predicate_matches_rank(spec, seed):
    rng = make_rng(seed, 11)
    lam = sv.torus_element(spec, rng.uniform(-np.pi, np.pi, spec.rank))
    h = haar(spec, seed, 12)
    crit, reason = tv.is_critical_torus(lam, h)
    assert crit == (reason is not None)


def test_torus_critical_cases():
    su2, su3 = lie.su2(), lie.su3()
    h = haar(su2, 2)
    assert tv.is_critical_torus(lie.identity(su2), h) == (True, "i")
    assert tv.is_critical_torus(sv.torus_element(su2, [0.5]), sv.torus_element(su2, [1.0])) == (True, "ii")
    assert tv.is_critical_torus(sv.torus_element(su3, [0.4, 0.4]), haar(su3, 3)) == (True, "i")
    assert tv.is_critical_torus(sv.torus_element(su2, [0.5]), h) == (False, None)


def test_vector_field_bracket_closed_form_matches_flows():
    spec = lie.su2()

    def X(g):
        m = g.matrix
        return lie.algebra_coords(spec, (m - m.conj().T) / 2)

    def Y(g):
        m = g.matrix
        return np.array([m[0, 0].real, m[0, 1].imag, 1.0])

    for seed in range(3):
        closed, ref, res = tv.vf_bracket_check(X, Y, haar(spec, seed))
        assert res < 1e-6 * max(1.0, np.linalg.norm(closed))


def test_left_invariant_fields_bracket_is_algebra_bracket():
    spec = lie.su3()
    rng = make_rng(4)
    x, y = rng.standard_normal(8), rng.standard_normal(8)
    closed, ref, res = tv.vf_bracket_check(lambda g: x, lambda g: y, haar(spec, 1))
    np.testing.assert_allclose(closed, tv.algebra_bracket(spec, x, y), atol=1e-8)
    assert res < 1e-6


def test_principal_angles_and_rank_helpers():
    a = np.eye(3)[:2]
    b = np.array([[1.0, 1.0, 0.0]]) / np.sqrt(2)
    assert tv.principal_angles(b, a).max() < 1e-12
    assert tv.numerical_rank(np.diag([1.0, 1e-12, 0.0])) == 1
