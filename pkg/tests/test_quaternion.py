import numpy as np
from hypothesis import given

from twistlab import lie
from twistlab import quaternion as qt
from twistlab.rng import make_rng

from conftest import seeds


def unit(seed, stream=0):
    q = make_rng(seed, stream).standard_normal(4)
    return q / np.linalg.norm(q)


def test_matrix_convention_both_directions():
    # (a b; -conj(b) conj(a)) <-> a - b j
    a, b = 0.6 + 0.0j, 0.0 + 0.8j
    m = np.array([[a, b], [-np.conj(b), np.conj(a)]])
    q = qt.from_matrix(m)
    expected = qt.Quaternion.from_complex(a) - qt.Quaternion.from_complex(b) * qt.J
    np.testing.assert_allclose(q, expected.array(), atol=1e-15)
    np.testing.assert_allclose(qt.to_matrix(expected.array()), m, atol=1e-15)


def test_basis_units():
    np.testing.assert_allclose(qt.to_matrix(qt.I.array()), np.diag([1j, -1j]))
    for u in (qt.I, qt.J, qt.K):
        assert (u * u).distance(-qt.ONE) < 1e-15
    assert (qt.I * qt.J).distance(qt.K) < 1e-15


@given(seeds)
def test_multiplication_matches_matrices(seed):
    p, q = unit(seed, 0), unit(seed, 1)
    np.testing.assert_allclose(
        qt.to_matrix(qt.qmul(p, q)), qt.to_matrix(p) @ qt.to_matrix(q), atol=1e-14
    )


@given(seeds)
def test_conjugate_is_inverse_and_norm_multiplicative(seed):
    p, q = qt.Quaternion.from_array(unit(seed, 0)), qt.Quaternion.from_array(unit(seed, 1))
    assert (p * p.conj()).distance(qt.ONE) < 1e-14
    assert abs((p * q).norm() - 1) < 1e-14


@given(seeds)
def test_element_roundtrip(seed):
    g = lie.haar_sample(lie.su2(), make_rng(seed))
    q = qt.Quaternion.from_element(g)
    assert q.to_element().distance(g) < 1e-15
    # trace is twice the real part
    assert abs(np.trace(g.matrix).real - 2 * q.real) < 1e-14


def test_batched_operations():
    rng = make_rng(1)
    p = rng.standard_normal((10, 4))
    q = rng.standard_normal((10, 4))
    out = qt.qmul(p, q)
    for i in range(10):
        np.testing.assert_allclose(out[i], qt.qmul(p[i], q[i]))
