import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from twistlab import lie
from twistlab import surface as sf
from twistlab.rng import make_rng

from conftest import haar, seeds

a1, b1, a2, b2 = (sf.FreeWord.gen(n) for n in ("a1", "b1", "a2", "b2"))


def one_holed(seed, spec=None):
    spec = spec or lie.su2()
    rng = make_rng(seed, 7)
    k = lie.commutator(lie.haar_sample(spec, rng), lie.haar_sample(spec, rng))
    return sf.random_rep(sf.one_holed_torus(k), rng)


def genus2(seed):
    return sf.random_rep(sf.closed_genus2(lie.su2()), make_rng(seed, 8))


def test_free_word_reduction_and_parse():
    w = sf.FreeWord.parse("a1 b1 b1^-1 a1^2")
    assert str(w) == "a1^3"
    assert (w * w.inverse()).letters == ()
    assert len(sf.comm(a1, b1)) == 4
    assert str(sf.FreeWord.parse("")) == ""


def test_free_word_substitution():
    w = sf.comm(a1, b1)
    image = w.substitute({"b1": a1 * b1})
    assert str(image) == str(sf.FreeWord.parse("a1 a1 b1 a1^-1 b1^-1 a1^-1"))


def test_sigma_fixes_alpha_bar_in_the_free_group():
    sub = sf.sigma_substitution()
    ab = sf.FreeWord.parse("a2 b2 a2 b2^-1 a2^-1 b1 a1 b1^-1")
    assert ab.substitute(sub).letters == ab.letters


def test_sigma_preserves_the_relation_in_the_free_group():
    rel = sf.comm(a1, b1) * sf.comm(a2, b2)
    assert rel.substitute(sf.sigma_substitution()).letters == rel.letters


def test_two_forms_of_sigma_s_agree_as_words():
    s_image = sf.comm(a1, b1).substitute(sf.sigma_substitution())
    assert s_image.letters == sf.sigma_s_conjugated().letters
    assert s_image.letters == sf.sigma_s_expanded().letters


@given(seeds)
def test_twists_preserve_commutator_and_relation(seed):
    rep = one_holed(seed)
    p0 = lie.commutator(rep["a1"], rep["b1"])
    assert sf.boundary_defect(rep) < 1e-12
    for mv in sf.DEFAULT_MOVES + (sf.Move("A1", 3), sf.Move("A2", -2)):
        r2 = sf.apply_move(rep, mv)
        assert lie.commutator(r2["a1"], r2["b1"]).distance(p0) < 1e-12
        assert sf.boundary_defect(r2) < 1e-12


def test_twist_formulas():
    rep = one_holed(3)
    g, h = rep.handle(1)
    t1 = sf.twist_T1(rep)
    t2 = sf.twist_T2(rep)
    assert t1["a1"].distance(lie.multiply(g, lie.inverse(h))) < 1e-15
    assert t2["b1"].distance(lie.multiply(h, lie.inverse(g))) < 1e-15
    assert sf.twist_A(rep, 1, 2)["a1"].distance(lie.multiply(g, lie.inverse(lie.multiply(h, h)))) < 1e-14


@given(seeds, st.lists(st.sampled_from(list(sf.DEFAULT_MOVES)), max_size=12))
def test_word_then_inverse_is_identity(seed, moves):
    rep = one_holed(seed)
    w = sf.TwistWord(tuple(moves))
    back = sf.apply_word(sf.apply_word(rep, w), w.inverse())
    for n in rep.spec.generator_names:
        assert back[n].distance(rep[n]) < 1e-11


def test_su3_reps_and_twists():
    rep = one_holed(4, lie.su3())
    assert sf.boundary_defect(rep) < 1e-10
    assert sf.boundary_defect(sf.twist_T2(rep)) < 1e-10


@given(seeds)
def test_genus2_sigma(seed):
    rep = genus2(seed)
    assert sf.boundary_defect(rep) < 1e-12
    s = sf.genus2_sigma(rep)
    assert sf.boundary_defect(s) < 1e-12
    back = sf.genus2_sigma_inverse(s)
    for n in rep.spec.generator_names:
        assert back[n].distance(rep[n]) < 1e-12
    assert sf.genus2_alpha_bar(s).distance(sf.genus2_alpha_bar(rep)) < 1e-12
    sigma_s = lie.commutator(s["a1"], s["b1"])
    assert sf.eval_word(rep, sf.sigma_s_conjugated()).distance(sigma_s) < 1e-12
    assert sf.eval_word(rep, sf.sigma_s_expanded()).distance(sigma_s) < 1e-12


def test_genus2_identity_rep_is_fixed():
    e = lie.identity(lie.su2())
    rep = sf.SurfaceRep(sf.closed_genus2(lie.su2()), {n: e for n in ("a1", "b1", "a2", "b2")})
    s = sf.genus2_sigma(rep)
    assert all(s[n].distance(e) == 0 for n in rep.spec.generator_names)


def test_sigma_needs_genus_two():
    with pytest.raises(sf.WrongSurface):
        sf.genus2_sigma(one_holed(0))
    with pytest.raises(sf.WrongSurface):
        sf.apply_word(one_holed(0), sf.TwistWord((sf.Move("sigma"),)))


def test_phi_map_second_entry_is_sigma_image_of_s():
    rep = genus2(5)
    g, h, k, l = (rep[n] for n in ("a1", "b1", "a2", "b2"))
    e = lie.identity(lie.su2())
    m1, m2 = sf.phi_map(e, g, h, k, l, e)
    assert m1.distance(lie.commutator(g, h)) < 1e-15
    assert sf.eval_word(rep, sf.sigma_s_expanded()).distance(m2) < 1e-12


def test_phi_map_second_entry_is_generally_not_conjugate_to_the_first():
    rep = genus2(6)
    g, h, k, l = (rep[n] for n in ("a1", "b1", "a2", "b2"))
    e = lie.identity(lie.su2())
    m1, m2 = sf.phi_map(e, g, h, k, l, e)
    assert lie.class_coordinate(m1).distance(lie.class_coordinate(m2)) > 1e-3


def test_phi_map_checks_constraint():
    rep = genus2(7)
    g, h, k, l = (rep[n] for n in ("a1", "b1", "a2", "b2"))
    with pytest.raises(ValueError):
        sf.phi_map(haar(lie.su2(), 1), g, h, k, l, lie.identity(lie.su2()))


@given(seeds)
def test_cut_and_sew_roundtrip(seed):
    rep = genus2(seed)
    inner, outer, k = sf.cut(rep)
    assert sf.boundary_defect(inner) < 1e-12 and sf.boundary_defect(outer) < 1e-12
    sewn = sf.sew(inner, outer)
    for n in rep.spec.generator_names:
        assert sewn[n].distance(rep[n]) == 0


def test_sew_rejects_mismatched_holonomy():
    inner, outer, k = sf.cut(genus2(1))
    other = inner.spec.with_boundary(((1, haar(lie.su2(), 99)),))
    with pytest.raises(sf.HolonomyMismatch):
        sf.sew(sf.SurfaceRep(other, inner.images), outer)


def test_two_holed_model_roundtrip():
    rep = one_holed(2)
    ks = [haar(lie.su2(), 1), haar(lie.su2(), 2)]
    model = sf.two_holed_model(ks, rep)
    assert sf.boundary_defect(model) < 1e-12
    k_back, rep_back = sf.two_holed_inverse(model)
    assert all(x.distance(y) == 0 for x, y in zip(ks, k_back))
    assert rep_back["a1"].distance(rep["a1"]) == 0


def test_rep_requires_all_generators():
    with pytest.raises(sf.UnknownGenerator):
        sf.SurfaceRep(sf.one_holed_torus(lie.identity(lie.su2())), {"a1": lie.identity(lie.su2())})


def test_rep_json_roundtrip():
    rep = genus2(3)
    data = json.loads(json.dumps(rep.to_json()))
    back = sf.SurfaceRep.from_json(data)
    for n in rep.spec.generator_names:
        assert back[n].distance(rep[n]) < 1e-15


def test_orbit_generator_is_seeded():
    rep = one_holed(1)
    o1 = [r["a1"].matrix for r in sf.random_twist_orbit(rep, 50, make_rng(3))]
    o2 = [r["a1"].matrix for r in sf.random_twist_orbit(rep, 50, make_rng(3))]
    assert len(o1) == 51
    np.testing.assert_array_equal(np.array(o1), np.array(o2))


def test_frozen_orbit_does_not_move():
    rep = one_holed(1)
    states = list(sf.random_twist_orbit(rep, 10, make_rng(0), (sf.Move("id"),)))
    assert all(s["a1"].distance(rep["a1"]) == 0 for s in states)


def test_move_validation():
    with pytest.raises(ValueError):
        sf.Move("T1", 2)
    with pytest.raises(ValueError):
        sf.Move("twist")
