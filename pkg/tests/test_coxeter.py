import pytest
from hypothesis import given, settings, strategies as st

import oracles
from tabkit.coxeter import (CoxeterGroup, CoxeterPresentation, GroupElement, HorizonCapExceeded,
                            PresentationMismatch, enumerate_horizon)


@pytest.fixture(scope="module")
def a3():
    return CoxeterGroup(CoxeterPresentation.type_A(3))


@pytest.fixture(scope="module")
def aff():
    return CoxeterGroup(CoxeterPresentation.affine_A(3))


def to_perm(group, x, n):
    return oracles.perm_from_word([s + 1 for s in group.reduced_word(x)], n)


def test_finite_orders():
    for pres, order in [(CoxeterPresentation.type_A(2), 6), (CoxeterPresentation.type_A(3), 24),
                        (CoxeterPresentation.type_B(2), 8), (CoxeterPresentation.type_B(3), 48),
                        (CoxeterPresentation.dihedral(5), 10)]:
        assert len(enumerate_horizon(CoxeterGroup(pres))) == order


def test_lengths_match_inversions(a3):
    for x in enumerate_horizon(a3):
        assert a3.length(x) == oracles.perm_length(to_perm(a3, x, 4))
        assert len(a3.reduced_word(x)) == a3.length(x)


def test_bruhat_matches_tableau_criterion(a3):
    els = list(enumerate_horizon(a3))
    for x in els:
        for y in els:
            assert a3.bruhat_leq(x, y) == oracles.bruhat_leq(to_perm(a3, x, 4), to_perm(a3, y, 4))


def test_labels_round_trip(a3, aff):
    for g, bound in [(a3, None), (aff, 5)]:
        for x in enumerate_horizon(g, bound):
            assert g.parse(g.label(x)) == x


def test_descents_and_inverse(a3):
    for x in enumerate_horizon(a3):
        xi = a3.inverse(x)
        assert a3.multiply(x, xi) == a3.identity()
        for s in range(3):
            assert a3.is_left_descent(s, x) == a3.is_right_descent(xi, s)
            y = a3.right_multiply_generator(x, s)
            assert (a3.length(y) < a3.length(x)) == a3.is_right_descent(x, s)


def test_affine_counts_match_reflection_representation(aff):
    hz = enumerate_horizon(aff, 8)
    counts = [0] * 9
    for x, l in zip(hz.elements, hz.lengths):
        if x.omega == 0:
            counts[l] += 1
    assert counts == oracles.affine_length_counts(3, 8)
    assert len(hz) == 3 * sum(counts) == 327


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 2), max_size=7))
def test_affine_length_matches_root_lattice(word):
    g = CoxeterGroup(CoxeterPresentation.affine_A(3))
    x = g.from_word(word)
    assert g.length(x) == oracles.affine_word_length(3, word, 8)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 2), max_size=6), st.lists(st.integers(0, 2), max_size=6),
       st.integers(0, 2), st.integers(0, 2))
def test_affine_group_laws(w1, w2, k1, k2):
    g = CoxeterGroup(CoxeterPresentation.affine_A(3))
    x, y = g.from_word(w1, k1), g.from_word(w2, k2)
    assert g.multiply(g.multiply(x, y), g.inverse(y)) == x
    assert g.length(g.inverse(x)) == g.length(x)
    assert g.length(x) == g.length(g.coxeter_part(x))
    assert g.length(g.conjugate_by_omega(x, 1)) == g.length(x)


def test_omega_rotates_generators(aff):
    r = aff.omega(1)
    for i in range(3):
        s = aff.generators()[i]
        conj = aff.multiply(aff.multiply(r, s), aff.inverse(r))
        assert conj == aff.generators()[(i + 1) % 3]
    assert aff.multiply(r, aff.multiply(r, r)) == aff.identity()
    assert aff.length(r) == 0


def test_window_notation(aff):
    assert aff.window(aff.identity()) == (1, 2, 3)
    x = aff.from_window((0, 2, 4))
    assert aff.window(x) == (0, 2, 4)
    with pytest.raises(ValueError):
        aff.from_window((1, 1, 3))


def test_horizon_cap(aff, monkeypatch):
    with pytest.raises(HorizonCapExceeded):
        enumerate_horizon(aff, 8, cap=50)
    monkeypatch.setenv("TABKIT_ENUM_CAP", "10")
    with pytest.raises(HorizonCapExceeded):
        enumerate_horizon(aff, 4)
    with pytest.raises(ValueError):
        enumerate_horizon(aff)


def test_mixing_groups_is_rejected(a3, aff):
    with pytest.raises(PresentationMismatch):
        a3.multiply(aff.generators()[0], a3.generators()[0])


def test_presentation_json():
    assert CoxeterPresentation.affine_A(3).to_json() == {"family": "affA", "n": 3, "extended": True}
    assert CoxeterPresentation.type_A(2).to_json()["family"] == "matrix"
