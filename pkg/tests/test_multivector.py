from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from multidirac.errors import DegreeError, DimensionError, ModeError
from multidirac.multivector import (KForm, KVector, Pair, blade_sign, evaluate, left_interior, pair_wedge,
                                    pairing_minus, pairing_plus, right_interior, wedge, wedge_all)

from conftest import graded, vectors


def test_blade_sign_sorts_and_detects_repeats():
    assert blade_sign((2, 1)) == (-1, (1, 2))
    assert blade_sign((3, 1, 2)) == (1, (1, 2, 3))
    assert blade_sign((1, 1))[0] == 0


def test_construction_canonicalizes():
    X = KVector(3, 2, {(2, 1): 1, (1, 2): 1, (1, 3): 0})
    assert X.terms == {}
    Y = KVector(3, 2, {(3, 1): 2})
    assert Y.terms == {(1, 3): Fraction(-2)}
    assert all(isinstance(c, Fraction) for c in Y.terms.values())


def test_bad_blades_raise():
    with pytest.raises(DegreeError):
        KVector(3, 2, {(1,): 1})
    with pytest.raises(DimensionError):
        KForm(2, 1, {(3,): 1})


def test_modes_do_not_mix():
    a = KForm(2, 1, {(1,): 1})
    b = KForm(2, 1, {(1,): 1.0}, exact=False)
    with pytest.raises(ModeError):
        a + b
    with pytest.raises(ModeError):
        left_interior(KVector(2, 1, {(1,): 1}), b)


def test_determinant_convention():
    e12 = KForm(2, 2, {(1, 2): 1})
    assert evaluate(e12, KVector(2, 2, {(1, 2): 1})) == 1
    # (e^1 ^ e^2)(u ^ w) = det [[u1, w1], [u2, w2]]
    u = KVector(2, 1, {(1,): 2, (2,): 3})
    w = KVector(2, 1, {(1,): 5, (2,): 7})
    assert evaluate(e12, wedge(u, w)) == 2 * 7 - 3 * 5


@given(st.integers(2, 6).flatmap(lambda d: st.tuples(st.just(d), vectors(d), vectors(d))))
def test_wedge_of_vectors_is_antisymmetric(args):
    _, u, w = args
    assert wedge(u, w) == -wedge(w, u)
    assert wedge(u, u).terms == {}


@given(st.integers(1, 6).flatmap(
    lambda d: st.integers(0, d).flatmap(
        lambda k: st.integers(k, d).flatmap(
            lambda l: st.tuples(graded(KVector, d, k), graded(KVector, d, l - k), graded(KForm, d, l))))))
def test_left_interior_defining_property(args):
    X, Y, a = args
    assert evaluate(left_interior(X, a), Y) == evaluate(a, wedge(X, Y))


@given(st.integers(1, 6).flatmap(
    lambda d: st.integers(0, d).flatmap(
        lambda k: st.integers(0, k).flatmap(
            lambda m: st.tuples(graded(KVector, d, k), graded(KForm, d, m), graded(KForm, d, k - m))))))
def test_right_interior_defining_property(args):
    X, b, g = args
    assert evaluate(g, right_interior(X, b)) == evaluate(wedge(b, g), X)


@given(st.integers(1, 5).flatmap(lambda d: st.tuples(st.just(d), st.integers(0, d))))
def test_zero_results_keep_their_degree(args):
    d, k = args
    z = left_interior(KVector.zero(d, k), KForm.zero(d, d))
    assert z.degree == d - k and z.terms == {}


def _pairs(dim, n):
    def pair(r):
        return st.tuples(graded(KVector, dim, r), graded(KForm, dim, n + 2 - r)).map(lambda t: Pair(*t))
    return st.tuples(st.integers(1, n + 1), st.integers(1, n + 1)).flatmap(
        lambda rs: st.tuples(pair(rs[0]), pair(rs[1])))


@given(st.integers(0, 2).flatmap(lambda n: st.tuples(st.just(n), _pairs(n + 3, n))))
def test_pairing_symmetries(args):
    n, (a, b) = args
    r, s = a.r, b.r
    eps = -1 if (r * s) % 2 else 1
    assert pairing_minus(a, b, n) == pairing_minus(b, a, n) * (-eps)
    assert pairing_plus(a, b, n) == pairing_plus(b, a, n) * eps


def test_pairing_vanishes_above_top_degree():
    n, dim = 0, 3
    a = Pair(KVector(dim, 1, {(1,): 1}), KForm(dim, 1, {(2,): 1}))
    b = Pair(KVector(dim, 2, {(1, 2): 1}), KForm(dim, 0, {(): 1}))
    val = pairing_minus(a, b, n)
    assert val.terms == {}


def test_pair_degree_mismatch_raises():
    a = Pair(KVector(3, 1, {(1,): 1}), KForm(3, 2, {(1, 2): 1}))
    with pytest.raises(DegreeError):
        pairing_minus(a, a, 0)


def test_pair_wedge_degrees():
    n, dim = 2, 4
    a = Pair(KVector(dim, 1, {(1,): 1}), KForm(dim, 3, {(2, 3, 4): 1}))
    w = pair_wedge(a, a, n)
    assert w.vector.degree == 2 and w.form.degree == 2


def test_float_mode_roundtrip():
    X = KVector(3, 2, {(1, 2): Fraction(1, 3)})
    f = X.to_float()
    assert not f.exact and f.terms[(1, 2)] == pytest.approx(1 / 3)
    assert np.isclose(f.to_exact().terms[(1, 2)], 1 / 3)


def test_wedge_all_empty_is_unit():
    one = wedge_all([], 3)
    assert one.degree == 0 and one.as_scalar() == 1
