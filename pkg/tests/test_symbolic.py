import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from multidirac.errors import ChartError, DegreeError, ModeError
from multidirac.poly import Coordinates, PolyScalar
from multidirac.symbolic import (SymForm, SymMultivectorField, SymPair, SymVectorField, commutator,
                                 courant_defect, courant_dorfman, exterior_derivative, from_text,
                                 graph_section, interior, lie_derivative, multi_courant_bracket,
                                 schouten_bracket, sym_pairing_minus, sym_wedge, theorem_defect,
                                 vector_interior)
from multidirac.verify import random_decomposable, random_poly, random_symform, random_vector_field

C3 = Coordinates(("a", "b", "c"))
C4 = Coordinates(("a", "b", "c", "e"))
seeds = st.integers(0, 10_000)


def test_poly_arithmetic_and_diff():
    a, b = PolyScalar.var(C3, "a"), PolyScalar.var(C3, "b")
    f = a * a * b + b * Fraction(1, 2)
    assert f.diff("a") == a * b * 2
    assert f.diff("b") == a * a + PolyScalar.const(C3, Fraction(1, 2))
    assert f([1, 2, 0]) == 3
    assert (f - f).is_zero() and f.degree() == 3


def test_poly_rejects_floats():
    with pytest.raises((ModeError, TypeError)):
        PolyScalar.const(C3, 0.5)


@given(seeds, st.integers(0, 2))
def test_d_squared_is_zero(seed, k):
    w = random_symform(C4, k, random.Random(seed))
    dd = exterior_derivative(exterior_derivative(w))
    assert dd.is_zero()


@given(seeds, st.integers(1, 3))
def test_cartan_formula_for_vector_fields(seed, k):
    rng = random.Random(seed)
    V = random_vector_field(C4, rng)
    w = random_symform(C4, k, rng)
    X = SymMultivectorField.decomposable([V])
    expected = vector_interior(V, exterior_derivative(w)) + exterior_derivative(vector_interior(V, w))
    assert lie_derivative(X, w) == expected


@given(seeds)
def test_lie_derivative_of_function(seed):
    rng = random.Random(seed)
    V = random_vector_field(C3, rng)
    f = random_poly(C3, rng, 2, 3)
    assert lie_derivative(SymMultivectorField.decomposable([V]), SymForm.function(f)) == SymForm.function(V.apply(f))


@given(seeds, st.integers(1, 2), st.integers(1, 2))
def test_schouten_graded_antisymmetry(seed, r, s):
    rng = random.Random(seed)
    X, Y = random_decomposable(C4, r, rng), random_decomposable(C4, s, rng)
    sign = -1 if (r - 1) * (s - 1) % 2 else 1
    total = schouten_bracket(X, Y) + schouten_bracket(Y, X) * sign
    assert total.is_zero()


@given(seeds)
def test_schouten_of_vector_fields_is_commutator(seed):
    rng = random.Random(seed)
    U, V = random_vector_field(C3, rng), random_vector_field(C3, rng)
    br = schouten_bracket(SymMultivectorField.decomposable([U]), SymMultivectorField.decomposable([V]))
    assert (br - SymMultivectorField.decomposable([commutator(U, V)])).is_zero()


@given(seeds, st.integers(0, 2))
def test_bracket_identity_on_graph_sections(seed, n):
    rng = random.Random(seed)
    omega = random_symform(C4, n + 2, rng)
    degs = [(r, s) for r in range(1, n + 2) for s in range(1, n + 2) if r + s <= n + 1] or [(1, 1)]
    r, s = rng.choice(degs)
    if r + s - 1 > n + 1:
        return
    X, Xb = random_decomposable(C4, r, rng), random_decomposable(C4, s, rng)
    assert courant_defect(omega, X, Xb) == theorem_defect(omega, X, Xb)


def test_closed_forms_have_integrable_graphs():
    rng = random.Random(5)
    # exact 2-form: d of a random 1-form
    omega = exterior_derivative(random_symform(C4, 1, rng))
    for _ in range(5):
        X, Xb = random_decomposable(C4, 1, rng), random_decomposable(C4, 1, rng)
        assert courant_defect(omega, X, Xb).is_zero()


def test_printed_variant_differs_at_r_equals_s_equals_one():
    rng = random.Random(2)
    omega = random_symform(C4, 2, rng)
    differs = False
    for _ in range(5):
        X, Xb = random_decomposable(C4, 1, rng), random_decomposable(C4, 1, rng)
        differs = differs or courant_defect(omega, X, Xb, "printed") != theorem_defect(omega, X, Xb)
    assert differs


@given(seeds)
def test_courant_dorfman_on_isotropic_sections(seed):
    rng = random.Random(seed)
    omega = random_symform(C4, 2, rng)
    a = graph_section(omega, random_decomposable(C4, 1, rng))
    b = graph_section(omega, random_decomposable(C4, 1, rng))
    assert sym_pairing_minus(a, b, 0).is_zero()
    mc, cd = multi_courant_bracket(a, b, 0), courant_dorfman(a, b)
    assert (mc.vector - cd.vector).is_zero()
    assert mc.form == cd.form


@given(seeds)
def test_courant_dorfman_differs_by_exact_pairing(seed):
    rng = random.Random(seed)
    a = SymPair(random_decomposable(C4, 1, rng), random_symform(C4, 1, rng))
    b = SymPair(random_decomposable(C4, 1, rng), random_symform(C4, 1, rng))
    mc, cd = multi_courant_bracket(a, b, 0), courant_dorfman(a, b)
    assert cd.form - mc.form == exterior_derivative(sym_pairing_minus(a, b, 0))


def test_bracket_degree_guard():
    rng = random.Random(0)
    a = SymPair(random_decomposable(C4, 2, rng), random_symform(C4, 1, rng))
    with pytest.raises(DegreeError):
        multi_courant_bracket(a, a, 1)


def test_text_roundtrip():
    rng = random.Random(9)
    w = random_symform(C3, 2, rng)
    assert from_text(C3, w.to_text()) == w
    X = random_decomposable(C3, 2, rng)
    back = from_text(C3, X.to_text())
    assert (back - X).is_zero()


def test_chart_mismatch_is_rejected():
    a = SymForm.differential(C3, "a")
    b = SymForm.differential(C4, "a")
    with pytest.raises(ChartError):
        sym_wedge(a, b)


def test_interior_of_decomposable():
    da, db = SymForm.differential(C3, "a"), SymForm.differential(C3, "b")
    Xa, Xb = SymVectorField.coordinate(C3, "a"), SymVectorField.coordinate(C3, "b")
    X = SymMultivectorField.decomposable([Xa, Xb])
    assert interior(X, da ^ db) == SymForm.function(PolyScalar.const(C3, 1))
