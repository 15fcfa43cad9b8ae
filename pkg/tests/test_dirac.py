import json
import random
from fractions import Fraction
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multidirac.chart import Chart, canonical_omega, kg_chart, mechanics_chart
from multidirac.dirac import (ConstraintModel, PointedSubspace, full_space, graph_family, graph_structure,
                              integrability_verdict, nonholonomic_integrability, orthogonal_complement,
                              poisson_bracket_pointwise, random_constraint_model, verify_isotropy, zero_space)
from multidirac.errors import ConstraintDataError, DegreeError
from multidirac.multivector import KForm
from multidirac.symbolic import SymVectorField
from multidirac.verify import (_constrained_points, kg_witness_form, random_decomposable, random_kform)

seeds = st.integers(0, 10_000)


@settings(max_examples=25)
@given(seeds, st.integers(0, 1))
def test_graph_structures_are_maximally_isotropic(seed, n):
    rng = random.Random(seed)
    dim = rng.randint(n + 2, 6)
    om = random_kform(dim, n + 2, rng)
    rep = verify_isotropy(graph_family(om, n), n)
    assert rep.passed, rep.violations()


@settings(max_examples=10)
@given(seeds)
def test_graph_isotropy_in_float_mode(seed):
    rng = random.Random(seed)
    om = random_kform(5, 3, rng).to_float()
    assert verify_isotropy(graph_family(om, 1), 1).passed


@given(seeds, st.integers(0, 2))
def test_graph_dimension_bookkeeping(seed, n):
    rng = random.Random(seed)
    dim = rng.randint(n + 2, 6)
    om = random_kform(dim, n + 2, rng)
    for r in range(1, n + 2):
        assert graph_structure(om, r, n).dimension == comb(dim, r)


@settings(max_examples=25)
@given(seeds)
def test_complement_reverses_inclusion(seed):
    rng = random.Random(seed)
    dim, n, s = 4, 1, 1
    units = full_space(dim, s, n).basis
    picks = rng.sample(range(len(units)), rng.randint(1, len(units) - 1))
    V = PointedSubspace(dim, s, n, tuple(units[i] for i in picks[: max(1, len(picks) // 2)]))
    W = PointedSubspace(dim, s, n, tuple(units[i] for i in picks))
    assert W.contains(V)
    for r in (1, 2):
        assert orthogonal_complement(V, r).contains(orthogonal_complement(W, r))


def test_complement_of_zero_is_everything():
    Z = zero_space(4, 1, 1)
    assert orthogonal_complement(Z, 1).equals(full_space(4, 1, 1))


def test_graph_structure_degree_errors():
    om = KForm(3, 2, {(1, 2): 1})
    with pytest.raises(DegreeError):
        graph_structure(om, 1, 1)
    with pytest.raises(DegreeError):
        graph_structure(om, 2, 0)


def test_report_json_fields():
    om = canonical_omega(kg_chart()).at([0] * kg_chart().dim)
    rep = verify_isotropy(graph_family(om, 1), 1, point=[0] * 11, anchor="graph")
    d = json.loads(rep.to_json())
    e = d["entries"][0] if isinstance(d, dict) else d[0]
    for key in ("point", "r", "s", "dims", "verdict"):
        assert key in e


@pytest.mark.parametrize("chart,k", [(mechanics_chart(2), 1), (mechanics_chart(3), 2), (Chart(2, 2), 2)])
def test_nonholonomic_isotropy_when_annihilator_is_wide_enough(chart, k):
    rng = random.Random(11)
    omega = canonical_omega(chart)
    cm = random_constraint_model(chart, k, rng)
    for pt in _constrained_points(chart, cm, rng, 2):
        rep = verify_isotropy(cm.family(omega.at(pt), pt), chart.n, pt)
        assert rep.passed, rep.violations()


def test_single_constraint_on_kg_chart_breaks_isotropy_at_degree_one():
    # with one constraint and n+1 = 2 the self-pairing at (1, 1) is not maximal
    c = kg_chart()
    rng = random.Random(4)
    cm = random_constraint_model(c, 1, rng)
    pt = _constrained_points(c, cm, rng, 1)[0]
    rep = verify_isotropy(cm.family(canonical_omega(c).at(pt), pt), c.n, pt)
    bad = [(e.r, e.s) for e in rep.entries if not e.verdict]
    assert bad == [(1, 1)]
    w = [e for e in rep.entries if not e.verdict][0].violation_witness
    assert w["side"] == "complement not in D_r"


def test_constraint_residual_zero_after_projection():
    c = kg_chart()
    rng = random.Random(7)
    cm = random_constraint_model(c, 1, rng)
    pt = _constrained_points(c, cm, rng, 1)[0]
    assert np.all(cm.residual(pt) == 0)


def test_rank_deficient_constraint_rejected():
    c = Chart(1, 2)
    cm = ConstraintModel(c, lambda x, y: [[Fraction(0), Fraction(0)]], lambda x, y: [[Fraction(0)]], 1, exact=True)
    with pytest.raises(ConstraintDataError):
        cm.check_rank([Fraction(0)] * c.dim)


def test_integrability_verdicts():
    c = kg_chart()
    rng = random.Random(0)
    secs = [(random_decomposable(c.coords, 1, rng), random_decomposable(c.coords, 1, rng)) for _ in range(3)]
    good = integrability_verdict(canonical_omega(c), secs)
    assert good.integrable and good.theorem_agrees and all(d.is_zero() for d in good.defects)
    bad = integrability_verdict(kg_witness_form(c), secs)
    assert not bad.integrable and bad.theorem_agrees


def test_nonholonomic_integrability_detects_non_involutive_distribution():
    # span{d_x + y d_z, d_y} on (x, y, z) is the contact distribution
    from multidirac.poly import Coordinates, PolyScalar
    from multidirac.symbolic import SymForm
    C = Coordinates(("x", "y", "z"))
    one, zero, y = PolyScalar.const(C, 1), PolyScalar.zero(C), PolyScalar.var(C, "y")
    X1 = SymVectorField(C, [one, zero, y])
    X2 = SymVectorField(C, [zero, one, zero])
    om = SymForm.differential(C, "x") ^ SymForm.differential(C, "y")
    res = nonholonomic_integrability([X1, X2], om)
    assert not res.involutive and res.failing_pairs == [(0, 1)]
    flat = nonholonomic_integrability([SymVectorField.coordinate(C, "x"), SymVectorField.coordinate(C, "y")], om)
    assert flat.integrable


def test_pointwise_poisson_bracket_on_canonical_plane():
    om = KForm(2, 2, {(1, 2): 1})
    D = graph_structure(om, 1, 0)
    dq, dp = KForm(2, 1, {(1,): 1}), KForm(2, 1, {(2,): 1})
    assert poisson_bracket_pointwise(D, dq, dp).as_scalar() == 1
