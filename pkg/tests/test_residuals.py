import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multidirac.chart import Chart, LagrangianModel, kg_chart, kg_model
from multidirac.errors import ShapeError
from multidirac.field.grid import GridState, grid_derivative, norms
from multidirac.field.residuals import (energy_conservation_check, implicit_el_residual, lagrange_dirac_check,
                                        lagrange_dirac_on_state, partial_multivector)

from conftest import quadratic_kg_state

CHART = kg_chart()


def model(c=0.7):
    return kg_model(CHART, "affine", {"c": c})


def test_exact_state_has_vanishing_residuals():
    rep = implicit_el_residual(CHART, model(), quadratic_kg_state())
    assert rep.max_residual() <= 1e-12
    assert set(rep.residual_max) == {"holonomy", "balance", "legendre", "energy"}


@settings(max_examples=20)
@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1))
def test_exact_states_pass_lagrange_dirac(beta, gam, a):
    st_ = quadratic_kg_state(beta=beta, gam=gam, a=a)
    ld = lagrange_dirac_on_state(CHART, model(), st_)
    assert ld["passed"] and ld["nodes"] == 7 * 6
    assert implicit_el_residual(CHART, model(), st_).vanishes(1e-10)


def test_corrupted_energy_coordinate_is_detected():
    st_ = quadratic_kg_state()
    st_.p[4, 3] += 1e-3
    rep = implicit_el_residual(CHART, model(), st_)
    assert rep.residual_max["energy"] > 1e-4
    assert rep.residual_max["holonomy"] <= 1e-12
    ec = energy_conservation_check(CHART, model(), st_)
    assert ec.extra["E_max_abs"] == pytest.approx(1e-3)
    assert not lagrange_dirac_on_state(CHART, model(), st_)["passed"]


def test_corrupted_momentum_breaks_legendre():
    st_ = quadratic_kg_state()
    st_.pm[2, 2, 0, 1] += 1e-2
    rep = implicit_el_residual(CHART, model(), st_)
    assert rep.residual_max["legendre"] == pytest.approx(1e-2)


def test_generalized_energy_is_constant_on_exact_state():
    ec = energy_conservation_check(CHART, model(), quadratic_kg_state())
    assert ec.max_residual() <= 1e-12


def test_chart_mismatch():
    with pytest.raises(ShapeError):
        implicit_el_residual(Chart(2, 2), kg_model(CHART), quadratic_kg_state())


def test_normalization_of_partial_multivector():
    rng = np.random.default_rng(0)
    Cy, Cp, Ce = rng.normal(size=(1, 2)), rng.normal(size=(1, 2, 2)), rng.normal(size=2)
    ld = lagrange_dirac_check(CHART, model(), Cy, Cp, Ce, rng.normal(size=CHART.dim))
    assert ld.normalization == pytest.approx(1.0)


def test_closed_form_contraction_discrepancy_is_logged():
    rng = np.random.default_rng(1)
    Cy, Cp, Ce = rng.normal(size=(1, 2)), rng.normal(size=(1, 2, 2)), rng.normal(size=2)
    ld = lagrange_dirac_check(CHART, model(), Cy, Cp, Ce, rng.normal(size=CHART.dim))
    assert set(ld.contract_discrepancy) == {"printed", "flipped_dy"}
    assert ld.supported_reading == "flipped_dy"
    assert ld.contract_discrepancy["printed"] > 1e-6


def test_degenerate_lagrangian_is_accepted_by_evaluators():
    # L = phi v0 has a singular velocity Hessian
    c = CHART
    L = LagrangianModel.from_poly(c, c.var(c.y(0)) * c.var(c.v(0, 0)))
    st_ = quadratic_kg_state()
    rep = implicit_el_residual(c, L, st_)
    assert all(np.isfinite(v) for v in rep.residual_max.values())
    X = partial_multivector(c, np.zeros((1, 2)), np.zeros((1, 2, 2)), np.zeros(2))
    assert X.degree == 2
    lagrange_dirac_check(c, L, np.zeros((1, 2)), np.zeros((1, 2, 2)), np.zeros(2), np.zeros(c.dim))


def test_grid_derivative_is_exact_on_quadratics():
    x = np.linspace(0, 1, 7)
    f = 3 * x ** 2 - x
    assert np.allclose(grid_derivative(f, 0, x[1] - x[0]), 6 * x - 1, atol=1e-12)


def test_grid_state_validation():
    with pytest.raises(ShapeError):
        GridState((0.1,), (0.0,), np.zeros((3, 1)), np.zeros((3, 1, 1)), np.zeros((3, 1, 1)), np.zeros(3), (True, False))
    with pytest.raises(ShapeError):
        GridState((-0.1,), (0.0,), np.zeros((3, 1)), np.zeros((3, 1, 1)), np.zeros((3, 1, 1)), np.zeros(3))


@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=20))
def test_norms_are_nonnegative(vals):
    mx, l2 = norms(np.array(vals), None, 0.5)
    assert mx >= 0 and l2 >= 0
