from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from multidirac.chart import (Chart, LagrangianModel, canonical_omega, canonical_theta, generalized_energy,
                              gradient_check, kg_chart, kg_model, legendre_transform, mechanics_chart,
                              omega_from_theta, potential_preset)
from multidirac.errors import ChartError, NonPolynomialError
from multidirac.symbolic import exterior_derivative


@pytest.mark.parametrize("n1", [1, 2, 3, 4])
@pytest.mark.parametrize("N", [1, 2, 3])
def test_dimension_and_names(n1, N):
    c = Chart(n1, N)
    assert c.dim == n1 + N + 2 * N * n1 + 1
    assert len(set(c.names)) == c.dim
    assert Chart.from_json(c.to_json()).names == c.names


@pytest.mark.parametrize("n1", [1, 2, 3, 4])
@pytest.mark.parametrize("N", [1, 2, 3])
def test_omega_is_minus_d_theta(n1, N):
    c = Chart(n1, N)
    assert canonical_omega(c) == -exterior_derivative(canonical_theta(c))
    assert omega_from_theta(c) == canonical_omega(c)


def test_dn_x_single_sourced():
    c = kg_chart()
    x0, x1 = c.axis(c.x(0)), c.axis(c.x(1))
    # d_0 -| dx^0 ^ dx^1 = dx^1 and d_1 -| dx^0 ^ dx^1 = -dx^0
    assert c.dn_x(0).terms == {(x1,): 1}
    assert c.dn_x(1).terms == {(x0,): -1}


@given(st.integers(0, 10_000))
def test_energy_vanishes_on_legendre_image(seed):
    rng = np.random.default_rng(seed)
    c = kg_chart()
    L = kg_model(c, "phi4", {"lambda": 0.5})
    x, y, v = rng.normal(size=2), rng.normal(size=1), rng.normal(size=(1, 2))
    pm, p = legendre_transform(L, x, y, v)
    E = generalized_energy(c, L).E(c.join(x, y, v, pm, p))
    assert abs(E) < 1e-12


def test_energy_partials():
    rng = np.random.default_rng(0)
    c = Chart(2, 2)
    L = LagrangianModel.from_poly(c, _quad(c))
    E = generalized_energy(c, L)
    pt = rng.normal(size=c.dim)
    g = E.dE(pt)
    x, y, v, pm, p = c.split(pt)
    assert np.all(g["p"] == 1.0)
    assert np.allclose(g["pm"], v)
    assert np.allclose(g["v"], pm - L.dL_dv(x, y, v))


def _quad(c):
    # L = 1/2 |v|^2 - y1 y2
    out = c.var(c.y(0)) * c.var(c.y(1)) * -1
    for A in range(c.N):
        for m in range(c.n_plus_1):
            out = out + c.var(c.v(A, m)) * c.var(c.v(A, m)) * Fraction(1, 2)
    return out


def test_energy_symbolic_matches_numeric():
    rng = np.random.default_rng(1)
    c = Chart(2, 2)
    L = LagrangianModel.from_poly(c, _quad(c))
    E = generalized_energy(c, L)
    Ep = E.symbolic()
    for _ in range(10):
        pt = rng.normal(size=c.dim)
        assert abs(float(Ep([float(z) for z in pt])) - float(E.E(pt))) < 1e-12


def test_symbolic_and_numeric_lagrangians_agree():
    rng = np.random.default_rng(2)
    c = kg_chart()
    L = kg_model(c, "phi4", {"lambda": 0.25, "m2": 2.0})
    poly = L.require_poly()
    for _ in range(20):
        pt = rng.normal(size=c.dim)
        x, y, v, _, _ = c.split(pt)
        assert abs(float(poly(list(pt))) - float(L.L(x, y, v))) <= 1e-12 * max(1, abs(float(L.L(x, y, v))))


@pytest.mark.parametrize("name", ["linear", "free", "affine", "sine_gordon", "phi4"])
def test_gradient_check(name):
    L = kg_model(kg_chart(), name, {})
    assert gradient_check(L, points=100) <= 1e-6


def test_gradient_check_polynomial_model():
    c = Chart(2, 2)
    assert gradient_check(LagrangianModel.from_poly(c, _quad(c)), points=100) <= 1e-6


def test_non_polynomial_rejected_symbolically():
    L = kg_model(kg_chart(), "sine_gordon")
    with pytest.raises(NonPolynomialError):
        L.require_poly()
    with pytest.raises(NonPolynomialError):
        generalized_energy(L.chart, L).symbolic()


def test_unknown_potential():
    with pytest.raises(ChartError):
        potential_preset("quartic-ish")


def test_lagrangian_must_not_depend_on_momenta():
    c = kg_chart()
    with pytest.raises(ChartError):
        LagrangianModel.from_poly(c, c.var(c.p()))


def test_callbacks_are_reentrant():
    c = kg_chart()
    L = kg_model(c, "phi4", {"lambda": 1.0})
    rng = np.random.default_rng(3)
    pts = [rng.normal(size=c.dim) for _ in range(64)]

    def ev(pt):
        x, y, v, _, _ = c.split(pt)
        return float(L.L(x, y, v)), np.asarray(L.dL_dv(x, y, v)).tolist()

    serial = [ev(p) for p in pts]
    with ThreadPoolExecutor(max_workers=8) as pool:
        threaded = list(pool.map(ev, pts))
    assert serial == threaded


def test_mechanics_chart_names():
    c = mechanics_chart(2)
    assert c.n_plus_1 == 1 and c.N == 2
    assert c.dim == 1 + 2 + 2 + 2 + 1
