from fractions import Fraction

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from multidirac.multivector import KVector, basis_blades

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

rationals = st.fractions(min_value=-4, max_value=4, max_denominator=4)


@st.composite
def graded(draw, cls, dim, degree, max_terms=4):
    blades = basis_blades(dim, degree)
    picked = draw(st.lists(st.sampled_from(blades), max_size=min(max_terms, len(blades)), unique=True))
    return cls(dim, degree, {b: draw(rationals) for b in picked})


@st.composite
def vectors(draw, dim):
    return draw(graded(KVector, dim, 1, max_terms=dim))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def frac(a, b=1):
    return Fraction(a, b)


def quadratic_kg_state(c=0.7, beta=0.3, gam=-0.4, a=0.2, b=0.5, d=0.1, h=(0.1, 0.2), shape=(9, 8)):
    """Exact section for ``V = c phi``: a quadratic ``phi`` solving ``phi_tt - phi_xx = c``.

    Centered and one-sided differences are exact on quadratics, so every
    discrete residual vanishes to rounding.
    """
    from multidirac.field.grid import GridState

    t = np.arange(shape[0]) * h[0]
    x = np.arange(shape[1]) * h[1]
    T, X = np.meshgrid(t, x, indexing="ij")
    phi = (c / 2 + beta) * T ** 2 + beta * X ** 2 + gam * T * X + a * T + b * X + d
    v0 = (c + 2 * beta) * T + gam * X + a
    v1 = 2 * beta * X + gam * T + b
    L = 0.5 * (v0 ** 2 - v1 ** 2) + c * phi
    p = L - v0 * v0 + v1 * v1
    return GridState(h, (0.0, 0.0), phi[..., None], np.stack([v0, v1], -1)[..., None, :],
                     np.stack([v0, -v1], -1)[..., None, :], p)
