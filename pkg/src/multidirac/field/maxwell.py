"""Residuals of the implicit Maxwell equations on flat spacetime.

Residual verification only.  The metric is fixed to ``diag(-1, 1, 1, 1)``,
``F_{mu nu} = A_{mu,nu} - A_{nu,mu}`` and the momenta are
``p^{mu nu} = s F^{mu nu}`` with ``s = -1`` for ``L = -F_{ab}F^{ab}/4``
(the value of ``dL/dA_{mu,nu}``) by default.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ..errors import ShapeError
from .grid import DiagnosticsReport, grid_derivative, norms

ETA = np.diag([-1.0, 1.0, 1.0, 1.0])
MAXWELL_GROUPS = ("legendre", "holonomy", "continuity")


def raise_indices(F_low: np.ndarray) -> np.ndarray:
    """``F^{mu nu} = eta^{mu a} eta^{nu b} F_{ab}`` over the trailing two axes."""
    return np.einsum("ma,nb,...ab->...mn", ETA, ETA, F_low)


def field_strength(jet: np.ndarray) -> np.ndarray:
    """``F_{mu nu}`` from ``jet[..., mu, nu] = A_{mu,nu}``."""
    return jet - np.swapaxes(jet, -1, -2)


@dataclass
class MaxwellSample:
    """Pointwise data ``(A, A_{mu,nu}, dA_mu/dx^nu, p^{mu nu}, dp^{mu nu}/dx^nu)``.

    ``jet`` holds the jet coordinates ``A_{mu,nu}`` and ``dA`` the actual
    derivatives of the sampled section; they coincide on holonomic data.
    """

    A: np.ndarray
    jet: np.ndarray
    dA: np.ndarray
    p: np.ndarray
    div_p: np.ndarray
    interior: Optional[np.ndarray] = None

    def __post_init__(self):
        lead = self.A.shape[:-1]
        if self.A.shape[-1:] != (4,):
            raise ShapeError("A must have 4 components")
        for name, tail in (("jet", (4, 4)), ("dA", (4, 4)), ("p", (4, 4)), ("div_p", (4,))):
            if getattr(self, name).shape != lead + tail:
                raise ShapeError(f"{name} has shape {getattr(self, name).shape}, expected {lead + tail}")


def maxwell_residual(sample: MaxwellSample, momentum_sign: float = -1.0) -> DiagnosticsReport:
    """Max/L2 norms of the Legendre, holonomy and continuity residuals."""
    F_up = raise_indices(field_strength(sample.jet))
    groups = {
        "legendre": sample.p - momentum_sign * F_up,
        "holonomy": sample.jet - sample.dA,
        "continuity": sample.div_p,
    }
    rep = DiagnosticsReport()
    for name, fld in groups.items():
        rep.residual_max[name], rep.residual_l2[name] = norms(fld, sample.interior, 1.0)
        rep.fields[name] = fld
    rep.legendre_norm = rep.residual_max["legendre"]
    return rep


def _mesh(axes) -> np.ndarray:
    if len(axes) != 4:
        raise ShapeError("Maxwell needs four base axes")
    return np.stack(np.meshgrid(*[np.asarray(a, float) for a in axes], indexing="ij"), axis=-1)


def sample_analytic(A: Callable, grad: Callable, hess: Callable, axes,
                    momentum_sign: float = -1.0) -> MaxwellSample:
    """Sample a potential with analytic first and second derivatives.

    ``A(x) -> [..., 4]``, ``grad(x)[..., mu, nu] = d_nu A_mu`` and
    ``hess(x)[..., mu, nu, la] = d_nu d_la A_mu``.  The momenta are filled by
    the Legendre relation and their divergence comes from ``hess``.
    """
    x = _mesh(axes)
    a, g, h = np.asarray(A(x), float), np.asarray(grad(x), float), np.asarray(hess(x), float)
    p = momentum_sign * raise_indices(field_strength(g))
    # d_nu F_{ab} = h[a, b, nu] - h[b, a, nu]
    dF = h - np.swapaxes(h, -2, -3)
    div_p = momentum_sign * np.einsum("ma,nb,...abn->...m", ETA, ETA, dF)
    return MaxwellSample(a, g, g.copy(), p, div_p)


def sample_finite_difference(A_grid: np.ndarray, spacings, momentum_sign: float = -1.0) -> MaxwellSample:
    """Jet and momenta from centered differences of gridded ``A[i0, i1, i2, i3, mu]``."""
    A_grid = np.asarray(A_grid, float)
    if A_grid.ndim != 5 or A_grid.shape[-1] != 4:
        raise ShapeError("A_grid must have shape (n0, n1, n2, n3, 4)")

    def D(f):
        return np.stack([grid_derivative(f, nu, spacings[nu]) for nu in range(4)], axis=-1)

    jet = D(A_grid)
    p = momentum_sign * raise_indices(field_strength(jet))
    dp = D(p)
    div_p = np.einsum("...mnn->...m", dp)
    mask = np.zeros(A_grid.shape[:-1], dtype=bool)
    mask[2:-2, 2:-2, 2:-2, 2:-2] = True
    return MaxwellSample(A_grid, jet, jet.copy(), p, div_p, mask)


# ------------------------------------------------------------------ presets

def _zeros(x, *tail):
    return np.zeros(x.shape[:-1] + tail)


def plane_wave(component: int = 2, k: float = 1.0):
    """``A_c = sin(k (x0 - x1))`` with ``c`` transverse (2 or 3) or longitudinal (1)."""

    def A(x):
        out = _zeros(x, 4)
        out[..., component] = np.sin(k * (x[..., 0] - x[..., 1]))
        return out

    def grad(x):
        out = _zeros(x, 4, 4)
        c = k * np.cos(k * (x[..., 0] - x[..., 1]))
        out[..., component, 0] = c
        out[..., component, 1] = -c
        return out

    def hess(x):
        out = _zeros(x, 4, 4, 4)
        s = -k * k * np.sin(k * (x[..., 0] - x[..., 1]))
        out[..., component, 0, 0] = s
        out[..., component, 1, 1] = s
        out[..., component, 0, 1] = -s
        out[..., component, 1, 0] = -s
        return out

    return A, grad, hess


def constant_potential(values=(0.3, -1.0, 2.0, 0.5)):
    vals = np.asarray(values, float)
    return (lambda x: _zeros(x, 4) + vals), (lambda x: _zeros(x, 4, 4)), (lambda x: _zeros(x, 4, 4, 4))


def witness_potential():
    """``A_1 = x0 x1``: not a solution, ``d_nu F^{0 nu} = 1`` (up to the momentum sign)."""

    def A(x):
        out = _zeros(x, 4)
        out[..., 1] = x[..., 0] * x[..., 1]
        return out

    def grad(x):
        out = _zeros(x, 4, 4)
        out[..., 1, 0] = x[..., 1]
        out[..., 1, 1] = x[..., 0]
        return out

    def hess(x):
        out = _zeros(x, 4, 4, 4)
        out[..., 1, 0, 1] = 1.0
        out[..., 1, 1, 0] = 1.0
        return out

    return A, grad, hess


PRESETS = {
    "plane_wave": lambda **kw: plane_wave(component=int(kw.get("component", 2)), k=float(kw.get("k", 1.0))),
    "longitudinal": lambda **kw: plane_wave(component=1, k=float(kw.get("k", 1.0))),
    "constant": lambda **kw: constant_potential(kw.get("values", (0.3, -1.0, 2.0, 0.5))),
    "witness": lambda **kw: witness_potential(),
}


def default_axes(n: int = 5, extent: float = 1.0):
    return [np.linspace(0.0, extent, n)] * 4
