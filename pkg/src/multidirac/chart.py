"""Coordinate chart of the Pontryagin bundle and its canonical forms.

Axes are ordered ``x^mu, y^A, v^A_mu, p_A^mu, p``.  Everything else in the
package addresses axes through the name helpers on :class:`Chart`.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Optional

import numpy as np

from .errors import ChartError, NonPolynomialError, ShapeError
from .multivector import KForm, KVector, left_interior
from .poly import Coordinates, PolyScalar
from .symbolic import SymForm, exterior_derivative


def _default_labels(n1: int, N: int) -> dict:
    ys = ["y"] if N == 1 else [f"y{A}" for A in range(1, N + 1)]
    if N == 1:
        v = [[f"v{mu}" for mu in range(n1)]]
        pm = [[f"p{mu}" for mu in range(n1)]]
    else:
        v = [[f"v{A}_{mu}" for mu in range(n1)] for A in range(1, N + 1)]
        pm = [[f"p{A}^{mu}" for mu in range(n1)] for A in range(1, N + 1)]
    return {"x": [f"x{mu}" for mu in range(n1)], "y": ys, "v": v, "pm": pm, "p": "p"}


@dataclass(frozen=True)
class Chart:
    """Pontryagin-bundle chart with ``n+1`` base and ``N`` fiber coordinates.

    ``labels`` may override any of the groups ``x``, ``y``, ``v``, ``pm``
    (nested ``[A][mu]`` lists) and ``p``.
    """

    n_plus_1: int
    N: int
    labels: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.n_plus_1 < 1 or self.N < 1:
            raise ChartError("need n+1 >= 1 and N >= 1")
        lab = _default_labels(self.n_plus_1, self.N)
        for key, val in (self.labels or {}).items():
            if key not in lab:
                raise ChartError(f"unknown label group {key!r}")
            lab[key] = val
        n1, N = self.n_plus_1, self.N
        if len(lab["x"]) != n1 or len(lab["y"]) != N:
            raise ChartError("label list lengths do not match the chart")
        for key in ("v", "pm"):
            if len(lab[key]) != N or any(len(row) != n1 for row in lab[key]):
                raise ChartError(f"{key} labels must be an N x (n+1) table")
        lab = {"x": list(lab["x"]), "y": list(lab["y"]), "v": [list(r) for r in lab["v"]],
               "pm": [list(r) for r in lab["pm"]], "p": str(lab["p"])}
        names = (lab["x"] + lab["y"] + [s for r in lab["v"] for s in r]
                 + [s for r in lab["pm"] for s in r] + [lab["p"]])
        object.__setattr__(self, "labels", lab)
        object.__setattr__(self, "coords", Coordinates(tuple(names)))

    # geometry
    @property
    def n(self) -> int:
        return self.n_plus_1 - 1

    @property
    def dim(self) -> int:
        return self.coords.dim

    @property
    def names(self) -> tuple:
        return self.coords.names

    def x(self, mu: int) -> str:
        return self.labels["x"][mu]

    def y(self, A: int) -> str:
        return self.labels["y"][A]

    def v(self, A: int, mu: int) -> str:
        return self.labels["v"][A][mu]

    def pm(self, A: int, mu: int) -> str:
        return self.labels["pm"][A][mu]

    def p(self) -> str:
        return self.labels["p"]

    def axis(self, name: str) -> int:
        return self.coords.axis(name)

    def index(self, name: str) -> int:
        return self.coords.index(name)

    def group_slices(self) -> dict:
        n1, N = self.n_plus_1, self.N
        a = n1
        b = a + N
        c = b + N * n1
        d = c + N * n1
        return {"x": slice(0, a), "y": slice(a, b), "v": slice(b, c), "pm": slice(c, d), "p": slice(d, d + 1)}

    def split(self, point) -> tuple:
        """``(x, y, v[A, mu], pm[A, mu], p)`` from a flat point (or name mapping)."""
        if isinstance(point, Mapping):
            point = [point[nm] for nm in self.names]
        arr = np.asarray(point, dtype=object if _is_exact(point) else float)
        if arr.shape[-1] != self.dim:
            raise ShapeError(f"point has {arr.shape[-1]} entries, chart has {self.dim}")
        s = self.group_slices()
        n1, N = self.n_plus_1, self.N
        lead = arr.shape[:-1]
        p = arr[..., s["p"]][..., 0]
        if arr.ndim == 1:
            p = p.item() if arr.dtype == object else float(p)
        return (arr[..., s["x"]], arr[..., s["y"]], arr[..., s["v"]].reshape(lead + (N, n1)),
                arr[..., s["pm"]].reshape(lead + (N, n1)), p)

    def join(self, x, y, v, pm, p) -> np.ndarray:
        """Inverse of :meth:`split`."""
        x, y, v, pm = (np.asarray(a) for a in (x, y, v, pm))
        p = np.asarray(p)
        lead = p.shape
        parts = [x.reshape(lead + (-1,)), y.reshape(lead + (-1,)), v.reshape(lead + (-1,)),
                 pm.reshape(lead + (-1,)), p[..., None]]
        out = np.concatenate(parts, axis=-1)
        if out.shape[-1] != self.dim:
            raise ShapeError("component shapes do not match the chart")
        return out

    # serialization
    def to_json(self) -> str:
        return json.dumps({"n_plus_1": self.n_plus_1, "N": self.N, "labels": self.labels}, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Chart":
        data = json.loads(text)
        return cls(int(data["n_plus_1"]), int(data["N"]), data.get("labels") or {})

    # forms
    def base_volume(self) -> KForm:
        """``d^{n+1}x`` as an exact constant form on the full chart."""
        blade = tuple(self.axis(self.x(mu)) for mu in range(self.n_plus_1))
        return KForm.basis(self.dim, blade, True)

    def dn_x(self, mu: int) -> KForm:
        """``d^n x_mu = d/dx^mu -| d^{n+1}x``."""
        return left_interior(KVector.basis(self.dim, (self.axis(self.x(mu)),), True), self.base_volume())

    def lift(self, k: KForm) -> SymForm:
        """Constant-coefficient symbolic form from an exact :class:`KForm`."""
        return SymForm(self.coords, k.degree, {b: PolyScalar.const(self.coords, c) for b, c in k.terms.items()})

    def var(self, name: str) -> PolyScalar:
        return PolyScalar.var(self.coords, name)

    def d(self, name: str) -> SymForm:
        return SymForm.differential(self.coords, name)


def _is_exact(point) -> bool:
    vals = point.values() if isinstance(point, Mapping) else np.ravel(np.asarray(point, dtype=object))
    return all(isinstance(v, (int, Fraction)) and not isinstance(v, bool) for v in vals)


def kg_chart() -> Chart:
    """``n+1 = 2``, ``N = 1`` chart with fiber coordinate ``phi``."""
    return Chart(2, 1, {"y": ["phi"]})


def mechanics_chart(dof: int = 1) -> Chart:
    """``n+1 = 1`` chart ``(t, q, v, p_q, p_t)`` for time-dependent mechanics."""
    if dof == 1:
        lab = {"x": ["t"], "y": ["q"], "v": [["v"]], "pm": [["p_q"]], "p": "p_t"}
    else:
        lab = {"x": ["t"], "y": [f"q{i}" for i in range(1, dof + 1)],
               "v": [[f"v{i}"] for i in range(1, dof + 1)],
               "pm": [[f"p_q{i}"] for i in range(1, dof + 1)], "p": "p_t"}
    return Chart(1, dof, lab)


def canonical_theta(chart: Chart) -> SymForm:
    """``Theta = p_A^mu dy^A ^ d^n x_mu + p d^{n+1}x``."""
    out = SymForm.function(chart.var(chart.p())) ^ chart.lift(chart.base_volume())
    for A in range(chart.N):
        dy = chart.d(chart.y(A))
        for mu in range(chart.n_plus_1):
            term = SymForm.function(chart.var(chart.pm(A, mu))) ^ dy ^ chart.lift(chart.dn_x(mu))
            out = out + term
    return out


def canonical_omega(chart: Chart) -> SymForm:
    """``Omega = dy^A ^ dp_A^mu ^ d^n x_mu - dp ^ d^{n+1}x``."""
    out = -(chart.d(chart.p()) ^ chart.lift(chart.base_volume()))
    for A in range(chart.N):
        dy = chart.d(chart.y(A))
        for mu in range(chart.n_plus_1):
            out = out + (dy ^ chart.d(chart.pm(A, mu)) ^ chart.lift(chart.dn_x(mu)))
    return out


def omega_from_theta(chart: Chart) -> SymForm:
    return -exterior_derivative(canonical_theta(chart))


# ---------------------------------------------------------------- Lagrangians

Callback = Callable[..., object]


@dataclass(frozen=True)
class LagrangianModel:
    """Lagrangian density ``L(x, y, v)`` with its first partials.

    Callbacks take ``x[..., n+1]``, ``y[..., N]``, ``v[..., N, n+1]`` and
    return ``L[...]``, ``dL/dx[..., n+1]``, ``dL/dy[..., N]`` and
    ``dL/dv[..., N, n+1]``.  They must be pure (no hidden state).  ``poly``
    is an optional polynomial in the chart's ``x, y, v`` coordinates used by
    symbolic entry points.
    """

    chart: Chart
    L: Callback
    dL_dx: Callback
    dL_dy: Callback
    dL_dv: Callback
    poly: Optional[PolyScalar] = None
    name: str = "lagrangian"

    def require_poly(self) -> PolyScalar:
        if self.poly is None:
            raise NonPolynomialError(f"{self.name} has no polynomial representation")
        return self.poly

    @classmethod
    def from_poly(cls, chart: Chart, poly: PolyScalar, name: str = "polynomial") -> "LagrangianModel":
        """Numeric callbacks generated from a polynomial ``L(x, y, v)``."""
        n1, N = chart.n_plus_1, chart.N
        xs = [chart.x(mu) for mu in range(n1)]
        ys = [chart.y(A) for A in range(N)]
        vs = [[chart.v(A, mu) for mu in range(n1)] for A in range(N)]
        forbidden = {chart.index(nm) for nm in [chart.pm(A, mu) for A in range(N) for mu in range(n1)] + [chart.p()]}
        if any(e[i] for e in poly.terms for i in forbidden):
            raise ChartError("Lagrangian may depend on x, y, v only")
        grads = {nm: poly.diff(nm) for nm in xs + ys + [s for r in vs for s in r]}
        compiled = {"L": _compile(chart, poly), **{nm: _compile(chart, g) for nm, g in grads.items()}}

        def _pt(x, y, v):
            x, y, v = (np.asarray(a, dtype=float) for a in (x, y, v))
            lead = np.broadcast_shapes(x.shape[:-1], y.shape[:-1], v.shape[:-2])
            z = np.zeros(lead + (chart.dim,))
            s = chart.group_slices()
            z[..., s["x"]] = x
            z[..., s["y"]] = y
            z[..., s["v"]] = v.reshape(lead + (-1,))
            return z

        def L(x, y, v):
            return compiled["L"](_pt(x, y, v))

        def dL_dx(x, y, v):
            z = _pt(x, y, v)
            return np.stack([compiled[nm](z) for nm in xs], axis=-1)

        def dL_dy(x, y, v):
            z = _pt(x, y, v)
            return np.stack([compiled[nm](z) for nm in ys], axis=-1)

        def dL_dv(x, y, v):
            z = _pt(x, y, v)
            return np.stack([np.stack([compiled[nm](z) for nm in row], axis=-1) for row in vs], axis=-2)

        return cls(chart, L, dL_dx, dL_dy, dL_dv, poly, name)


def _compile(chart: Chart, poly: PolyScalar):
    """Vectorized float evaluator of a polynomial over points ``z[..., dim]``."""
    monos = [(np.array(e), float(c)) for e, c in poly.terms.items()]

    def f(z):
        z = np.asarray(z, dtype=float)
        out = np.zeros(z.shape[:-1])
        for e, c in monos:
            out = out + c * np.prod(z ** e, axis=-1)
        return out

    return f


def legendre_transform(L: LagrangianModel, x, y, v):
    """``p_A^mu = dL/dv^A_mu`` and ``p = L - p_A^mu v^A_mu``."""
    pm = np.asarray(L.dL_dv(x, y, v), dtype=float)
    v = np.asarray(v, dtype=float)
    p = np.asarray(L.L(x, y, v), dtype=float) - np.sum(pm * v, axis=(-2, -1))
    return pm, p


@dataclass(frozen=True)
class EnergyModel:
    """Generalized energy ``E = p + p_A^mu v^A_mu - L`` and the groups of ``dE``."""

    chart: Chart
    lagrangian: LagrangianModel

    def E(self, point):
        x, y, v, pm, p = self.chart.split(point)
        x, y, v, pm, p = (np.asarray(a, dtype=float) for a in (x, y, v, pm, p))
        return p + np.sum(pm * v, axis=(-2, -1)) - self.lagrangian.L(x, y, v)

    def dE(self, point) -> dict:
        x, y, v, pm, p = self.chart.split(point)
        x, y, v, pm, p = (np.asarray(a, dtype=float) for a in (x, y, v, pm, p))
        Lm = self.lagrangian
        return {
            "x": -np.asarray(Lm.dL_dx(x, y, v), dtype=float),
            "y": -np.asarray(Lm.dL_dy(x, y, v), dtype=float),
            "v": pm - np.asarray(Lm.dL_dv(x, y, v), dtype=float),
            "pm": v.copy(),
            "p": np.ones_like(p),
        }

    def dE_flat(self, point) -> np.ndarray:
        g = self.dE(point)
        return self.chart.join(g["x"], g["y"], g["v"], g["pm"], g["p"])

    def symbolic(self) -> PolyScalar:
        """Exact ``E`` as a polynomial; needs a polynomial Lagrangian."""
        c = self.chart
        Lp = self.lagrangian.require_poly()
        out = c.var(c.p()) - Lp
        for A in range(c.N):
            for mu in range(c.n_plus_1):
                out = out + c.var(c.pm(A, mu)) * c.var(c.v(A, mu))
        return out


def generalized_energy(chart: Chart, L: LagrangianModel) -> EnergyModel:
    if L.chart != chart:
        raise ChartError("Lagrangian belongs to a different chart")
    return EnergyModel(chart, L)


def gradient_check(L: LagrangianModel, points: int = 100, rel_tol: float = 1e-6,
                   seed: int = 0, h: float = 1e-6) -> float:
    """Max relative error of the partial callbacks against central differences."""
    rng = np.random.default_rng(seed)
    c = L.chart
    worst = 0.0
    for _ in range(points):
        x = rng.normal(size=c.n_plus_1)
        y = rng.normal(size=c.N)
        v = rng.normal(size=(c.N, c.n_plus_1))
        ana = np.concatenate([np.ravel(L.dL_dx(x, y, v)), np.ravel(L.dL_dy(x, y, v)), np.ravel(L.dL_dv(x, y, v))])
        num = []
        for group, arr in (("x", x), ("y", y), ("v", v)):
            flat = arr.ravel()
            for i in range(flat.size):
                up, dn = flat.copy(), flat.copy()
                up[i] += h
                dn[i] -= h
                args_up = {"x": x, "y": y, "v": v}
                args_dn = {"x": x, "y": y, "v": v}
                args_up[group] = up.reshape(arr.shape)
                args_dn[group] = dn.reshape(arr.shape)
                num.append((float(L.L(**args_up)) - float(L.L(**args_dn))) / (2 * h))
        num = np.array(num)
        scale = np.maximum(1.0, np.abs(ana))
        worst = max(worst, float(np.max(np.abs(ana - num) / scale)))
    return worst


# ----------------------------------------------------------- preset models

def klein_gordon_lagrangian(chart: Chart, V: Callback, dV: Callback,
                            poly_V: Optional[PolyScalar] = None, name: str = "klein_gordon") -> LagrangianModel:
    """``L = 1/2 (v0^2 - v1^2) + V(phi)`` on an ``n+1 = 2``, ``N = 1`` chart."""
    if chart.n_plus_1 != 2 or chart.N != 1:
        raise ChartError("Klein-Gordon Lagrangian needs n+1 = 2 and N = 1")

    def L(x, y, v):
        v = np.asarray(v, dtype=float)
        return 0.5 * (v[..., 0, 0] ** 2 - v[..., 0, 1] ** 2) + V(np.asarray(y, dtype=float)[..., 0])

    def dL_dx(x, y, v):
        shape = np.broadcast_shapes(np.shape(x)[:-1], np.shape(y)[:-1], np.shape(v)[:-2])
        return np.zeros(shape + (2,))

    def dL_dy(x, y, v):
        return np.asarray(dV(np.asarray(y, dtype=float)[..., 0]), dtype=float)[..., None] + 0.0 * np.asarray(y, float)

    def dL_dv(x, y, v):
        v = np.asarray(v, dtype=float)
        out = np.empty(v.shape)
        out[..., 0, 0] = v[..., 0, 0]
        out[..., 0, 1] = -v[..., 0, 1]
        return out

    poly = None
    if poly_V is not None:
        v0, v1 = chart.var(chart.v(0, 0)), chart.var(chart.v(0, 1))
        poly = (v0 * v0 - v1 * v1) * Fraction(1, 2) + poly_V
    return LagrangianModel(chart, L, dL_dx, dL_dy, dL_dv, poly, name)


def potential_preset(name: str, params: Mapping | None = None):
    """``(V, V', polynomial-coefficients-or-None)`` for the named potential."""
    params = dict(params or {})
    if name == "linear":
        m2 = float(params.get("m2", 1.0))
        return (lambda f: -0.5 * m2 * f * f), (lambda f: -m2 * f), {2: Fraction(-m2).limit_denominator() / 2}
    if name == "free":
        return (lambda f: 0.0 * f), (lambda f: 0.0 * f), {}
    if name == "affine":
        c = float(params.get("c", 1.0))
        return (lambda f: c * f), (lambda f: c + 0.0 * f), {1: Fraction(c).limit_denominator()}
    if name == "sine_gordon":
        return (lambda f: np.cos(f)), (lambda f: -np.sin(f)), None
    if name == "phi4":
        lam = float(params.get("lambda", 1.0))
        m2 = float(params.get("m2", 1.0))
        return ((lambda f: -0.5 * m2 * f * f - 0.25 * lam * f ** 4),
                (lambda f: -m2 * f - lam * f ** 3),
                {2: Fraction(-m2).limit_denominator() / 2, 4: Fraction(-lam).limit_denominator() / 4})
    raise ChartError(f"unknown potential preset {name!r}")


def kg_model(chart: Chart | None = None, potential: str = "linear", params: Mapping | None = None) -> LagrangianModel:
    chart = chart or kg_chart()
    V, dV, coeffs = potential_preset(potential, params)
    poly_V = None
    if coeffs is not None:
        phi = chart.var(chart.y(0))
        poly_V = PolyScalar.zero(chart.coords)
        for k, c in coeffs.items():
            poly_V = poly_V + (phi ** k) * c
    return klein_gordon_lagrangian(chart, V, dV, poly_V, name=f"kg_{potential}")
