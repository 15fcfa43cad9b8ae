"""Residual evaluators for the implicit Euler-Lagrange and Lagrange-Dirac equations."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..chart import Chart, LagrangianModel, canonical_omega, generalized_energy
from ..errors import ChartError, ShapeError
from ..multivector import KForm, KVector, evaluate, left_interior, wedge_all
from .grid import DiagnosticsReport, GridState, grid_derivative, norms

GROUPS = ("holonomy", "balance", "legendre", "energy")


def _check(chart: Chart, state: GridState):
    if state.n_plus_1 != chart.n_plus_1 or state.N != chart.N:
        raise ShapeError(f"state with n+1={state.n_plus_1}, N={state.N} does not fit chart "
                         f"n+1={chart.n_plus_1}, N={chart.N}")


def discrete_derivatives(state: GridState) -> dict:
    """Centered derivatives ``D_mu`` of every field, derivative index last."""
    n1 = state.n_plus_1
    h, per = state.spacings, state.periodic

    def D(f):
        return np.stack([grid_derivative(f, mu, h[mu], per[mu]) for mu in range(n1)], axis=-1)

    return {"y": D(state.y), "v": D(state.v), "pm": D(state.pm), "p": D(state.p)}


def implicit_el_residual(chart: Chart, L: LagrangianModel, state: GridState) -> DiagnosticsReport:
    """Residuals of ``dy/dx = v``, ``d_mu p^mu = dL/dy``, ``p = dL/dv`` and of ``d_mu E = 0``.

    The energy group is the chain-rule expansion
    ``D_mu p + p D_mu v + v D_mu p_A - dL/dx - dL/dy D_mu y - dL/dv D_mu v``,
    i.e. the ``dx^mu`` components of the Lagrange-Dirac condition.
    Norms exclude non-periodic boundary nodes.
    """
    _check(chart, state)
    X = state.base_points()
    y, v, pm = state.y, state.v, state.pm
    Dd = discrete_derivatives(state)
    Dy, Dv, Dpm, Dp = Dd["y"], Dd["v"], Dd["pm"], Dd["p"]
    Lx = np.asarray(L.dL_dx(X, y, v), dtype=float)
    Ly = np.asarray(L.dL_dy(X, y, v), dtype=float)
    Lv = np.asarray(L.dL_dv(X, y, v), dtype=float)
    holonomy = Dy - v
    div = np.einsum("...amm->...a", Dpm)
    balance = div - Ly
    legendre = pm - Lv
    energy = (Dp + np.einsum("...al,...alm->...m", pm - Lv, Dv)
              + np.einsum("...al,...alm->...m", v, Dpm)
              - Lx - np.einsum("...a,...am->...m", Ly, Dy))
    mask = state.interior_mask()
    cell = float(np.prod(state.spacings))
    rep = DiagnosticsReport()
    for name, fld in zip(GROUPS, (holonomy, balance, legendre, energy)):
        rep.residual_max[name], rep.residual_l2[name] = norms(fld, mask, cell)
        rep.fields[name] = fld
    rep.legendre_norm = norms(legendre, None, cell)[0]
    return rep


def energy_conservation_check(chart: Chart, L: LagrangianModel, state: GridState) -> DiagnosticsReport:
    """Centered differences of ``E = p + p v - L`` along every grid direction."""
    _check(chart, state)
    X = state.base_points()
    E = state.p + np.sum(state.pm * state.v, axis=(-2, -1)) - np.asarray(L.L(X, state.y, state.v), dtype=float)
    mask = state.interior_mask()
    cell = float(np.prod(state.spacings))
    rep = DiagnosticsReport()
    for mu in range(state.n_plus_1):
        D = grid_derivative(E, mu, state.spacings[mu], state.periodic[mu])
        key = f"dE_dx{mu}"
        rep.residual_max[key], rep.residual_l2[key] = norms(D, mask, cell)
        rep.fields[key] = D
    rep.fields["E"] = E
    rep.extra["E_max_abs"] = float(np.max(np.abs(E))) if E.size else 0.0
    return rep


# ------------------------------------------------------------ Lagrange-Dirac

@dataclass
class LagrangeDiracVerdict:
    """Comparison of ``i_X Omega_M`` with ``(-1)^{n+2} dE`` at one point."""

    passed: bool
    residuals: dict
    normalization: float
    contract_discrepancy: dict = field(default_factory=dict)
    supported_reading: str = ""
    anchor: str = "implicit Euler-Lagrange equations (Lagrange-Dirac form)"


def partial_multivector(chart: Chart, C_y, C_p, C_e) -> KVector:
    """``X = wedge_mu (d_mu + C^A_mu d_{y^A} + C^nu_{A mu} d_{p_A^nu} + C_mu d_p)``.

    ``C_y[A, mu]``, ``C_p[A, nu, mu]`` and ``C_e[mu]``; floats.
    """
    C_y, C_p, C_e = np.asarray(C_y, float), np.asarray(C_p, float), np.asarray(C_e, float)
    n1, N = chart.n_plus_1, chart.N
    factors = []
    for mu in range(n1):
        t = {(chart.axis(chart.x(mu)),): 1.0, (chart.axis(chart.p()),): C_e[mu]}
        for A in range(N):
            t[(chart.axis(chart.y(A)),)] = C_y[A, mu]
            for nu in range(n1):
                t[(chart.axis(chart.pm(A, nu)),)] = C_p[A, nu, mu]
        factors.append(KVector(chart.dim, 1, t, exact=False))
    return wedge_all(factors)


def _group_of(chart: Chart) -> dict:
    out = {}
    for name, sl in chart.group_slices().items():
        for i in range(sl.start, sl.stop):
            out[i + 1] = name
    return out


def _de_form(chart: Chart, L: LagrangianModel, point) -> KForm:
    flat = generalized_energy(chart, L).dE_flat(np.asarray(point, dtype=float))
    return KForm(chart.dim, 1, {(i + 1,): c for i, c in enumerate(flat)}, exact=False)


def contract_closed_form(chart: Chart, C_y, C_p, C_e, dy_sign: int = 1) -> KForm:
    """Closed-form value of ``i_X Omega_M`` with a selectable sign on the ``dy^A`` term.

    ``dy_sign=+1`` is the expression as usually printed,
    ``(-1)^{n+2}[(C^A_mu C^l_{Al} - C^A_l C^l_{A mu} - C_mu) dx^mu + C^A_mu dp_A^mu + C^mu_{A mu} dy^A + dp]``.
    """
    C_y, C_p, C_e = np.asarray(C_y, float), np.asarray(C_p, float), np.asarray(C_e, float)
    n1, N = chart.n_plus_1, chart.N
    sgn = -1.0 if (chart.n + 2) % 2 else 1.0
    div = np.einsum("ann->a", C_p)
    t = {(chart.axis(chart.p()),): sgn}
    for mu in range(n1):
        val = sum(C_y[A, mu] * div[A] - sum(C_y[A, l] * C_p[A, l, mu] for l in range(n1)) for A in range(N)) - C_e[mu]
        t[(chart.axis(chart.x(mu)),)] = sgn * val
    for A in range(N):
        t[(chart.axis(chart.y(A)),)] = sgn * dy_sign * div[A]
        for mu in range(n1):
            t[(chart.axis(chart.pm(A, mu)),)] = sgn * C_y[A, mu]
    return KForm(chart.dim, 1, t, exact=False)


def lagrange_dirac_check(chart: Chart, L: LagrangianModel, C_y, C_p, C_e, point,
                         tol: float = 1e-10, omega: KForm | None = None) -> LagrangeDiracVerdict:
    """Test ``i_X Omega_M = (-1)^{n+2} dE`` and ``i_X eta = 1`` at ``point``.

    The contraction is computed by the exterior-algebra kernel.  It is also
    compared with the closed form under both signs of the ``dy^A`` term;
    ``supported_reading`` names the one that matches the kernel.
    """
    if L.chart != chart:
        raise ChartError("Lagrangian belongs to a different chart")
    X = partial_multivector(chart, C_y, C_p, C_e)
    Om = omega if omega is not None else canonical_omega(chart).at([0] * chart.dim).to_float()
    lhs = left_interior(X, Om)
    sgn = -1.0 if (chart.n + 2) % 2 else 1.0
    rhs = _de_form(chart, L, point) * sgn
    diff = lhs - rhs
    groups = _group_of(chart)
    res = {g: 0.0 for g in ("x", "y", "v", "pm", "p")}
    for (i,), c in diff.terms.items():
        res[groups[i]] = max(res[groups[i]], abs(c))
    norm = evaluate(chart.base_volume().to_float(), X)
    disc = {}
    for label, s in (("printed", 1), ("flipped_dy", -1)):
        disc[label] = (lhs - contract_closed_form(chart, C_y, C_p, C_e, s)).max_abs()
    matching = [k for k, v in disc.items() if v <= 1e-12 * max(1.0, lhs.max_abs())]
    passed = max(res.values()) <= tol and abs(norm - 1.0) <= tol
    return LagrangeDiracVerdict(passed, res, float(norm), disc, ",".join(matching) or "none")


def coefficients_from_state(state: GridState, index: tuple) -> tuple:
    """``(C_y, C_p, C_e)`` from centered differences of the state at node ``index``."""
    Dd = discrete_derivatives(state)
    return Dd["y"][index], Dd["pm"][index], Dd["p"][index]


def lagrange_dirac_on_state(chart: Chart, L: LagrangianModel, state: GridState, tol: float = 1e-10) -> dict:
    """Run :func:`lagrange_dirac_check` at every interior node with discrete coefficients."""
    _check(chart, state)
    Dd = discrete_derivatives(state)
    X = state.base_points()
    Om = canonical_omega(chart).at([0] * chart.dim).to_float()
    mask = state.interior_mask()
    worst = {g: 0.0 for g in ("x", "y", "v", "pm", "p")}
    failed = 0
    total = 0
    readings = set()
    for idx in zip(*np.nonzero(mask)):
        point = chart.join(X[idx], state.y[idx], state.v[idx], state.pm[idx], state.p[idx])
        ver = lagrange_dirac_check(chart, L, Dd["y"][idx], Dd["pm"][idx], Dd["p"][idx], point, tol, Om)
        total += 1
        failed += not ver.passed
        readings.add(ver.supported_reading)
        for g, v in ver.residuals.items():
            worst[g] = max(worst[g], v)
    return {"passed": failed == 0, "nodes": total, "failed_nodes": failed, "worst": worst,
            "supported_reading": sorted(readings)}
