"""Time-dependent Lagrangian mechanics with affine nonholonomic constraints.

The constrained equations ``d/dt L_v = L_q + A^T lambda``, ``A v + B = 0``
are integrated with Heun's predictor-corrector.  Accelerations and
multipliers come from the saddle system

    [[M, -A^T], [A, 0]] [vdot; lambda] = [L_q - L_vq v - L_vt; -(Adot v + Bdot)]

with ``M = L_vv``, followed by an ``M``-orthogonal projection of ``v`` onto
the constraint set after every step.  ``p = L_v`` by construction, and
``p_t`` is integrated from ``pdot_t = L_t - lambda . (A v)`` starting at
``E = p_t + p v - L = 0`` so that the energy series is a genuine diagnostic.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ..errors import DegenerateConstraintError, InitializationError, ShapeError
from .grid import DiagnosticsReport, GridState, MultiplierTrace, grid_derivative, norms

FD_STEP = 1e-6
COND_LIMIT = 1e12


@dataclass
class MechanicsModel:
    """``L(t, q, v)`` with gradient callbacks; Hessians optional.

    ``L_v(t, q, v) -> [d]``, ``L_q -> [d]``, ``L_t -> float``.  The optional
    ``L_vv``, ``L_vq`` (``[i, j] = d^2 L / dv_i dq_j``) and ``L_vt`` are
    replaced by central differences of ``L_v`` when missing.
    """

    dof: int
    L: Callable
    L_t: Callable
    L_q: Callable
    L_v: Callable
    L_vv: Optional[Callable] = None
    L_vq: Optional[Callable] = None
    L_vt: Optional[Callable] = None
    name: str = "mechanics"

    def hessians(self, t, q, v):
        d = self.dof
        if self.L_vv is not None:
            M = np.asarray(self.L_vv(t, q, v), float)
        else:
            M = np.empty((d, d))
            for j in range(d):
                e = np.zeros(d)
                e[j] = FD_STEP
                M[:, j] = (self.L_v(t, q, v + e) - self.L_v(t, q, v - e)) / (2 * FD_STEP)
        if self.L_vq is not None:
            Mq = np.asarray(self.L_vq(t, q, v), float)
        else:
            Mq = np.empty((d, d))
            for j in range(d):
                e = np.zeros(d)
                e[j] = FD_STEP
                Mq[:, j] = (self.L_v(t, q + e, v) - self.L_v(t, q - e, v)) / (2 * FD_STEP)
        if self.L_vt is not None:
            Mt = np.asarray(self.L_vt(t, q, v), float)
        else:
            Mt = (np.asarray(self.L_v(t + FD_STEP, q, v)) - np.asarray(self.L_v(t - FD_STEP, q, v))) / (2 * FD_STEP)
        return M, Mq, Mt


def free_particle(dof: int, mass: float = 1.0) -> MechanicsModel:
    """``L = m |v|^2 / 2`` with exact Hessians."""
    return MechanicsModel(
        dof,
        L=lambda t, q, v: 0.5 * mass * float(np.dot(v, v)),
        L_t=lambda t, q, v: 0.0,
        L_q=lambda t, q, v: np.zeros(dof),
        L_v=lambda t, q, v: mass * np.asarray(v, float),
        L_vv=lambda t, q, v: mass * np.eye(dof),
        L_vq=lambda t, q, v: np.zeros((dof, dof)),
        L_vt=lambda t, q, v: np.zeros(dof),
        name="free_particle",
    )


@dataclass
class AffineConstraints:
    """``A(t, q) v + B(t, q) = 0`` with ``A -> [k, d]`` and ``B -> [k]``.

    ``dA(t, q) -> (dA/dt [k, d], dA/dq [k, d, d])`` and
    ``dB(t, q) -> (dB/dt [k], dB/dq [k, d])`` are optional.
    """

    k: int
    A: Callable
    B: Callable
    dA: Optional[Callable] = None
    dB: Optional[Callable] = None

    def mats(self, t, q):
        return np.asarray(self.A(t, q), float).reshape(self.k, -1), np.asarray(self.B(t, q), float).reshape(self.k)

    def residual(self, t, q, v) -> np.ndarray:
        A, B = self.mats(t, q)
        return A @ v + B

    def rates(self, t, q, v):
        """``(Adot v + Bdot)`` along the motion with velocity ``v``."""
        d = len(q)
        if self.dA is not None:
            At, Aq = (np.asarray(a, float) for a in self.dA(t, q))
        else:
            At = (self.mats(t + FD_STEP, q)[0] - self.mats(t - FD_STEP, q)[0]) / (2 * FD_STEP)
            Aq = np.empty((self.k, d, d))
            for j in range(d):
                e = np.zeros(d)
                e[j] = FD_STEP
                Aq[:, :, j] = (self.mats(t, q + e)[0] - self.mats(t, q - e)[0]) / (2 * FD_STEP)
        if self.dB is not None:
            Bt, Bq = (np.asarray(b, float) for b in self.dB(t, q))
        else:
            Bt = (self.mats(t + FD_STEP, q)[1] - self.mats(t - FD_STEP, q)[1]) / (2 * FD_STEP)
            Bq = np.empty((self.k, d))
            for j in range(d):
                e = np.zeros(d)
                e[j] = FD_STEP
                Bq[:, j] = (self.mats(t, q + e)[1] - self.mats(t, q - e)[1]) / (2 * FD_STEP)
        Adot = At + np.einsum("rij,j->ri", Aq, v)
        return Adot @ v + Bt + Bq @ v


def no_constraints() -> AffineConstraints:
    return AffineConstraints(0, lambda t, q: np.zeros((0, len(q))), lambda t, q: np.zeros(0))


@dataclass
class MechanicsResult:
    state: GridState
    multipliers: MultiplierTrace
    diagnostics: DiagnosticsReport
    times: np.ndarray

    @property
    def q(self) -> np.ndarray:
        return self.state.y

    @property
    def v(self) -> np.ndarray:
        return self.state.v[..., 0]


def _check_matrix(M: np.ndarray, what: str):
    if M.size and (not np.all(np.isfinite(M)) or np.linalg.cond(M) > COND_LIMIT):
        raise DegenerateConstraintError(f"{what} is singular (condition number above {COND_LIMIT:g})")


def accelerations(model: MechanicsModel, cons: AffineConstraints, t, q, v):
    """Solve the saddle system for ``(vdot, lambda)``."""
    M, Mq, Mt = model.hessians(t, q, v)
    _check_matrix(M, "velocity Hessian M")
    rhs = np.asarray(model.L_q(t, q, v), float) - Mq @ v - Mt
    if cons.k == 0:
        return np.linalg.solve(M, rhs), np.zeros(0)
    A, _ = cons.mats(t, q)
    S = A @ np.linalg.solve(M, A.T)
    _check_matrix(S, "A M^-1 A^T")
    d = len(q)
    K = np.block([[M, -A.T], [A, np.zeros((cons.k, cons.k))]])
    sol = np.linalg.solve(K, np.concatenate([rhs, -cons.rates(t, q, v)]))
    return sol[:d], sol[d:]


def project_velocity(model: MechanicsModel, cons: AffineConstraints, t, q, v) -> np.ndarray:
    """``M``-orthogonal projection of ``v`` onto ``A v + B = 0``."""
    if cons.k == 0:
        return v
    M = model.hessians(t, q, v)[0]
    A, B = cons.mats(t, q)
    MiAt = np.linalg.solve(M, A.T)
    return v - MiAt @ np.linalg.solve(A @ MiAt, A @ v + B)


def solve_nonholonomic_mechanics(model: MechanicsModel, cons: AffineConstraints, q0, v0,
                                 t_final: float = 10.0, steps: int = 10_000, t0: float = 0.0,
                                 init_tol: float = 1e-10, project: bool = True) -> MechanicsResult:
    """Integrate the constrained implicit Lagrange-d'Alembert equations.

    Raises :class:`InitializationError` when ``|A v0 + B| > init_tol`` and
    :class:`DegenerateConstraintError` when ``M`` or ``A M^-1 A^T`` is singular.
    """
    q = np.asarray(q0, float).copy()
    v = np.asarray(v0, float).copy()
    d = model.dof
    if q.shape != (d,) or v.shape != (d,):
        raise ShapeError(f"initial data must have {d} components")
    if steps < 1:
        raise ShapeError("need at least one step")
    if cons.k and np.max(np.abs(cons.residual(t0, q, v))) > init_tol:
        raise InitializationError(f"initial velocity violates the constraint: |Av+B| = "
                                  f"{np.max(np.abs(cons.residual(t0, q, v))):.3e}")
    h = (t_final - t0) / steps
    Q = np.empty((steps + 1, d))
    Vs = np.empty((steps + 1, d))
    P = np.empty((steps + 1, d))
    Pt = np.empty(steps + 1)
    lam = np.empty((steps + 1, cons.k))
    viol = np.empty(steps + 1)
    times = t0 + h * np.arange(steps + 1)

    def ptdot(t, q, v, lm):
        g = float(model.L_t(t, q, v))
        if cons.k:
            g -= float(lm @ (cons.mats(t, q)[0] @ v))
        return g

    a, lm = accelerations(model, cons, t0, q, v)
    pt = float(model.L(t0, q, v)) - float(np.dot(model.L_v(t0, q, v), v))
    for n in range(steps + 1):
        t = times[n]
        Q[n], Vs[n], lam[n] = q, v, lm
        P[n] = model.L_v(t, q, v)
        Pt[n] = pt
        viol[n] = float(np.max(np.abs(cons.residual(t, q, v)))) if cons.k else 0.0
        if n == steps:
            break
        g1 = ptdot(t, q, v, lm)
        qs, vs = q + h * v, v + h * a
        a2, lm2 = accelerations(model, cons, t + h, qs, vs)
        g2 = ptdot(t + h, qs, vs, lm2)
        q = q + 0.5 * h * (v + vs)
        v = v + 0.5 * h * (a + a2)
        if project:
            v = project_velocity(model, cons, t + h, q, v)
        pt = pt + 0.5 * h * (g1 + g2)
        a, lm = accelerations(model, cons, t + h, q, v)

    state = GridState((h,), (t0,), Q, Vs[..., None], P[..., None], Pt, (False,))
    trace = MultiplierTrace(lam)
    diag = mechanics_diagnostics(model, cons, state, trace)
    diag.constraint_violation = viol
    return MechanicsResult(state, trace, diag, times)


def mechanics_diagnostics(model: MechanicsModel, cons: AffineConstraints, state: GridState,
                          trace: MultiplierTrace) -> DiagnosticsReport:
    """Holonomy, constrained balance, Legendre residuals and the energy series."""
    h = state.spacings[0]
    times = state.axis_values(0)
    q, v, p, pt = state.y, state.v[..., 0], state.pm[..., 0], state.p
    Lq = np.array([model.L_q(t, a, b) for t, a, b in zip(times, q, v)])
    Lv = np.array([model.L_v(t, a, b) for t, a, b in zip(times, q, v)])
    Lval = np.array([float(model.L(t, a, b)) for t, a, b in zip(times, q, v)])
    if cons.k:
        force = np.array([cons.mats(t, a)[0].T @ lm for t, a, lm in zip(times, q, trace.values)])
    else:
        force = np.zeros_like(Lq)
    groups = {
        "holonomy": grid_derivative(q, 0, h) - v,
        "balance": grid_derivative(p, 0, h) - Lq - force,
        "legendre": p - Lv,
    }
    mask = state.interior_mask()
    rep = DiagnosticsReport()
    for name, fld in groups.items():
        rep.residual_max[name], rep.residual_l2[name] = norms(fld, mask, h)
        rep.fields[name] = fld
    rep.legendre_norm = rep.residual_max["legendre"]
    E = pt + np.sum(p * v, axis=-1) - Lval
    rep.energy_drift = E - E[0]
    rep.fields["E"] = E
    rep.extra["multiplier_max_abs"] = trace.max_abs()
    return rep


# ------------------------------------------------------------------ examples

@dataclass
class MechanicsExample:
    name: str
    model: MechanicsModel
    constraints: AffineConstraints
    q0: np.ndarray
    v0: np.ndarray
    exact_q: Callable
    exact_lambda: Callable = field(default=lambda t: 0.0)


def affine_vy1() -> MechanicsExample:
    """Planar free particle with ``v_y - 1 = 0``; solution ``x = y = t``."""
    cons = AffineConstraints(
        1, lambda t, q: np.array([[0.0, 1.0]]), lambda t, q: np.array([-1.0]),
        dA=lambda t, q: (np.zeros((1, 2)), np.zeros((1, 2, 2))),
        dB=lambda t, q: (np.zeros(1), np.zeros((1, 2))),
    )
    return MechanicsExample("affine_vy1", free_particle(2), cons, np.zeros(2), np.array([1.0, 1.0]),
                            lambda t: np.stack([t, t], axis=-1))


def contact_constraint() -> MechanicsExample:
    """Free particle in space with ``z' - y x' = 0``; from rest at the origin with ``v = (1, 0, 0)``, ``x = t``."""

    def dA(t, q):
        Aq = np.zeros((1, 3, 3))
        Aq[0, 0, 1] = -1.0
        return np.zeros((1, 3)), Aq

    cons = AffineConstraints(
        1, lambda t, q: np.array([[-q[1], 0.0, 1.0]]), lambda t, q: np.zeros(1),
        dA=dA, dB=lambda t, q: (np.zeros(1), np.zeros((1, 3))),
    )
    return MechanicsExample("contact_zyx", free_particle(3), cons, np.zeros(3), np.array([1.0, 0.0, 0.0]),
                            lambda t: np.stack([t, 0 * t, 0 * t], axis=-1))


EXAMPLES = {"affine_vy1": affine_vy1, "contact_zyx": contact_constraint}


def run_example(name: str, t_final: float = 10.0, steps: int = 10_000) -> tuple[MechanicsExample, MechanicsResult]:
    ex = EXAMPLES[name]()
    res = solve_nonholonomic_mechanics(ex.model, ex.constraints, ex.q0, ex.v0, t_final, steps)
    return ex, res
