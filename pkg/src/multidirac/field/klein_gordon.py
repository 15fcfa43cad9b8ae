"""Stormer-Verlet integration of the 1+1 nonlinear Klein-Gordon equation.

The first-order system is evolved in ``(phi, p0)`` with ``p0 = v0``; the
spatial multi-velocity ``v1`` is the centered difference of ``phi``,
``p1 = -v1`` and ``p`` comes from the energy constraint ``E = 0``.
Space is periodic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ..chart import kg_chart, kg_model, potential_preset
from ..errors import StabilityError, ShapeError
from .grid import DiagnosticsReport, GridState
from .residuals import implicit_el_residual


@dataclass
class KGConfig:
    """Grid, potential and initial data of a Klein-Gordon run.

    ``initial`` is ``"plane_wave"`` (``phi = amplitude cos(k x - w t)``),
    ``"transport"`` (``phi = f(x - t)`` with ``f = exp(cos x)``, needs a free
    potential), ``"zero"`` or ``"custom"`` (supply ``phi0`` and ``phit0``).
    """

    nx: int = 128
    length: float = 2 * math.pi
    cfl: float = 0.5
    steps: Optional[int] = None
    t_final: Optional[float] = None
    potential: str = "linear"
    potential_params: dict = field(default_factory=dict)
    initial: str = "plane_wave"
    k: int = 1
    amplitude: float = 1.0
    save_every: int = 1
    phi0: Optional[Callable] = None
    phit0: Optional[Callable] = None

    @property
    def dx(self) -> float:
        return self.length / self.nx

    @property
    def dt(self) -> float:
        return self.cfl * self.dx

    def n_steps(self) -> int:
        if self.steps is not None:
            return int(self.steps)
        if self.t_final is None:
            raise ShapeError("set either steps or t_final")
        n = int(round(self.t_final / self.dt))
        if not math.isclose(n * self.dt, self.t_final, rel_tol=1e-12, abs_tol=1e-12):
            raise ShapeError(f"t_final={self.t_final} is not a multiple of dt={self.dt}")
        return n

    def omega(self) -> float:
        """Plane-wave frequency ``w^2 = k^2 + m^2`` for the linear potential."""
        m2 = float(self.potential_params.get("m2", 1.0)) if self.potential == "linear" else 0.0
        return math.sqrt(self.k ** 2 + m2)


def analytic_solution(cfg: KGConfig) -> Optional[Callable]:
    """``phi(t, x)`` for presets with a closed form, else ``None``."""
    if cfg.initial == "plane_wave" and cfg.potential in ("linear", "free"):
        w, k, a = cfg.omega(), cfg.k, cfg.amplitude
        return lambda t, x: a * np.cos(k * x - w * t)
    if cfg.initial == "transport" and cfg.potential == "free":
        return lambda t, x: np.exp(np.cos(x - t))
    if cfg.initial == "zero":
        return lambda t, x: 0.0 * x
    return None


def initial_data(cfg: KGConfig, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if cfg.initial == "plane_wave":
        w, k, a = cfg.omega(), cfg.k, cfg.amplitude
        return a * np.cos(k * x), a * w * np.sin(k * x)
    if cfg.initial == "transport":
        f = np.exp(np.cos(x))
        return f, np.sin(x) * f
    if cfg.initial == "zero":
        return np.zeros_like(x), np.zeros_like(x)
    if cfg.initial == "custom":
        if cfg.phi0 is None or cfg.phit0 is None:
            raise ShapeError("custom initial data need phi0 and phit0")
        return np.asarray(cfg.phi0(x), float), np.asarray(cfg.phit0(x), float)
    raise ShapeError(f"unknown initial data {cfg.initial!r}")


def _laplacian(phi: np.ndarray, dx: float) -> np.ndarray:
    return (np.roll(phi, -1) - 2 * phi + np.roll(phi, 1)) / (dx * dx)


def discrete_energy(phi: np.ndarray, pi: np.ndarray, dx: float, V: Callable) -> float:
    """``sum dx (pi^2/2 + (D+ phi)^2/2 - V(phi))``, the energy the scheme nearly conserves."""
    grad = (np.roll(phi, -1) - phi) / dx
    return float(dx * np.sum(0.5 * pi * pi + 0.5 * grad * grad - V(phi)))


@dataclass
class KGResult:
    config: KGConfig
    state: GridState
    diagnostics: DiagnosticsReport
    times: np.ndarray
    energy: np.ndarray
    final_phi: np.ndarray
    x: np.ndarray


def solve_klein_gordon(cfg: KGConfig, residuals: bool = True) -> KGResult:
    """Evolve ``phi_tt - phi_xx - V'(phi) = 0`` with Stormer-Verlet and fill the section.

    Raises :class:`StabilityError` when ``dt / dx > 1``.
    """
    if cfg.cfl > 1.0:
        raise StabilityError(f"dt/dx = {cfg.cfl} exceeds the stability bound 1")
    if cfg.nx < 3:
        raise ShapeError("need at least 3 spatial nodes")
    V, dV, _ = potential_preset(cfg.potential, cfg.potential_params)
    dx, dt = cfg.dx, cfg.dt
    nsteps = cfg.n_steps()
    stride = max(1, int(cfg.save_every))
    x = dx * np.arange(cfg.nx)
    phi, pi = initial_data(cfg, x)
    frames_phi, frames_pi, times = [phi.copy()], [pi.copy()], [0.0]
    energy = np.empty(nsteps + 1)
    energy[0] = discrete_energy(phi, pi, dx, V)
    acc = _laplacian(phi, dx) + dV(phi)
    for n in range(1, nsteps + 1):
        pi_half = pi + 0.5 * dt * acc
        phi = phi + dt * pi_half
        acc = _laplacian(phi, dx) + dV(phi)
        pi = pi_half + 0.5 * dt * acc
        energy[n] = discrete_energy(phi, pi, dx, V)
        if n % stride == 0:
            frames_phi.append(phi.copy())
            frames_pi.append(pi.copy())
            times.append(n * dt)
    Phi = np.array(frames_phi)
    Pi = np.array(frames_pi)
    state = kg_section(Phi, Pi, dt * stride, dx, V)
    chart = kg_chart()
    model = kg_model(chart, cfg.potential, cfg.potential_params)
    diag = implicit_el_residual(chart, model, state) if residuals and Phi.shape[0] >= 3 else DiagnosticsReport()
    drift = energy - energy[0]
    diag.energy_drift = drift
    diag.extra["energy_relative_drift_max"] = float(np.max(np.abs(drift)) / abs(energy[0])) if energy[0] else float(np.max(np.abs(drift)))
    diag.extra["steps"] = nsteps
    ref = analytic_solution(cfg)
    if ref is not None:
        T = nsteps * dt
        err = phi - ref(T, x)
        diag.extra["l2_error"] = float(math.sqrt(dx * np.sum(err * err)))
        diag.extra["max_error"] = float(np.max(np.abs(err)))
    return KGResult(cfg, state, diag, np.array(times), energy, phi, x)


def kg_section(Phi: np.ndarray, Pi: np.ndarray, dt: float, dx: float, V: Callable) -> GridState:
    """Section ``(phi, v, p^mu, p)`` from frames of ``phi`` and ``p0``."""
    v0 = Pi
    v1 = (np.roll(Phi, -1, axis=1) - np.roll(Phi, 1, axis=1)) / (2 * dx)
    p0, p1 = v0, -v1
    L = 0.5 * (v0 * v0 - v1 * v1) + V(Phi)
    p = L - p0 * v0 - p1 * v1
    v = np.stack([v0, v1], axis=-1)[..., None, :]
    pm = np.stack([p0, p1], axis=-1)[..., None, :]
    return GridState((dt, dx), (0.0, 0.0), Phi[..., None], v, pm, p, (False, True))


@dataclass
class ConvergenceTable:
    levels: list
    errors: list
    orders: list

    def rows(self) -> list:
        out = []
        for i, (nx, e) in enumerate(zip(self.levels, self.errors)):
            out.append({"nx": nx, "l2_error": e, "order": self.orders[i - 1] if i else None})
        return out


def convergence_study(base: KGConfig, levels: int = 4, t_final: float = 2.0) -> ConvergenceTable:
    """Refine ``nx`` by 2 per level at fixed ``dt/dx`` and report observed orders."""
    if levels < 2:
        raise ValueError("a convergence study needs at least 2 levels")
    if analytic_solution(base) is None:
        raise ValueError(f"no analytic reference for initial={base.initial!r}, potential={base.potential!r}")
    nxs, errs = [], []
    for i in range(levels):
        nx = base.nx * 2 ** i
        cfg = KGConfig(**{**base.__dict__, "nx": nx, "steps": None, "t_final": None})
        n = int(round(t_final / cfg.dt))
        cfg.steps = n
        cfg.cfl = t_final / (n * cfg.dx)
        res = solve_klein_gordon(cfg, residuals=False)
        nxs.append(nx)
        errs.append(res.diagnostics.extra["l2_error"])
    orders = [math.log2(errs[i] / errs[i + 1]) for i in range(levels - 1)]
    return ConvergenceTable(nxs, errs, orders)
