"""Discrete sections of the Pontryagin bundle and diagnostic containers."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import ShapeError


@dataclass
class GridState:
    """Section sampled on a uniform tensor grid over the base.

    Arrays are indexed ``[i_0, ..., i_n, ...]``: ``y[..., A]``,
    ``v[..., A, mu]``, ``pm[..., A, mu]`` and ``p[...]``.  Axis 0 is
    time; for mechanics there is only that axis.
    """

    spacings: tuple
    origin: tuple
    y: np.ndarray
    v: np.ndarray
    pm: np.ndarray
    p: np.ndarray
    periodic: tuple = ()

    def __post_init__(self):
        self.spacings = tuple(float(h) for h in self.spacings)
        self.origin = tuple(float(o) for o in self.origin)
        n1 = len(self.spacings)
        if any(h <= 0 for h in self.spacings):
            raise ShapeError("grid spacings must be positive")
        if len(self.origin) != n1:
            raise ShapeError("origin and spacings disagree on the base dimension")
        self.periodic = tuple(bool(b) for b in self.periodic) or (False,) * n1
        if len(self.periodic) != n1:
            raise ShapeError("periodic flags must match the base dimension")
        self.y = np.asarray(self.y, dtype=float)
        self.v = np.asarray(self.v, dtype=float)
        self.pm = np.asarray(self.pm, dtype=float)
        self.p = np.asarray(self.p, dtype=float)
        shape = self.p.shape
        if len(shape) != n1:
            raise ShapeError(f"p has {len(shape)} grid axes, expected {n1}")
        N = self.y.shape[-1] if self.y.ndim == n1 + 1 else -1
        if self.y.shape != shape + (N,):
            raise ShapeError(f"y has shape {self.y.shape}, expected {shape + (N,)}")
        for name in ("v", "pm"):
            if getattr(self, name).shape != shape + (N, n1):
                raise ShapeError(f"{name} has shape {getattr(self, name).shape}, expected {shape + (N, n1)}")

    @property
    def shape(self) -> tuple:
        return self.p.shape

    @property
    def N(self) -> int:
        return self.y.shape[-1]

    @property
    def n_plus_1(self) -> int:
        return len(self.spacings)

    def axis_values(self, mu: int) -> np.ndarray:
        return self.origin[mu] + self.spacings[mu] * np.arange(self.shape[mu])

    def base_points(self) -> np.ndarray:
        """``x[..., mu]`` at every node."""
        axes = [self.axis_values(mu) for mu in range(self.n_plus_1)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack(mesh, axis=-1)

    def copy(self) -> "GridState":
        return GridState(self.spacings, self.origin, self.y.copy(), self.v.copy(), self.pm.copy(),
                         self.p.copy(), self.periodic)

    def interior_mask(self) -> np.ndarray:
        """True away from non-periodic boundaries (where stencils are centered)."""
        mask = np.ones(self.shape, dtype=bool)
        for mu, per in enumerate(self.periodic):
            if per or self.shape[mu] < 3:
                continue
            idx = [slice(None)] * self.n_plus_1
            idx[mu] = 0
            mask[tuple(idx)] = False
            idx[mu] = -1
            mask[tuple(idx)] = False
        return mask


def grid_derivative(f: np.ndarray, mu: int, h: float, periodic: bool = False) -> np.ndarray:
    """Centered difference along axis ``mu``; one-sided second order at open ends."""
    f = np.asarray(f, dtype=float)
    n = f.shape[mu]
    if periodic:
        return (np.roll(f, -1, axis=mu) - np.roll(f, 1, axis=mu)) / (2 * h)
    if n < 2:
        return np.zeros_like(f)
    out = np.empty_like(f)
    fm = np.moveaxis(f, mu, 0)
    om = np.moveaxis(out, mu, 0)
    if n == 2:
        om[0] = om[1] = (fm[1] - fm[0]) / h
        return out
    om[1:-1] = (fm[2:] - fm[:-2]) / (2 * h)
    om[0] = (-3 * fm[0] + 4 * fm[1] - fm[2]) / (2 * h)
    om[-1] = (3 * fm[-1] - 4 * fm[-2] + fm[-3]) / (2 * h)
    return out


@dataclass
class MultiplierTrace:
    """Lagrange multipliers ``lambda[step, alpha]``."""

    values: np.ndarray

    @property
    def k(self) -> int:
        return 0 if self.values.ndim < 2 else self.values.shape[1]

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0


@dataclass
class DiagnosticsReport:
    """Residual norms per group and conservation series of a run or state."""

    residual_max: dict = field(default_factory=dict)
    residual_l2: dict = field(default_factory=dict)
    energy_drift: Optional[np.ndarray] = None
    constraint_violation: Optional[np.ndarray] = None
    legendre_norm: Optional[float] = None
    fields: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def max_residual(self, groups=None) -> float:
        keys = groups if groups is not None else list(self.residual_max)
        return max((self.residual_max[k] for k in keys), default=0.0)

    def vanishes(self, tol: float, groups=None) -> bool:
        return self.max_residual(groups) <= tol

    def summary(self) -> dict:
        out = {"residual_max": dict(self.residual_max), "residual_l2": dict(self.residual_l2)}
        if self.energy_drift is not None and len(self.energy_drift):
            out["energy_drift_max"] = float(np.max(np.abs(self.energy_drift)))
        if self.constraint_violation is not None and len(self.constraint_violation):
            out["constraint_violation_max"] = float(np.max(np.abs(self.constraint_violation)))
        if self.legendre_norm is not None:
            out["legendre_norm"] = float(self.legendre_norm)
        out.update(self.extra)
        return out


def norms(field_values: np.ndarray, mask: Optional[np.ndarray], cell: float) -> tuple[float, float]:
    """Max and L2 (cell-weighted) norms over the masked nodes; trailing axes are components."""
    a = np.asarray(field_values, dtype=float)
    if mask is not None:
        a = a[mask]
    if a.size == 0:
        return 0.0, 0.0
    return float(np.max(np.abs(a))), float(np.sqrt(np.sum(a * a) * cell))
