"""Sparse multivariate polynomials with exact rational coefficients."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Integral
from typing import Mapping, Sequence

from .errors import ChartError, ModeError


@dataclass(frozen=True)
class Coordinates:
    """Ordered, named coordinate system that symbolic objects live on."""

    names: tuple

    def __post_init__(self):
        names = tuple(self.names)
        if len(set(names)) != len(names):
            raise ChartError(f"duplicate coordinate names in {names}")
        object.__setattr__(self, "names", names)

    @property
    def dim(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        """0-based position of ``name``."""
        try:
            return self.names.index(name)
        except ValueError:
            raise ChartError(f"unknown coordinate {name!r}") from None

    def axis(self, name: str) -> int:
        """1-based axis index of ``name`` (the blade convention)."""
        return self.index(name) + 1


def coords_of(obj) -> Coordinates:
    """Accept a :class:`Coordinates`, or anything carrying one as ``.coords``."""
    if isinstance(obj, Coordinates):
        return obj
    c = getattr(obj, "coords", None)
    if isinstance(c, Coordinates):
        return c
    if isinstance(obj, (tuple, list)):
        return Coordinates(tuple(obj))
    raise ChartError(f"cannot interpret {obj!r} as a coordinate system")


def _exact(c) -> Fraction:
    if isinstance(c, bool):
        raise ModeError("boolean coefficient")
    if isinstance(c, Fraction):
        return c
    if isinstance(c, Integral):
        return Fraction(int(c))
    raise ModeError(f"symbolic coefficients must be exact, got {c!r}")


class PolyScalar:
    """Polynomial in the coordinates of a chart, ``terms: exponents -> Fraction``."""

    __slots__ = ("coords", "terms")

    def __init__(self, coords, terms: Mapping | None = None):
        coords = coords_of(coords)
        acc: dict = {}
        for e, c in (terms or {}).items():
            e = tuple(int(k) for k in e)
            if len(e) != coords.dim or any(k < 0 for k in e):
                raise ChartError(f"exponent vector {e} invalid for {coords.dim} coordinates")
            acc[e] = acc.get(e, 0) + _exact(c)
        self.coords = coords
        self.terms = {e: c for e, c in acc.items() if c != 0}

    @classmethod
    def _raw(cls, coords, terms):
        obj = object.__new__(cls)
        obj.coords = coords
        obj.terms = {e: c for e, c in terms.items() if c != 0}
        return obj

    @classmethod
    def const(cls, coords, c) -> "PolyScalar":
        coords = coords_of(coords)
        return cls._raw(coords, {(0,) * coords.dim: _exact(c)})

    @classmethod
    def var(cls, coords, name_or_index) -> "PolyScalar":
        coords = coords_of(coords)
        i = coords.index(name_or_index) if isinstance(name_or_index, str) else int(name_or_index)
        e = [0] * coords.dim
        e[i] = 1
        return cls._raw(coords, {tuple(e): Fraction(1)})

    @classmethod
    def zero(cls, coords) -> "PolyScalar":
        return cls._raw(coords_of(coords), {})

    def _lift(self, other) -> "PolyScalar":
        if isinstance(other, PolyScalar):
            if other.coords != self.coords:
                raise ChartError("polynomials from different charts combined")
            return other
        return PolyScalar.const(self.coords, other)

    def __add__(self, other):
        other = self._lift(other)
        acc = dict(self.terms)
        for e, c in other.terms.items():
            acc[e] = acc.get(e, 0) + c
        return PolyScalar._raw(self.coords, acc)

    __radd__ = __add__

    def __neg__(self):
        return PolyScalar._raw(self.coords, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, PolyScalar):
            c = _exact(other)
            return PolyScalar._raw(self.coords, {e: c * v for e, v in self.terms.items()})
        other = self._lift(other)
        acc: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                acc[e] = acc.get(e, 0) + c1 * c2
        return PolyScalar._raw(self.coords, acc)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = PolyScalar.const(self.coords, 1)
        for _ in range(int(k)):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, PolyScalar):
            return self.coords == other.coords and self.terms == other.terms
        if isinstance(other, (Integral, Fraction)):
            return self == PolyScalar.const(self.coords, other)
        return NotImplemented

    __hash__ = None

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_value(self) -> Fraction:
        return self.terms.get((0,) * self.coords.dim, Fraction(0))

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def diff(self, name_or_index) -> "PolyScalar":
        i = self.coords.index(name_or_index) if isinstance(name_or_index, str) else int(name_or_index)
        acc: dict = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                e2 = e[:i] + (k - 1,) + e[i + 1:]
                acc[e2] = acc.get(e2, 0) + c * k
        return PolyScalar._raw(self.coords, acc)

    def __call__(self, point: Sequence):
        """Evaluate at ``point`` (sequence in axis order, or name mapping)."""
        if isinstance(point, Mapping):
            point = [point[n] for n in self.coords.names]
        if len(point) != self.coords.dim:
            raise ChartError(f"point has {len(point)} entries, chart has {self.coords.dim}")
        exact = all(isinstance(v, (Integral, Fraction)) for v in point)
        total = Fraction(0) if exact else 0.0
        vals = [Fraction(v) for v in point] if exact else [float(v) for v in point]
        for e, c in self.terms.items():
            term = c if exact else float(c)
            for v, k in zip(vals, e):
                if k:
                    term = term * v ** k
            total += term
        return total

    def monomials(self):
        return sorted(self.terms.items())

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in sorted(self.terms.items()):
            factors = [f"{n}^{k}" if k > 1 else n for n, k in zip(self.coords.names, e) if k]
            parts.append("(" + " ".join([str(c)] + factors) + ")")
        return " + ".join(parts)

    def __repr__(self):
        return f"PolyScalar({self.to_text()})"
