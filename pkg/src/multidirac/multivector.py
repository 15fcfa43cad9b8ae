"""Sparse exterior algebra on a finite-dimensional vector space.

Multivectors and forms are stored as maps from blades (strictly increasing
tuples of 1-based axis indices) to coefficients.  A form of degree ``k``
evaluates on a ``k``-vector by the determinant convention, so that
``(e^1 ^ e^2)(e_1 ^ e_2) == 1``.

Interior products follow

* left:  ``(X -| a)(Y) = a(X ^ Y)``
* right: ``(X |- b) -| g = (b ^ g)(X)``

Coefficients are either exact (``Fraction``) or ``float``; the two modes never
mix silently.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from numbers import Integral
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence, Union

from .errors import DegreeError, DimensionError, ModeError

Blade = tuple
Coeff = Union[Fraction, float]


def blade_sign(indices: Sequence[int]) -> tuple[int, Blade]:
    """Sort ``indices`` and return ``(parity, sorted_blade)``; parity 0 on repeats."""
    idx = list(indices)
    sign = 1
    # insertion sort, counting transpositions
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    for a, b in zip(idx, idx[1:]):
        if a == b:
            return 0, ()
    return sign, tuple(idx)


@lru_cache(maxsize=1 << 16)
def merge_sign(a: Blade, b: Blade) -> tuple[int, Blade]:
    """Sign of the shuffle taking ``a + b`` (both sorted) to sorted order."""
    if not a:
        return 1, b
    if not b:
        return 1, a
    sb = set(b)
    if any(i in sb for i in a):
        return 0, ()
    inversions = 0
    j = 0
    for i in a:
        while j < len(b) and b[j] < i:
            j += 1
        inversions += j
    return (-1 if inversions % 2 else 1), tuple(sorted(a + b))


@lru_cache(maxsize=1 << 16)
def _complement(outer: Blade, inner: Blade) -> Blade | None:
    si = set(inner)
    if not si.issubset(outer):
        return None
    return tuple(i for i in outer if i not in si)


def _coerce(value, exact: bool):
    if isinstance(value, bool):
        raise ModeError("boolean coefficient")
    if exact:
        if isinstance(value, Fraction):
            return value
        if isinstance(value, Integral):
            return Fraction(int(value))
        raise ModeError(f"float coefficient {value!r} in exact mode")
    if isinstance(value, Fraction):
        raise ModeError(f"rational coefficient {value!r} in float mode")
    if isinstance(value, (Integral, float)):
        return float(value)
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ModeError(f"unsupported coefficient {value!r}") from None


class _Graded:
    """Common machinery for homogeneous multivectors and forms."""

    __slots__ = ("dim", "degree", "terms", "exact")
    kind = "graded"

    def __init__(self, dim: int, degree: int, terms: Mapping | Iterable = (), exact: bool = True):
        if dim < 0:
            raise DimensionError(f"negative dimension {dim}")
        if degree < 0:
            raise DegreeError(f"negative degree {degree}")
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict = {}
        for key, value in items:
            sign, blade = blade_sign(tuple(key))
            if sign == 0:
                continue
            if len(blade) != degree:
                raise DegreeError(f"blade {key} does not have degree {degree}")
            if blade and (blade[0] < 1 or blade[-1] > dim):
                raise DimensionError(f"blade {key} outside dimension {dim}")
            c = _coerce(value, exact)
            acc[blade] = acc.get(blade, 0) + (c if sign > 0 else -c)
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "exact", exact)
        object.__setattr__(self, "terms", {b: c for b, c in sorted(acc.items()) if c != 0})

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    @classmethod
    def _raw(cls, dim, degree, terms: dict, exact):
        obj = object.__new__(cls)
        object.__setattr__(obj, "dim", dim)
        object.__setattr__(obj, "degree", degree)
        object.__setattr__(obj, "exact", exact)
        object.__setattr__(obj, "terms", {b: c for b, c in sorted(terms.items()) if c != 0})
        return obj

    @classmethod
    def zero(cls, dim: int, degree: int, exact: bool = True):
        return cls._raw(dim, degree, {}, exact)

    @classmethod
    def basis(cls, dim: int, blade: Sequence[int], exact: bool = True):
        return cls(dim, len(blade), {tuple(blade): 1}, exact)

    @classmethod
    def scalar(cls, dim: int, value, exact: bool = True):
        return cls(dim, 0, {(): value}, exact)

    def _check(self, other, same_degree=True):
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.dim != self.dim:
            raise DimensionError(f"dimensions {self.dim} and {other.dim} differ")
        if other.exact != self.exact:
            raise ModeError("exact and float operands mixed")
        if same_degree and other.degree != self.degree:
            raise DegreeError(f"degrees {self.degree} and {other.degree} differ")

    def __add__(self, other):
        self._check(other)
        acc = dict(self.terms)
        for b, c in other.terms.items():
            acc[b] = acc.get(b, 0) + c
        return self._raw(self.dim, self.degree, acc, self.exact)

    def __neg__(self):
        return self._raw(self.dim, self.degree, {b: -c for b, c in self.terms.items()}, self.exact)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, s):
        c = _coerce(s, self.exact)
        return self._raw(self.dim, self.degree, {b: c * v for b, v in self.terms.items()}, self.exact)

    __rmul__ = __mul__

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return (self.dim, self.degree, self.exact, self.terms) == (
            other.dim, other.degree, other.exact, other.terms)

    __hash__ = None

    def __bool__(self):
        return bool(self.terms)

    def __iter__(self) -> Iterator:
        return iter(self.terms.items())

    def __len__(self):
        return len(self.terms)

    def coeff(self, blade: Sequence[int]):
        sign, b = blade_sign(blade)
        c = self.terms.get(b, 0)
        return sign * c if sign else 0

    def is_zero(self, tol: float = 0.0) -> bool:
        if self.exact or tol == 0.0:
            return not self.terms
        return all(abs(c) <= tol for c in self.terms.values())

    def max_abs(self) -> float:
        return max((abs(float(c)) for c in self.terms.values()), default=0.0)

    def as_scalar(self):
        if self.degree != 0:
            raise DegreeError(f"degree {self.degree} object is not a scalar")
        return self.terms.get((), Fraction(0) if self.exact else 0.0)

    def to_exact(self):
        if self.exact:
            return self
        return self._raw(self.dim, self.degree,
                         {b: Fraction(c).limit_denominator() for b, c in self.terms.items()}, True)

    def to_float(self):
        if not self.exact:
            return self
        return self._raw(self.dim, self.degree, {b: float(c) for b, c in self.terms.items()}, False)

    def __repr__(self):
        sym = "e" if self.kind == "vector" else "dx"
        if not self.terms:
            return f"{type(self).__name__}(0, degree={self.degree}, dim={self.dim})"
        parts = []
        for b, c in self.terms.items():
            name = "^".join(f"{sym}{i}" for i in b) or "1"
            parts.append(f"{c}*{name}")
        return " + ".join(parts)


class KVector(_Graded):
    """Homogeneous multivector of fixed degree."""

    __slots__ = ()
    kind = "vector"


class KForm(_Graded):
    """Homogeneous exterior form of fixed degree."""

    __slots__ = ()
    kind = "form"


PairingValue = KForm


class Pair(NamedTuple):
    """Element ``(X, Sigma)`` of the graded Pontryagin space ``P_r``."""

    vector: KVector
    form: KForm

    @property
    def r(self) -> int:
        return self.vector.degree


def vector(dim: int, i: int, exact: bool = True) -> KVector:
    """Basis vector ``e_i``."""
    return KVector.basis(dim, (i,), exact)


def covector(dim: int, i: int, exact: bool = True) -> KForm:
    """Basis covector ``e^i``."""
    return KForm.basis(dim, (i,), exact)


def basis_blades(dim: int, degree: int) -> list[Blade]:
    return list(combinations(range(1, dim + 1), degree))


def from_components(cls, dim: int, components: Sequence, exact: bool = True):
    """Degree-one element from a dense component list (index 0 -> axis 1)."""
    return cls(dim, 1, {(i + 1,): c for i, c in enumerate(components) if c != 0}, exact)


def wedge(a, b):
    """Exterior product of two multivectors or two forms."""
    a._check(b, same_degree=False)
    if a.degree + b.degree > a.dim:
        return a.zero(a.dim, a.degree + b.degree, a.exact)
    acc: dict = {}
    for ba, ca in a.terms.items():
        for bb, cb in b.terms.items():
            sign, blade = merge_sign(ba, bb)
            if sign:
                v = ca * cb
                acc[blade] = acc.get(blade, 0) + (v if sign > 0 else -v)
    return a._raw(a.dim, a.degree + b.degree, acc, a.exact)


def wedge_all(items: Sequence, dim: int | None = None, kind=KVector, exact: bool = True):
    """Wedge a sequence left to right; the empty wedge is the unit scalar."""
    if not items:
        if dim is None:
            raise DimensionError("empty wedge needs a dimension")
        return kind.scalar(dim, 1, exact)
    out = items[0]
    for it in items[1:]:
        out = wedge(out, it)
    return out


def _check_pair(X: KVector, alpha: KForm):
    if not isinstance(X, KVector) or not isinstance(alpha, KForm):
        raise TypeError("expected (KVector, KForm)")
    if X.dim != alpha.dim:
        raise DimensionError(f"dimensions {X.dim} and {alpha.dim} differ")
    if X.exact != alpha.exact:
        raise ModeError("exact and float operands mixed")


def left_interior(X: KVector, alpha: KForm) -> KForm:
    """``X -| alpha``: the form with ``(X -| alpha)(Y) = alpha(X ^ Y)``."""
    _check_pair(X, alpha)
    k, l = X.degree, alpha.degree
    if k > l:
        raise DegreeError(f"cannot contract a {k}-vector into a {l}-form")
    acc: dict = {}
    for bx, cx in X.terms.items():
        for ba, ca in alpha.terms.items():
            rest = _complement(ba, bx)
            if rest is None:
                continue
            sign, _ = merge_sign(bx, rest)
            v = cx * ca
            acc[rest] = acc.get(rest, 0) + (v if sign > 0 else -v)
    return KForm._raw(X.dim, l - k, acc, X.exact)


def right_interior(X: KVector, beta: KForm) -> KVector:
    """``X |- beta``: the multivector with ``(X |- beta) -| g = (beta ^ g)(X)``."""
    _check_pair(X, beta)
    k, m = X.degree, beta.degree
    if k < m:
        raise DegreeError(f"cannot contract a {m}-form into a {k}-vector")
    acc: dict = {}
    for bx, cx in X.terms.items():
        for bb, cb in beta.terms.items():
            rest = _complement(bx, bb)
            if rest is None:
                continue
            sign, _ = merge_sign(bb, rest)
            v = cx * cb
            acc[rest] = acc.get(rest, 0) + (v if sign > 0 else -v)
    return KVector._raw(X.dim, k - m, acc, X.exact)


def evaluate(alpha: KForm, X: KVector):
    """Scalar ``alpha(X)`` for equal degrees (determinant convention)."""
    if alpha.degree != X.degree:
        raise DegreeError("evaluation needs equal degrees")
    return left_interior(X, alpha).as_scalar()


def interior(X: KVector, alpha: KForm) -> KForm:
    """``i_X alpha``; identical to :func:`left_interior`."""
    return left_interior(X, alpha)


def _pair_degrees(a: Pair, b: Pair, n: int) -> tuple[int, int]:
    r, s = a.vector.degree, b.vector.degree
    if a.form.degree != n + 2 - r or b.form.degree != n + 2 - s:
        raise DegreeError(
            f"pair degrees ({r}, {a.form.degree}), ({s}, {b.form.degree}) inconsistent with n={n}")
    return r, s


def _pairing(a: Pair, b: Pair, n: int, sign: int) -> KForm:
    a, b = Pair(*a), Pair(*b)
    r, s = _pair_degrees(a, b, n)
    X = a.vector
    if n + 2 < r + s:
        return KForm.zero(X.dim, 0, X.exact)
    half = Fraction(1, 2) if X.exact else 0.5
    eps = -1 if (r * s) % 2 else 1
    first = left_interior(b.vector, a.form)
    second = left_interior(a.vector, b.form)
    return (first + second * (sign * eps)) * half


def pairing_minus(a: Pair, b: Pair, n: int) -> PairingValue:
    """Antisymmetric pairing ``1/2 (i_Xb Sigma - (-1)^{rs} i_X Sigma_b)``."""
    return _pairing(a, b, n, -1)


def pairing_plus(a: Pair, b: Pair, n: int) -> PairingValue:
    """Symmetric pairing ``1/2 (i_Xb Sigma + (-1)^{rs} i_X Sigma_b)``."""
    return _pairing(a, b, n, 1)


def pair_wedge(a: Pair, b: Pair, n: int) -> Pair:
    """Wedge product on graded Pontryagin spaces: ``(X ^ Xb, <<a, b>>_+)``."""
    a, b = Pair(*a), Pair(*b)
    _pair_degrees(a, b, n)
    return Pair(wedge(a.vector, b.vector), pairing_plus(a, b, n))


def volume_form(dim: int, exact: bool = True) -> KForm:
    return KForm.basis(dim, tuple(range(1, dim + 1)), exact)


def frame_multivector(dim: int, exact: bool = True) -> KVector:
    return KVector.basis(dim, tuple(range(1, dim + 1)), exact)
