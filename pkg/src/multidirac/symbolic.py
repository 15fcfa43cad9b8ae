"""Exact symbolic calculus of polynomial forms and multivector fields.

Forms are maps ``blade -> PolyScalar``.  Multivector fields are sums of
decomposable terms ``w * X_1 ^ ... ^ X_r`` with polynomial vector fields
``X_i``.  Interior products follow ``i_{X ^ Y} = i_Y o i_X``, so that
``(X -| a)(Y) = a(X ^ Y)`` as in :mod:`multidirac.multivector`.
"""
from __future__ import annotations

import re
from fractions import Fraction
from itertools import combinations, product
from typing import Iterable, Mapping, NamedTuple, Sequence

from .errors import AdmissibilityError, ChartError, DegreeError, ModeError
from .linalg import nullspace_exact, solve_exact
from .multivector import KForm, KVector, blade_sign, merge_sign, wedge
from .poly import Coordinates, PolyScalar, coords_of


def _same(a, b):
    if a.coords != b.coords:
        raise ChartError("symbolic objects from different charts combined")


def _poly(coords, c) -> PolyScalar:
    if isinstance(c, PolyScalar):
        if c.coords != coords:
            raise ChartError("coefficient polynomial lives on another chart")
        return c
    return PolyScalar.const(coords, c)


# --------------------------------------------------------------------- forms

class SymForm:
    """Differential form of fixed degree with polynomial coefficients."""

    __slots__ = ("coords", "degree", "terms")

    def __init__(self, coords, degree: int, terms: Mapping | Iterable = ()):
        coords = coords_of(coords)
        if degree < 0:
            raise DegreeError(f"negative degree {degree}")
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict = {}
        for key, c in items:
            key = tuple(coords.axis(k) if isinstance(k, str) else int(k) for k in key)
            sign, blade = blade_sign(key)
            if not sign:
                continue
            if len(blade) != degree:
                raise DegreeError(f"blade {key} does not have degree {degree}")
            if blade and (blade[0] < 1 or blade[-1] > coords.dim):
                raise ChartError(f"blade {key} outside the chart")
            c = _poly(coords, c)
            acc[blade] = acc[blade] + c * sign if blade in acc else c * sign
        self.coords = coords
        self.degree = degree
        self.terms = {b: c for b, c in sorted(acc.items()) if c}

    @classmethod
    def _raw(cls, coords, degree, terms):
        obj = object.__new__(cls)
        obj.coords = coords
        obj.degree = degree
        obj.terms = {b: c for b, c in sorted(terms.items()) if c}
        return obj

    @classmethod
    def zero(cls, coords, degree: int = 0) -> "SymForm":
        return cls._raw(coords_of(coords), degree, {})

    @classmethod
    def function(cls, f: PolyScalar) -> "SymForm":
        return cls._raw(f.coords, 0, {(): f})

    @classmethod
    def differential(cls, coords, name) -> "SymForm":
        coords = coords_of(coords)
        return cls._raw(coords, 1, {(coords.axis(name),): PolyScalar.const(coords, 1)})

    def _check(self, other, same_degree=True):
        if not isinstance(other, SymForm):
            raise TypeError(f"cannot combine SymForm with {type(other).__name__}")
        _same(self, other)
        if same_degree and other.degree != self.degree:
            raise DegreeError(f"degrees {self.degree} and {other.degree} differ")

    def __add__(self, other):
        self._check(other)
        acc = dict(self.terms)
        for b, c in other.terms.items():
            acc[b] = acc[b] + c if b in acc else c
        return SymForm._raw(self.coords, self.degree, acc)

    def __neg__(self):
        return SymForm._raw(self.coords, self.degree, {b: -c for b, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, s):
        if isinstance(s, PolyScalar):
            _same(self, s)
        elif isinstance(s, float):
            raise ModeError("float factor in symbolic expression")
        return SymForm._raw(self.coords, self.degree, {b: c * s for b, c in self.terms.items()})

    __rmul__ = __mul__

    def __xor__(self, other):
        return sym_wedge(self, other)

    def __eq__(self, other):
        if not isinstance(other, SymForm):
            return NotImplemented
        return (self.coords, self.degree) == (other.coords, other.degree) and self.terms == other.terms

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(c.is_constant() for c in self.terms.values())

    def coeff(self, blade) -> PolyScalar:
        blade = tuple(self.coords.axis(k) if isinstance(k, str) else k for k in blade)
        sign, b = blade_sign(blade)
        if not sign:
            return PolyScalar.zero(self.coords)
        c = self.terms.get(b)
        return c * sign if c is not None else PolyScalar.zero(self.coords)

    def at(self, point) -> KForm:
        """Pointwise value as a :class:`KForm` (exact iff ``point`` is rational)."""
        vals = {b: c(point) for b, c in self.terms.items()}
        exact = all(isinstance(v, Fraction) for v in vals.values()) if vals else _rational(point)
        return KForm(self.coords.dim, self.degree, vals, exact)

    def to_text(self) -> str:
        return _to_text("form", self.coords, self.degree, self.terms)

    def __repr__(self):
        if not self.terms:
            return f"SymForm(0, degree={self.degree})"
        names = self.coords.names
        parts = []
        for b, c in self.terms.items():
            blade = "^".join("d" + names[i - 1] for i in b) or "1"
            parts.append(f"[{c.to_text()}] {blade}")
        return " + ".join(parts)


def _rational(point) -> bool:
    vals = point.values() if isinstance(point, Mapping) else point
    return all(isinstance(v, (int, Fraction)) and not isinstance(v, bool) for v in vals)


def sym_wedge(a: SymForm, b: SymForm) -> SymForm:
    a._check(b, same_degree=False)
    deg = a.degree + b.degree
    acc: dict = {}
    if deg <= a.coords.dim:
        for ba, ca in a.terms.items():
            for bb, cb in b.terms.items():
                sign, blade = merge_sign(ba, bb)
                if sign:
                    v = ca * cb
                    if sign < 0:
                        v = -v
                    acc[blade] = acc[blade] + v if blade in acc else v
    return SymForm._raw(a.coords, deg, acc)


def exterior_derivative(omega: SymForm) -> SymForm:
    """``d omega``; linear, Leibniz, and ``d o d = 0`` exactly."""
    coords = omega.coords
    acc: dict = {}
    for blade, c in omega.terms.items():
        for i in range(coords.dim):
            dc = c.diff(i)
            if not dc:
                continue
            sign, b = merge_sign((i + 1,), blade)
            if sign:
                v = dc if sign > 0 else -dc
                acc[b] = acc[b] + v if b in acc else v
    return SymForm._raw(coords, omega.degree + 1, acc)


d = exterior_derivative


# ------------------------------------------------------------ vector fields

class SymVectorField:
    """Vector field with polynomial components, one per chart axis."""

    __slots__ = ("coords", "components")

    def __init__(self, coords, components: Sequence | Mapping):
        coords = coords_of(coords)
        if isinstance(components, Mapping):
            comps = [PolyScalar.zero(coords) for _ in range(coords.dim)]
            for k, v in components.items():
                i = coords.index(k) if isinstance(k, str) else int(k)
                comps[i] = comps[i] + _poly(coords, v)
        else:
            if len(components) != coords.dim:
                raise ChartError(f"{len(components)} components for a {coords.dim}-dimensional chart")
            comps = [_poly(coords, v) for v in components]
        self.coords = coords
        self.components = tuple(comps)

    @classmethod
    def coordinate(cls, coords, name) -> "SymVectorField":
        coords = coords_of(coords)
        return cls(coords, {name: 1})

    @classmethod
    def zero(cls, coords) -> "SymVectorField":
        coords = coords_of(coords)
        return cls(coords, {})

    def __add__(self, other):
        _same(self, other)
        return SymVectorField(self.coords, [a + b for a, b in zip(self.components, other.components)])

    def __neg__(self):
        return SymVectorField(self.coords, [-a for a in self.components])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, s):
        return SymVectorField(self.coords, [a * s for a in self.components])

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, SymVectorField):
            return NotImplemented
        return self.coords == other.coords and self.components == other.components

    __hash__ = None

    def is_zero(self) -> bool:
        return not any(self.components)

    def apply(self, f: PolyScalar) -> PolyScalar:
        """Directional derivative ``X(f)``."""
        _same(self, f)
        out = PolyScalar.zero(self.coords)
        for i, c in enumerate(self.components):
            if c:
                out = out + c * f.diff(i)
        return out

    def at(self, point) -> KVector:
        vals = {(i + 1,): c(point) for i, c in enumerate(self.components) if c}
        exact = _rational(point)
        return KVector(self.coords.dim, 1, vals, exact)

    def __repr__(self):
        names = self.coords.names
        parts = [f"[{c.to_text()}] d/d{names[i]}" for i, c in enumerate(self.components) if c]
        return " + ".join(parts) or "SymVectorField(0)"


def commutator(X: SymVectorField, Y: SymVectorField) -> SymVectorField:
    """Lie bracket ``[X, Y]^i = X(Y^i) - Y(X^i)``."""
    _same(X, Y)
    return SymVectorField(X.coords, [X.apply(yi) - Y.apply(xi)
                                     for xi, yi in zip(X.components, Y.components)])


def vector_interior(V: SymVectorField, alpha: SymForm) -> SymForm:
    """``i_V alpha`` for a single vector field."""
    _same(V, alpha)
    if alpha.degree == 0:
        raise DegreeError("cannot contract a vector field into a function")
    acc: dict = {}
    for blade, c in alpha.terms.items():
        for j, idx in enumerate(blade):
            comp = V.components[idx - 1]
            if not comp:
                continue
            rest = blade[:j] + blade[j + 1:]
            v = comp * c
            if j % 2:
                v = -v
            acc[rest] = acc[rest] + v if rest in acc else v
    return SymForm._raw(alpha.coords, alpha.degree - 1, acc)


class SymMultivectorField:
    """Degree-``r`` multivector field, a sum of weighted decomposable terms."""

    __slots__ = ("coords", "degree", "terms")

    def __init__(self, coords, degree: int, terms: Iterable = ()):
        coords = coords_of(coords)
        if degree < 0:
            raise DegreeError(f"negative degree {degree}")
        out = []
        for weight, factors in terms:
            factors = tuple(factors)
            if len(factors) != degree:
                raise DegreeError(f"term with {len(factors)} factors in a degree-{degree} field")
            for f in factors:
                if f.coords != coords:
                    raise ChartError("factor lives on another chart")
            w = _poly(coords, weight)
            if w:
                out.append((w, factors))
        self.coords = coords
        self.degree = degree
        self.terms = tuple(out)

    @classmethod
    def decomposable(cls, factors: Sequence[SymVectorField], weight=1) -> "SymMultivectorField":
        if not factors:
            raise DegreeError("use SymMultivectorField.function for degree 0")
        return cls(factors[0].coords, len(factors), [(weight, tuple(factors))])

    @classmethod
    def function(cls, f: PolyScalar) -> "SymMultivectorField":
        return cls(f.coords, 0, [(f, ())])

    @classmethod
    def from_blades(cls, coords, degree: int, blades: Mapping) -> "SymMultivectorField":
        """Field ``sum_b c_b e_b`` with coordinate frame factors."""
        coords = coords_of(coords)
        frame = [SymVectorField.coordinate(coords, n) for n in coords.names]
        terms = []
        for key, c in blades.items():
            key = tuple(coords.axis(k) if isinstance(k, str) else int(k) for k in key)
            terms.append((c, tuple(frame[i - 1] for i in key)))
        return cls(coords, degree, terms)

    @classmethod
    def zero(cls, coords, degree: int) -> "SymMultivectorField":
        return cls(coords, degree, [])

    def __add__(self, other):
        _same(self, other)
        if self.degree != other.degree:
            raise DegreeError(f"degrees {self.degree} and {other.degree} differ")
        return SymMultivectorField(self.coords, self.degree, self.terms + other.terms)

    def __neg__(self):
        return SymMultivectorField(self.coords, self.degree, [(-w, f) for w, f in self.terms])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, s):
        return SymMultivectorField(self.coords, self.degree, [(w * s, f) for w, f in self.terms])

    __rmul__ = __mul__

    def at(self, point) -> KVector:
        exact = _rational(point)
        dim = self.coords.dim
        total = KVector.zero(dim, self.degree, exact)
        for w, factors in self.terms:
            val = KVector.scalar(dim, w(point), exact)
            for f in factors:
                val = wedge(val, f.at(point))
            total = total + val
        return total

    def blade_coefficients(self) -> dict:
        """Expansion ``blade -> PolyScalar`` on the coordinate frame."""
        acc: dict = {}
        for w, factors in self.terms:
            partial = {(): w}
            for f in factors:
                nxt: dict = {}
                for b, c in partial.items():
                    for i, comp in enumerate(f.components):
                        if not comp:
                            continue
                        sign, nb = merge_sign(b, (i + 1,))
                        if sign:
                            v = c * comp
                            if sign < 0:
                                v = -v
                            nxt[nb] = nxt[nb] + v if nb in nxt else v
                partial = nxt
            for b, c in partial.items():
                acc[b] = acc[b] + c if b in acc else c
        return {b: c for b, c in sorted(acc.items()) if c}

    def is_zero(self) -> bool:
        return not self.blade_coefficients()

    def __eq__(self, other):
        if not isinstance(other, SymMultivectorField):
            return NotImplemented
        return (self.coords == other.coords and self.degree == other.degree
                and self.blade_coefficients() == other.blade_coefficients())

    __hash__ = None

    def to_text(self) -> str:
        return _to_text("multivector", self.coords, self.degree, self.blade_coefficients())

    def __repr__(self):
        names = self.coords.names
        parts = []
        for b, c in self.blade_coefficients().items():
            blade = "^".join("d/d" + names[i - 1] for i in b) or "1"
            parts.append(f"[{c.to_text()}] {blade}")
        return " + ".join(parts) or f"SymMultivectorField(0, degree={self.degree})"


def multivector_wedge(X: SymMultivectorField, Y: SymMultivectorField) -> SymMultivectorField:
    _same(X, Y)
    terms = [(w1 * w2, f1 + f2) for (w1, f1), (w2, f2) in product(X.terms, Y.terms)]
    return SymMultivectorField(X.coords, X.degree + Y.degree, terms)


def interior(X: SymMultivectorField, alpha: SymForm) -> SymForm:
    """``i_X alpha`` with ``i_{X_1 ^ ... ^ X_r} = i_{X_r} o ... o i_{X_1}``."""
    _same(X, alpha)
    if X.degree > alpha.degree:
        raise DegreeError(f"cannot contract a {X.degree}-vector into a {alpha.degree}-form")
    total = SymForm.zero(alpha.coords, alpha.degree - X.degree)
    for w, factors in X.terms:
        part = alpha
        for f in factors:
            if part.is_zero():
                break
            part = vector_interior(f, part)
        if not part.is_zero():
            total = total + part * w
    return total


def lie_derivative(X: SymMultivectorField, sigma: SymForm) -> SymForm:
    """Graded Lie derivative ``i_X d sigma - (-1)^k d i_X sigma``."""
    _same(X, sigma)
    k, l = X.degree, sigma.degree
    if l + 1 - k < 0:
        return SymForm.zero(sigma.coords, 0)
    out = interior(X, exterior_derivative(sigma))
    if k <= l:
        second = exterior_derivative(interior(X, sigma))
        out = out - second if k % 2 == 0 else out + second
    return out


def _absorbed(X: SymMultivectorField) -> list[tuple]:
    out = []
    for w, factors in X.terms:
        if not factors:
            raise DegreeError("Schouten bracket with a degree-0 field is not supported")
        out.append((factors[0] * w,) + factors[1:])
    return out


def schouten_bracket(X: SymMultivectorField, Y: SymMultivectorField) -> SymMultivectorField:
    """Schouten-Nijenhuis bracket on sums of decomposables.

    ``[X_1^..^X_r, Y_1^..^Y_s] = sum_{i,j} (-1)^{i+j} [X_i, Y_j] ^ X_1..^X_i..X_r ^ Y_1..^Y_j..Y_s``
    """
    _same(X, Y)
    r, s = X.degree, Y.degree
    terms = []
    one = PolyScalar.const(X.coords, 1)
    for xs in _absorbed(X):
        for ys in _absorbed(Y):
            for i, xi in enumerate(xs, start=1):
                for j, yj in enumerate(ys, start=1):
                    c = commutator(xi, yj)
                    if c.is_zero():
                        continue
                    rest = xs[:i - 1] + xs[i:] + ys[:j - 1] + ys[j:]
                    terms.append((one if (i + j) % 2 == 0 else -one, (c,) + rest))
    return SymMultivectorField(X.coords, r + s - 1, terms)


# ------------------------------------------------------------ Courant layer

class SymPair(NamedTuple):
    """Section ``(X, Sigma)`` of the graded Pontryagin bundle ``P_r``."""

    vector: SymMultivectorField
    form: SymForm


def _check_degrees(a: SymPair, n: int) -> int:
    r = a.vector.degree
    if a.form.degree != n + 2 - r:
        raise DegreeError(f"section of degree ({r}, {a.form.degree}) inconsistent with n={n}")
    return r


def sym_pairing_plus(a: SymPair, b: SymPair, n: int) -> SymForm:
    """``1/2 (i_Xb Sigma + (-1)^{rs} i_X Sigma_b)``; zero when ``n+2 < r+s``."""
    r, s = _check_degrees(a, n), _check_degrees(b, n)
    if n + 2 < r + s:
        return SymForm.zero(a.form.coords, 0)
    out = interior(b.vector, a.form)
    other = interior(a.vector, b.form)
    out = out - other if (r * s) % 2 else out + other
    return out * Fraction(1, 2)


def sym_pairing_minus(a: SymPair, b: SymPair, n: int) -> SymForm:
    r, s = _check_degrees(a, n), _check_degrees(b, n)
    if n + 2 < r + s:
        return SymForm.zero(a.form.coords, 0)
    out = interior(b.vector, a.form)
    other = interior(a.vector, b.form)
    out = out + other if (r * s) % 2 else out - other
    return out * Fraction(1, 2)


def multi_courant_bracket(a: SymPair, b: SymPair, n: int, variant: str = "proof") -> SymPair:
    """Multi-Courant bracket of sections of ``P_r`` and ``P_s``.

    The form component is
    ``L_X Sb - (-1)^{(r-1)(s-1)} L_Xb S + (-1)^r/2 d(i_X Sb + (-1)^{rs} i_Xb S)``.
    ``variant="printed"`` swaps the two interior products inside ``d``,
    giving ``(-1)^r d<<a, b>>_+`` instead; kept for comparison only.
    """
    a, b = SymPair(*a), SymPair(*b)
    r, s = _check_degrees(a, n), _check_degrees(b, n)
    if r + s - 1 > n + 1:
        raise DegreeError(f"bracket degree {r + s - 1} exceeds n+1={n + 1}")
    X, S = a
    Xb, Sb = b
    bracket = schouten_bracket(X, Xb)
    form = lie_derivative(X, Sb)
    other = lie_derivative(Xb, S)
    if (r - 1) * (s - 1) % 2:
        form = form + other
    else:
        form = form - other
    if r + s <= n + 2:
        if variant == "proof":
            inner = interior(X, Sb)
            tail = interior(Xb, S)
        elif variant == "printed":
            inner = interior(Xb, S)
            tail = interior(X, Sb)
        else:
            raise ValueError(f"unknown bracket variant {variant!r}")
        inner = inner - tail if (r * s) % 2 else inner + tail
        corr = exterior_derivative(inner) * Fraction(1 if r % 2 == 0 else -1, 2)
        form = form + corr
    return SymPair(bracket, form)


def graph_section(omega: SymForm, X: SymMultivectorField) -> SymPair:
    return SymPair(X, interior(X, omega))


def courant_defect(omega: SymForm, X: SymMultivectorField, Xb: SymMultivectorField,
                   variant: str = "proof") -> SymForm:
    """Deviation of the bracket of two graph sections from the graph of ``omega``."""
    n = omega.degree - 2
    br = multi_courant_bracket(graph_section(omega, X), graph_section(omega, Xb), n, variant)
    return br.form - interior(br.vector, omega)


def theorem_defect(omega: SymForm, X: SymMultivectorField, Xb: SymMultivectorField) -> SymForm:
    """Predicted defect ``(-1)^r i_X i_Xb d omega``."""
    val = interior(X, interior(Xb, exterior_derivative(omega)))
    return -val if X.degree % 2 else val


def courant_dorfman(a: SymPair, b: SymPair) -> SymPair:
    """Courant-Dorfman bracket ``([X, Y], L_X b - i_Y d a)`` for ``n = 0``."""
    X, alpha = a
    Y, beta = b
    if X.degree != 1 or Y.degree != 1:
        raise DegreeError("Courant-Dorfman bracket acts on vector fields")
    return SymPair(schouten_bracket(X, Y),
                   lie_derivative(X, beta) - interior(Y, exterior_derivative(alpha)))


# ------------------------------------------------------------ Poisson layer

def _basis_fields(coords: Coordinates, degree: int):
    return list(combinations(range(1, coords.dim + 1), degree))


def _interior_matrix(omega: SymForm, r: int):
    """Columns: blades of degree r; rows: blades of degree n+2-r; entries PolyScalar."""
    coords = omega.coords
    cols = _basis_fields(coords, r)
    rows = _basis_fields(coords, omega.degree - r)
    ridx = {b: i for i, b in enumerate(rows)}
    zero = PolyScalar.zero(coords)
    mat = [[zero] * len(cols) for _ in rows]
    for j, b in enumerate(cols):
        val = interior(SymMultivectorField.from_blades(coords, r, {b: 1}), omega)
        for blade, c in val.terms.items():
            mat[ridx[blade]][j] = c
    return mat, rows, cols


class HamiltonianSolution(NamedTuple):
    """Particular solution and kernel of ``i_X Omega = d Sigma``."""

    particular: SymMultivectorField
    kernel: list


def hamiltonian_multivector(omega: SymForm, sigma: SymForm) -> HamiltonianSolution:
    """Solve ``i_X omega = d sigma`` exactly for constant-coefficient ``omega``.

    Each monomial of ``d sigma`` gives an independent rational linear system,
    so polynomial right-hand sides are handled without rational functions.
    The kernel is returned as constant blade fields solving ``i_K omega = 0``.
    """
    _same(omega, sigma)
    n = omega.degree - 2
    r = n + 1 - sigma.degree
    if r < 0:
        raise DegreeError(f"{sigma.degree}-form too large for an {omega.degree}-form")
    if not omega.is_constant():
        raise AdmissibilityError("exact Hamiltonian solve needs constant coefficients; use a point")
    coords = omega.coords
    mat, rows, cols = _interior_matrix(omega, r)
    num = [[c.constant_value() for c in row] for row in mat]
    dsig = exterior_derivative(sigma)
    monos = sorted({e for c in dsig.terms.values() for e in c.terms})
    ridx = {b: i for i, b in enumerate(rows)}
    coeffs = {b: PolyScalar.zero(coords) for b in cols}
    for e in monos:
        rhs = [Fraction(0)] * len(rows)
        for blade, c in dsig.terms.items():
            rhs[ridx[blade]] = c.terms.get(e, Fraction(0))
        x = solve_exact(num, rhs, len(cols))
        if x is None:
            raise AdmissibilityError("no Hamiltonian multivector: i_X omega = d sigma is inconsistent")
        for b, v in zip(cols, x):
            if v:
                coeffs[b] = coeffs[b] + PolyScalar._raw(coords, {e: v})
    part = SymMultivectorField.from_blades(coords, r, {b: c for b, c in coeffs.items() if c})
    kern = [SymMultivectorField.from_blades(coords, r, {b: v for b, v in zip(cols, vec) if v})
            for vec in nullspace_exact(num, len(cols))]
    return HamiltonianSolution(part, kern)


def hamiltonian_at(omega: SymForm, sigma: SymForm, point) -> tuple[KVector, list[KVector]]:
    """Pointwise Hamiltonian multivector for polynomial ``omega`` (exact at rational points)."""
    if not _rational(point):
        raise ModeError("pointwise exact solve needs a rational point")
    n = omega.degree - 2
    r = n + 1 - sigma.degree
    if r < 0:
        raise DegreeError(f"{sigma.degree}-form too large for an {omega.degree}-form")
    mat, rows, cols = _interior_matrix(omega, r)
    num = [[c(point) for c in row] for row in mat]
    dsig = exterior_derivative(sigma).at(point)
    rhs = [dsig.coeff(b) for b in rows]
    x = solve_exact(num, rhs, len(cols))
    if x is None:
        raise AdmissibilityError("no Hamiltonian multivector at this point")
    dim = omega.coords.dim
    part = KVector(dim, r, dict(zip(cols, x)), True)
    kern = [KVector(dim, r, dict(zip(cols, v)), True) for v in nullspace_exact(num, len(cols))]
    return part, kern


def multi_poisson_bracket(sigma: SymForm, sigma_bar: SymForm, omega: SymForm,
                          kernel_shift: SymMultivectorField | None = None) -> SymForm:
    """``{S, Sb} = i_{X_Sb} d S`` for admissible forms of a constant ``omega``.

    ``kernel_shift`` is added to the Hamiltonian multivector of ``Sb``;
    when it lies in the kernel of ``omega`` the value must not change.
    """
    hb = hamiltonian_multivector(omega, sigma_bar).particular
    hamiltonian_multivector(omega, sigma)
    if kernel_shift is not None:
        hb = hb + kernel_shift
    return interior(hb, exterior_derivative(sigma))


def semims_bracket(sigma: SymForm, sigma_bar: SymForm, omega: SymForm) -> SymForm:
    """``i_{X_Sb} i_{X_S} omega``, the graph-structure form of the bracket."""
    h = hamiltonian_multivector(omega, sigma).particular
    hb = hamiltonian_multivector(omega, sigma_bar).particular
    return interior(hb, interior(h, omega))


# -------------------------------------------------------------- text format

def _mono_text(coords, e) -> str:
    return "(" + " ".join(f"({n} {k})" for n, k in zip(coords.names, e) if k) + ")"


def _to_text(kind, coords, degree, terms) -> str:
    lines = [f"({kind} {degree}"]
    for blade in sorted(terms):
        names = " ".join(coords.names[i - 1] for i in blade)
        for e, c in sorted(terms[blade].terms.items()):
            lines.append(f"  (term ({names}) {_mono_text(coords, e)} {c})")
    lines.append(")")
    return "\n".join(lines)


_TERM = re.compile(r"^\(term \(([^()]*)\) \(((?:\([^()]*\)\s*)*)\) (\S+)\)$")


def from_text(coords, text: str):
    """Parse :meth:`SymForm.to_text` / :meth:`SymMultivectorField.to_text` output."""
    coords = coords_of(coords)
    lines = [ln.strip() for ln in text.strip().splitlines()]
    head = re.match(r"^\((form|multivector) (\d+)$", lines[0])
    if not head or lines[-1] != ")":
        raise ValueError("malformed symbolic text")
    kind, degree = head.group(1), int(head.group(2))
    acc: dict = {}
    for ln in lines[1:-1]:
        m = _TERM.match(ln)
        if not m:
            raise ValueError(f"malformed term line {ln!r}")
        blade = tuple(coords.axis(nm) for nm in m.group(1).split())
        e = [0] * coords.dim
        for nm, k in re.findall(r"\((\S+) (\d+)\)", m.group(2)):
            e[coords.index(nm)] = int(k)
        mono = PolyScalar(coords, {tuple(e): Fraction(m.group(3))})
        acc[blade] = acc[blade] + mono if blade in acc else mono
    if kind == "form":
        return SymForm(coords, degree, acc)
    return SymMultivectorField.from_blades(coords, degree, acc)
