"""Pointwise multi-Dirac structures: graphs, nonholonomic structures, isotropy.

Subspaces of ``P_r = T^r M + Lambda^{n+2-r} M`` at a point are represented
by a spanning list of :class:`~multidirac.multivector.Pair` objects.  All
verdicts reduce to rank computations, exact over the rationals whenever the
inputs are rational and SVD-thresholded otherwise.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from . import linalg
from .errors import ConstraintDataError, DegreeError, DimensionError, AdmissibilityError
from .multivector import (KForm, KVector, Pair, basis_blades, left_interior, pairing_minus, wedge)
from .symbolic import (SymForm, SymMultivectorField, SymVectorField, commutator, courant_defect,
                       exterior_derivative, interior, theorem_defect)


# ------------------------------------------------------------- subspaces

def _flatten(pair: Pair, dim: int, r: int, n: int) -> list:
    vb = basis_blades(dim, r)
    fb = basis_blades(dim, n + 2 - r)
    return [pair.vector.coeff(b) for b in vb] + [pair.form.coeff(b) for b in fb]


def _unflatten(vec: Sequence, dim: int, r: int, n: int, exact: bool) -> Pair:
    vb = basis_blades(dim, r)
    fb = basis_blades(dim, n + 2 - r)
    conv = Fraction if exact else float
    X = KVector(dim, r, {b: conv(c) for b, c in zip(vb, vec[:len(vb)]) if c != 0}, exact)
    S = KForm(dim, n + 2 - r, {b: conv(c) for b, c in zip(fb, vec[len(vb):]) if c != 0}, exact)
    return Pair(X, S)


@dataclass(frozen=True)
class PointedSubspace:
    """Span of ``basis`` inside ``P_r`` at a point of a ``dim``-dimensional manifold."""

    dim: int
    r: int
    n: int
    basis: tuple
    exact: bool = True

    def __post_init__(self):
        if not 0 <= self.r <= self.n + 2:
            raise DegreeError(f"degree r={self.r} outside 0..{self.n + 2}")
        for p in self.basis:
            if p.vector.degree != self.r or p.form.degree != self.n + 2 - self.r:
                raise DegreeError("basis element has the wrong degrees")
            if p.vector.dim != self.dim or p.form.dim != self.dim:
                raise DimensionError("basis element lives on another space")

    @property
    def ambient_dims(self) -> tuple:
        return comb(self.dim, self.r), comb(self.dim, self.n + 2 - self.r)

    def matrix(self) -> list:
        return [_flatten(p, self.dim, self.r, self.n) for p in self.basis]

    @property
    def dimension(self) -> int:
        return _rank(self.matrix(), sum(self.ambient_dims), self.exact)

    def reduced(self) -> "PointedSubspace":
        """Same span with a linearly independent basis."""
        rows = self.matrix()
        ncols = sum(self.ambient_dims)
        if not rows:
            return self
        if self.exact:
            red, _ = linalg.rref(rows, ncols)
        else:
            a = np.asarray(rows, dtype=float)
            u, s, vt = np.linalg.svd(a, full_matrices=False)
            k = linalg.rank_float(a)
            red = list(vt[:k])
        basis = tuple(_unflatten(list(v), self.dim, self.r, self.n, self.exact) for v in red)
        return PointedSubspace(self.dim, self.r, self.n, basis, self.exact)

    def contains(self, other: "PointedSubspace") -> bool:
        a, b = self.matrix(), other.matrix()
        ncols = sum(self.ambient_dims)
        exact = self.exact and other.exact
        return _rank(a + b, ncols, exact) == _rank(a, ncols, exact)

    def equals(self, other: "PointedSubspace") -> bool:
        return self.contains(other) and other.contains(self)

    def witness_outside(self, other: "PointedSubspace") -> Optional[Pair]:
        """A basis element of ``other`` not in this span, if any."""
        ncols = sum(self.ambient_dims)
        exact = self.exact and other.exact
        base = self.matrix()
        r0 = _rank(base, ncols, exact)
        for p, row in zip(other.basis, other.matrix()):
            if _rank(base + [row], ncols, exact) > r0:
                return p
        return None

    def extended(self, extra: Sequence[Pair]) -> "PointedSubspace":
        return PointedSubspace(self.dim, self.r, self.n, tuple(self.basis) + tuple(Pair(*p) for p in extra), self.exact)


def _rank(rows, ncols, exact) -> int:
    if not rows:
        return 0
    if exact:
        return linalg.rank_exact(rows, ncols)
    return linalg.rank_float(np.asarray(rows, dtype=float))


def full_space(dim: int, r: int, n: int, exact: bool = True) -> PointedSubspace:
    """All of ``P_r`` (standard basis)."""
    basis = [Pair(KVector.basis(dim, b, exact), KForm.zero(dim, n + 2 - r, exact)) for b in basis_blades(dim, r)]
    basis += [Pair(KVector.zero(dim, r, exact), KForm.basis(dim, b, exact)) for b in basis_blades(dim, n + 2 - r)]
    return PointedSubspace(dim, r, n, tuple(basis), exact)


def zero_space(dim: int, r: int, n: int, exact: bool = True) -> PointedSubspace:
    return PointedSubspace(dim, r, n, (), exact)


# ------------------------------------------------------------ structures

def graph_structure(omega: KForm, r: int, n: int) -> PointedSubspace:
    """``D_r = {(X, i_X omega)}`` spanned over the standard basis of ``T^r``."""
    if omega.degree != n + 2:
        raise DegreeError(f"need an (n+2)-form, got degree {omega.degree} with n={n}")
    if not 1 <= r <= n + 1:
        raise DegreeError(f"r={r} outside 1..{n + 1}")
    dim = omega.dim
    basis = []
    for b in basis_blades(dim, r):
        X = KVector.basis(dim, b, omega.exact)
        basis.append(Pair(X, left_interior(X, omega)))
    return PointedSubspace(dim, r, n, tuple(basis), omega.exact)


def graph_family(omega: KForm, n: int) -> dict:
    return {r: graph_structure(omega, r, n) for r in range(1, n + 2)}


def orthogonal_complement(V: PointedSubspace, r: int) -> PointedSubspace:
    """``{(X, S) in P_r : <<(X, S), v>>_- = 0 for all v in V}``."""
    n, dim, s = V.n, V.dim, V.r
    if r + s > n + 2 or not V.basis:
        return full_space(dim, r, n, V.exact)
    units = full_space(dim, r, n, V.exact).basis
    value_blades = basis_blades(dim, n + 2 - r - s)
    rows = []
    for w in V.basis:
        block = [[None] * len(units) for _ in value_blades]
        for i, u in enumerate(units):
            val = pairing_minus(u, w, n)
            for k, b in enumerate(value_blades):
                block[k][i] = val.coeff(b)
        rows.extend(block)
    ncols = len(units)
    if V.exact:
        null = linalg.nullspace_exact(rows, ncols)
    else:
        null = [list(v) for v in linalg.nullspace_float(np.asarray(rows, dtype=float)).T]
    basis = tuple(_unflatten(v, dim, r, n, V.exact) for v in null)
    return PointedSubspace(dim, r, n, basis, V.exact)


@dataclass
class IsotropyEntry:
    r: int
    s: int
    dims: dict
    verdict: bool
    violation_witness: Optional[dict] = None


@dataclass
class IsotropyReport:
    """Outcome of the check ``D_r = (D_s)^{perp, r}`` for all ``r + s <= n + 2``."""

    n: int
    entries: list = field(default_factory=list)
    point: Optional[list] = None
    anchor: str = "maximal isotropy"

    @property
    def passed(self) -> bool:
        return all(e.verdict for e in self.entries)

    def violations(self) -> list:
        return [(e.r, e.s) for e in self.entries if not e.verdict]

    def to_dicts(self) -> list:
        out = []
        for e in self.entries:
            item = {"point": self.point, "r": e.r, "s": e.s, "dims": e.dims, "verdict": e.verdict,
                    "anchor": self.anchor}
            if e.violation_witness is not None:
                item["violation_witness"] = e.violation_witness
            out.append(item)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dicts(), default=str, sort_keys=True)


def _pair_to_dict(p: Pair) -> dict:
    return {"vector": {",".join(map(str, b)): str(c) for b, c in p.vector.terms.items()},
            "form": {",".join(map(str, b)): str(c) for b, c in p.form.terms.items()}}


def verify_isotropy(D: Mapping[int, PointedSubspace], n: int, point=None,
                    anchor: str = "maximal isotropy") -> IsotropyReport:
    """Check ``D_r = (D_s)^{perp, r}`` for every ``r, s`` in ``1..n+1`` with ``r + s <= n + 2``."""
    missing = [r for r in range(1, n + 2) if r not in D]
    if missing:
        raise DegreeError(f"missing components for degrees {missing}")
    pt = None if point is None else [str(v) for v in point]
    report = IsotropyReport(n, point=pt, anchor=anchor)
    for r in range(1, n + 2):
        for s in range(1, n + 2):
            if r + s > n + 2:
                continue
            comp = orthogonal_complement(D[s], r)
            Dr = D[r]
            ok = Dr.equals(comp)
            witness = None
            if not ok:
                w = comp.witness_outside(Dr)
                side = "D_r not in complement"
                if w is None:
                    w = Dr.witness_outside(comp)
                    side = "complement not in D_r"
                witness = {"side": side, "element": _pair_to_dict(w)} if w is not None else None
            report.entries.append(IsotropyEntry(r, s, {"D_r": Dr.dimension, "complement": comp.dimension,
                                                       "D_s": D[s].dimension}, ok, witness))
    return report


def nonholonomic_structure(omega: KForm, delta: Sequence[KVector], annihilator: Sequence[KForm],
                           r: int, n: int) -> PointedSubspace:
    """``D_{Delta, r}``: ``X in Delta ^ T^{r-1}`` and ``i_X omega - S in Lambda^{n+2-r}(Delta°)``."""
    if omega.degree != n + 2:
        raise DegreeError(f"need an (n+2)-form, got degree {omega.degree} with n={n}")
    if not 1 <= r <= n + 1:
        raise DegreeError(f"r={r} outside 1..{n + 1}")
    dim, exact = omega.dim, omega.exact
    _check_constraint_data(dim, delta, annihilator, exact)
    vectors = []
    for dv in delta:
        for b in basis_blades(dim, r - 1):
            vectors.append(wedge(dv, KVector.basis(dim, b, exact)))
    elems = [Pair(X, left_interior(X, omega)) for X in vectors if X]
    q = n + 2 - r
    zero_r = KVector.zero(dim, r, exact)
    for combo in combinations(annihilator, q):
        a = combo[0] if q else KForm.scalar(dim, 1, exact)
        for f in combo[1:]:
            a = wedge(a, f)
        if q == 0:
            a = KForm.scalar(dim, 1, exact)
        if a:
            elems.append(Pair(zero_r, a))
    return PointedSubspace(dim, r, n, tuple(elems), exact).reduced()


def nonholonomic_family(omega: KForm, delta, annihilator, n: int) -> dict:
    return {r: nonholonomic_structure(omega, delta, annihilator, r, n) for r in range(1, n + 2)}


def _check_constraint_data(dim, delta, annihilator, exact):
    for dv in delta:
        if dv.degree != 1 or dv.dim != dim:
            raise ConstraintDataError("distribution basis must be vectors on the ambient space")
    for a in annihilator:
        if a.degree != 1 or a.dim != dim:
            raise ConstraintDataError("annihilator basis must be 1-forms on the ambient space")
        for dv in delta:
            val = left_interior(dv, a).as_scalar()
            if (val != 0) if exact else abs(val) > 1e-10:
                raise ConstraintDataError("annihilator does not vanish on the distribution")
    dmat = [[dv.coeff((i,)) for i in range(1, dim + 1)] for dv in delta]
    amat = [[a.coeff((i,)) for i in range(1, dim + 1)] for a in annihilator]
    rd, ra = _rank(dmat, dim, exact), _rank(amat, dim, exact)
    if rd != len(delta) or ra != len(annihilator):
        raise ConstraintDataError("distribution or annihilator basis is rank deficient")
    if rd + ra != dim:
        raise ConstraintDataError(f"dim Delta + dim Delta° = {rd + ra} differs from {dim}")


# ------------------------------------------------------------ constraints

Matrix = Callable[..., object]


@dataclass(frozen=True)
class ConstraintModel:
    """Affine constraint ``A^a_mu(x, y) + A^a_A(x, y) v^A_mu = 0`` on a Pontryagin chart.

    ``A_y(x, y) -> [k, N]`` and ``A_x(x, y) -> [k, n+1]``.  When ``exact``
    the callbacks must return rationals for rational input.
    """

    chart: object
    A_y: Matrix
    A_x: Matrix
    k: int
    exact: bool = False

    def _split(self, point):
        x, y, v, pm, p = self.chart.split(point)
        return x, y, v

    def matrices(self, point):
        x, y, _ = self._split(point)
        Ay = np.asarray(self.A_y(x, y), dtype=object if self.exact else float).reshape(self.k, self.chart.N)
        Ax = np.asarray(self.A_x(x, y), dtype=object if self.exact else float).reshape(self.k, self.chart.n_plus_1)
        return Ay, Ax

    def residual(self, point) -> np.ndarray:
        """``psi^a_mu = A^a_mu + A^a_A v^A_mu``, shape ``[k, n+1]``."""
        x, y, v = self._split(point)
        Ay, Ax = self.matrices(point)
        return Ax + Ay.dot(v)

    def check_rank(self, point) -> None:
        Ay, _ = self.matrices(point)
        if _rank([list(r) for r in Ay], self.chart.N, self.exact) != self.k:
            raise ConstraintDataError("constraint matrix A^a_A is rank deficient at this point")

    def annihilator(self, point) -> list[KForm]:
        """``phi~^a = A^a_A (dy^A - v^A_mu dx^mu)`` as 1-forms on the chart."""
        c = self.chart
        x, y, v = self._split(point)
        Ay, _ = self.matrices(point)
        out = []
        for a in range(self.k):
            terms: dict = {}
            for A in range(c.N):
                coef = Ay[a, A]
                if coef == 0:
                    continue
                ya = c.axis(c.y(A))
                terms[(ya,)] = terms.get((ya,), 0) + coef
                for mu in range(c.n_plus_1):
                    xa = c.axis(c.x(mu))
                    terms[(xa,)] = terms.get((xa,), 0) - coef * v[A, mu]
            out.append(KForm(c.dim, 1, terms, self.exact))
        return out

    def distribution(self, point) -> list[KVector]:
        """Basis of ``Delta_M`` (kernel of the annihilator) at the point."""
        c = self.chart
        ann = self.annihilator(point)
        rows = [[a.coeff((i,)) for i in range(1, c.dim + 1)] for a in ann]
        if self.exact:
            null = linalg.nullspace_exact(rows, c.dim)
        else:
            null = [list(v) for v in linalg.nullspace_float(np.asarray(rows, dtype=float)).T] if rows else \
                [list(v) for v in np.eye(c.dim)]
        return [KVector(c.dim, 1, {(i + 1,): val for i, val in enumerate(vec) if val != 0}, self.exact) for vec in null]

    def reaction_forms(self, point) -> list[list[KForm]]:
        """``Phi^a_mu = phi~^a ^ d^n x_mu``."""
        c = self.chart
        ann = self.annihilator(point)
        out = []
        for a in ann:
            row = []
            for mu in range(c.n_plus_1):
                dn = c.dn_x(mu)
                row.append(wedge(a, dn if self.exact else dn.to_float()))
            out.append(row)
        return out

    def project(self, point):
        """Move the multi-velocities onto the constraint set (least-norm correction)."""
        c = self.chart
        x, y, v, pm, p = c.split(point)
        Ay, Ax = self.matrices(point)
        if self.exact:
            v = v.copy()
            for mu in range(c.n_plus_1):
                rhs = [-(Ax[a, mu] + sum(Ay[a, A] * v[A, mu] for A in range(c.N))) for a in range(self.k)]
                # least-norm correction dv = Ay^T (Ay Ay^T)^{-1} rhs
                gram = [[sum(Ay[a, A] * Ay[b, A] for A in range(c.N)) for b in range(self.k)] for a in range(self.k)]
                lam = linalg.solve_exact(gram, rhs, self.k)
                if lam is None:
                    raise ConstraintDataError("constraint matrix is rank deficient")
                for A in range(c.N):
                    v[A, mu] = v[A, mu] + sum(Ay[a, A] * lam[a] for a in range(self.k))
        else:
            Ay = np.asarray(Ay, dtype=float)
            Ax = np.asarray(Ax, dtype=float)
            v = np.asarray(v, dtype=float)
            res = Ax + Ay @ v
            v = v - np.linalg.pinv(Ay) @ res
        out = list(c.join(x, y, v, pm, p)) if not self.exact else _join_obj(c, x, y, v, pm, p)
        return out

    def structure(self, omega: KForm, r: int, point) -> PointedSubspace:
        self.check_rank(point)
        return nonholonomic_structure(omega, self.distribution(point), self.annihilator(point), r, self.chart.n)

    def family(self, omega: KForm, point) -> dict:
        return {r: self.structure(omega, r, point) for r in range(1, self.chart.n + 2)}


def _join_obj(c, x, y, v, pm, p):
    return list(x) + list(y) + list(np.ravel(v)) + list(np.ravel(pm)) + [p]


def random_constraint_model(chart, k: int, rng: random.Random, degree: int = 1,
                            max_coeff: int = 3) -> ConstraintModel:
    """Random exact constraint model with affine-in-(x, y) coefficients.

    Coefficient matrices are ``A0 + sum_j A_j z_j`` with small integer
    entries; the constant part has full row rank so the model is full rank
    near the origin.
    """
    n1, N = chart.n_plus_1, chart.N
    nz = n1 + N

    def rmat(rows, cols):
        return [[Fraction(rng.randint(-max_coeff, max_coeff)) for _ in range(cols)] for _ in range(rows)]

    while True:
        A0 = rmat(k, N)
        if linalg.rank_exact(A0, N) == k:
            break
    Ay_lin = [rmat(k, N) if degree >= 1 else [[Fraction(0)] * N for _ in range(k)] for _ in range(nz)]
    Ax0 = rmat(k, n1)
    Ax_lin = [rmat(k, n1) if degree >= 1 else [[Fraction(0)] * n1 for _ in range(k)] for _ in range(nz)]

    def _eval(base, lin, x, y):
        z = list(x) + list(y)
        out = np.empty((len(base), len(base[0])), dtype=object)
        for a in range(len(base)):
            for b in range(len(base[0])):
                out[a, b] = base[a][b] + sum(lin[j][a][b] * z[j] for j in range(nz))
        return out

    return ConstraintModel(chart, lambda x, y: _eval(A0, Ay_lin, x, y),
                           lambda x, y: _eval(Ax0, Ax_lin, x, y), k, exact=True)


# ---------------------------------------------------------- integrability

@dataclass
class IntegrabilityVerdict:
    integrable: bool
    d_omega: SymForm
    defects: list
    theorem_agrees: bool
    anchor: str = "integrability theorem"

    def to_dict(self) -> dict:
        return {"integrable": self.integrable, "d_omega_zero": self.d_omega.is_zero(),
                "defects_zero": [d.is_zero() for d in self.defects],
                "theorem_agrees": self.theorem_agrees, "anchor": self.anchor}


def integrability_verdict(omega: SymForm, sections: Sequence[tuple] = ()) -> IntegrabilityVerdict:
    """``dOmega == 0`` exactly, plus bracket defects of the sampled graph sections.

    ``sections`` is a sequence of ``(X, Xb)`` multivector-field pairs; each defect
    is also compared with ``(-1)^r i_X i_Xb dOmega``.
    """
    dOm = exterior_derivative(omega)
    defects, agrees = [], True
    for X, Xb in sections:
        dft = courant_defect(omega, X, Xb)
        defects.append(dft)
        agrees = agrees and dft == theorem_defect(omega, X, Xb)
    return IntegrabilityVerdict(dOm.is_zero(), dOm, defects, agrees)


@dataclass
class NonholonomicIntegrability:
    involutive: bool
    closed_on_delta: bool
    failing_pairs: list
    failing_triples: list

    @property
    def integrable(self) -> bool:
        return self.involutive and self.closed_on_delta


def _sample_points(dim: int, count: int, seed: int) -> list:
    rng = random.Random(seed)
    return [[Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(dim)] for _ in range(count)]


def nonholonomic_integrability(generators: Sequence[SymVectorField], omega: SymForm,
                               points: Optional[Sequence] = None, seed: int = 0) -> NonholonomicIntegrability:
    """Involutivity of ``span(generators)`` and ``i_{X^Y^Z} dOmega = 0`` on generator triples.

    Involutivity is tested by exact rank at sampled rational points (those
    where the generators keep their generic rank); the triple condition is
    an exact symbolic zero test.
    """
    if not generators:
        return NonholonomicIntegrability(True, True, [], [])
    coords = generators[0].coords
    dim = coords.dim
    pts = list(points) if points is not None else _sample_points(dim, 8, seed)
    gen_rank = max(_rank([_vec_row(g, p) for g in generators], dim, True) for p in pts)
    failing_pairs = []
    for i, j in combinations(range(len(generators)), 2):
        br = commutator(generators[i], generators[j])
        for p in pts:
            rows = [_vec_row(g, p) for g in generators]
            if _rank(rows, dim, True) < gen_rank:
                continue
            if _rank(rows + [_vec_row(br, p)], dim, True) > gen_rank:
                failing_pairs.append((i, j))
                break
    dOm = exterior_derivative(omega)
    failing_triples = []
    if dOm.degree >= 3:
        for tri in combinations(range(len(generators)), 3):
            X = SymMultivectorField.decomposable([generators[t] for t in tri])
            if not interior(X, dOm).is_zero():
                failing_triples.append(tri)
    return NonholonomicIntegrability(not failing_pairs, not failing_triples, failing_pairs, failing_triples)


def _vec_row(g: SymVectorField, p) -> list:
    return [c(p) for c in g.components]


# ------------------------------------------------------ pointwise Poisson

def poisson_bracket_pointwise(D: PointedSubspace, d_sigma: KForm, d_sigma_bar: KForm) -> KForm:
    """``{S, Sb} = i_{X_Sb} dS`` with ``(X_Sb, dSb)`` taken from the subspace ``D``.

    The Hamiltonian multivector is any element of ``D`` whose form part equals
    ``dSb``; the result is checked to be independent of that choice.
    """
    dim, r, n = D.dim, D.r, D.n
    if d_sigma_bar.degree != n + 2 - r:
        raise DegreeError("d sigma_bar has the wrong degree for this component")
    nv = comb(dim, r)
    rows = D.matrix()
    form_rows = [row[nv:] for row in rows]
    target = _flatten(Pair(KVector.zero(dim, r, D.exact), d_sigma_bar), dim, r, n)[nv:]
    # solve sum_j c_j form_j = target
    cols = list(map(list, zip(*form_rows))) if form_rows else []
    if D.exact:
        sol = linalg.solve_exact(cols, target, len(rows))
        if sol is None:
            raise AdmissibilityError("form is not admissible for this structure")
        null = linalg.nullspace_exact(cols, len(rows))
    else:
        a = np.asarray(cols, dtype=float)
        sol, *_ = np.linalg.lstsq(a, np.asarray(target, dtype=float), rcond=None)
        if np.linalg.norm(a @ sol - np.asarray(target, dtype=float)) > 1e-9 * max(1.0, np.linalg.norm(target)):
            raise AdmissibilityError("form is not admissible for this structure")
        null = [list(v) for v in linalg.nullspace_float(a).T]
    vb = basis_blades(dim, r)

    def vec_of(coeffs):
        acc = [sum(c * row[i] for c, row in zip(coeffs, rows)) for i in range(nv)]
        conv = Fraction if D.exact else float
        return KVector(dim, r, {b: conv(v) for b, v in zip(vb, acc) if v != 0}, D.exact)

    X = vec_of(sol)
    value = left_interior(X, d_sigma)
    for kvec in null:
        delta = left_interior(vec_of(kvec), d_sigma)
        if not delta.is_zero(0.0 if D.exact else 1e-9):
            raise AdmissibilityError("bracket depends on the Hamiltonian multivector (sigma not admissible)")
    return value
