"""Exact checks of the interior-product identities used in the contraction of partial multivectors.

Every check runs in rational arithmetic over exhaustive basis inputs and
random sparse inputs.  The two frame contractions are checked both as
usually printed and in the form the kernel actually reproduces, so a
disagreement is reported rather than hidden.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Callable, Iterable, Optional

import numpy as np

from .multivector import (KForm, KVector, basis_blades, left_interior, right_interior, wedge, wedge_all)


@dataclass
class IdentityCheck:
    """Outcome of one identity over a family of inputs."""

    name: str
    anchor: str
    cases: int = 0
    failures: int = 0
    counterexample: Optional[str] = None
    notes: str = ""

    @property
    def passed(self) -> bool:
        return self.cases > 0 and self.failures == 0

    def record(self, ok: bool, describe: Callable[[], str]):
        self.cases += 1
        if not ok:
            self.failures += 1
            if self.counterexample is None:
                self.counterexample = describe()

    def to_dict(self) -> dict:
        return {"name": self.name, "anchor": self.anchor, "cases": self.cases, "failures": self.failures,
                "passed": self.passed, "counterexample": self.counterexample, "notes": self.notes}


# ----------------------------------------------------------------- helpers

def _sign(k: int) -> int:
    return -1 if k % 2 else 1


def _blades(dim: int) -> list:
    return [b for k in range(dim + 1) for b in basis_blades(dim, k)]


def random_sparse(cls, dim: int, degree: int, rng: np.random.Generator, max_terms: int = 3):
    """Element with up to ``max_terms`` blades and small rational coefficients."""
    blades = basis_blades(dim, degree)
    m = int(rng.integers(1, min(max_terms, len(blades)) + 1))
    pick = rng.choice(len(blades), size=m, replace=False)
    terms = {}
    for i in pick:
        num = int(rng.integers(-5, 6)) or 1
        den = int(rng.integers(1, 4))
        terms[blades[int(i)]] = Fraction(num, den)
    return cls(dim, degree, terms)


def frame_factors(n_plus_1: int, fiber: np.ndarray) -> list[KVector]:
    """``X_mu = d_mu + sum_f c[mu, f] d_{fiber f}``; base axes come first."""
    F = fiber.shape[1] if fiber.ndim == 2 else 0
    dim = n_plus_1 + F
    out = []
    for mu in range(n_plus_1):
        t = {(mu + 1,): Fraction(1)}
        for f in range(F):
            if fiber[mu, f] != 0:
                t[(n_plus_1 + f + 1,)] = Fraction(fiber[mu, f])
        out.append(KVector(dim, 1, t))
    return out


def hat(factors: list[KVector], *drop: int) -> KVector:
    """Wedge of the factors with the (1-based) positions in ``drop`` removed."""
    dim = factors[0].dim
    return wedge_all([f for i, f in enumerate(factors, start=1) if i not in drop], dim, KVector)


def dn_x(dim: int, n_plus_1: int, nu: int) -> KForm:
    """``d^n x_nu = d_nu -| dx^1 ^ ... ^ dx^{n+1}`` in the ambient space."""
    vol = KForm(dim, n_plus_1, {tuple(range(1, n_plus_1 + 1)): 1})
    return left_interior(KVector(dim, 1, {(nu,): 1}), vol)


# ------------------------------------------------------- individual identities

def leibniz_right_defect(X: KVector, Xp: KVector, alpha: KForm) -> KVector:
    """``(X^X') |- a - [(X |- a)^X' + (-1)^k X^(X' |- a)]`` for a one-form ``a``."""
    lhs = right_interior(wedge(X, Xp), alpha)
    t1 = wedge(right_interior(X, alpha), Xp) if X.degree >= 1 else KVector.zero(X.dim, X.degree + Xp.degree - 1)
    t2 = wedge(X, right_interior(Xp, alpha)) if Xp.degree >= 1 else KVector.zero(X.dim, X.degree + Xp.degree - 1)
    return lhs - (t1 + t2 * _sign(X.degree))


def leibniz_left_defect(X: KVector, alpha: KForm, beta: KForm) -> KForm:
    """``X -| (a^b) - [(X |- a) -| b + (-1)^k a^(X -| b)]`` for a one-form ``a``."""
    k = X.degree
    lhs = left_interior(X, wedge(alpha, beta))
    t1 = left_interior(right_interior(X, alpha), beta) if k >= 1 else KForm.zero(X.dim, lhs.degree)
    t2 = wedge(alpha, left_interior(X, beta)) if k <= beta.degree else KForm.zero(X.dim, lhs.degree)
    return lhs - (t1 + t2 * _sign(k))


def decomposable_defect(factors: list[KVector], alpha: KForm) -> KVector:
    """``X |- a - sum_mu (-1)^{mu+1} <X_mu, a> X^_mu`` for ``X = X_1 ^ ... ^ X_k``."""
    X = wedge_all(factors)
    lhs = right_interior(X, alpha)
    rhs = KVector.zero(X.dim, X.degree - 1)
    for mu, f in enumerate(factors, start=1):
        c = left_interior(f, alpha).as_scalar()
        if c:
            rhs = rhs + hat(factors, mu) * (c * _sign(mu + 1))
    return lhs - rhs


def double_interior(factors: list[KVector], alpha: KForm) -> KVector:
    """``X |- (X -| a)`` for decomposable ``X``; zero when ``deg a > deg X``."""
    X = wedge_all(factors)
    return right_interior(X, left_interior(X, alpha))


def contr1_value(factors, n_plus_1: int, mu: int, nu: int):
    dim = factors[0].dim
    return left_interior(hat(factors, mu), dn_x(dim, n_plus_1, nu)).as_scalar()


def contr1_printed(n: int, mu: int, nu: int) -> int:
    return _sign(nu + n) if mu == nu else 0


def contr1_corrected(n: int, mu: int, nu: int) -> int:
    return _sign(mu - 1) if mu == nu else 0


def contr2_value(factors, n_plus_1: int, mu: int, nu: int, lam: int) -> KForm:
    dim = factors[0].dim
    return left_interior(hat(factors, mu, nu), dn_x(dim, n_plus_1, lam))


def _dx(dim: int, i: int) -> KForm:
    return KForm(dim, 1, {(i,): 1})


def contr2_printed(dim: int, n: int, mu: int, nu: int, lam: int) -> KForm:
    out = KForm.zero(dim, 1)
    if nu == lam:
        out = out + _dx(dim, mu)
    if mu == lam:
        out = out + _dx(dim, nu)
    return out * _sign(n + mu + nu)


def contr2_corrected(dim: int, n: int, mu: int, nu: int, lam: int) -> KForm:
    out = KForm.zero(dim, 1)
    if mu == lam:
        out = out + _dx(dim, nu)
    if nu == lam:
        out = out - _dx(dim, mu)
    return out * _sign(n + mu + nu)


def pair_deleted_defect(factors, mu: int, nu: int, lam: int, hats: Optional[dict] = None) -> KVector:
    """``X_l ^ X^_{mu nu} - [(-1)^{mu+1} d_{mu l} X^_nu - (-1)^{nu+1} d_{nu l} X^_mu]``, ``mu < nu``.

    ``hats`` may cache the deleted wedges, keyed by the tuple of removed positions.
    """
    hats = {} if hats is None else hats

    def h(*drop):
        if drop not in hats:
            hats[drop] = hat(factors, *drop)
        return hats[drop]

    lhs = wedge(factors[lam - 1], h(mu, nu))
    rhs = KVector.zero(lhs.dim, lhs.degree)
    if mu == lam:
        rhs = rhs + h(nu) * _sign(mu + 1)
    if nu == lam:
        rhs = rhs - h(mu) * _sign(nu + 1)
    return lhs - rhs


# ------------------------------------------------------------------- suites

MAX_DIM = 6


def _exhaustive_factor_lists(dim: int, max_len: int) -> Iterable[list[KVector]]:
    basis = [KVector(dim, 1, {(i,): 1}) for i in range(1, dim + 1)]
    for k in range(1, min(dim, max_len) + 1):
        for idx in product(range(dim), repeat=k):
            yield [basis[i] for i in idx]


def check_leibniz(rng: np.random.Generator, random_cases: int = 1000, max_dim: int = MAX_DIM):
    right = IdentityCheck("wedge rule for right interior", "lemma:wedge")
    left = IdentityCheck("wedge rule for left interior", "lemma:wedge")
    for dim in range(1, max_dim + 1):
        blades = _blades(dim)
        vecs = [KVector(dim, len(b), {b: 1}) for b in blades]
        forms = [KForm(dim, len(b), {b: 1}) for b in blades]
        ones = [KForm(dim, 1, {(i,): 1}) for i in range(1, dim + 1)]
        for X in vecs:
            for a in ones:
                for Xp in vecs:
                    if X.degree + Xp.degree <= dim and X.degree + Xp.degree >= 1:
                        right.record(leibniz_right_defect(X, Xp, a).is_zero(), lambda: f"X={X}, X'={Xp}, a={a}")
                for b in forms:
                    if b.degree + 1 <= dim and X.degree <= b.degree + 1:
                        left.record(leibniz_left_defect(X, a, b).is_zero(), lambda: f"X={X}, a={a}, b={b}")
    for _ in range(random_cases):
        dim = int(rng.integers(2, max_dim + 1))
        k = int(rng.integers(1, dim + 1))
        kp = int(rng.integers(0, dim - k + 1))
        X = random_sparse(KVector, dim, k, rng)
        Xp = random_sparse(KVector, dim, kp, rng)
        a = random_sparse(KForm, dim, 1, rng)
        right.record(leibniz_right_defect(X, Xp, a).is_zero(), lambda: f"X={X}, X'={Xp}, a={a}")
        m = int(rng.integers(max(k - 1, 0), dim))
        b = random_sparse(KForm, dim, m, rng)
        left.record(leibniz_left_defect(X, a, b).is_zero(), lambda: f"X={X}, a={a}, b={b}")
    return [right, left]


def _random_factors(dim: int, k: int, rng) -> list[KVector]:
    return [random_sparse(KVector, dim, 1, rng, max_terms=dim) for _ in range(k)]


def check_decomposable(rng: np.random.Generator, random_cases: int = 1000, max_dim: int = MAX_DIM,
                       max_len: int = 4):
    chk = IdentityCheck("right interior of a decomposable multivector", "lemma:decomp")
    for dim in range(1, max_dim + 1):
        ones = [KForm(dim, 1, {(i,): 1}) for i in range(1, dim + 1)]
        for fs in _exhaustive_factor_lists(dim, max_len):
            for a in ones:
                chk.record(decomposable_defect(fs, a).is_zero(), lambda: f"factors={fs}, a={a}")
    for _ in range(random_cases):
        dim = int(rng.integers(1, max_dim + 1))
        k = int(rng.integers(1, dim + 1))
        fs = _random_factors(dim, k, rng)
        a = random_sparse(KForm, dim, 1, rng, max_terms=dim)
        chk.record(decomposable_defect(fs, a).is_zero(), lambda: f"factors={fs}, a={a}")
    return [chk]


def check_double_interior(rng: np.random.Generator, random_cases: int = 1000, max_dim: int = MAX_DIM,
                          max_len: int = 3):
    """``X |- (X -| a) = 0`` for ``deg X < deg a <= 2 deg X``.

    At ``deg a = deg X`` the inner contraction is the scalar ``a(X)`` and the
    outer one returns ``a(X) X``, so that degree is reported separately.
    """
    chk = IdentityCheck("double interior of a decomposable multivector vanishes", "cor:prodprod")
    for dim in range(1, max_dim + 1):
        blades = _blades(dim)
        for fs in _exhaustive_factor_lists(dim, max_len):
            k = len(fs)
            for b in blades:
                if k < len(b) <= 2 * k:
                    a = KForm(dim, len(b), {b: 1})
                    chk.record(double_interior(fs, a).is_zero(), lambda: f"factors={fs}, a={a}")
    for _ in range(random_cases):
        dim = int(rng.integers(2, max_dim + 1))
        k = int(rng.integers(1, dim))
        l = int(rng.integers(k + 1, min(2 * k, dim) + 1))
        fs = _random_factors(dim, k, rng)
        a = random_sparse(KForm, dim, l, rng, max_terms=4)
        chk.record(double_interior(fs, a).is_zero(), lambda: f"factors={fs}, a={a}")
    return [chk]


def _fiber_patterns(n_plus_1: int, F: int, exhaustive: bool, rng=None):
    """Fiber coefficient matrices: every factor carries zero or one fiber basis vector, or random."""
    if exhaustive:
        for choice in product(range(F + 1), repeat=n_plus_1):
            c = np.zeros((n_plus_1, F), dtype=int)
            for mu, f in enumerate(choice):
                if f:
                    c[mu, f - 1] = 1
            yield c
    else:
        c = rng.integers(-3, 4, size=(n_plus_1, F))
        c[rng.random((n_plus_1, F)) < 0.5] = 0
        yield c


def check_frame_contractions(rng: np.random.Generator, random_cases: int = 1000, max_base: int = 3,
                             max_fiber: int = MAX_DIM):
    """Contractions of frames with ``d^n x_nu``: printed and kernel-reproduced forms."""
    c1p = IdentityCheck("contr1 as printed", "contr1",
                        notes="X^_mu -| d^n x_nu = (-1)^(nu+n) delta_mu_nu, indices 1..n+1")
    c1c = IdentityCheck("contr1 corrected", "contr1",
                        notes="X^_mu -| d^n x_nu = (-1)^(mu-1) delta_mu_nu")
    c2p = IdentityCheck("contr2 as printed", "contr2",
                        notes="X^_mu_nu -| d^n x_l = (-1)^(n+mu+nu) (delta_nu_l dx^mu + delta_mu_l dx^nu)")
    c2c = IdentityCheck("contr2 corrected", "contr2",
                        notes="X^_mu_nu -| d^n x_l = (-1)^(n+mu+nu) (delta_mu_l dx^nu - delta_nu_l dx^mu)")
    pd = IdentityCheck("frame with a deleted pair", "deleted-pair frame identity")

    def run(n1, fiber):
        n = n1 - 1
        fs = frame_factors(n1, fiber)
        dim = fs[0].dim
        forms = {nu: dn_x(dim, n1, nu) for nu in range(1, n1 + 1)}
        hats = {}
        for mu in range(1, n1 + 1):
            h = hats[(mu,)] = hat(fs, mu)
            for nu in range(1, n1 + 1):
                val = left_interior(h, forms[nu]).as_scalar()
                desc = lambda: f"n+1={n1}, fiber={fiber.tolist()}, mu={mu}, nu={nu}, value={val}"
                c1p.record(val == contr1_printed(n, mu, nu), desc)
                c1c.record(val == contr1_corrected(n, mu, nu), desc)
        for mu, nu in combinations(range(1, n1 + 1), 2):
            h = hats[(mu, nu)] = hat(fs, mu, nu)
            for lam in range(1, n1 + 1):
                val = left_interior(h, forms[lam])
                desc = lambda: f"n+1={n1}, fiber={fiber.tolist()}, mu={mu}, nu={nu}, l={lam}, value={val}"
                c2p.record(val == contr2_printed(dim, n, mu, nu, lam), desc)
                c2c.record(val == contr2_corrected(dim, n, mu, nu, lam), desc)
                pd.record(pair_deleted_defect(fs, mu, nu, lam, hats).is_zero(), desc)

    for n1 in range(1, max_base + 1):
        for F in range(0, max_fiber + 1):
            if F == 0:
                run(n1, np.zeros((n1, 0), dtype=int))
                continue
            for fiber in _fiber_patterns(n1, F, True):
                run(n1, fiber)
    for _ in range(random_cases):
        n1 = int(rng.integers(1, max_base + 2))
        F = int(rng.integers(1, max_fiber + 1))
        run(n1, next(_fiber_patterns(n1, F, False, rng)))
    return [c1p, c1c, c2p, c2c, pd]


def identity_suite(seed: int = 0, random_cases: int = 1000) -> list[IdentityCheck]:
    """All interior-product identities with exhaustive and ``random_cases`` random inputs each."""
    rng = np.random.default_rng(seed)
    out = []
    out += check_leibniz(rng, random_cases)
    out += check_decomposable(rng, random_cases)
    out += check_double_interior(rng, random_cases)
    out += check_frame_contractions(rng, random_cases)
    return out
