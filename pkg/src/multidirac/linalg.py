"""Small dense linear algebra over the rationals, with a float fallback.

Exact routines operate on lists of lists of ``Fraction``; float routines use
numpy and a relative singular-value threshold.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import numpy as np

REL_TOL = 1e-10


def rref(rows: Sequence[Sequence], ncols: int | None = None) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and pivot columns of a rational matrix."""
    m = [[Fraction(x) for x in row] for row in rows]
    if ncols is None:
        ncols = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        row_r = [x * inv for x in m[r]]
        m[r] = row_r
        nz = [j for j in range(c, ncols) if row_r[j] != 0]
        for i in range(len(m)):
            if i != r:
                f = m[i][c]
                if f != 0:
                    row_i = m[i]
                    for j in nz:
                        row_i[j] -= f * row_r[j]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank_exact(rows: Sequence[Sequence], ncols: int | None = None) -> int:
    if not rows:
        return 0
    return len(rref(rows, ncols)[1])


def nullspace_exact(rows: Sequence[Sequence], ncols: int) -> list[list[Fraction]]:
    """Basis of ``{x : A x = 0}`` for a rational ``A`` with ``ncols`` columns."""
    if not rows:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    red, piv = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in set(piv)]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(red, piv):
            v[p] = -row[f]
        basis.append(v)
    return basis


def solve_exact(rows: Sequence[Sequence], rhs: Sequence, ncols: int) -> list[Fraction] | None:
    """One solution of ``A x = b`` (free variables set to zero), or ``None``."""
    aug = [list(row) + [b] for row, b in zip(rows, rhs)]
    if not aug:
        return [Fraction(0)] * ncols
    red, piv = rref(aug, ncols + 1)
    if piv and piv[-1] == ncols:
        return None
    x = [Fraction(0)] * ncols
    for row, p in zip(red, piv):
        x[p] = row[ncols]
    return x


def rank_float(a, rel_tol: float = REL_TOL) -> int:
    a = np.asarray(a, dtype=float)
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > rel_tol * s[0]))


def nullspace_float(a, rel_tol: float = REL_TOL) -> np.ndarray:
    """Orthonormal null-space basis as columns."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    _, s, vt = np.linalg.svd(a)
    r = int(np.sum(s > rel_tol * s[0])) if s.size and s[0] > 0 else 0
    return vt[r:].T.copy()


def rank(rows, ncols: int | None = None, exact: bool = True) -> int:
    if exact:
        return rank_exact(rows, ncols)
    return rank_float(rows)


def nullspace(rows, ncols: int, exact: bool = True) -> list:
    if exact:
        return nullspace_exact(rows, ncols)
    if len(rows) == 0:
        return [list(v) for v in np.eye(ncols)]
    return [list(v) for v in nullspace_float(rows).T]
