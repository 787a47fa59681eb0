"""Exact Gaussian elimination over Q(i)."""

from __future__ import annotations

from typing import Sequence

from .exactfield import ONE, ZERO, GaussRational

Vector = list[GaussRational]


def rref(rows: Sequence[Sequence[GaussRational]], ncols: int) -> tuple[list[Vector], list[int]]:
    """Reduced row echelon form.

    Columns are scanned left to right; the pivot for a column is the
    remaining row of largest index with a nonzero entry there.  The rule is
    fixed so that kernel bases are reproducible.
    """
    work = [list(r) for r in rows if any(not x.is_zero() for x in r)]
    for r in work:
        if len(r) != ncols:
            raise ValueError("row length does not match column count")
    pivots: list[int] = []
    top = 0
    for col in range(ncols):
        if top >= len(work):
            break
        pivot = None
        for idx in range(len(work) - 1, top - 1, -1):
            if not work[idx][col].is_zero():
                pivot = idx
                break
        if pivot is None:
            continue
        work[top], work[pivot] = work[pivot], work[top]
        inv = work[top][col].inverse()
        work[top] = [x * inv for x in work[top]]
        prow = work[top]
        for idx in range(len(work)):
            if idx == top:
                continue
            factor = work[idx][col]
            if factor.is_zero():
                continue
            row = work[idx]
            for c in range(col, ncols):
                if not prow[c].is_zero():
                    row[c] = row[c] - factor * prow[c]
        pivots.append(col)
        top += 1
    return work[:top], pivots


def nullspace(rows: Sequence[Sequence[GaussRational]], ncols: int) -> list[Vector]:
    """Basis of {x : rows * x = 0}, one vector per free column, in column order."""
    reduced, pivots = rref(rows, ncols)
    pivot_set = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        vec = [ZERO] * ncols
        vec[free] = ONE
        for r, pc in zip(reduced, pivots):
            vec[pc] = -r[free]
        basis.append(vec)
    return basis


def rank(rows: Sequence[Sequence[GaussRational]], ncols: int) -> int:
    return len(rref(rows, ncols)[1])


def proportionality(u: Sequence, v: Sequence):
    """The scalar c with u = c * v, or None.

    Works for any elements supporting scale(), is_zero() and equality (the
    polynomial types) as well as GaussRational.  The zero vector is not
    proportional to anything: projective comparisons need a point.
    """
    if len(u) != len(v):
        raise ValueError("length mismatch")
    ratio = None
    for x, y in zip(u, v):
        xs, ys = _scalars(x), _scalars(y)
        if set(xs) != set(ys):
            return None
        for key, yv in ys.items():
            c = xs[key] / yv
            if ratio is None:
                ratio = c
            elif c != ratio:
                return None
    if ratio is None:
        return None
    return ratio


def _scalars(x) -> dict:
    if isinstance(x, GaussRational):
        return {} if x.is_zero() else {(): x}
    return dict(x.coeffs)
