"""Exact row reduction over the rationals (sparse rows as dicts)."""

from __future__ import annotations

from fractions import Fraction
from typing import Hashable, Sequence


def rref(rows: Sequence[dict], columns: Sequence[Hashable]) -> tuple[list[dict], list]:
    """Reduced row echelon form for sparse rows.

    ``columns`` fixes the pivot priority: earlier columns are eliminated
    first.  Returns the nonzero reduced rows (unit pivots) and their pivots.
    """
    rank_of = {c: i for i, c in enumerate(columns)}
    work = [{k: v for k, v in r.items() if v} for r in rows]
    work = [r for r in work if r]
    reduced: list[dict] = []
    pivots: list = []
    for r in work:
        # eliminate existing pivots from the new row
        for p, pr in zip(pivots, reduced):
            c = r.get(p)
            if c:
                for k, v in pr.items():
                    nv = r.get(k, 0) - c * v
                    if nv:
                        r[k] = nv
                    else:
                        r.pop(k, None)
        if not r:
            continue
        p = min(r, key=rank_of.__getitem__)
        inv = 1 / Fraction(r[p])
        r = {k: v * inv for k, v in r.items()}
        # back-substitute into earlier rows
        for i, pr in enumerate(reduced):
            c = pr.get(p)
            if c:
                for k, v in r.items():
                    nv = pr.get(k, 0) - c * v
                    if nv:
                        pr[k] = nv
                    else:
                        pr.pop(k, None)
        reduced.append(r)
        pivots.append(p)
    order = sorted(range(len(pivots)), key=lambda i: rank_of[pivots[i]])
    return [reduced[i] for i in order], [pivots[i] for i in order]


def rank(rows: Sequence[dict], columns: Sequence[Hashable]) -> int:
    return len(rref(rows, columns)[0])


def nullspace(rows: Sequence[dict], columns: Sequence[Hashable]) -> list[dict]:
    """Basis of ``{v : row . v = 0 for all rows}`` as sparse dicts."""
    red, piv = rref(rows, columns)
    pivset = set(piv)
    basis = []
    for free in columns:
        if free in pivset:
            continue
        v = {free: Fraction(1)}
        for p, r in zip(piv, red):
            c = r.get(free)
            if c:
                v[p] = -c
        basis.append(v)
    return basis


def kernel_rref(rows: Sequence[dict], columns: Sequence[Hashable]) -> list[dict]:
    """Kernel basis in reduced echelon form w.r.t. the column priority."""
    return rref(nullspace(rows, columns), columns)[0]
