"""Hypothesis strategies for operators and series with small rational data."""

from __future__ import annotations

from fractions import Fraction

from hypothesis import strategies as st

from microlap.exact import INFINITY, Finite, LogSeries, Poly
from microlap.weyl import DiffOp

rationals = st.builds(Fraction, st.integers(-6, 6), st.integers(1, 4))
nonzero_rationals = rationals.filter(bool)


@st.composite
def polys(draw, max_degree: int = 3, var: str = "z"):
    return Poly(draw(st.lists(rationals, max_size=max_degree + 1)), var)


@st.composite
def operators(draw, max_order: int = 3, max_degree: int = 3, nonzero: bool = True):
    coeffs = draw(st.lists(polys(max_degree), min_size=1, max_size=max_order + 1))
    if nonzero:
        coeffs[-1] = coeffs[-1] + Poly([0] * draw(st.integers(0, max_degree)) + [draw(nonzero_rationals)])
    return DiffOp(coeffs)


@st.composite
def log_series(draw, point=None, n_terms: int = 6, max_log: int = 2):
    point = draw(st.sampled_from([Finite(0), Finite(Fraction(2, 3)), INFINITY])) if point is None else point
    low = draw(st.sampled_from([Fraction(0), Fraction(1, 2), Fraction(-1, 3), Fraction(-2), Fraction(5, 4)]))
    mono = {}
    for n in range(n_terms):
        for j in range(max_log + 1):
            c = draw(rationals)
            if c:
                mono[(low + n, j)] = c
    return LogSeries.from_monomials(point, low + n_terms, mono)


@st.composite
def power_series_at(draw, point, n_terms: int = 8):
    coeffs = draw(st.lists(rationals, min_size=1, max_size=n_terms))
    return LogSeries.from_monomials(point, len(coeffs), {(Fraction(n), 0): c for n, c in enumerate(coeffs)})
