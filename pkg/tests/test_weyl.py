from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from strategies import log_series, operators

from microlap.corpus import CORPUS, operator
from microlap.errors import NonRationalSingularity, PreconditionError
from microlap.exact import INFINITY, Finite, LogSeries
from microlap.parsing import parse_operator
from microlap.weyl import (
    DiffOp,
    apply,
    finite_singularities,
    fourier_laplace,
    indicial_at_infinity,
    inverse_fourier_laplace,
    mn_bounds,
    polynomial_codimension_bruteforce,
    polynomial_index_data,
)

small_ops = operators(max_order=2, max_degree=2, nonzero=False)


@given(small_ops, small_ops, small_ops)
def test_product_is_associative(a, b, c):
    assert (a * b) * c == a * (b * c)


@given(small_ops, small_ops)
def test_fourier_laplace_is_multiplicative(a, b):
    assert fourier_laplace(a * b) == fourier_laplace(a) * fourier_laplace(b)


@given(small_ops)
def test_fourier_laplace_inverts(a):
    assert inverse_fourier_laplace(fourier_laplace(a)) == a


@given(small_ops, small_ops, log_series())
def test_action_is_a_module_action(a, b, f):
    left = apply(a * b, f)
    right = apply(a, apply(b, f))
    assert left.agrees_with(right)


def test_derivation_on_monomials():
    dz = DiffOp.derivation()
    f = LogSeries.from_monomials(Finite(0), 5, {(Fraction(3), 1): 1})
    # d/dz z^3 log z = 3 z^2 log z + z^2
    assert apply(dz, f).monomials() == {(Fraction(2), 1): 3, (Fraction(2), 0): 1}
    g = LogSeries.from_monomials(INFINITY, 5, {(Fraction(0), 0): 1})
    # d/dz z^-1 = -z^-2
    assert apply(dz, g).monomials() == {(Fraction(1), 0): -1}


def test_gompertz_transform_and_census():
    d = parse_operator("z*(1-z)*Dz - z")
    assert str(fourier_laplace(d)) == "x*Dx^2 + (1-x)*Dx - 1"
    assert finite_singularities(d).points == ((0, 1), (1, 1))
    assert mn_bounds(d) == (0, 1)
    assert str(indicial_at_infinity(d)) == "-1-z"


def test_census_rejects_irrational_points():
    with pytest.raises(NonRationalSingularity):
        finite_singularities(parse_operator("(z^2-2)*Dz - 1"))
    with pytest.raises(PreconditionError):
        finite_singularities(DiffOp(()))


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_index_identity_against_brute_force(name):
    d = operator(name)
    coker, ker = polynomial_index_data(d)
    assert coker - ker == d.degree - d.order
    for top in (10, 14):
        assert polynomial_codimension_bruteforce(d, top) == coker
