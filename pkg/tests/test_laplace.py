from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st
from strategies import log_series, operators, power_series_at, rationals

from microlap.corpus import CORPUS, operator
from microlap.exact import INFINITY, Finite, LogSeries
from microlap.laplace import (
    einfty_basis,
    ezero_basis,
    linf_transform,
    lrho_transform,
    lrho_transform_hadamard,
    lseul_monomial,
    lseul_preimage,
    y_alpha_i_series,
)
from microlap.parsing import parse_operator
from microlap.weyl import apply, finite_singularities, fourier_laplace
from microlap.frobenius import microsolution_basis

GOMPERTZ = parse_operator("z*(1-z)*Dz - z")


@given(operators(max_order=3, max_degree=3), log_series())
def test_transforms_intertwine_operators(d, f):
    e = fourier_laplace(d)
    if f.point is INFINITY:
        assert linf_transform(apply(d, f)).agrees_with(apply(e, linf_transform(f)))
    else:
        left, right = lrho_transform(apply(d, f)), apply(e, lrho_transform(f))
        assert left.rho == right.rho and left.body.agrees_with(right.body)


@given(st.sampled_from([Fraction(0), Fraction(-3, 2), Fraction(5)]).flatmap(lambda r: power_series_at(Finite(r))))
def test_power_series_are_killed(f):
    assert lrho_transform(f).is_zero()


@given(st.lists(rationals, max_size=8))
def test_polynomials_are_killed_at_infinity(cs):
    f = LogSeries.from_monomials(INFINITY, 3, {(Fraction(-k - 1), 0): c for k, c in enumerate(cs)})
    assert linf_transform(f).is_zero()


@given(rationals, st.integers(0, 4))
def test_preimage_hits_a_single_monomial(alpha, k):
    img = lrho_transform(lseul_preimage(alpha, k)).body
    assert img.monomials() == {(alpha, k): 1}


def test_monomial_images():
    assert lseul_monomial(0, 0).is_zero()
    assert lseul_monomial(3, 0).is_zero()
    # log z goes to -1/x
    assert lseul_monomial(0, 1).monomials() == {(0, 0): -1}
    # z^-1 goes to 1 and z^-3 to x^2 / 2
    assert lseul_monomial(-1, 0).monomials() == {(-1, 0): 1}
    assert lseul_monomial(-3, 0).monomials() == {(-3, 0): Fraction(1, 2)}


def _y_oracle(alpha: Fraction, n: int) -> Fraction:
    # (-1)^m ({y})_m with m = [y] + n + 1; (a)_(-k) = 1 / ((a-1)...(a-k))
    m = math.floor(alpha) + n + 1
    frac = alpha - math.floor(alpha)
    out = Fraction(1)
    for k in range(m):
        out *= frac + k
    for k in range(1, -m + 1):
        out /= frac - k
    return Fraction(-1) ** m * out


@pytest.mark.parametrize("alpha", ["0", "1/2", "-1/2", "-1", "7/3", "-9/4"])
def test_y_series_closed_form(alpha):
    a = Fraction(alpha)
    y = y_alpha_i_series(a, 0, 51)
    assert [y.coefficient(n) for n in range(51)] == [_y_oracle(a, n) for n in range(51)]


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_two_routes_agree_on_microsolutions(name):
    d = operator(name)
    for rho in finite_singularities(d).rhos:
        for s in microsolution_basis(d, rho, 16).entries:
            assert lrho_transform(s.series) == lrho_transform_hadamard(s.series)


def test_gompertz_basis_at_infinity():
    eb = einfty_basis(GOMPERTZ, 27)
    assert len(eb) == 2
    yhat, ex = eb[0].series, eb[1].series
    assert yhat.rho == 0 and ex.rho == 1
    assert [yhat.body.coefficient(n) for n in range(26)] == [(-1) ** n * math.factorial(n) for n in range(26)]
    assert ex.body.monomials() == {(-1, 0): 1}


def test_gompertz_basis_at_zero():
    zb = ezero_basis(GOMPERTZ, 41)
    e_op = fourier_laplace(GOMPERTZ)
    for f in zb:
        img = apply(e_op, f)
        assert img.is_zero() and img.order >= 40
    f1, f2 = zb
    harmonic = Fraction(0)
    for n in range(1, 20):
        harmonic += Fraction(1, n)
        # e^x (log x + E(x)) = e^x log x - sum H_n x^n / n!
        assert f1.coefficient(n, 1) == Fraction(1, math.factorial(n))
        assert f1.coefficient(n, 0) == -harmonic / math.factorial(n)
        assert f2.coefficient(n) == Fraction(1, math.factorial(n))


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_basis_sizes(name):
    d = operator(name)
    assert len(einfty_basis(d, 12)) == d.degree
    assert len(ezero_basis(d, 12)) == d.degree
