from __future__ import annotations

import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st
from strategies import log_series, polys, rationals

from microlap.errors import MixedTermsError
from microlap.exact import (
    INFINITY,
    Finite,
    LogSeries,
    Poly,
    as_power_series,
    as_rational,
    hadamard_star,
    pochhammer_ratio_jet,
    power_series,
    series_inv,
    series_mul,
)


@pytest.mark.parametrize("alpha", ["0", "1/2", "-1/2", "-1", "7/3", "-5/3", "3", "-4"])
def test_pochhammer_ratio_jet_against_mpmath(alpha):
    # Gamma(1-{y})/Gamma(-y) = Gamma(1-y+n)/Gamma(-y) on [n, n+1)
    a = Fraction(alpha)
    n = math.floor(a)
    jets = pochhammer_ratio_jet(a, 4)
    with mpmath.workdps(40):
        fn = lambda y: mpmath.gamma(1 - y + n) * mpmath.rgamma(-y)  # noqa: E731
        for k, v in enumerate(jets):
            ref = mpmath.diff(fn, mpmath.mpf(a.numerator) / a.denominator, k)
            assert abs(float(v) - float(ref)) <= 1e-12 * max(1.0, abs(float(ref)))


@given(st.lists(rationals, min_size=1, max_size=8).filter(lambda c: c[0] != 0))
def test_series_inverse(coeffs):
    n = len(coeffs)
    prod = series_mul(coeffs, series_inv(coeffs, n), n)
    assert prod == [1] + [0] * (n - 1)


@given(polys(4), polys(3))
def test_poly_divmod(a, b):
    if b.is_zero():
        return
    q, r = a.divmod(b)
    assert q * b + r == a
    assert r.is_zero() or r.degree < b.degree


def test_rational_roots_with_multiplicity():
    z = Poly.gen()
    p = (z - Fraction(2, 3)) ** 2 * (z + 1) * (z * z - 2)
    roots, rest = p.rational_roots()
    assert roots == [(Fraction(-1), 1), (Fraction(2, 3), 2)]
    assert rest.monic() == z * z - 2


def test_as_rational_refuses_floats():
    assert as_rational("3/4") == Fraction(3, 4)
    with pytest.raises(TypeError):
        as_rational(0.5)
    with pytest.raises(TypeError):
        as_rational(True)


@given(log_series(), log_series())
def test_series_sum_and_product_commute(f, g):
    if f.point != g.point:
        return
    assert f + g == g + f
    assert f * g == g * f
    assert (f - f).is_zero()


def test_precision_of_products():
    f = power_series([1, 1, 1])  # 1 + z + z^2 + O(z^3)
    g = LogSeries.from_monomials(Finite(0), Fraction(5, 2), {(Fraction(1, 2), 1): 1})
    h = f * g
    # g is only known below 5/2, so the product is too
    assert h.order == Fraction(5, 2)
    assert h.monomials() == {(Fraction(1, 2), 1): 1, (Fraction(3, 2), 1): 1}


def test_products_at_infinity_shift_labels():
    # z^-1 * z^-2 = z^-3: labels 0 and 1 combine to 2
    a = LogSeries.from_monomials(INFINITY, 4, {(Fraction(0), 0): 1})
    b = LogSeries.from_monomials(INFINITY, 4, {(Fraction(1), 0): 1})
    assert (a * b).monomials() == {(Fraction(2), 0): 1}


def test_hadamard_and_mixed_terms():
    a = power_series([1, 2, 3, 4])
    b = power_series([5, 6, 7])
    assert as_power_series(hadamard_star(a, b)) == [5, 12, 21]
    mixed = LogSeries.from_monomials(Finite(0), 3, {(Fraction(1), 1): 1})
    with pytest.raises(MixedTermsError):
        as_power_series(mixed)


def test_series_printing():
    f = LogSeries.from_monomials(Finite(-1), 2, {(Fraction(-1), 0): 1, (Fraction(0), 1): Fraction(1, 2)})
    assert str(f) == "1*(z+1)^-1 + 1/2*(z+1)^0*log(z+1)^1 + O[2]"
