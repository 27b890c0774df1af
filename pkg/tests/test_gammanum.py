from __future__ import annotations

import cmath
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from strategies import log_series, operators

from microlap.errors import OrderTooLarge, PoleAtNonpositiveInteger, PreconditionError
from microlap.exact import INFINITY, Finite
from microlap.gammanum import (
    apply_T,
    evaluate,
    forward_laplace_monomial,
    gamma_jet,
    recip_gamma_jet,
)
from microlap.laplace import lseul_monomial
from microlap.weyl import apply


def _derivatives(fn, at: Fraction, order: int) -> list[float]:
    with mpmath.workdps(50):
        x = mpmath.mpf(at.numerator) / at.denominator
        return [float(mpmath.diff(fn, x, k)) for k in range(order + 1)]


@pytest.mark.parametrize("s", ["1", "1/2", "1/7", "3/4", "99/100"])
def test_reciprocal_gamma_jet(s):
    s = Fraction(s)
    got = recip_gamma_jet(s, 12)
    ref = _derivatives(mpmath.rgamma, s, 12)
    for g, r in zip(got, ref):
        assert abs(g - r) <= 1e-14 * max(1.0, abs(r))


@pytest.mark.parametrize("w", ["1/2", "5/2", "-1/2", "-7/3", "11/3"])
def test_gamma_jet(w):
    w = Fraction(w)
    got = gamma_jet(w, 8)
    ref = _derivatives(mpmath.gamma, w, 8)
    for g, r in zip(got, ref):
        assert abs(g - r) <= 1e-13 * max(1.0, abs(r))


def test_jet_preconditions():
    with pytest.raises(PoleAtNonpositiveInteger):
        gamma_jet(-2, 3)
    with pytest.raises(PreconditionError):
        recip_gamma_jet(Fraction(3, 2), 2)
    with pytest.raises(OrderTooLarge):
        recip_gamma_jet(1, 13)


def _rel(a: complex, b: complex) -> float:
    return abs(a - b) / max(1.0, abs(b))


@given(operators(max_order=2, max_degree=2), log_series(point=INFINITY, max_log=1))
def test_gamma_operator_commutes_with_operators(d, f):
    d = d.with_var("x")
    f = f.__class__.from_monomials(f.point, f.order, f.monomials(), "x")
    left = apply_T(apply(d, f), "inf")
    right = apply(d, apply_T(f, "inf"))
    keys = {k for k in left.monomials() if k[0] < min(left.order, right.order)}
    keys |= {k for k in right.monomials() if k[0] < min(left.order, right.order)}
    scale = max([abs(complex(c)) for c in left.monomials().values()] + [1.0])
    for k in keys:
        assert abs(complex(left.monomials().get(k, 0)) - complex(right.monomials().get(k, 0))) <= 1e-9 * scale


@pytest.mark.parametrize("alpha, i", [("-1/2", 0), ("-1/2", 1), ("-5/3", 2), ("1/3", 1), ("-3", 1)])
def test_forward_laplace_against_quadrature(alpha, i):
    a = Fraction(alpha)
    z = 2.0
    got = evaluate(forward_laplace_monomial(a, i), z)
    if a > -1:
        # not integrable at 0: compare through the analytic continuation in alpha instead
        ref = _continued(a, i, z)
    else:
        with mpmath.workdps(30):
            ref = mpmath.quad(lambda x: x ** (-float(a) - 1) * mpmath.log(1 / x) ** i * mpmath.exp(-z * x),
                              [0, 1, mpmath.inf])
    assert abs(got - complex(ref)) <= 1e-10 * max(1.0, abs(complex(ref)))


def _continued(a: Fraction, i: int, z: float) -> complex:
    # d^i/ds^i of Gamma(s) z^-s at s = -a, with log(1/x)^i = (-d/ds)^i x^(s-1) ... sign absorbed below
    with mpmath.workdps(30):
        s0 = -mpmath.mpf(a.numerator) / a.denominator
        return complex(mpmath.diff(lambda s: mpmath.gamma(s) * mpmath.power(z, -s), s0, i) * (-1) ** i)


@pytest.mark.parametrize("alpha, j", [("-1/2", 0), ("-1/2", 1), ("-7/3", 2), ("1/2", 1), ("-2", 1), ("-1", 2)])
def test_gamma_correction_then_forward_laplace_is_identity(alpha, j):
    a = Fraction(alpha)
    z = complex(1.7, 0.4)
    img = apply_T(lseul_monomial(a, j), "inf")
    total = 0j
    for (e, k), c in img.monomials().items():
        total += complex(c) * evaluate(forward_laplace_monomial(e, k), z)
    assert _rel(total, z ** float(a) * cmath.log(z) ** j) < 1e-12


def test_gamma_operator_at_zero():
    # C_0 of log x is log x + gamma
    f = Finite(0)
    from microlap.exact import LogSeries

    g = apply_T(LogSeries.from_monomials(f, 1, {(Fraction(0), 1): 1}), "0")
    assert abs(complex(g.monomials()[(0, 1)]) - 1) < 1e-15
    assert abs(complex(g.monomials()[(0, 0)]) - 0.5772156649015329) < 1e-15
