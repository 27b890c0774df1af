"""Acceptance criteria 1-14, one test each.

Every test records a PASS/FAIL line (with its runtime against the budget);
the lines are printed as they happen and again in the terminal summary.
Run just this file with ``pytest tests/test_acceptance.py -v``.
"""

from __future__ import annotations

import cmath
import math
import random
import timeit
from contextlib import contextmanager
from fractions import Fraction
from time import perf_counter

import mpmath
import numpy as np
import pytest
from conftest import ACCEPTANCE_LINES

from microlap.analytic import (
    FunctionSpec,
    atheta_matrix,
    borel_operator,
    borel_sum,
    kappa_matrix,
    stokes_matrix,
    watson_check,
)
from microlap.corpus import CORPUS, operator
from microlap.exact import INFINITY, Finite, LogSeries
from microlap.frobenius import fuchs_exponent_sum, local_solution_basis, microsolution_basis, sinfty_basis
from microlap.gammanum import evaluate
from microlap.laplace import (
    einfty_basis,
    ezero_basis,
    linf_transform,
    lrho_transform,
    lseul_preimage,
    y_alpha_i_series,
)
from microlap.parsing import parse_operator
from microlap.verify import intertwines, random_operator, random_polynomial_at_infinity, random_series
from microlap.weyl import (
    DiffOp,
    apply,
    finite_singularities,
    fourier_laplace,
    mn_bounds,
    polynomial_codimension_bruteforce,
    polynomial_index_data,
)

G = "z*(1-z)*Dz - z"
GOMPERTZ = parse_operator(G)
EULER_GAMMA = float(mpmath.euler)


@contextmanager
def criterion(number: int, title: str, budget: float):
    info: dict = {}
    start = perf_counter()
    ok = False
    try:
        yield info
        ok = True
    finally:
        elapsed = perf_counter() - start
        detail = info.get("detail", "")
        line = f"{'PASS' if ok else 'FAIL'} criterion {number:2d}: {title} [{elapsed:.3f}s / {budget:g}s] {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)


def test_criterion_01_fourier_laplace_golden():
    with criterion(1, "Fourier-Laplace golden", 1e-3) as info:
        e = fourier_laplace(GOMPERTZ)
        x, dx = DiffOp.gen("x"), DiffOp.derivation("x")
        assert e == x * dx**2 + (1 - x) * dx - 1
        assert str(e) == "x*Dx^2 + (1-x)*Dx - 1"
        t = min(timeit.repeat(lambda: fourier_laplace(parse_operator(G)), number=1, repeat=20))
        info["detail"] = f"single run {t * 1e3:.3f} ms"
        assert t < 1e-3


def test_criterion_02_gompertz_census():
    with criterion(2, "Gompertz census", 1e-3) as info:
        census = finite_singularities(GOMPERTZ)
        assert census.points == ((Fraction(0), 1), (Fraction(1), 1))
        assert GOMPERTZ.degree == 2
        assert mn_bounds(GOMPERTZ)[1] == 1
        t = min(timeit.repeat(lambda: (finite_singularities(GOMPERTZ), mn_bounds(GOMPERTZ)), number=1, repeat=20))
        info["detail"] = f"single run {t * 1e3:.3f} ms"
        assert t < 1e-3


def test_criterion_03_basis_at_infinity():
    with criterion(3, "E-basis at infinity", 1.0) as info:
        eb = einfty_basis(GOMPERTZ, 27)
        assert len(eb) == 2
        yhat, ex = eb[0].series, eb[1].series
        # recorded normalization: lowest coefficient positive, so yhat = sum (-1)^n n! x^(-n-1)
        assert yhat.rho == 0
        for n in range(26):
            c = yhat.body.coefficient(n)
            assert abs(c) == math.factorial(n)
            assert c == (-1) ** n * math.factorial(n)
        assert ex.rho == 1 and ex.body.monomials() == {(-1, 0): 1}
        info["detail"] = "|a_n| = n! for n <= 25, second entry +e^x"


def _e_function(x: float) -> float:
    # E(x) = sum_{n>=1} (-1)^n x^n / (n n!) = -(E_1(x) + gamma + log x)
    return float(-(mpmath.e1(x) + mpmath.euler + mpmath.log(x)))


def test_criterion_04_basis_at_zero():
    with criterion(4, "E-basis at zero", 2.0) as info:
        zb = ezero_basis(GOMPERTZ, 44)
        e_op = fourier_laplace(GOMPERTZ)
        for f in zb:
            img = apply(e_op, f)
            assert img.is_zero() and img.order >= 40
        f1 = zb[0]

        def target(x):
            return math.exp(x) * (_e_function(x) + math.log(x))

        # fit c at x = 1, check at x = 1/2
        c = (evaluate(f1, 1.0).real - target(1.0)) / math.e
        val = evaluate(f1, 0.5).real
        ref = target(0.5) + c * math.exp(0.5)
        rel = abs(val - ref) / abs(ref)
        info["detail"] = f"c={c:.2e} relative error {rel:.2e}"
        assert rel < 1e-9


def test_criterion_05_intertwining():
    with criterion(5, "intertwining", 10.0) as info:
        rng = random.Random(5)
        points = [Finite(0), Finite(Fraction(2, 3)), INFINITY]
        fails = sum(not intertwines(random_operator(rng), random_series(rng, points[i % 3])) for i in range(200))
        info["detail"] = f"{200 - fails}/200 cases"
        assert fails == 0


def test_criterion_06_kernel_and_preimages():
    with criterion(6, "kernel and surjectivity", 5.0) as info:
        rng = random.Random(6)

        def rat():
            return Fraction(rng.randint(-9, 9), rng.randint(1, 5))

        for _ in range(100):
            rho = rat()
            f = LogSeries.from_monomials(Finite(rho), 12, {(Fraction(n), 0): rat() for n in range(12)})
            assert lrho_transform(f).is_zero()
        for _ in range(100):
            assert linf_transform(random_polynomial_at_infinity(rng, rng.randint(0, 8))).is_zero()
        for _ in range(100):
            alpha, k = rat(), rng.randint(0, 4)
            pre = lseul_preimage(alpha, k)
            rho = rat()
            moved = LogSeries.from_monomials(Finite(rho), pre.order, pre.monomials())
            img = lrho_transform(moved)
            assert img.rho == rho and img.body.monomials() == {(alpha, k): 1}
        info["detail"] = "100 power series, 100 polynomials, 100 monomials"


def _y_closed_form(alpha: Fraction, n: int) -> Fraction:
    m = math.floor(alpha) + n + 1
    frac = alpha - math.floor(alpha)
    out = Fraction(1)
    for k in range(m):
        out *= frac + k
    return Fraction(-1) ** m * out


def test_criterion_07_y_series_closed_form():
    with criterion(7, "y-series closed form", 1.0) as info:
        for alpha in (Fraction(0), Fraction(1, 2), Fraction(-1, 2), Fraction(-1), Fraction(7, 3)):
            y = y_alpha_i_series(alpha, 0, 51)
            for n in range(51):
                if n >= -math.floor(alpha):
                    assert y.coefficient(n) == _y_closed_form(alpha, n)
        info["detail"] = "5 exponents, n <= 50"


def test_criterion_08_structural_dimensions():
    with criterion(8, "structural dimensions", 20.0) as info:
        assert len(CORPUS) >= 5
        apparent = operator("apparent")
        assert 0 in finite_singularities(apparent).rhos
        assert all(s.is_trivial() for s in local_solution_basis(apparent, 0, 8))
        assert any(operator(n).order > operator(n).degree for n in CORPUS)
        for name in CORPUS:
            d = operator(name)
            for rho, m in finite_singularities(d).points:
                assert microsolution_basis(d, rho, 16).dimension == m
            assert len(sinfty_basis(d, 16)) == d.degree
            assert fuchs_exponent_sum(d).denominator == 1
        info["detail"] = f"{len(CORPUS)} operators"


def test_criterion_09_index_identity():
    with criterion(9, "index identity", 5.0) as info:
        for name in CORPUS:
            d = operator(name)
            coker, ker = polynomial_index_data(d)
            assert coker - ker == d.degree - d.order
            assert polynomial_codimension_bruteforce(d, 12) == coker
        info["detail"] = f"{len(CORPUS)} operators, brute-force cokernel agrees"


def test_criterion_10_gompertz_constant():
    with criterion(10, "Gompertz constant", 5.0) as info:
        yhat = einfty_basis(GOMPERTZ, 32)[0].series
        res = borel_sum(yhat, borel_operator(GOMPERTZ, 0), 0, 1.0)
        with mpmath.workdps(30):
            ref = float(mpmath.quad(lambda t: mpmath.exp(-t) / (1 + t), [0, mpmath.inf]))
        info["detail"] = f"{res.value.real:.15f} vs {ref:.15f}"
        assert abs(res.value - ref) < 1e-8


def test_criterion_11_kappa():
    with criterion(11, "kappa matrix", 10.0) as info:
        worst = 0.0
        for theta in (Fraction(1, 6), Fraction(1, 3), Fraction(1, 2), Fraction(2, 3), Fraction(5, 6)):
            k = kappa_matrix(GOMPERTZ, theta)
            for i in range(2):
                assert abs(abs(k[i, i]) - 1) < 1e-6
            off = max(abs(k[0, 1]), abs(k[1, 0]))
            worst = max(worst, off)
            assert off < 1e-6
        info["detail"] = f"theta in (0, pi), largest off-diagonal {worst:.1e}"


def test_criterion_12_atheta():
    with criterion(12, "A_theta matrix", 20.0) as info:
        a = atheta_matrix(GOMPERTZ, Fraction(1, 2))
        expected = np.array([[-1, 0], [-EULER_GAMMA, 1]])
        assert np.allclose(a.entries, expected, atol=1e-5)
        gamma = -a[1, 0]
        assert abs(gamma - EULER_GAMMA) < 1e-5
        assert abs(abs(a.determinant) - 1) < 1e-6
        info["detail"] = f"gamma={gamma.real:.10f} det={a.determinant.real:.10f}"


def test_criterion_13_stokes():
    with criterion(13, "Stokes matrix", 20.0) as info:
        s = stokes_matrix(GOMPERTZ, Fraction(3, 4), Fraction(5, 4))
        assert abs(s[0, 0] - 1) < 1e-6 and abs(s[1, 1] - 1) < 1e-6
        small, big = sorted((s[0, 1], s[1, 0]), key=abs)
        assert abs(small) < 1e-6
        # Borel-residue oracle: g = 1/(1 + zeta) has residue 1 at zeta = -1
        assert abs(abs(big) - 2 * math.pi) < 1e-4
        assert abs(abs(cmath.phase(big)) - math.pi / 2) < 1e-4
        info["detail"] = f"off-diagonal {big:.10f}"


def test_criterion_14_watson():
    with criterion(14, "Watson checks", 20.0) as info:
        worst = 0.0
        for rho in (0, 1):
            assert microsolution_basis(GOMPERTZ, rho, 8).dimension == 1
            rep = watson_check(GOMPERTZ, rho, Fraction(1, 2), radii=(8, 16, 32, 64))
            assert [abs(p.x) for p in rep.points] == pytest.approx([8, 16, 32, 64])
            assert rep.passed
            ratios = [p.deviation / p.bound for p in rep.points if p.bound > 1e-20]
            worst = max([worst] + ratios)
        z, dz = DiffOp.gen(), DiffOp.derivation()
        f_inf = LogSeries.from_monomials(INFINITY, 64, {(Fraction(m), 0): -1 for m in range(64)})
        rep = watson_check(GOMPERTZ, 0, Fraction(1, 2), f_inf=FunctionSpec(f_inf, (1 - z) * dz - 1))
        leg = rep.entire_leg["contour"]
        assert abs(leg + math.e) < 1e-4
        info["detail"] = f"deviation/bound <= {worst:.2f}, entire leg {leg.real:.12f}"
