"""Self-check suites behind ``microlap verify``.

``exact`` runs identities in rational arithmetic only; ``numeric`` runs the
floating-point comparisons on the Gompertz operator.
"""

from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .corpus import CORPUS, GOMPERTZ, operator
from .exact import INFINITY, Finite, LogSeries, Poly
from .frobenius import fuchs_exponent_sum, microsolution_basis, sinfty_basis
from .laplace import (
    einfty_basis,
    ezero_basis,
    linf_transform,
    lrho_transform,
    lrho_transform_hadamard,
    lseul_monomial,
    lseul_preimage,
    y_alpha_i_series,
)
from .parsing import parse_operator
from .weyl import (
    DiffOp,
    apply,
    finite_singularities,
    fourier_laplace,
    mn_bounds,
    polynomial_codimension_bruteforce,
    polynomial_index_data,
)

EULER_GAMMA = 0.5772156649015329
GOMPERTZ_CONSTANT = 0.5963473623231940


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


# ---------------------------------------------------------------- random inputs


def _rat(rng: random.Random, span: int = 5) -> Fraction:
    return Fraction(rng.randint(-span, span), rng.randint(1, 3))


def random_operator(rng: random.Random, max_order: int = 3, max_degree: int = 3) -> DiffOp:
    mu = rng.randint(1, max_order)
    coeffs = [Poly([_rat(rng) for _ in range(rng.randint(0, max_degree + 1))]) for _ in range(mu)]
    lead = Poly([_rat(rng) for _ in range(max_degree)] + [Fraction(rng.choice([-2, -1, 1, 2]))])
    return DiffOp(coeffs + [lead])


def random_series(rng: random.Random, point, n_terms: int = 8, max_log: int = 2) -> LogSeries:
    """A random log-series with one or two exponent classes."""
    mono = {}
    lows = rng.sample([Fraction(0), Fraction(1, 2), Fraction(-1, 3), Fraction(-2), Fraction(3)], rng.randint(1, 2))
    for low in lows:
        for n in range(n_terms):
            for j in range(rng.randint(0, max_log) + 1):
                if rng.random() < 0.7:
                    mono[(low + n, j)] = _rat(rng)
    order = min(lows) + n_terms
    return LogSeries.from_monomials(point, order, mono)


def random_power_series(rng: random.Random, point, n_terms: int = 10) -> LogSeries:
    return LogSeries.from_monomials(point, n_terms, {(Fraction(n), 0): _rat(rng) for n in range(n_terms)})


def random_polynomial_at_infinity(rng: random.Random, degree: int = 6) -> LogSeries:
    # z^k is the label -k-1 at infinity
    mono = {(Fraction(-k - 1), 0): _rat(rng) for k in range(degree + 1)}
    return LogSeries.from_monomials(INFINITY, 12, mono)


def intertwines(d: DiffOp, f: LogSeries) -> bool:
    """``L(d f) == F(d) L(f)`` on the coefficients both sides determine."""
    e_op = fourier_laplace(d)
    if f.point is INFINITY:
        left, right = linf_transform(apply(d, f)), apply(e_op, linf_transform(f))
        return left.agrees_with(right)
    left, right = lrho_transform(apply(d, f)), apply(e_op, lrho_transform(f))
    return left.rho == right.rho and left.body.agrees_with(right.body)


def y_closed_form(alpha: Fraction, n: int) -> Fraction:
    """``(-1)^([y]+n+1) * ({y})_([y]+n+1)`` with the fractional part fixed at ``alpha``."""
    floor = math.floor(alpha)
    frac = alpha - floor
    count = floor + n + 1
    if count < 0:
        return Fraction(0)
    prod = Fraction(1)
    for k in range(count):
        prod *= frac + k
    return (-1) ** count * prod


# ---------------------------------------------------------------- suites


def _run(name: str, fn: Callable[[], tuple[bool, str]]) -> Check:
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash is a failed check
        return Check(name, False, f"{type(exc).__name__}: {exc}")
    return Check(name, ok, detail)


def exact_suite(seed: int = 2024, cases: int = 200) -> list[Check]:
    gomp = parse_operator(GOMPERTZ)
    checks = []

    def transform():
        out = str(fourier_laplace(gomp))
        return out == "x*Dx^2 + (1-x)*Dx - 1", out

    def census():
        c = finite_singularities(gomp)
        _, n = mn_bounds(gomp)
        ok = c.points == ((0, 1), (1, 1)) and gomp.degree == 2 and n == 1
        return ok, f"points={c.points} delta={gomp.degree} N={n}"

    def einf_coeffs():
        eb = einfty_basis(gomp, 27)
        yhat = eb[0].series.body
        ok = all(abs(yhat.coefficient(n)) == math.factorial(n) for n in range(26))
        ok = ok and eb[1].series.rho == 1 and eb[1].series.body.monomials() == {(-1, 0): 1}
        return ok, f"{len(eb)} entries"

    def ezero_residual():
        zb = ezero_basis(gomp, 44)
        bad = [i for i, f in enumerate(zb) if any(e < 40 for (e, _j) in apply(zb.operator, f).monomials())]
        return not bad and all(apply(zb.operator, f).order >= 40 for f in zb), f"entries {len(zb)}"

    def intertwining():
        rng = random.Random(seed)
        points = [Finite(0), Finite(Fraction(2, 3)), INFINITY]
        fails = 0
        for i in range(cases):
            d = random_operator(rng)
            if not intertwines(d, random_series(rng, points[i % 3])):
                fails += 1
        return fails == 0, f"{cases - fails}/{cases}"

    def kernel():
        rng = random.Random(seed + 1)
        ok = all(lrho_transform(random_power_series(rng, Finite(_rat(rng)))).is_zero() for _ in range(100))
        ok = ok and all(linf_transform(random_polynomial_at_infinity(rng)).is_zero() for _ in range(100))
        for _ in range(100):
            alpha, k = _rat(rng), rng.randint(0, 3)
            img = lrho_transform(lseul_preimage(alpha, k)).body
            ok = ok and img.monomials() == {(alpha, k): 1}
        return ok, "100 series, 100 polynomials, 100 preimages"

    def y_series():
        for alpha in (Fraction(0), Fraction(1, 2), Fraction(-1, 2), Fraction(-1), Fraction(7, 3)):
            y = y_alpha_i_series(alpha, 0, 51)
            if any(y.coefficient(n) != y_closed_form(alpha, n) for n in range(51)):
                return False, f"alpha={alpha}"
        return True, "n <= 50"

    def lseul_examples():
        ok = lseul_monomial(0, 0).is_zero()
        ok = ok and lseul_monomial(0, 1).monomials() == {(0, 0): -1}
        ok = ok and lseul_monomial(-4, 0).monomials() == {(-4, 0): Fraction(1, 6)}
        f = lseul_monomial(Fraction(1, 3), 2, 4)
        ok = ok and f.max_log_degree() == 2
        for name in CORPUS:
            d = operator(name)
            for rho in finite_singularities(d).rhos:
                for s in microsolution_basis(d, rho, 12).entries:
                    ok = ok and lrho_transform(s.series) == lrho_transform_hadamard(s.series)
        return ok, "monomial examples and both transform routes"

    def dimensions():
        notes = []
        ok = True
        for name in CORPUS:
            d = operator(name)
            census = finite_singularities(d)
            for rho, m in census.points:
                ok = ok and microsolution_basis(d, rho, 12).dimension == m
            ok = ok and len(sinfty_basis(d, 12)) == d.degree == census.total
            ok = ok and fuchs_exponent_sum(d).denominator == 1
            notes.append(name)
        return ok, ", ".join(notes)

    def index():
        ok = True
        for name in CORPUS:
            d = operator(name)
            coker, ker = polynomial_index_data(d)
            ok = ok and coker - ker == d.degree - d.order
            ok = ok and coker == polynomial_codimension_bruteforce(d, 12)
        return ok, "coker - ker = delta - mu"

    for name, fn in [
        ("fourier-laplace golden", transform),
        ("gompertz census", census),
        ("basis at infinity", einf_coeffs),
        ("basis at zero residual", ezero_residual),
        ("intertwining", intertwining),
        ("kernel and preimages", kernel),
        ("y-series closed form", y_series),
        ("transform examples", lseul_examples),
        ("structural dimensions", dimensions),
        ("index identity", index),
    ]:
        checks.append(_run(name, fn))
    return checks


def numeric_suite() -> list[Check]:
    from .analytic import (
        FunctionSpec,
        atheta_matrix,
        borel_operator,
        borel_sum,
        kappa_matrix,
        stokes_matrix,
        watson_check,
    )
    from .gammanum import recip_gamma_jet

    gomp = parse_operator(GOMPERTZ)
    z, dz = DiffOp.gen(), DiffOp.derivation()
    checks = []

    def jets():
        j = recip_gamma_jet(1, 1)
        ok = abs(j[0] - 1) < 1e-14 and abs(j[1] - EULER_GAMMA) < 1e-12
        ok = ok and abs(recip_gamma_jet(Fraction(1, 2), 0)[0] - 1 / math.sqrt(math.pi)) < 1e-14
        return ok, f"{j}"

    def gompertz_constant():
        eb = einfty_basis(gomp, 32)
        v = borel_sum(eb[0].series, borel_operator(gomp, 0), 0, 1.0).value
        return abs(v - GOMPERTZ_CONSTANT) < 1e-8, f"{v.real:.12f}"

    def kappa():
        k = kappa_matrix(gomp, Fraction(1, 2))
        ok = all(abs(abs(k[i, i]) - 1) < 1e-6 for i in range(2)) and abs(k[0, 1]) < 1e-6 and abs(k[1, 0]) < 1e-6
        return bool(ok), f"cond={k.condition:.3g}"

    def atheta():
        a = atheta_matrix(gomp, Fraction(1, 2))
        gamma = -a[1, 0] * a[1, 1]
        ok = abs(gamma - EULER_GAMMA) < 1e-5 and abs(abs(a.determinant) - 1) < 1e-6
        return ok, f"gamma={gamma.real:.10f} det={a.determinant.real:.10f}"

    def stokes():
        s = stokes_matrix(gomp, Fraction(3, 4), Fraction(5, 4))
        off = s[1, 0] if abs(s[1, 0]) > abs(s[0, 1]) else s[0, 1]
        ok = abs(abs(off) - 2 * math.pi) < 1e-4 and abs(abs(cmath.phase(off)) - math.pi / 2) < 1e-4
        ok = ok and abs(s[0, 0] - 1) < 1e-6 and abs(s[1, 1] - 1) < 1e-6
        return bool(ok), f"off-diagonal={off:.10f}"

    def watson():
        f_inf = LogSeries.from_monomials(INFINITY, 64, {(Fraction(m - 1), 0): -1 for m in range(1, 65)})
        spec = FunctionSpec(f_inf, (1 - z) * dz - 1)
        reports = [watson_check(gomp, rho, Fraction(1, 2), f_inf=spec) for rho in (0, 1)]
        leg = reports[0].entire_leg
        ok = all(r.passed for r in reports) and abs(leg["contour"] + math.e) < 1e-4
        return ok, f"entire leg {leg['contour'].real:.10f}"

    for name, fn in [
        ("reciprocal gamma jets", jets),
        ("gompertz constant", gompertz_constant),
        ("kappa matrix", kappa),
        ("A_theta matrix", atheta),
        ("stokes matrix", stokes),
        ("watson checks", watson),
    ]:
        checks.append(_run(name, fn))
    return checks


def run_suite(name: str) -> list[Check]:
    if name == "exact":
        return exact_suite()
    if name == "numeric":
        return numeric_suite()
    if name == "all":
        return exact_suite() + numeric_suite()
    raise ValueError(f"unknown suite {name!r}")
