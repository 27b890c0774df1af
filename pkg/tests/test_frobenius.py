from __future__ import annotations

import math
from fractions import Fraction

import pytest

from microlap.corpus import CORPUS, operator
from microlap.errors import NotRegularSingular, PreconditionError
from microlap.exact import INFINITY, Finite
from microlap.frobenius import (
    fuchs_exponent_sum,
    local_exponents,
    local_solution_basis,
    microsolution_basis,
    residual,
    sinfty_basis,
)
from microlap.parsing import parse_operator
from microlap.weyl import finite_singularities


def _central(n: int) -> Fraction:
    return Fraction(math.comb(2 * n, n), 4**n)


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_local_bases_are_annihilated(name):
    d = operator(name)
    points = [Finite(r) for r in finite_singularities(d).rhos] + [Finite(Fraction(1, 3)), INFINITY]
    for p in points:
        basis = local_solution_basis(d, p, 16)
        assert len(basis) == d.order
        for s in basis:
            assert residual(d, s).is_zero()


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_fuchs_relation(name):
    # sum of all exponents (infinity in 1/z) is (m - 1) * mu * (mu - 1) / 2
    d = operator(name)
    m = len(finite_singularities(d).points)
    total = sum(sum(local_exponents(d, Finite(r))) for r in finite_singularities(d).rhos)
    total += sum(local_exponents(d, INFINITY))
    assert total == Fraction((m - 1) * d.order * (d.order - 1), 2)
    assert fuchs_exponent_sum(d).denominator == 1


def test_algebraic_solution_coefficients():
    # sqrt(z / (1 - z)) = z^(1/2) * sum C(2n, n) / 4^n z^n
    (sol,) = local_solution_basis(operator("algebraic"), 0, 12)
    assert sol.exponent == Fraction(1, 2)
    for n in range(12):
        assert sol.series.coefficient(Fraction(1, 2) + n) == _central(n)


def test_elliptic_holomorphic_and_log_solutions():
    basis = local_solution_basis(operator("elliptic"), 0, 12)
    logs = [s for s in basis if s.log_degree]
    plain = [s for s in basis if not s.log_degree]
    assert len(logs) == 1 and len(plain) == 1
    # the holomorphic one is the hypergeometric series 2F1(1/2, 1/2; 1; z)
    assert [plain[0].series.coefficient(n) for n in range(12)] == [_central(n) ** 2 for n in range(12)]


def test_gompertz_microsolutions():
    d = parse_operator("z*(1-z)*Dz - z")
    m0 = microsolution_basis(d, 0, 8)
    m1 = microsolution_basis(d, 1, 8)
    assert m0.dimension == m1.dimension == 1
    assert m0.n_bound == 1
    # at 1 the microsolution is a pole: (z-1)^-1
    assert m1.entries[0].series.monomials() == {(Fraction(-1), 0): 1}
    # at 0 it is log z / (1 - z) up to holomorphic terms
    assert m0.entries[0].log_degree == 1
    assert m0.entries[0].series.coefficient(0, 1) == 1


def test_sinfty_dimension_matches_degree():
    for name in CORPUS:
        d = operator(name)
        sb = sinfty_basis(d, 12)
        assert sb.dimension == d.degree
        for s in sb:
            assert s.image is not None and (s.image.is_zero() or s.image.degree < sb.n_bound)


def test_preconditions():
    d = parse_operator("z*(1-z)*Dz - z")
    with pytest.raises(PreconditionError):
        microsolution_basis(d, 2)
    with pytest.raises(NotRegularSingular):
        local_solution_basis(parse_operator("z^2*Dz - 1"), 0, 4)
