from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from strategies import operators

from microlap.errors import NonIntegerExponentOnDz, ParseError
from microlap.parsing import parse_operator
from microlap.weyl import DiffOp

z, dz = DiffOp.gen(), DiffOp.derivation()


def test_gompertz_normal_form():
    d = parse_operator("z*(1-z)*Dz - z")
    assert d == z * (1 - z) * dz - z
    assert (d.order, d.degree) == (1, 2)
    assert str(d) == "(z-z^2)*Dz - z"


def test_commutator_rewrites_to_normal_form():
    assert parse_operator("Dz*z") == z * dz + 1
    assert parse_operator("Dz^2*z") == z * dz**2 + 2 * dz


def test_normal_form_is_unchanged():
    d = parse_operator("z^2*Dz^2 + z*Dz")
    assert str(d) == "z^2*Dz^2 + z*Dz"


@pytest.mark.parametrize(
    "text, expected",
    [
        ("-z + 3/2", Fraction(3, 2) - z),
        ("(z+1)^2", (z + 1) * (z + 1)),
        ("2*Dz^0", DiffOp([2])),
        ("  z *  Dz ", z * dz),
    ],
)
def test_small_expressions(text, expected):
    assert parse_operator(text) == expected


@pytest.mark.parametrize(
    "text, pos",
    [("z*(1-z", 6), ("z**2", 2), ("z + #", 4), ("", 0), ("z^-1", 2), ("z)", 1)],
)
def test_parse_errors_carry_positions(text, pos):
    with pytest.raises(ParseError) as info:
        parse_operator(text)
    assert info.value.position == pos


def test_fractional_power_of_derivation():
    with pytest.raises(NonIntegerExponentOnDz):
        parse_operator("Dz^1/2")


@given(operators(max_order=3, max_degree=4, nonzero=False))
def test_print_parse_round_trip(d):
    assert parse_operator(str(d)) == d
