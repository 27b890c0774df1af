"""Recursive-descent parser for operators written in ``z`` and ``Dz``.

Grammar::

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := primary ('^' uint)*
    primary:= rational | 'z' | 'Dz' | '(' expr ')'

Products are taken in the Weyl algebra, so ``Dz*z`` reads as ``z*Dz + 1``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import NonIntegerExponentOnDz, ParseError
from .weyl import DiffOp

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<name>Dz|z)|(?P<op>[-+*^()]))")


@dataclass(frozen=True)
class Token:
    kind: str  # "num", "name", "op", "end"
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    out = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            while pos < len(text) and text[pos].isspace():
                pos += 1
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        out.append(Token(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    out.append(Token("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, var: str):
        self.tokens = tokenize(text)
        self.i = 0
        self.var = var

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def take(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> None:
        if self.tok.text != text:
            raise ParseError(f"expected {text!r}, found {self.tok.text or 'end of input'!r}", self.tok.pos)
        self.take()

    def parse(self) -> DiffOp:
        if self.tok.kind == "end":
            raise ParseError("empty operator", 0)
        out = self.expr()
        if self.tok.kind != "end":
            raise ParseError(f"unexpected {self.tok.text!r}", self.tok.pos)
        return out

    def expr(self) -> DiffOp:
        sign = 1
        if self.tok.text in ("+", "-"):
            sign = -1 if self.take().text == "-" else 1
        out = self.term()
        if sign < 0:
            out = -out
        while self.tok.text in ("+", "-"):
            op = self.take().text
            rhs = self.term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term(self) -> DiffOp:
        out = self.factor()
        while self.tok.text == "*":
            self.take()
            out = out * self.factor()
        return out

    def factor(self) -> DiffOp:
        start = self.tok
        base = self.primary()
        while self.tok.text == "^":
            caret = self.take()
            t = self.tok
            exponent_ok = t.kind == "num" and "/" not in t.text
            if not exponent_ok:
                if start.text == "Dz":
                    raise NonIntegerExponentOnDz("exponents of Dz must be non-negative integers", t.pos)
                raise ParseError("exponent must be a non-negative integer", t.pos if t.kind != "end" else caret.pos)
            self.take()
            base = base ** int(t.text)
        return base

    def primary(self) -> DiffOp:
        t = self.tok
        if t.kind == "num":
            self.take()
            return DiffOp.multiplication(Fraction(t.text), self.var)
        if t.kind == "name":
            self.take()
            return DiffOp.gen(self.var) if t.text == "z" else DiffOp.derivation(self.var)
        if t.text == "(":
            self.take()
            inner = self.expr()
            self.expect(")")
            return inner
        if t.kind == "end":
            raise ParseError("unexpected end of input", t.pos)
        raise ParseError(f"unexpected {t.text!r}", t.pos)


def parse_operator(text: str) -> DiffOp:
    """Parse a noncommutative polynomial in ``z`` and ``Dz`` into normal form."""
    return _Parser(text, "z").parse()
