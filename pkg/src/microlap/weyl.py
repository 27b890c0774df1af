"""Differential operators with polynomial coefficients.

Operators are kept in the normal form ``sum_i c_i(z) * Dz**i`` with the
polynomials to the left of the derivation.  The module also provides the
Fourier-Laplace morphism ``z -> Dx, Dz -> -x``, the action of operators
on log-series, and the indicial data at infinity.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Iterable

from .errors import IrregularAtInfinity, NonRationalSingularity, PreconditionError
from .exact import (
    ExpLogSeries,
    Finite,
    Poly,
    _SeriesBase,
    as_rational,
    binomial,
    falling_factorial_poly,
)
from .linalg import rank


class DiffOp:
    """``sum_i coeffs[i](var) * D**i`` with exact rational polynomial coefficients."""

    __slots__ = ("coeffs", "var")

    def __init__(self, coeffs: Iterable[Poly | Any], var: str = "z"):
        cs = [c.with_var(var) if isinstance(c, Poly) else Poly([c], var) for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        self.coeffs: tuple[Poly, ...] = tuple(cs)
        self.var = var

    # -- constructors
    @classmethod
    def multiplication(cls, p: Poly | Any, var: str = "z") -> "DiffOp":
        return cls([p], var)

    @classmethod
    def gen(cls, var: str = "z") -> "DiffOp":
        return cls([Poly.gen(var)], var)

    @classmethod
    def derivation(cls, var: str = "z") -> "DiffOp":
        return cls([0, 1], var)

    # -- structure
    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def degree(self) -> int:
        return max((int(c.degree) for c in self.coeffs if not c.is_zero()), default=0)

    @property
    def leading(self) -> Poly:
        return self.coeffs[-1]

    def P(self, i: int) -> Poly:
        """Coefficient of ``D**(order - i)``."""
        k = self.order - i
        return self.coeffs[k] if 0 <= k <= self.order else Poly((), self.var)

    def coefficient(self, i: int) -> Poly:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Poly((), self.var)

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_regular_at_infinity(self) -> bool:
        if self.is_zero():
            return False
        mu, delta = self.order, self.degree
        if self.leading.degree != delta:
            return False
        return all(c.is_zero() or c.degree <= delta - mu + i for i, c in enumerate(self.coeffs))

    def with_var(self, var: str) -> "DiffOp":
        return DiffOp(self.coeffs, var)

    # -- arithmetic
    def _lift(self, other) -> "DiffOp":
        if isinstance(other, DiffOp):
            return other
        return DiffOp([other], self.var)

    def __add__(self, other) -> "DiffOp":
        other = self._lift(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return DiffOp([self.coefficient(i) + other.coefficient(i) for i in range(n)], self.var)

    __radd__ = __add__

    def __neg__(self) -> "DiffOp":
        return DiffOp([-c for c in self.coeffs], self.var)

    def __sub__(self, other) -> "DiffOp":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "DiffOp":
        return self._lift(other) - self

    def __mul__(self, other) -> "DiffOp":
        other = self._lift(other)
        if self.is_zero() or other.is_zero():
            return DiffOp((), self.var)
        out = [Poly((), self.var) for _ in range(self.order + other.order + 1)]
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                db = b
                for k in range(0, min(i, b.degree if not b.is_zero() else -1) + 1):
                    out[i + j - k] = out[i + j - k] + a * db * binomial(i, k)
                    db = db.derivative()
        return DiffOp(out, self.var)

    def __rmul__(self, other) -> "DiffOp":
        return self._lift(other) * self

    def __pow__(self, n: int) -> "DiffOp":
        out = DiffOp([1], self.var)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, DiffOp):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    # -- transformations
    def exp_shift(self, rho) -> "DiffOp":
        """``exp(-rho*v) o self o exp(rho*v)``, i.e. ``D -> D + rho``."""
        rho = as_rational(rho)
        if rho == 0:
            return self
        out = DiffOp((), self.var)
        step = DiffOp([rho, 1], self.var)
        for i, c in enumerate(self.coeffs):
            out = out + DiffOp([c], self.var) * step**i
        return out

    def substitute(self, rho, sign: int = 1, var: str | None = None) -> "DiffOp":
        """Rewrite in the variable ``w`` with ``z = rho + sign*w``."""
        var = var or self.var
        coeffs = []
        for i, c in enumerate(self.coeffs):
            coeffs.append(c.reflect(rho, sign).with_var(var) * (sign**i))
        return DiffOp(coeffs, var)

    # -- printing
    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        dv = "D" + self.var
        parts: list[tuple[bool, str]] = []
        for i in range(self.order, -1, -1):
            c = self.coeffs[i]
            if c.is_zero():
                continue
            dpart = "" if i == 0 else (dv if i == 1 else f"{dv}^{i}")
            nz = [(k, a) for k, a in enumerate(c.coeffs) if a]
            if len(nz) == 1:
                k, a = nz[0]
                neg = a < 0
                mag = abs(a)
                if k == 0:
                    body = str(mag)
                    if mag == 1 and dpart:
                        body = ""
                else:
                    mono = self.var if k == 1 else f"{self.var}^{k}"
                    body = mono if mag == 1 else f"{mag}*{mono}"
            else:
                neg = False
                body = f"({c})"
            text = "*".join(s for s in (body, dpart) if s)
            parts.append((neg, text))
        out = ("-" if parts[0][0] else "") + parts[0][1]
        for neg, text in parts[1:]:
            out += (" - " if neg else " + ") + text
        return out

    def __repr__(self) -> str:
        return f"DiffOp({self})"


# ---------------------------------------------------------------- Fourier-Laplace


@lru_cache(maxsize=None)
def _dx_power_times_x_power(m: int, i: int, var: str) -> DiffOp:
    return DiffOp.derivation(var) ** m * DiffOp.gen(var) ** i


def fourier_laplace(d: DiffOp, var: str = "x") -> DiffOp:
    """Image under the algebra morphism ``z -> D_x``, ``D_z -> -x``."""
    out = DiffOp((), var)
    for i, c in enumerate(d.coeffs):
        for m, a in enumerate(c.coeffs):
            if a:
                out = out + _dx_power_times_x_power(m, i, var) * (a * (-1) ** i)
    return out


def inverse_fourier_laplace(e: DiffOp, var: str = "z") -> DiffOp:
    """Inverse morphism ``x -> -D_z``, ``D_x -> z``."""
    out = DiffOp((), var)
    for i, c in enumerate(e.coeffs):
        for m, a in enumerate(c.coeffs):
            if a:
                out = out + DiffOp.derivation(var) ** m * DiffOp.gen(var) ** i * (a * (-1) ** m)
    return out


# ---------------------------------------------------------------- action on series


def _derive_finite(mono: dict) -> dict:
    out: dict = {}
    for (e, j), c in mono.items():
        if e:
            out[(e - 1, j)] = out.get((e - 1, j), 0) + e * c
        if j:
            out[(e - 1, j - 1)] = out.get((e - 1, j - 1), 0) + j * c
    return out


def _derive_infinity(mono: dict) -> dict:
    # d/dz z^(-e-1) log(1/z)^j = -(e+1) z^(-e-2) log^j - j z^(-e-2) log^(j-1)
    out: dict = {}
    for (e, j), c in mono.items():
        if e + 1:
            out[(e + 1, j)] = out.get((e + 1, j), 0) - (e + 1) * c
        if j:
            out[(e + 1, j - 1)] = out.get((e + 1, j - 1), 0) - j * c
    return out


def apply_monomials(d: DiffOp, point, mono: dict, order) -> tuple[dict, Fraction]:
    """Apply ``d`` to a sparse monomial dict known below ``order``."""
    order = as_rational(order)
    out: dict = {}
    new_order = None
    finite = isinstance(point, Finite)
    cur = dict(mono)
    for i, c in enumerate(d.coeffs):
        if not c.is_zero():
            if finite:
                b = c.shift(point.rho)
                term_order = order - i + int(b.valuation())
                for (e, j), v in cur.items():
                    for m, bm in enumerate(b.coeffs):
                        if bm:
                            key = (e + m, j)
                            out[key] = out.get(key, 0) + bm * v
            else:
                term_order = order + i - int(c.degree)
                for (e, j), v in cur.items():
                    for m, bm in enumerate(c.coeffs):
                        if bm:
                            key = (e - m, j)
                            out[key] = out.get(key, 0) + bm * v
            new_order = term_order if new_order is None else min(new_order, term_order)
        if i < d.order:
            cur = _derive_finite(cur) if finite else _derive_infinity(cur)
    if new_order is None:
        new_order = order
    return {k: v for k, v in out.items() if v != 0 and k[0] < new_order}, new_order


def apply(d: DiffOp, f):
    """Exact image of a (possibly exponential) log-series under ``d``."""
    if isinstance(f, ExpLogSeries):
        return ExpLogSeries(f.rho, apply(d.exp_shift(f.rho), f.body))
    if not isinstance(f, _SeriesBase):
        raise TypeError(f"cannot apply an operator to {type(f).__name__}")
    mono, order = apply_monomials(d, f.point, f.monomials(), f.order)
    return type(f).from_monomials(f.point, order, mono, f.var)


# ---------------------------------------------------------------- data at infinity


def _require_regular_at_infinity(d: DiffOp) -> None:
    if not d.is_regular_at_infinity():
        raise IrregularAtInfinity(f"{d} does not have a regular singularity at infinity")


def indicial_at_infinity(d: DiffOp) -> Poly:
    """``R(z) = sum_j a_{mu-j} z(z-1)...(z-j+1)``; ``D z^k = R(k) z^(k+delta-mu) + ...``."""
    _require_regular_at_infinity(d)
    mu, delta = d.order, d.degree
    out = Poly((), "z")
    for j, c in enumerate(d.coeffs):
        a = c[delta - mu + j] if delta - mu + j >= 0 else Fraction(0)
        if a:
            out = out + falling_factorial_poly(j, "z") * a
    return out


def mn_bounds(d: DiffOp) -> tuple[int, int]:
    """Least ``M >= max(0, mu - delta)`` with ``R(k) != 0`` for all ``k >= M``, and ``N = M + delta - mu``."""
    r = indicial_at_infinity(d)
    mu, delta = d.order, d.degree
    m = max(0, mu - delta)
    roots, _ = r.rational_roots()
    for root, _mult in roots:
        if root.denominator == 1 and root >= m:
            m = int(root) + 1
    return m, m + delta - mu


@dataclass(frozen=True)
class SingularityCensus:
    points: tuple[tuple[Fraction, int], ...]

    @property
    def total(self) -> int:
        return sum(m for _, m in self.points)

    @property
    def rhos(self) -> tuple[Fraction, ...]:
        return tuple(r for r, _ in self.points)

    def multiplicity(self, rho) -> int:
        rho = as_rational(rho)
        for r, m in self.points:
            if r == rho:
                return m
        return 0


def finite_singularities(d: DiffOp) -> SingularityCensus:
    """Roots of the leading coefficient with multiplicities (rational roots only)."""
    if d.is_zero():
        raise PreconditionError("the zero operator has no singularity census")
    lead = d.leading
    if lead.degree <= 0:
        return SingularityCensus(())
    roots, rest = lead.rational_roots()
    if rest.degree >= 1:
        raise NonRationalSingularity(f"leading coefficient {lead} has the non-rational factor {rest.monic()}")
    return SingularityCensus(tuple(roots))


def image_of_monomial(d: DiffOp, k: int) -> Poly:
    """``d(z^k)`` as a polynomial."""
    mon = Poly.monomial(1, k, d.var)
    out = Poly((), d.var)
    cur = mon
    for c in d.coeffs:
        out = out + c * cur
        cur = cur.derivative()
    return out


def polynomial_index_data(d: DiffOp) -> tuple[int, int]:
    """``(dim C[z]/D(C[z]), dim ker D_M)`` via ``D_M : C[z]_{<M} -> C[z]_{<N}``."""
    _require_regular_at_infinity(d)
    mu, delta = d.order, d.degree
    m, n = mn_bounds(d)
    rows = []
    for k in range(m):
        img = image_of_monomial(d, k)
        if not img.is_zero() and img.degree >= n:
            raise AssertionError("image of a low monomial escaped the target space")
        rows.append({i: c for i, c in enumerate(img.coeffs) if c})
    rk = rank(rows, list(range(max(n, 1))))
    dim_coker, dim_ker = n - rk, m - rk
    if dim_coker - dim_ker != delta - mu:
        raise AssertionError("index identity failed")
    return dim_coker, dim_ker


def polynomial_codimension_bruteforce(d: DiffOp, top: int) -> int:
    """Codimension of ``D(C[z]_{<top})`` in ``C[z]_{<top+delta-mu}``; an independent oracle."""
    mu, delta = d.order, d.degree
    n = top + delta - mu
    rows = []
    for k in range(top):
        img = image_of_monomial(d, k)
        rows.append({i: c for i, c in enumerate(img.coeffs) if c})
    return n - rank(rows, list(range(max(n, 1))))


def leading_coefficient_of_image(d: DiffOp, k: int) -> Fraction:
    """Coefficient of ``z^(k+delta-mu)`` in ``d(z^k)``."""
    img = image_of_monomial(d, k)
    return img[k + d.degree - d.order]
