"""Floating-point layer: jets of 1/Gamma, the operators C_0 / C_inf and forward Laplace.

This is the only module of the formal pipeline where transcendental
constants enter; everything it consumes is exact.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache

import mpmath

from .errors import OrderTooLarge, PoleAtNonpositiveInteger, PreconditionError
from .exact import (
    INFINITY,
    ExpLogSeries,
    Finite,
    _SeriesBase,
    as_rational,
    binomial,
    frac_part,
    is_integer,
    series_inv,
    series_mul,
)

MAX_JET_ORDER = 12
JET_EPS = 1e-14


class NumericLogSeries(_SeriesBase):
    """Log-series with complex double coefficients and per-monomial error estimates."""

    __slots__ = ("errors",)

    @staticmethod
    def _coerce(c):
        return complex(c)

    @classmethod
    def build(cls, point, order, mono, var="z", errors=None):
        out = cls.from_monomials(point, order, mono, var)
        out.errors = {k: float(v) for k, v in (errors or {}).items() if k in out._mono}
        return out

    def error(self, key) -> float:
        return getattr(self, "errors", {}).get(key, 0.0)

    def max_error(self) -> float:
        errs = getattr(self, "errors", {})
        return max(errs.values(), default=0.0)

    def __add__(self, other):
        out = super().__add__(other)
        errs = dict(getattr(self, "errors", {}))
        for k, v in getattr(other, "errors", {}).items():
            errs[k] = errs.get(k, 0.0) + v
        out.errors = {k: v for k, v in errs.items() if k in out._mono}
        return out

    def scale(self, c):
        out = super().scale(c)
        out.errors = {k: abs(c) * v for k, v in getattr(self, "errors", {}).items() if k in out._mono}
        return out

    def __neg__(self):
        return self.scale(-1)


def _recip_gamma_taylor_unit(s_mp, order: int) -> list:
    """Taylor coefficients of ``1/Gamma(s+h)`` in ``h`` for ``s > 0``, as mpmath numbers."""
    # log(1/Gamma(s+h)) = -loggamma(s) - sum_k psi^(k-1)(s) h^k / k!
    log_coeffs = [-mpmath.loggamma(s_mp)]
    for k in range(1, order + 1):
        log_coeffs.append(-mpmath.polygamma(k - 1, s_mp) / mpmath.factorial(k))
    # exp of a power series: b' = a' b
    b = [mpmath.exp(log_coeffs[0])] + [mpmath.mpf(0)] * order
    for n in range(1, order + 1):
        b[n] = mpmath.fsum(k * log_coeffs[k] * b[n - k] for k in range(1, n + 1)) / n
    return b


def _mp(q: Fraction):
    return mpmath.mpf(q.numerator) / q.denominator


def _recip_gamma_taylor_mp(w: Fraction, order: int) -> list:
    if w > 0:
        return _recip_gamma_taylor_unit(_mp(w), order)
    s = 1 - frac_part(-w)  # s in (0, 1], w - s a negative integer
    base = _recip_gamma_taylor_unit(_mp(s), order)
    # 1/Gamma(w+h) = prod_{k < s-w} (w+k+h) / Gamma(s+h)
    for k in range(int(s - w)):
        base = series_mul(base, [_mp(w + k), mpmath.mpf(1)], order + 1)
    return base


@lru_cache(maxsize=1024)
def _recip_gamma_taylor(w: Fraction, order: int) -> tuple[float, ...]:
    """Taylor coefficients of ``1/Gamma(w+h)`` for any rational ``w``.

    Everything runs at 40 digits; high derivatives otherwise lose accuracy
    to cancellation.
    """
    with mpmath.workdps(40):
        return tuple(float(c) for c in _recip_gamma_taylor_mp(w, order))


@lru_cache(maxsize=1024)
def _gamma_taylor(w: Fraction, order: int) -> tuple[float, ...]:
    with mpmath.workdps(40):
        inv = series_inv(_recip_gamma_taylor_mp(w, order), order + 1)
        return tuple(float(c) for c in inv)


def recip_gamma_jet(s, order: int) -> list[float]:
    """Derivatives ``0..order`` of ``1/Gamma`` at ``s`` with ``0 < s <= 1``."""
    s = as_rational(s)
    if not 0 < s <= 1:
        raise PreconditionError(f"recip_gamma_jet needs 0 < s <= 1, got {s}")
    if order > MAX_JET_ORDER:
        raise OrderTooLarge(f"jets of 1/Gamma are available up to order {MAX_JET_ORDER}")
    coeffs = _recip_gamma_taylor(s, order)
    return [c * math.factorial(m) for m, c in enumerate(coeffs)]


def gamma_jet(w, order: int) -> list[float]:
    """Derivatives of ``Gamma`` at a rational non-pole ``w``, by inverting the 1/Gamma series."""
    w = as_rational(w)
    if is_integer(w) and w <= 0:
        raise PoleAtNonpositiveInteger(f"Gamma has a pole at {w}")
    if order > MAX_JET_ORDER:
        raise OrderTooLarge(f"jets of Gamma are available up to order {MAX_JET_ORDER}")
    return [c * math.factorial(m) for m, c in enumerate(_gamma_taylor(w, order))]


def _t_terms(alpha: Fraction, nu: int) -> dict[int, float]:
    """``{i: factor}`` with ``x^(-a-1) L^nu -> sum_i factor * x^(-a-1) L^i`` (``L = log(1/x)``)."""
    jets = recip_gamma_jet(1 - frac_part(alpha), nu)
    return {i: (-1) ** (nu - i) * binomial(nu, i) * jets[nu - i] for i in range(nu + 1)}


def _numeric(mono: dict, errs: dict, point, order, var) -> NumericLogSeries:
    return NumericLogSeries.build(point, order, mono, var, errs)


def apply_T(f, location: str = "inf"):
    """Apply ``C_inf`` (``location='inf'``) or ``C_0`` (``location='0'``) with float coefficients."""
    loc = str(location).lower()
    if isinstance(f, ExpLogSeries):
        if loc not in ("inf", "infinity"):
            raise PreconditionError("exponential series live at infinity")
        return ExpLogSeries(f.rho, apply_T(f.body, "inf"))
    mono: dict = {}
    errs: dict = {}
    if loc in ("inf", "infinity"):
        if f.point is not INFINITY:
            raise PreconditionError("C_inf acts on series at infinity")
        for (e, nu), c in f.monomials().items():
            for i, v in _t_terms(e, nu).items():
                mono[(e, i)] = mono.get((e, i), 0) + complex(c) * v
                errs[(e, i)] = errs.get((e, i), 0.0) + abs(complex(c) * v) * JET_EPS
    elif loc in ("0", "zero"):
        if f.point != Finite(0):
            raise PreconditionError("C_0 acts on series at 0")
        for (e, j), c in f.monomials().items():
            # x^e log(x)^j = (-1)^j x^(-a-1) L^j with a = -e-1, and L^i = (-1)^i log(x)^i
            for i, v in _t_terms(-e - 1, j).items():
                w = (-1) ** (i + j) * complex(c) * v
                mono[(e, i)] = mono.get((e, i), 0) + w
                errs[(e, i)] = errs.get((e, i), 0.0) + abs(w) * JET_EPS
    else:
        raise PreconditionError(f"unknown location {location!r}")
    return _numeric(mono, errs, f.point, f.order, f.var)


def forward_laplace_monomial(alpha, i: int, var: str = "z") -> NumericLogSeries:
    """``int_0^inf x^(-alpha-1) log(1/x)^i e^(-zx) dx`` as a combination of ``z^alpha log(z)^k``."""
    alpha = as_rational(alpha)
    if is_integer(alpha) and alpha >= 0:
        raise PoleAtNonpositiveInteger(f"Gamma(-alpha) has a pole for alpha = {alpha}")
    jets = gamma_jet(-alpha, i)
    mono = {(alpha, k): binomial(i, k) * (-1) ** (i - k) * jets[i - k] for k in range(i + 1)}
    errs = {key: abs(v) * 1e-13 for key, v in mono.items()}
    return _numeric(mono, errs, Finite(0), alpha + 1, var)


def monomial_value(point, e, j: int, x: complex, arg: float | None = None) -> complex:
    """Value of one monomial at ``x``; ``arg`` pins the argument of the local variable."""
    x = complex(x)
    if isinstance(point, Finite):
        u = x - float(point.rho)
        lg = _log(u, arg)
        return cmath.exp(float(e) * lg) * lg**j
    lg = _log(x, arg)  # log(1/x)^j * x^(-e-1)
    return cmath.exp((-float(e) - 1) * lg) * (-lg) ** j


def _log(u: complex, arg: float | None) -> complex:
    if arg is None:
        return cmath.log(u)
    return complex(math.log(abs(u)), arg)


def evaluate(f, x: complex, arg: float | None = None) -> complex:
    """Sum of all known terms of ``f`` (series or exponential series) at ``x``."""
    if isinstance(f, ExpLogSeries):
        return cmath.exp(float(f.rho) * complex(x)) * evaluate(f.body, x, arg)
    total = 0j
    for (e, j), c in sorted(f.monomials().items(), key=lambda kv: kv[0]):
        total += complex(c) * monomial_value(f.point, e, j, x, arg)
    return total
