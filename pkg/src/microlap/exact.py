"""Exact arithmetic core: rationals, polynomials and truncated log-series.

A :class:`LogSeries` is a finite sum of monomials with exact rational
coefficients.  At a finite point ``rho`` the monomial with label ``(e, j)``
is ``(z - rho)**e * log(z - rho)**j``; at infinity it is
``z**(-e - 1) * log(1/z)**j``.  In both cases increasing ``e`` means
"smaller near the base point", and the series is known exactly for every
label ``e < order``.  Nothing beyond ``order`` is ever claimed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Iterable, Mapping, Sequence

from .errors import MixedTermsError

Rational = Fraction

# degree of the zero polynomial
NEG_INF = float("-inf")


def as_rational(value: Any) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, str)):
        return Fraction(value)
    raise TypeError(f"cannot read {value!r} as an exact rational")


def frac_part(a: Fraction) -> Fraction:
    """Fractional part in [0, 1)."""
    return a - math.floor(a)


def is_integer(a: Fraction) -> bool:
    return a.denominator == 1


def binomial(n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


@dataclass(frozen=True)
class ExponentClass:
    """Class of an exponent modulo the integers."""

    frac: Fraction
    offset: int

    @classmethod
    def of(cls, alpha: Fraction) -> "ExponentClass":
        alpha = as_rational(alpha)
        return cls(frac_part(alpha), math.floor(alpha))

    @property
    def representative(self) -> Fraction:
        return self.frac + self.offset

    def same_class(self, other: "ExponentClass") -> bool:
        return self.frac == other.frac


# ---------------------------------------------------------------- power series


def series_mul(a: Sequence, b: Sequence, n: int) -> list:
    out = [0] * n
    for i, ai in enumerate(a[:n]):
        if ai == 0:
            continue
        for k, bk in enumerate(b[: n - i]):
            if bk:
                out[i + k] += ai * bk
    return out


def series_inv(a: Sequence, n: int) -> list:
    if not a or a[0] == 0:
        raise ZeroDivisionError("series with zero constant term is not invertible")
    out = [0] * n
    inv0 = 1 / a[0] if not isinstance(a[0], int) else Fraction(1, a[0])
    out[0] = inv0
    for m in range(1, n):
        acc = 0
        for k in range(1, min(m, len(a) - 1) + 1):
            if a[k]:
                acc += a[k] * out[m - k]
        out[m] = -acc * inv0
    return out


# ---------------------------------------------------------------- polynomials


class Poly:
    """Dense univariate polynomial with exact rational coefficients.

    ``coeffs[k]`` is the coefficient of ``var**k``; trailing zeros are
    stripped so the zero polynomial has an empty coefficient tuple and
    degree ``NEG_INF``.
    """

    __slots__ = ("coeffs", "var")

    def __init__(self, coeffs: Iterable = (), var: str = "z"):
        cs = [as_rational(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)
        self.var = var

    @classmethod
    def constant(cls, c, var: str = "z") -> "Poly":
        return cls([c], var)

    @classmethod
    def gen(cls, var: str = "z") -> "Poly":
        return cls([0, 1], var)

    @classmethod
    def monomial(cls, c, k: int, var: str = "z") -> "Poly":
        return cls([0] * k + [c], var)

    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def valuation(self):
        for k, c in enumerate(self.coeffs):
            if c:
                return k
        return math.inf

    def __getitem__(self, k: int) -> Fraction:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Fraction(0)

    def _lift(self, other) -> "Poly":
        if isinstance(other, Poly):
            return other
        return Poly([other], self.var)

    def __add__(self, other) -> "Poly":
        other = self._lift(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly([self[k] + other[k] for k in range(n)], self.var)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly([-c for c in self.coeffs], self.var)

    def __sub__(self, other) -> "Poly":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "Poly":
        return self._lift(other) - self

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            c = as_rational(other)
            return Poly([c * a for a in self.coeffs], self.var)
        if self.is_zero() or other.is_zero():
            return Poly((), self.var)
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for k, b in enumerate(other.coeffs):
                    out[i + k] += a * b
        return Poly(out, self.var)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        out = Poly([1], self.var)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == Poly([other]).coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __call__(self, value):
        acc = 0 * value
        for c in reversed(self.coeffs):
            acc = acc * value + c
        return acc

    def evaluate(self, value: complex) -> complex:
        acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * value + float(c)
        return acc

    def derivative(self) -> "Poly":
        return Poly([k * c for k, c in enumerate(self.coeffs)][1:], self.var)

    def shift(self, c) -> "Poly":
        """Return ``p(var + c)``."""
        c = as_rational(c)
        out = Poly((), self.var)
        step = Poly([c, 1], self.var)
        for a in reversed(self.coeffs):
            out = out * step + a
        return out

    def reflect(self, rho, sign: int = -1) -> "Poly":
        """Return ``p(rho + sign*var)``."""
        lin = Poly([as_rational(rho), sign], self.var)
        out = Poly((), self.var)
        for a in reversed(self.coeffs):
            out = out * lin + a
        return out

    def with_var(self, var: str) -> "Poly":
        return Poly(self.coeffs, var)

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs) + 1
        if dq <= 0:
            return Poly((), self.var), Poly(rem, self.var)
        quo = [Fraction(0)] * dq
        lead = other.leading
        for k in range(dq - 1, -1, -1):
            q = rem[k + len(other.coeffs) - 1] / lead
            quo[k] = q
            if q:
                for i, b in enumerate(other.coeffs):
                    rem[k + i] -= q * b
        return Poly(quo, self.var), Poly(rem[: len(other.coeffs) - 1], self.var)

    def __floordiv__(self, other: "Poly") -> "Poly":
        return self.divmod(other)[0]

    def __mod__(self, other: "Poly") -> "Poly":
        return self.divmod(other)[1]

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        return self * (1 / self.leading)

    def rational_roots(self) -> tuple[list[tuple[Fraction, int]], "Poly"]:
        """Rational roots with multiplicities and the remaining cofactor.

        Candidates come from the rational root theorem applied to the
        primitive integer form; each root is divided out repeatedly.
        """
        if self.is_zero():
            raise ValueError("the zero polynomial has no finite root set")
        p = self.monic()
        roots: list[tuple[Fraction, int]] = []
        k = p.valuation()
        if k:
            roots.append((Fraction(0), k))
            p = Poly(p.coeffs[k:], self.var)
        if p.degree >= 1:
            den = math.lcm(*(c.denominator for c in p.coeffs))
            ints = [int(c * den) for c in p.coeffs]
            for r in _root_candidates(ints[0], ints[-1]):
                m = 0
                while p.degree >= 1 and p(r) == 0:
                    p = p // Poly([-r, 1], self.var)
                    m += 1
                if m:
                    roots.append((r, m))
        roots.sort()
        return roots, p

    def __repr__(self) -> str:
        return f"Poly({self})"

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mag = abs(c)
            if k == 0:
                body = str(mag)
            else:
                mono = self.var if k == 1 else f"{self.var}^{k}"
                body = mono if mag == 1 else f"{mag}*{mono}"
            if not parts:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append(("-" if c < 0 else "+") + body)
        return "".join(parts)


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def _root_candidates(a0: int, an: int) -> list[Fraction]:
    cands = set()
    for p in _divisors(a0):
        for q in _divisors(an):
            cands.add(Fraction(p, q))
            cands.add(Fraction(-p, q))
    return sorted(cands)


def falling_factorial_poly(k: int, var: str = "z") -> Poly:
    """``var*(var-1)*...*(var-k+1)``."""
    out = Poly([1], var)
    for i in range(k):
        out = out * Poly([-i, 1], var)
    return out


# ---------------------------------------------------------------- base points


@dataclass(frozen=True)
class Finite:
    rho: Fraction

    def __post_init__(self):
        object.__setattr__(self, "rho", as_rational(self.rho))

    def __str__(self) -> str:
        return str(self.rho)


class _Infinity:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INFINITY"

    def __str__(self) -> str:
        return "inf"

    def __reduce__(self):
        return (_Infinity, ())


INFINITY = _Infinity()
Point = Finite | _Infinity


def as_point(value: Any) -> Point:
    if isinstance(value, (Finite, _Infinity)):
        return value
    if isinstance(value, str) and value.strip().lower() in ("inf", "infinity", "oo"):
        return INFINITY
    return Finite(as_rational(value))


# ---------------------------------------------------------------- log-series

Key = tuple[Fraction, int]


class _SeriesBase:
    """Shared sparse-monomial algebra; subclasses fix the coefficient type."""

    __slots__ = ("point", "order", "terms", "var", "_mono")

    @staticmethod
    def _coerce(c):
        return as_rational(c)

    def __init__(
        self,
        point: Point,
        order,
        terms: Mapping[tuple, Sequence] | None = None,
        var: str = "z",
    ):
        self.point = as_point(point)
        self.order = as_rational(order)
        self.var = var
        rows: dict[Key, tuple] = {}
        mono: dict[Key, Any] = {}
        for (alpha, j), vec in (terms or {}).items():
            alpha = as_rational(alpha)
            j = int(j)
            if j < 0:
                raise ValueError("log degree must be non-negative")
            n_known = max(0, math.ceil(self.order - alpha))
            vec = tuple(self._coerce(c) for c in list(vec)[:n_known])
            rows[(alpha, j)] = vec
            for n, c in enumerate(vec):
                if c != 0:
                    key = (alpha + n, j)
                    mono[key] = mono.get(key, 0) + c
        self.terms = rows
        self._mono = {k: c for k, c in mono.items() if c != 0}

    @classmethod
    def from_monomials(cls, point: Point, order, mono: Mapping[Key, Any], var: str = "z"):
        order = as_rational(order)
        clean = {}
        for (e, j), c in mono.items():
            e = as_rational(e)
            if e < order and c != 0:
                clean[(e, int(j))] = clean.get((e, int(j)), 0) + cls._coerce(c)
        clean = {k: c for k, c in clean.items() if c != 0}
        out = cls.__new__(cls)
        out.point = as_point(point)
        out.order = order
        out.var = var
        out._mono = clean
        out.terms = _canonical_rows(clean, order)
        return out

    def _like(self, order, mono, point=None, var=None):
        return type(self).from_monomials(
            self.point if point is None else point,
            order,
            mono,
            self.var if var is None else var,
        )

    def monomials(self) -> dict[Key, Any]:
        return dict(self._mono)

    def coefficient(self, e, j: int = 0):
        e = as_rational(e)
        if e >= self.order:
            raise ValueError(f"coefficient at {e} lies beyond the truncation order {self.order}")
        return self._mono.get((e, j), self._coerce(0))

    def normalize(self):
        return self._like(self.order, self._mono)

    @property
    def is_finite_point(self) -> bool:
        return isinstance(self.point, Finite)

    def is_zero(self) -> bool:
        return not self._mono

    def max_log_degree(self) -> int:
        return max((j for _, j in self._mono), default=0)

    def valuation(self):
        """Smallest label with a nonzero coefficient (``order`` if none)."""
        return min((e for e, _ in self._mono), default=self.order)

    def exponent_classes(self) -> list[Fraction]:
        return sorted({frac_part(e) for e, _ in self._mono})

    def truncate(self, order):
        order = min(as_rational(order), self.order)
        return self._like(order, self._mono)

    def _check_compatible(self, other):
        if not isinstance(other, _SeriesBase):
            raise TypeError("series can only be combined with series")
        if self.point != other.point:
            raise ValueError(f"series based at {self.point} and {other.point} cannot be combined")

    def __add__(self, other):
        self._check_compatible(other)
        mono = dict(self._mono)
        for k, c in other._mono.items():
            mono[k] = mono.get(k, 0) + c
        return self._like(min(self.order, other.order), mono)

    def __neg__(self):
        return self._like(self.order, {k: -c for k, c in self._mono.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = self._coerce(c)
        return self._like(self.order, {k: c * v for k, v in self._mono.items()})

    def __mul__(self, other):
        if not isinstance(other, _SeriesBase):
            return self.scale(other)
        self._check_compatible(other)
        bump = 0 if self.is_finite_point else 1
        mono: dict[Key, Any] = {}
        for (e1, j1), c1 in self._mono.items():
            for (e2, j2), c2 in other._mono.items():
                key = (e1 + e2 + bump, j1 + j2)
                mono[key] = mono.get(key, 0) + c1 * c2
        order = min(self.valuation() + other.order, other.valuation() + self.order) + bump
        return self._like(order, mono)

    def __rmul__(self, other):
        return self.scale(other)

    def shift_labels(self, k):
        """Multiply every monomial label by adding ``k`` (exact index shift)."""
        k = as_rational(k)
        return self._like(self.order + k, {(e + k, j): c for (e, j), c in self._mono.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, _SeriesBase):
            return NotImplemented
        return self.point == other.point and self.order == other.order and self._mono == other._mono

    def agrees_with(self, other, order=None) -> bool:
        """Equality of all coefficients below ``order`` (default: common precision)."""
        self._check_compatible(other)
        bound = min(self.order, other.order) if order is None else as_rational(order)
        keys = {k for k in self._mono if k[0] < bound} | {k for k in other._mono if k[0] < bound}
        return all(self._mono.get(k, 0) == other._mono.get(k, 0) for k in keys)

    __hash__ = None  # mutable-looking container semantics; compare by value

    def lowest_term(self) -> tuple[Key, Any] | None:
        """Dominant monomial: smallest label, then highest log degree."""
        if not self._mono:
            return None
        key = min(self._mono, key=lambda k: (k[0], -k[1]))
        return key, self._mono[key]

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.point}, order={self.order}, {self})"

    def __str__(self) -> str:
        if not self._mono:
            return "0"
        parts = []
        for (e, j) in sorted(self._mono, key=lambda k: (k[0], -k[1])):
            parts.append(f"{self._mono[(e, j)]}*{self.monomial_str(e, j)}")
        return " + ".join(parts) + f" + O[{self.order}]"

    def monomial_str(self, e, j: int) -> str:
        v = self.var
        if isinstance(self.point, Finite):
            r = self.point.rho
            inner = v if r == 0 else f"{v}-{r}" if r > 0 else f"{v}+{-r}"
            out = f"{v if r == 0 else f'({inner})'}^{e}"
            if j:
                out += f"*log({inner})^{j}"
        else:
            out = f"{v}^{-e - 1}"
            if j:
                out += f"*log(1/{v})^{j}"
        return out


def _canonical_rows(mono: Mapping[Key, Any], order: Fraction) -> dict[Key, tuple]:
    classes: dict[Fraction, Fraction] = {}
    for e, _ in mono:
        f = frac_part(e)
        classes[f] = min(classes.get(f, e), e)
    rows: dict[Key, tuple] = {}
    for (e, j) in sorted(mono):
        alpha = classes[frac_part(e)]
        if (alpha, j) in rows:
            continue
        n_known = max(0, math.ceil(order - alpha))
        rows[(alpha, j)] = tuple(mono.get((alpha + n, j), 0) for n in range(n_known))
    return dict(sorted(rows.items()))


class LogSeries(_SeriesBase):
    """Truncated Nilsson-type expansion with exact rational coefficients."""

    __slots__ = ()


@dataclass(frozen=True, eq=False)
class ExpLogSeries:
    """``exp(rho*x) * body`` with ``body`` a log-series at infinity in ``x``."""

    rho: Fraction
    body: _SeriesBase

    def __post_init__(self):
        object.__setattr__(self, "rho", as_rational(self.rho))
        if self.body.point is not INFINITY:
            raise ValueError("the body of an exponential log-series must be based at infinity")

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExpLogSeries):
            return NotImplemented
        return self.rho == other.rho and self.body == other.body

    __hash__ = None

    def __add__(self, other: "ExpLogSeries") -> "ExpLogSeries":
        if self.rho != other.rho:
            raise ValueError("different exponential factors")
        return ExpLogSeries(self.rho, self.body + other.body)

    def __neg__(self) -> "ExpLogSeries":
        return ExpLogSeries(self.rho, -self.body)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "ExpLogSeries":
        return ExpLogSeries(self.rho, self.body.scale(c))

    def is_zero(self) -> bool:
        return self.body.is_zero()

    def __str__(self) -> str:
        if self.rho == 0:
            return str(self.body)
        return f"exp({self.rho}*{self.body.var})*({self.body})"

    def __repr__(self) -> str:
        return f"ExpLogSeries(rho={self.rho}, {self.body!r})"


def normalize(f: _SeriesBase) -> _SeriesBase:
    """Merge rows of the same exponent class and drop zero rows."""
    return f.normalize()


def power_series(coeffs: Sequence, point: Point | Any = Finite(0), var: str = "z", order=None) -> LogSeries:
    """A plain power series ``sum c_n u**n`` known through ``len(coeffs)`` terms."""
    order = len(coeffs) if order is None else order
    return LogSeries(point, order, {(Fraction(0), 0): list(coeffs)}, var)


def as_power_series(f: _SeriesBase) -> list:
    """Coefficient list of a plain power series; raises MixedTermsError otherwise."""
    for (e, j) in f._mono:
        if j != 0 or not is_integer(e) or e < 0:
            raise MixedTermsError(f"monomial {f.monomial_str(e, j)} is not a plain power term")
    if not isinstance(f.point, Finite):
        raise MixedTermsError("plain power series must be based at a finite point")
    n = max(0, math.ceil(f.order))
    return [f._mono.get((Fraction(k), 0), f._coerce(0)) for k in range(n)]


def hadamard_star(a: _SeriesBase, b: _SeriesBase) -> _SeriesBase:
    """Coefficientwise product of two plain power series."""
    ca, cb = as_power_series(a), as_power_series(b)
    n = min(len(ca), len(cb))
    return power_series([ca[k] * cb[k] for k in range(n)], a.point, a.var, order=min(a.order, b.order))


# ---------------------------------------------------------------- Gamma ratio jets


def pochhammer_ratio_jet(alpha, order: int) -> list[Fraction]:
    """Derivatives ``0..order`` of ``Gamma(1-{y})/Gamma(-y)`` at ``y = alpha``.

    On the half-open interval ``[n, n+1)`` with ``n = floor(alpha)`` the ratio
    is the rational function ``(-y)_{n+1}`` (``n >= 0``) or
    ``1/(-y+n+1)_{-n-1}`` (``n <= -1``).  Using ``n = floor(alpha)`` at an
    integer picks the branch to the right of ``alpha``.
    """
    if order < 0:
        raise ValueError("order must be non-negative")
    alpha = as_rational(alpha)
    n = math.floor(alpha)
    m = order + 1
    # Taylor coefficients in h = y - alpha
    if n >= 0:
        coeffs: list = [Fraction(1)]
        for k in range(n + 1):
            coeffs = series_mul(coeffs, [k - alpha, Fraction(-1)], m)
    else:
        den: list = [Fraction(1)]
        for k in range(-n - 1):
            den = series_mul(den, [n + 1 + k - alpha, Fraction(-1)], m)
        coeffs = series_inv(den, m)
    coeffs = list(coeffs) + [Fraction(0)] * (m - len(coeffs))
    return [Fraction(coeffs[i]) * math.factorial(i) for i in range(m)]


def lowest_coefficient_sign(f: _SeriesBase) -> int:
    lt = f.lowest_term()
    if lt is None:
        return 0
    c = lt[1]
    return 1 if c > 0 else -1


def map_coefficients(f: _SeriesBase, fn: Callable, cls=None):
    cls = cls or type(f)
    return cls.from_monomials(f.point, f.order, {k: fn(c) for k, c in f._mono.items()}, f.var)
