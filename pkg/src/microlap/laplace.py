"""Rational inverse Laplace transforms of log-series and the E-operator bases.

``lseul`` sends ``z^alpha log(z)^j`` to
``sum_k C(j,k) * r^(j-k)(alpha) * x^(-alpha-1) * log(1/x)^k`` where ``r`` is
the rational function ``Gamma(1-{y})/Gamma(-y)`` (see
:func:`microlap.exact.pochhammer_ratio_jet`).  Everything here is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .exact import (
    INFINITY,
    ExpLogSeries,
    Finite,
    LogSeries,
    as_power_series,
    as_rational,
    binomial,
    hadamard_star,
    is_integer,
    lowest_coefficient_sign,
    pochhammer_ratio_jet,
    power_series,
)
from .frobenius import LogSolution, microsolution_basis, sinfty_basis
from .weyl import DiffOp, apply, finite_singularities, fourier_laplace


@lru_cache(maxsize=4096)
def _jet(alpha: Fraction, order: int) -> tuple[Fraction, ...]:
    return tuple(pochhammer_ratio_jet(alpha, order))


def _lseul_terms(alpha: Fraction, j: int) -> dict[int, Fraction]:
    """``{k: coefficient of x^(-alpha-1) log(1/x)^k}`` for ``z^alpha log(z)^j``."""
    jets = _jet(alpha, j)
    return {k: binomial(j, k) * jets[j - k] for k in range(j + 1) if jets[j - k]}


def lseul_monomial(alpha, j: int, trunc: int = 1, var: str = "x") -> LogSeries:
    """Image of ``z^alpha log(z)^j``, as a series at infinity known ``trunc`` labels past ``alpha``."""
    alpha = as_rational(alpha)
    mono = {(alpha, k): c for k, c in _lseul_terms(alpha, j).items()}
    return LogSeries.from_monomials(INFINITY, alpha + trunc, mono, var)


def _lseul_series(f: LogSeries, var: str) -> LogSeries:
    mono: dict = {}
    for (e, j), c in f.monomials().items():
        for k, v in _lseul_terms(e, j).items():
            mono[(e, k)] = mono.get((e, k), 0) + c * v
    return LogSeries.from_monomials(INFINITY, f.order, mono, var)


def lseul_preimage(alpha, k: int) -> LogSeries:
    """A combination of ``z^alpha log(z)^i`` whose image is exactly ``x^(-alpha-1) log(1/x)^k``.

    For ``alpha`` a non-negative integer the image of ``log^i`` has degree
    ``i - 1``, so one extra power of the logarithm is used.
    """
    alpha = as_rational(alpha)
    drop = 1 if is_integer(alpha) and alpha >= 0 else 0
    top = k + drop
    images = {i: _lseul_terms(alpha, i) for i in range(top + 1)}
    target = {k: Fraction(1)}
    coeffs: dict[int, Fraction] = {}
    for i in range(top, drop - 1, -1):
        lead = images[i].get(i - drop, Fraction(0))
        c = target.get(i - drop, Fraction(0)) / lead
        if c:
            coeffs[i] = c
            for m, v in images[i].items():
                target[m] = target.get(m, Fraction(0)) - c * v
    if any(target.values()):
        raise AssertionError("triangular preimage solve left a remainder")
    mono = {(alpha, i): c for i, c in coeffs.items()}
    return LogSeries.from_monomials(Finite(0), alpha + 1, mono)


def lrho_transform(f: LogSeries, var: str = "x") -> ExpLogSeries:
    """Term-by-term transform of a series at a finite point ``rho``: ``exp(rho x) * L_0(f(z+rho))``."""
    if not isinstance(f.point, Finite):
        raise ValueError("lrho_transform expects a series at a finite point")
    return ExpLogSeries(f.point.rho, _lseul_series(f, var))


def y_alpha_i_series(alpha, i: int, trunc: int) -> LogSeries:
    """Coefficients ``(1/i!) d^i/dy^i [Gamma(1-{y})/Gamma(-y-n)]`` at ``y = alpha`` for ``n < trunc``."""
    alpha = as_rational(alpha)
    fact = math.factorial(i)
    # Gamma(1-{y})/Gamma(-y-n) is the ratio evaluated at y + n
    coeffs = [_jet(alpha + n, i)[i] / fact for n in range(trunc)]
    return power_series(coeffs)


def _class_rows(f: LogSeries) -> dict[Fraction, dict[int, list]]:
    """Split ``f`` into ``{alpha: {j: power series h_j}}`` with ``f = sum u^alpha h_j log^j``."""
    out: dict[Fraction, dict[int, list]] = {}
    norm = f.normalize()
    for (alpha, j), vec in norm.terms.items():
        out.setdefault(alpha, {})[j] = list(vec)
    return out


def lrho_transform_hadamard(f: LogSeries, var: str = "x") -> ExpLogSeries:
    """Same transform computed through Hadamard products with the ``y_{alpha,i}`` series."""
    if not isinstance(f.point, Finite):
        raise ValueError("lrho_transform_hadamard expects a series at a finite point")
    mono: dict = {}
    for alpha, rows in _class_rows(f).items():
        n = max(len(v) for v in rows.values())
        for j, h in rows.items():
            hs = power_series(h + [0] * (n - len(h)))
            for k in range(j + 1):
                y = y_alpha_i_series(alpha, j - k, n)
                prod = as_power_series(hadamard_star(y, hs))
                scale = Fraction(math.factorial(j), math.factorial(k))
                for m, c in enumerate(prod):
                    if c:
                        key = (alpha + m, k)
                        mono[key] = mono.get(key, 0) + scale * c
    body = LogSeries.from_monomials(INFINITY, f.order, mono, var)
    return ExpLogSeries(f.point.rho, body)


def linf_transform(f: LogSeries, var: str = "x") -> LogSeries:
    """Term-by-term transform of a series at infinity, landing in log-series at 0."""
    if f.point is not INFINITY:
        raise ValueError("linf_transform expects a series at infinity")
    mono: dict = {}
    for (e, j), c in f.monomials().items():
        # z^(-e-1) log(1/z)^j = (-1)^j z^(-e-1) log(z)^j ; log(1/x)^k = (-1)^k log(x)^k
        for k, v in _lseul_terms(-e - 1, j).items():
            key = (e, k)
            mono[key] = mono.get(key, 0) + (-1) ** (j + k) * c * v
    return LogSeries.from_monomials(Finite(0), f.order, mono, var)


# ---------------------------------------------------------------- bases


@dataclass(frozen=True, eq=False)
class EInftyEntry:
    rho: Fraction
    exponent: Fraction
    log_degree: int
    components: tuple[LogSeries, ...]
    series: ExpLogSeries
    sign: int
    source: LogSolution


@dataclass(frozen=True, eq=False)
class EInftyBasis:
    entries: tuple[EInftyEntry, ...]
    delta: tuple[Fraction, ...]
    gamma_inf: tuple[tuple[Fraction, ...], ...]
    operator: DiffOp

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]


@dataclass(frozen=True, eq=False)
class EZeroBasis:
    entries: tuple[LogSeries, ...]
    signs: tuple[int, ...]
    gamma_zero: tuple[tuple[Fraction, ...], ...]
    operator: DiffOp
    sources: tuple[LogSolution, ...]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]


def ae_components(sol: LogSolution) -> list[LogSeries]:
    """``ae_i = sum_m y_{t,m} * g_{i-m}`` (Hadamard products) for ``i = 0..k``."""
    k = sol.log_degree
    n = len(sol.ladder[0]) if sol.ladder else 0
    ys = [y_alpha_i_series(sol.exponent, m, n) for m in range(k + 1)]
    out = []
    for i in range(k + 1):
        acc = power_series([0] * n)
        for m in range(i + 1):
            acc = acc + hadamard_star(ys[m], power_series(list(sol.ladder[i - m])))
        out.append(acc)
    return out


def _body_from_components(t: Fraction, comps: list[LogSeries], order, var: str) -> LogSeries:
    k = len(comps) - 1
    mono: dict = {}
    for kp in range(k + 1):
        coeffs = as_power_series(comps[k - kp])
        fk = math.factorial(kp)
        for n, c in enumerate(coeffs):
            if c:
                mono[(t + n, kp)] = Fraction(c) / fk
    return LogSeries.from_monomials(INFINITY, order, mono, var)


def _jordan_matrix(diag: list[Fraction], chain: list[bool]) -> tuple[tuple[Fraction, ...], ...]:
    n = len(diag)
    rows = []
    for i in range(n):
        row = [Fraction(0)] * n
        row[i] = diag[i]
        if i + 1 < n and chain[i]:
            row[i + 1] = Fraction(1)
        rows.append(tuple(row))
    return tuple(rows)


def einfty_basis(d: DiffOp, trunc: int = 32) -> EInftyBasis:
    """Formal solutions of the Fourier-Laplace transform at infinity, one per microsolution."""
    e_op = fourier_laplace(d)
    entries: list[EInftyEntry] = []
    for rho in finite_singularities(d).rhos:
        mb = microsolution_basis(d, rho, trunc)
        for hol in mb.holomorphic:
            if not lrho_transform(hol.series).is_zero():
                raise AssertionError("a holomorphic solution has a nonzero transform")
        for sol in mb.entries:
            comps = ae_components(sol)
            body = _body_from_components(sol.exponent, comps, sol.series.order, "x")
            direct = lrho_transform(sol.series)
            if direct.body != body:
                raise AssertionError("monomial and Hadamard routes disagree")
            if lrho_transform_hadamard(sol.series) != direct:
                raise AssertionError("Hadamard route over rows disagrees with the monomial route")
            sign = lowest_coefficient_sign(body)
            series = ExpLogSeries(rho, body.scale(sign))
            if not apply(e_op, series).is_zero():
                raise AssertionError("a basis element at infinity is not annihilated")
            entries.append(
                EInftyEntry(rho, sol.exponent, sol.log_degree, tuple(c.scale(sign) for c in comps), series, sign, sol)
            )
    diag = [e.exponent + 1 for e in entries]
    chain = [
        i + 1 < len(entries)
        and entries[i].rho == entries[i + 1].rho
        and (entries[i + 1].exponent - entries[i].exponent).denominator == 1
        and entries[i + 1].log_degree == entries[i].log_degree + 1
        for i in range(len(entries))
    ]
    delta_diag = tuple(e.rho for e in entries)
    if len(entries) != d.degree:
        raise AssertionError(f"{len(entries)} entries at infinity, expected {d.degree}")
    return EInftyBasis(tuple(entries), delta_diag, _jordan_matrix(diag, chain), e_op)


def ezero_basis(d: DiffOp, trunc: int = 32) -> EZeroBasis:
    """Images of the classes at infinity: a basis of formal solutions at 0 with rational coefficients."""
    e_op = fourier_laplace(d)
    sb = sinfty_basis(d, trunc)
    entries, signs = [], []
    for s in sb.entries:
        f = linf_transform(s.series)
        if f.is_zero():
            raise AssertionError("a class at infinity has a zero transform")
        sign = lowest_coefficient_sign(f)
        f = f.scale(sign)
        if not apply(e_op, f).is_zero():
            raise AssertionError("a basis element at 0 is not annihilated")
        entries.append(f)
        signs.append(sign)
    diag = [f.valuation() for f in entries]
    chain = [False] * len(entries)
    return EZeroBasis(tuple(entries), tuple(signs), _jordan_matrix(diag, chain), e_op, sb.entries)
