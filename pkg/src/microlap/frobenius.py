"""Local solution bases at regular singular points and microsolution bases.

Solutions are found by exact kernel computations on a truncated space of
Nilsson monomials: for each class of indicial roots modulo the integers we
solve for the unknown coefficients of ``u^(alpha+n) * log(u)^j``.  The
kernel is echelonized with a fixed column priority so that bases are
deterministic and the holomorphic (or polynomial, at infinity) solutions
are spanned by a subset of the basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    DimensionMismatch,
    IrrationalExponent,
    NotRegularSingular,
    PreconditionError,
    TruncationExhausted,
)
from .exact import (
    INFINITY,
    Finite,
    LogSeries,
    Point,
    Poly,
    as_point,
    falling_factorial_poly,
    frac_part,
    is_integer,
)
from .linalg import kernel_rref
from .weyl import DiffOp, apply, apply_monomials, finite_singularities, mn_bounds

MAX_RETRIES = 4
MAX_N_ESCALATION = 3


@dataclass(frozen=True, eq=False)
class LogSolution:
    """One solution ``u^t * sum_k' g_{k-k'} * log(u)^k' / k'!`` (``u = z - rho`` or ``1/z``)."""

    point: Point
    exponent: Fraction
    ladder: tuple[tuple[Fraction, ...], ...]
    series: LogSeries
    index: tuple[int, int]
    image: Poly | None = None

    @property
    def log_degree(self) -> int:
        return self.index[1]

    def is_trivial(self) -> bool:
        """Holomorphic at a finite point, polynomial at infinity."""
        return _is_trivial_series(self.series)


@dataclass(frozen=True, eq=False)
class MicroBasis:
    rho: Fraction
    entries: tuple[LogSolution, ...]
    holomorphic: tuple[LogSolution, ...]
    operator: DiffOp
    n_bound: int

    @property
    def dimension(self) -> int:
        return len(self.entries)

    @property
    def local_basis(self) -> tuple[LogSolution, ...]:
        return self.entries + self.holomorphic


@dataclass(frozen=True, eq=False)
class SInftyBasis:
    entries: tuple[LogSolution, ...]
    polynomial: tuple[LogSolution, ...]
    operator: DiffOp
    n_bound: int

    @property
    def dimension(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, i):
        return self.entries[i]


# ---------------------------------------------------------------- local data


def _trivial_monomial(point: Point, e: Fraction, j: int) -> bool:
    if j:
        return False
    if isinstance(point, Finite):
        return is_integer(e) and e >= 0
    return is_integer(e) and e <= -1


def _is_trivial_series(f: LogSeries) -> bool:
    return all(_trivial_monomial(f.point, e, j) for (e, j) in f.monomials())


@dataclass(frozen=True)
class LocalData:
    shift: int
    indicial: Poly
    roots: tuple[tuple[Fraction, int], ...]


def local_data(a: DiffOp, point) -> LocalData:
    """Label shift of the operator and its indicial polynomial at ``point``.

    Applying ``a`` to the monomial with label ``e`` gives
    ``indicial(e)`` times the monomial with label ``e + shift`` plus
    monomials of larger labels.
    """
    point = as_point(point)
    if a.is_zero():
        raise PreconditionError("the zero operator has no local data")
    mu = a.order
    ind = Poly((), "t")
    if isinstance(point, Finite):
        b = [c.shift(point.rho) for c in a.coeffs]
        s = min(int(bi.valuation()) - i for i, bi in enumerate(b) if not bi.is_zero())
        if int(b[mu].valuation()) - mu != s:
            raise NotRegularSingular(f"{a} is not regular singular at {point.rho}")
        for i, bi in enumerate(b):
            ind = ind + falling_factorial_poly(i, "t") * bi[s + i]
        shift = s
    else:
        s = max(int(c.degree) - i for i, c in enumerate(a.coeffs) if not c.is_zero())
        if int(a.leading.degree) - mu != s:
            raise NotRegularSingular(f"{a} is not regular singular at infinity")
        for i, c in enumerate(a.coeffs):
            if s + i >= 0 and c[s + i]:
                ind = ind + falling_factorial_poly(i, "t").reflect(-1, -1) * c[s + i]
        shift = -s
    roots, rest = ind.rational_roots()
    if rest.degree >= 1:
        raise IrrationalExponent(f"indicial polynomial {ind} has the non-rational factor {rest.monic()}")
    return LocalData(shift, ind, tuple(roots))


def _column_key(point: Point):
    def key(col):
        e, j = col
        return (_trivial_monomial(point, e, j), -j, e)

    return key


def _solve_class(a: DiffOp, point: Point, shift: int, alpha: Fraction, gap: int, mult: int, trunc: int):
    k_work = trunc + gap + a.order + 16
    for _attempt in range(MAX_RETRIES + 1):
        unknowns = [(alpha + n, j) for j in range(mult) for n in range(k_work)]
        bound = alpha + shift + k_work
        rows: dict = {}
        for u in unknowns:
            img, _ = apply_monomials(a, point, {u: Fraction(1)}, u[0] + k_work + 1)
            for key, c in img.items():
                if key[0] < bound:
                    rows.setdefault(key, {})[u] = c
        columns = sorted(unknowns, key=_column_key(point))
        kernel = kernel_rref(list(rows.values()), columns)
        if len(kernel) == mult:
            return kernel, columns
        k_work *= 2
    raise TruncationExhausted(
        f"kernel dimension stayed at {len(kernel)} instead of {mult} at {point}"
    )


def _to_solution(vec: dict, point: Point, order: Fraction, index: tuple[int, int]) -> LogSolution:
    series = LogSeries.from_monomials(point, order, vec)
    t = series.valuation()
    k = series.max_log_degree()
    n_known = max(0, math.ceil(order - t))
    mono = series.monomials()
    ladder = []
    for m in range(k + 1):
        kp = k - m
        ladder.append(tuple(math.factorial(kp) * mono.get((t + n, kp), Fraction(0)) for n in range(n_known)))
    return LogSolution(point, t, tuple(ladder), series, (index[0], k))


def local_solution_basis(a: DiffOp, point, trunc: int = 32) -> list[LogSolution]:
    """Basis of the local solutions of ``a`` at ``point``, truncated ``trunc`` terms past each class start."""
    point = as_point(point)
    data = local_data(a, point)
    classes: dict[Fraction, list[tuple[Fraction, int]]] = {}
    for r, m in data.roots:
        classes.setdefault(frac_part(r), []).append((r, m))
    out: list[tuple] = []
    for f in sorted(classes):
        roots = classes[f]
        alpha = min(r for r, _ in roots)
        gap = int(max(r for r, _ in roots) - alpha)
        mult = sum(m for _, m in roots)
        kernel, columns = _solve_class(a, point, data.shift, alpha, gap, mult, trunc)
        pos = {c: i for i, c in enumerate(columns)}
        for vec in kernel:
            pivot = min(vec, key=pos.__getitem__)
            out.append((f, vec, pos[pivot], alpha))
    sols = []
    for f, vec, piv, alpha in out:
        sols.append((f, max(j for _, j in vec), piv, vec, alpha))
    sols.sort(key=lambda s: (s[0], s[1], s[2]))
    result = []
    counter: dict[Fraction, int] = {}
    for f, _k, _piv, vec, alpha in sols:
        j = counter.get(f, 0)
        counter[f] = j + 1
        result.append(_to_solution(vec, point, alpha + trunc, (j, 0)))
    if len(result) != a.order:
        raise DimensionMismatch(f"found {len(result)} local solutions for an operator of order {a.order}")
    return result


def lifted_operator(d: DiffOp, n_bound: int) -> DiffOp:
    """``Dz^N o d``."""
    return DiffOp.derivation(d.var) ** n_bound * d


def microsolution_basis(d: DiffOp, rho, trunc: int = 32) -> MicroBasis:
    """Non-holomorphic local solutions of ``Dz^N o d`` at a finite singularity."""
    rho = Fraction(rho)
    census = finite_singularities(d)
    m_rho = census.multiplicity(rho)
    if m_rho == 0:
        raise PreconditionError(f"{rho} is not a singularity of {d}")
    _m, n = mn_bounds(d)
    a = lifted_operator(d, n)
    basis = local_solution_basis(a, Finite(rho), trunc)
    micro = tuple(s for s in basis if not s.is_trivial())
    holo = tuple(s for s in basis if s.is_trivial())
    if len(micro) != m_rho:
        raise DimensionMismatch(f"{len(micro)} microsolutions at {rho}, expected multiplicity {m_rho}")
    return MicroBasis(rho, micro, holo, a, n)


def _image_polynomial(d: DiffOp, f: LogSeries, n_bound: int) -> Poly:
    img = apply(d, f)
    coeffs = [Fraction(0)] * max(n_bound, 0)
    for (e, j), c in img.monomials().items():
        power = -e - 1
        if j == 0 and is_integer(e) and 0 <= power < n_bound:
            coeffs[int(power)] = c
        else:
            raise DimensionMismatch(f"image of a class at infinity has the stray term {img.monomial_str(e, j)}")
    return Poly(coeffs, d.var)


def sinfty_basis(d: DiffOp, trunc: int = 32) -> SInftyBasis:
    """Basis of ``{f : d f in C[z]_{<N}}`` modulo polynomials, from expansions at infinity."""
    _m, n = mn_bounds(d)
    delta = d.degree
    for _ in range(MAX_N_ESCALATION + 1):
        a = lifted_operator(d, n)
        basis = local_solution_basis(a, INFINITY, trunc)
        classes = [s for s in basis if not s.is_trivial()]
        polys = tuple(s for s in basis if s.is_trivial())
        if len(classes) == delta:
            break
        n += 1
    else:
        raise DimensionMismatch(f"S_inf quotient has dimension {len(classes)}, expected {delta}")
    classes.sort(key=lambda s: (-s.log_degree, frac_part(s.exponent), s.exponent))
    entries = []
    for idx, s in enumerate(classes):
        img = _image_polynomial(d, s.series, n)
        entries.append(LogSolution(s.point, s.exponent, s.ladder, s.series, (idx, s.log_degree), img))
    return SInftyBasis(tuple(entries), polys, a, n)


def local_exponents(d: DiffOp, point) -> list[Fraction]:
    """Local exponents with multiplicity; at infinity in the variable ``1/z``."""
    point = as_point(point)
    data = local_data(d, point)
    exps = []
    for r, m in data.roots:
        exps.extend([r if isinstance(point, Finite) else r + 1] * m)
    return exps


def fuchs_exponent_sum(d: DiffOp, trunc: int = 8) -> Fraction:
    """Sum of ``t`` over local basis solutions at every finite singularity and at infinity."""
    total = Fraction(0)
    for rho in finite_singularities(d).rhos:
        total += sum((s.exponent for s in local_solution_basis(d, Finite(rho), trunc)), Fraction(0))
    total += sum((s.exponent + 1 for s in local_solution_basis(d, INFINITY, trunc)), Fraction(0))
    return total


def residual(a: DiffOp, sol: LogSolution | LogSeries) -> LogSeries:
    f = sol.series if isinstance(sol, LogSolution) else sol
    return apply(a, f)
