"""Numeric verification layer.

Taylor-stepping continuation of solutions of linear ODEs with polynomial
coefficients, Gauss-Legendre quadrature over the Laplace contours, Borel
summation along rays, and the numeric matrices of kappa, A_theta and the
Stokes change of basis.

Directions ``theta`` are either exact rational multiples of pi (``Fraction``,
``int`` or a token such as ``"1/2pi"``) or floats in radians.  The cut at a
finite point ``rho`` is the half-line ``rho - t*exp(-i*theta)``, and on the
cut plane ``-theta-pi < arg(z-rho) < -theta+pi``.
"""

from __future__ import annotations

import cmath
import math
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, Sequence

import numpy as np

from .config import Tolerances, get_profile
from .errors import (
    AntiStokesDirection,
    IllConditioned,
    PathTooCloseToSingularity,
    PreconditionError,
    StepLimitExceeded,
    TailBoundExceeded,
    UnsupportedSeries,
)
from .exact import INFINITY, ExpLogSeries, Finite, LogSeries, Poly, is_integer, power_series
from .frobenius import LogSolution, lifted_operator, local_solution_basis, microsolution_basis, sinfty_basis
from .gammanum import apply_T, evaluate
from .laplace import einfty_basis, ezero_basis, linf_transform, lrho_transform
from .weyl import DiffOp, apply, finite_singularities

TWO_PI_I = 2j * math.pi

# ---------------------------------------------------------------- directions


@dataclass(frozen=True)
class Direction:
    radians: float
    pi_multiple: Fraction | None = None  # exact theta/pi when known

    def __str__(self) -> str:
        if self.pi_multiple is not None:
            return f"{self.pi_multiple}pi"
        return repr(self.radians)


_PI_TOKEN = re.compile(r"^\s*([+-]?\d+(?:/\d+)?)?\s*\*?\s*pi\s*$", re.IGNORECASE)


def parse_direction(text: str) -> Direction:
    """``"1/2pi"``, ``"-3/4*pi"``, ``"pi"`` are exact; any other number is radians."""
    m = _PI_TOKEN.match(text)
    if m:
        coeff = m.group(1)
        q = Fraction(1) if coeff in (None, "+") else Fraction(-1) if coeff == "-" else Fraction(coeff)
        return Direction(float(q) * math.pi, q)
    try:
        value = float(text)
    except ValueError:
        raise PreconditionError(f"cannot read the direction {text!r}") from None
    if value == 0:
        return Direction(0.0, Fraction(0))
    return Direction(value)


def as_direction(theta: Any) -> Direction:
    if isinstance(theta, Direction):
        return theta
    if isinstance(theta, str):
        return parse_direction(theta)
    if isinstance(theta, (int, Fraction)) and not isinstance(theta, bool):
        q = Fraction(theta)
        return Direction(float(q) * math.pi, q)
    value = float(theta)
    return Direction(value, Fraction(0) if value == 0 else None)


def cut_arg(u: complex, theta: float) -> float:
    """Argument of ``u`` in ``(-theta-pi, -theta+pi]``."""
    return cmath.phase(complex(u) * cmath.exp(1j * theta)) - theta


def _same_direction_mod(angle_pi: Fraction | None, angle: float, theta: Direction, period_pi: int) -> bool:
    """Whether ``theta == angle`` modulo ``period_pi * pi``; exact when both are rational multiples of pi."""
    if angle_pi is not None and theta.pi_multiple is not None:
        return ((theta.pi_multiple - angle_pi) / period_pi).denominator == 1
    diff = (theta.radians - angle) / (period_pi * math.pi)
    return abs(diff - round(diff)) < 1e-12


def _arg_pi(value: complex) -> tuple[Fraction | None, float]:
    if value.imag == 0:
        return (Fraction(0) if value.real > 0 else Fraction(1)), (0.0 if value.real > 0 else math.pi)
    return None, cmath.phase(value)


def anti_stokes(d: DiffOp, theta) -> bool:
    """``theta == -arg(rho - rho')`` modulo pi for two distinct finite singularities."""
    theta = as_direction(theta)
    rhos = finite_singularities(d).rhos
    for a in rhos:
        for b in rhos:
            if a != b:
                q, ang = _arg_pi(complex(a - b))
                if _same_direction_mod(None if q is None else -q, -ang, theta, 1):
                    return True
    return False


def check_admissible(d: DiffOp, theta) -> Direction:
    theta = as_direction(theta)
    if anti_stokes(d, theta):
        raise AntiStokesDirection(f"theta = {theta} is an anti-Stokes direction of {d}")
    return theta


# ---------------------------------------------------------------- polynomial numerics


def _cpoly(p: Poly | None) -> list[complex]:
    if p is None:
        return []
    return [complex(c) for c in p.coeffs]


def _taylor_shift(a: Sequence[complex], c: complex) -> list[complex]:
    """Coefficients of ``p(c + h)`` from those of ``p``."""
    out = list(a)
    n = len(out)
    for i in range(n - 1):
        for k in range(n - 2, i - 1, -1):
            out[k] += c * out[k + 1]
    return out


@lru_cache(maxsize=256)
def _roots_of(p: Poly) -> tuple[complex, ...]:
    roots, rest = p.rational_roots()
    out = [complex(r) for r, _ in roots]
    if rest.degree >= 1:
        out.extend(complex(r) for r in np.roots([float(c) for c in reversed(rest.coeffs)]))
    return tuple(out)


def singular_points(a: DiffOp) -> tuple[complex, ...]:
    """Zeros of the leading coefficient."""
    return _roots_of(a.leading)


def _segment_distance(p: complex, a: complex, b: complex) -> float:
    ab = b - a
    if ab == 0:
        return abs(p - a)
    t = ((p - a) * ab.conjugate()).real / abs(ab) ** 2
    t = min(1.0, max(0.0, t))
    return abs(p - (a + t * ab))


# ---------------------------------------------------------------- paths


@dataclass(frozen=True)
class PathSpec:
    """Polyline for continuation, or a Laplace contour description.

    ``kind`` is ``"polyline"``, ``"gamma_rho"`` (keyhole around the cut at
    ``rho``) or ``"gamma_prime"`` (circle of radius ``radius`` around the
    origin with the two banks of the cut out to infinity).
    """

    waypoints: tuple[complex, ...] = ()
    kind: str = "polyline"
    theta: float = 0.0
    rho: Fraction | None = None
    radius: float | None = None

    @classmethod
    def polyline(cls, *points) -> "PathSpec":
        return cls(tuple(complex(p) for p in points))

    @classmethod
    def gamma_rho(cls, rho, theta, radius: float | None = None) -> "PathSpec":
        return cls((complex(Fraction(rho)),), "gamma_rho", as_direction(theta).radians, Fraction(rho), radius)

    @classmethod
    def gamma_prime(cls, theta, radius: float | None = None) -> "PathSpec":
        return cls((), "gamma_prime", as_direction(theta).radians, None, radius)

    def clearance(self, points: Sequence[complex]) -> float:
        best = math.inf
        for a, b in zip(self.waypoints, self.waypoints[1:]):
            for p in points:
                best = min(best, _segment_distance(p, a, b))
        return best


# ---------------------------------------------------------------- continuation


@dataclass
class _Patch:
    center: complex
    scale: complex  # z = center + scale * u
    coeffs: list[complex]  # Taylor coefficients in u

    def jet(self, z: complex, n: int) -> list[complex]:
        u = (z - self.center) / self.scale
        return _jet_from_coeffs(self.coeffs, self.scale, n, u)


def _jet_from_coeffs(F: Sequence[complex], s: complex, n: int, u: complex) -> list[complex]:
    out = []
    for i in range(n):
        acc = 0j
        for k in range(len(F) - 1, i - 1, -1):
            acc = acc * u + F[k] * math.perm(k, i)
        out.append(acc / s**i)
    return out


def _taylor_step(coeffs, rhs, jet, c: complex, s: complex, mu: int, cfg: Tolerances):
    P = []
    for i, p in enumerate(coeffs):
        q = _taylor_shift(p, c)
        P.append([q[m] * s ** (m + mu - i) for m in range(len(q))])
    R = [r * s ** (m + mu) for m, r in enumerate(_taylor_shift(rhs, c))] if rhs else []
    lead = P[mu][0]
    F = [jet[n] * s**n / math.factorial(n) for n in range(mu)]
    k = 0
    while True:
        acc = R[k] if k < len(R) else 0j
        for i in range(mu + 1):
            Pi = P[i]
            for m in range(min(len(Pi), k + 1)):
                if i == mu and m == 0:
                    continue
                if Pi[m]:
                    n = k - m + i
                    acc -= Pi[m] * F[n] * math.perm(n, i)
        F.append(acc / (lead * math.perm(k + mu, mu)))
        k += 1
        if len(F) >= 2 * mu + 12:
            scale = max(abs(v) for v in F) or 1.0
            tail = sum(abs(v) for v in F[-mu - 2 :])
            if tail <= cfg.taylor_tol * scale or len(F) >= cfg.taylor_max_order:
                return F, tail
    # unreachable


@dataclass
class Continuation:
    """Result of :func:`ode_continue`: endpoint jet, error estimate and dense output."""

    jet: list[complex]
    error: float
    patches: list[_Patch]
    order: int

    def jet_at(self, z: complex, n: int | None = None) -> list[complex]:
        n = self.order if n is None else n
        z = complex(z)
        best = min(self.patches, key=lambda p: abs((z - p.center) / p.scale))
        return best.jet(z, n)

    def value(self, z: complex) -> complex:
        return self.jet_at(z, 1)[0]

    def values(self, zs: Sequence[complex]) -> np.ndarray:
        if not self.patches:
            raise PreconditionError("empty continuation")
        centers = np.array([p.center for p in self.patches])
        scales = np.array([abs(p.scale) for p in self.patches])
        zs = np.asarray(zs, dtype=complex)
        which = np.argmin(np.abs(zs[:, None] - centers[None, :]) / scales[None, :], axis=1)
        out = np.empty(len(zs), dtype=complex)
        for k in np.unique(which):
            p = self.patches[k]
            idx = which == k
            u = (zs[idx] - p.center) / p.scale
            out[idx] = np.polynomial.polynomial.polyval(u, np.array(p.coeffs))
        return out


def _integrate_path(a: DiffOp, rhs, jet0, waypoints, cfg: Tolerances, fraction: float, max_step: float):
    mu = a.order
    sing = singular_points(a)
    coeffs = [_cpoly(c) for c in a.coeffs]
    r = _cpoly(rhs)
    jet = [complex(v) for v in jet0]
    z = complex(waypoints[0])
    patches: list[_Patch] = []
    err = 0.0
    steps = 0
    for target in waypoints[1:]:
        target = complex(target)
        while True:
            remaining = abs(target - z)
            if remaining <= 1e-14 * (1 + abs(target)):
                z = target
                break
            dist = min((abs(z - p) for p in sing), default=math.inf)
            if dist < cfg.min_clearance:
                raise PathTooCloseToSingularity(f"continuation reached {z} within {dist:.3g} of a singular point")
            h = min(fraction * dist, max_step, remaining)
            if remaining - h < 0.05 * h:
                h = remaining
            s = (target - z) / remaining * h
            F, tail = _taylor_step(coeffs, r, jet, z, s, mu, cfg)
            patches.append(_Patch(z, s, F))
            jet = _jet_from_coeffs(F, s, mu, 1.0)
            err += tail
            z = target if h == remaining else z + s
            steps += 1
            if steps > cfg.max_steps:
                raise StepLimitExceeded(f"more than {cfg.max_steps} continuation steps")
    return jet, err, patches


def ode_continue(
    a: DiffOp,
    rhs: Poly | None,
    jet0: Sequence[complex],
    path: PathSpec,
    config: Tolerances | None = None,
    estimate: bool = True,
) -> Continuation:
    """Continue the solution of ``a(f) = rhs`` with jet ``(f, f', ..., f^(mu-1))`` at the first waypoint.

    The error estimate compares against a second run with halved step
    bounds (when ``estimate``) and adds the truncated Taylor tails.
    """
    cfg = config or get_profile()
    if len(jet0) != a.order:
        raise PreconditionError(f"a jet of length {a.order} is needed, got {len(jet0)}")
    if len(path.waypoints) < 1:
        raise PreconditionError("the path has no waypoints")
    sing = singular_points(a)
    if len(path.waypoints) > 1 and path.clearance(sing) < cfg.min_clearance:
        raise PathTooCloseToSingularity("the path passes through a singular point")
    if len(path.waypoints) == 1:
        jet = [complex(v) for v in jet0]
        return Continuation(jet, 0.0, [_Patch(path.waypoints[0], 1.0, [jet[0]])], a.order)
    jet, tail, patches = _integrate_path(a, rhs, jet0, path.waypoints, cfg, cfg.step_fraction, cfg.max_step)
    err = tail
    if estimate:
        jet2, _, _ = _integrate_path(a, rhs, jet0, path.waypoints, cfg, cfg.step_fraction / 2, cfg.max_step / 2)
        err = max(err, max(abs(p - q) for p, q in zip(jet, jet2)))
    return Continuation(jet, err, patches, a.order)


# ---------------------------------------------------------------- series evaluation


class SeriesFunction:
    """Vectorized numeric evaluation of an exact log-series and its first derivatives."""

    def __init__(self, f, nder: int = 1):
        self.point = f.point
        self.rho = complex(f.point.rho) if isinstance(f.point, Finite) else None
        self.layers = []
        dz = DiffOp.derivation(f.var)
        g = f
        for k in range(nder):
            mono = g.monomials()
            keys = sorted(mono)
            self.layers.append(
                (
                    np.array([float(e) for e, _ in keys]),
                    np.array([j for _, j in keys]),
                    np.array([complex(mono[k_]) for k_ in keys]),
                )
            )
            if k + 1 < nder:
                g = apply(dz, g)

    def _log(self, z: complex, arg: float) -> complex:
        u = z - self.rho if self.rho is not None else z
        return complex(math.log(abs(u)), arg)

    def jet(self, z: complex, arg: float, n: int | None = None) -> list[complex]:
        lg = self._log(complex(z), arg)
        out = []
        for e, j, c in self.layers[: n or len(self.layers)]:
            if len(c) == 0:
                out.append(0j)
            elif self.rho is not None:
                out.append(complex(np.sum(c * np.exp(e * lg) * lg**j)))
            else:
                out.append(complex(np.sum(c * np.exp((-e - 1) * lg) * (-lg) ** j)))
        return out

    def value(self, z: complex, arg: float) -> complex:
        return self.jet(z, arg, 1)[0]


# ---------------------------------------------------------------- quadrature


@lru_cache(maxsize=16)
def _gauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(n)


def _panels(a: float, b: float, h_max: float, start: float) -> list[tuple[float, float]]:
    """Panels on ``[a, b]`` no longer than ``h_max``, graded geometrically away from ``start < a``."""
    out = []
    t = a
    while t < b - 1e-15 * max(1.0, abs(b)):
        h = min(h_max, max(0.5 * (t - start), 1e-9))
        nxt = min(b, t + h)
        out.append((t, nxt))
        t = nxt
    return out


def _gl_nodes(panels, n: int) -> tuple[np.ndarray, np.ndarray]:
    xg, wg = _gauss(n)
    ts, ws = [], []
    for lo, hi in panels:
        half = 0.5 * (hi - lo)
        ts.append(lo + half * (xg + 1))
        ws.append(half * wg)
    if not ts:
        return np.zeros(0), np.zeros(0)
    return np.concatenate(ts), np.concatenate(ws)


def _split(panels):
    out = []
    for lo, hi in panels:
        mid = 0.5 * (lo + hi)
        out.extend([(lo, mid), (mid, hi)])
    return out


@dataclass
class QuadResult:
    value: complex
    error: float
    tail: float
    diagnostics: dict = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class FunctionSpec:
    """A function given by an exact local expansion and an operator for continuation.

    ``operator`` (with ``rhs``) annihilates the function; ``None`` means the
    expansion is exact (finitely many terms) and is evaluated directly
    everywhere.
    """

    series: LogSeries
    operator: DiffOp | None = None
    rhs: Poly | None = None


def _decay(x: complex, direction: complex) -> float:
    """``-Re(x * direction)`` for a unit direction along which ``exp(x z)`` should decay."""
    return -(x * direction).real


class _BankEvaluator:
    """Values of a function along a ray ``rho + t*w`` with a fixed branch ``arg``."""

    def __init__(self, spec: FunctionSpec, sf: SeriesFunction, base: complex, w: complex, arg: float,
                 t_series: float, cfg: Tolerances):
        self.spec, self.sf, self.base, self.w, self.arg = spec, sf, base, w, arg
        self.t_series = t_series
        self.cfg = cfg
        self.cont: Continuation | None = None
        self.t_cont = t_series

    def extend(self, t_end: float) -> None:
        if self.spec.operator is None or t_end <= self.t_series:
            return
        if self.cont is not None and self.t_cont >= t_end:
            return
        a = self.spec.operator
        z0 = self.base + self.t_series * self.w
        jet = self.sf.jet(z0, self.arg, a.order)
        path = PathSpec.polyline(z0, self.base + t_end * self.w)
        self.cont = ode_continue(a, self.spec.rhs, jet, path, self.cfg, estimate=True)
        self.t_cont = t_end

    def values(self, ts: np.ndarray) -> np.ndarray:
        out = np.empty(len(ts), dtype=complex)
        near = ts <= self.t_series if self.spec.operator is not None else np.ones(len(ts), bool)
        for k in np.nonzero(near)[0]:
            out[k] = self.sf.value(self.base + ts[k] * self.w, self.arg)
        far = ~near
        if far.any():
            self.extend(float(ts[far].max()))
            out[far] = self.cont.values(self.base + ts[far] * self.w)
        return out

    @property
    def error(self) -> float:
        return self.cont.error if self.cont is not None else 0.0


def _ray_integral(bank: _BankEvaluator, x: complex, t0: float, cfg: Tolerances, phase: complex):
    """``int_{t0}^inf f(base + t w) exp(x (base + t w)) w dt`` with tail control."""
    kappa = _decay(x, bank.w)
    if kappa <= 0:
        raise PreconditionError("exp(x z) does not decay along the contour; x is outside the sector")
    h_max = min(2.0 / abs(x), 1.0)
    t_end = t0 + cfg.exp_cutoff / kappa
    for _attempt in range(5):
        bank.extend(t_end)
        panels = _panels(t0, t_end, h_max, start=0.0)

        def integrate(pnls):
            ts, ws = _gl_nodes(pnls, cfg.gauss_nodes)
            vals = bank.values(ts) * np.exp(x * (bank.base + ts * bank.w)) * bank.w * ws
            return complex(np.sum(vals)), float(np.sum(np.abs(vals)))

        val, mag = integrate(panels)
        fine, _ = integrate(_split(panels))
        end_val = abs(bank.values(np.array([t_end]))[0] * cmath.exp(x * (bank.base + t_end * bank.w)))
        tail = end_val / kappa
        if tail <= cfg.tail_tol * max(1.0, abs(val), mag * 1e-3):
            err = abs(fine - val) + 1e-15 * mag + bank.error * mag
            return fine * phase, err, tail
        t_end = t0 + 2 * (t_end - t0)
    raise TailBoundExceeded(f"tail {tail:.3g} did not drop below tolerance")


def _arc_integral(sf: SeriesFunction, center: complex, radius: float, phi0: float, phi1: float, x: complex,
                  cfg: Tolerances, arg_of: Callable[[float], float]):
    n_pan = max(16, int(abs(x) * radius) + 8)
    step = (phi1 - phi0) / n_pan
    panels = [(phi0 + k * step, phi0 + (k + 1) * step) for k in range(n_pan)]

    def integrate(pnls):
        ts, ws = _gl_nodes(pnls, cfg.gauss_nodes)
        zs = center + radius * np.exp(1j * ts)
        f = np.array([sf.value(z, arg_of(t)) for z, t in zip(zs, ts)])
        vals = f * np.exp(x * zs) * 1j * radius * np.exp(1j * ts) * ws
        return complex(np.sum(vals)), float(np.sum(np.abs(vals)))

    val, mag = integrate(panels)
    fine, _ = integrate(_split(panels))
    return fine, abs(fine - val) + 1e-15 * mag


def contour_laplace(spec: FunctionSpec, path: PathSpec | None, x: complex, config: Tolerances | None = None,
                    theta=None) -> QuadResult:
    """``(1/(2 pi i)) * integral of f(z) exp(x z) dz`` over a keyhole at ``rho`` or the large circle."""
    cfg = config or get_profile()
    x = complex(x)
    if path is None:
        th = as_direction(theta if theta is not None else cmath.phase(x)).radians
        path = PathSpec.gamma_rho(spec.series.point.rho, th) if isinstance(spec.series.point, Finite) \
            else PathSpec.gamma_prime(th)
    if path.kind == "gamma_rho":
        return _gamma_rho(spec, path, x, cfg)
    if path.kind == "gamma_prime":
        return _gamma_prime(spec, path, x, cfg)
    raise PreconditionError(f"unsupported contour kind {path.kind!r}")


def _other_singularities(spec: FunctionSpec, rho: complex) -> list[complex]:
    if spec.operator is None:
        return []
    return [p for p in singular_points(spec.operator) if abs(p - rho) > 1e-12]


def _gamma_rho(spec: FunctionSpec, path: PathSpec, x: complex, cfg: Tolerances) -> QuadResult:
    if not isinstance(spec.series.point, Finite) or spec.series.point.rho != path.rho:
        raise PreconditionError("the expansion must be at the point of the keyhole")
    theta = path.theta
    rho = complex(path.rho)
    others = _other_singularities(spec, rho)
    r_conv = min((abs(p - rho) for p in others), default=math.inf)
    eps = path.radius or min(r_conv / 4, 1.0 / abs(x), 1.0)
    t_series = min(r_conv / 2, max(4 * eps, 1.0)) if math.isfinite(r_conv) else math.inf
    w = cmath.exp(1j * (math.pi - theta))
    nder = spec.operator.order if spec.operator is not None else 1
    sf = SeriesFunction(spec.series, nder)
    arg_in, arg_out = -theta - math.pi, -theta + math.pi
    bank_in = _BankEvaluator(spec, sf, rho, w, arg_in, t_series, cfg)
    bank_out = _BankEvaluator(spec, sf, rho, w, arg_out, t_series, cfg)
    v_in, e_in, tail_in = _ray_integral(bank_in, x, eps, cfg, 1.0)
    v_out, e_out, tail_out = _ray_integral(bank_out, x, eps, cfg, 1.0)
    v_arc, e_arc = _arc_integral(sf, rho, eps, arg_in, arg_out, x, cfg, lambda t: t)
    total = (v_out - v_in + v_arc) / TWO_PI_I
    err = (e_in + e_out + e_arc) / (2 * math.pi)
    return QuadResult(total, err, (tail_in + tail_out) / (2 * math.pi),
                      {"radius": eps, "series_reach": t_series, "kind": "gamma_rho"})


def _gamma_prime(spec: FunctionSpec, path: PathSpec, x: complex, cfg: Tolerances) -> QuadResult:
    if spec.series.point is not INFINITY:
        raise PreconditionError("the large-circle contour needs an expansion at infinity")
    theta = path.theta
    sing = singular_points(spec.operator) if spec.operator is not None else ()
    R = path.radius or max(2.0 * max((abs(p) for p in sing), default=1.0), 1.0)
    w = cmath.exp(1j * (math.pi - theta))
    sf = SeriesFunction(spec.series, 1)
    lone = FunctionSpec(spec.series)  # the expansion converges on the whole contour
    arg_in, arg_out = -theta - math.pi, -theta + math.pi
    bank_in = _BankEvaluator(lone, sf, 0j, w, arg_in, math.inf, cfg)
    bank_out = _BankEvaluator(lone, sf, 0j, w, arg_out, math.inf, cfg)
    v_in, e_in, tail_in = _ray_integral(bank_in, x, R, cfg, 1.0)
    v_out, e_out, tail_out = _ray_integral(bank_out, x, R, cfg, 1.0)
    v_arc, e_arc = _arc_integral(sf, 0j, R, arg_in, arg_out, x, cfg, lambda t: t)
    total = (v_out - v_in + v_arc) / TWO_PI_I
    return QuadResult(total, (e_in + e_out + e_arc) / (2 * math.pi), (tail_in + tail_out) / (2 * math.pi),
                      {"radius": R, "kind": "gamma_prime"})


# ---------------------------------------------------------------- Borel summation


def borel_operator(d: DiffOp, rho) -> tuple[DiffOp, Poly]:
    """``d`` rewritten in ``zeta`` with ``z = rho - zeta``; annihilates the Borel transforms at ``rho``."""
    return d.substitute(Fraction(rho), -1, "ζ"), Poly((), "ζ")


def _borel_parts(ae: ExpLogSeries) -> tuple[dict[int, Any], list[Fraction], Fraction]:
    body = ae.body
    poly: dict[int, Any] = {}
    coeffs: dict[int, Any] = {}
    for (e, j), c in body.monomials().items():
        if j or not is_integer(e):
            raise UnsupportedSeries("Borel summation is implemented for integer exponents without logarithms")
        e = int(e)
        if e <= -1:
            poly[-e - 1] = c
        else:
            coeffs[e] = c
    n_known = max(0, math.ceil(body.order))
    g = [Fraction(coeffs.get(n, 0)) / math.factorial(n) for n in range(n_known)]
    return poly, g, body.order


def check_borel_ode(op: DiffOp, rhs: Poly | None, g: Sequence, count: int = 20) -> tuple[bool, int]:
    """Exact check that ``op(g) - rhs`` vanishes on the coefficients determined by ``g``."""
    series = power_series(list(g), var=op.var)
    img = apply(op, series)
    checked = min(count, max(0, math.ceil(img.order)))
    rhs = rhs or Poly((), op.var)
    for n in range(checked):
        if img.coefficient(n, 0) != rhs[n]:
            return False, checked
    return True, checked


def borel_admissible(op: DiffOp, theta) -> bool:
    """The ray ``arg(zeta) = -theta`` avoids the nonzero singular points of ``op``."""
    theta = as_direction(theta)
    roots, rest = op.leading.rational_roots()
    for r, _ in roots:
        if r != 0:
            q = Fraction(0) if r > 0 else Fraction(1)
            if _same_direction_mod(-q, -float(q) * math.pi, theta, 2):
                return False
    if rest.degree >= 1:
        for p in np.roots([float(c) for c in reversed(rest.coeffs)]):
            if abs(p) > 1e-12 and _same_direction_mod(None, -cmath.phase(p), theta, 2):
                return False
    return True


@dataclass
class BorelResult:
    value: complex
    error: float
    tail: float
    checked: int


class BorelSummer:
    """Borel sum of one formal series along ``arg(zeta) = -theta``, reusable for many ``x``."""

    def __init__(self, ae: ExpLogSeries, borel_ode: tuple[DiffOp, Poly | None] | None, theta,
                 config: Tolerances | None = None):
        self.cfg = config or get_profile()
        self.theta = as_direction(theta)
        self.rho = ae.rho
        self.poly, g, _ = _borel_parts(ae)
        self.g = g
        self.checked = 0
        self.cont: Continuation | None = None
        self.t_cont = 0.0
        if not any(g):
            self.g = []
            return
        if borel_ode is None:
            raise PreconditionError("a differential operator for the Borel transform is required")
        op, rhs = borel_ode
        ok, self.checked = check_borel_ode(op, rhs, g)
        if not ok:
            raise PreconditionError("the supplied operator does not annihilate the Borel transform")
        if not borel_admissible(op, self.theta):
            raise AntiStokesDirection(f"the Borel ray at {self.theta} meets a singular point")
        self.op, self.rhs = op, rhs
        nonzero = [p for p in singular_points(op) if abs(p) > 1e-12]
        radius = min((abs(p) for p in nonzero), default=math.inf)
        self.w = cmath.exp(-1j * self.theta.radians)
        self.gc = np.array([complex(c) for c in g])
        self.t0, self.series_err = self._series_radius(min(radius / 4, 0.5))

    def _series_radius(self, t_max: float) -> tuple[float, float]:
        """Largest ``t <= t_max`` where the last known coefficients are negligible, and the tail there."""
        mags = np.abs(self.gc)
        n = len(mags)
        scale = float(mags[: max(1, n // 4)].max()) or 1.0
        t = t_max
        for k in range(max(1, n - 3), n):
            if mags[k] > 0:
                t = min(t, (self.cfg.taylor_tol * scale / mags[k]) ** (1.0 / k))
        tail = max((float(mags[k]) * t**k for k in range(max(1, n - 3), n)), default=0.0)
        return t, tail

    def _series(self, zs: np.ndarray, der: int = 0) -> np.ndarray:
        c = self.gc
        for _ in range(der):
            c = np.polynomial.polynomial.polyder(c)
        return np.polynomial.polynomial.polyval(zs, c)

    def _extend(self, t_end: float) -> None:
        if self.cont is not None and self.t_cont >= t_end:
            return
        z0 = self.t0 * self.w
        jet = [complex(self._series(np.array([z0]), k)[0]) for k in range(self.op.order)]
        self.cont = ode_continue(self.op, self.rhs, jet, PathSpec.polyline(z0, t_end * self.w), self.cfg)
        self.t_cont = t_end

    def g_values(self, ts: np.ndarray) -> np.ndarray:
        out = np.empty(len(ts), dtype=complex)
        near = ts <= self.t0
        out[near] = self._series(ts[near] * self.w)
        if (~near).any():
            self._extend(float(ts[~near].max()))
            out[~near] = self.cont.values(ts[~near] * self.w)
        return out

    def __call__(self, x: complex) -> BorelResult:
        x = complex(x)
        poly_val = sum(complex(c) * x**k for k, c in self.poly.items())
        if not len(self.g):
            return BorelResult(cmath.exp(float(self.rho) * x) * poly_val, 0.0, 0.0, 0)
        kappa = (x * self.w).real
        if kappa <= 0:
            raise PreconditionError("x is outside the half-plane of convergence of the Borel integral")
        cfg = self.cfg
        h_max = min(2.0 / abs(x), 1.0)
        t_end = self.t0 + cfg.exp_cutoff / kappa
        for _attempt in range(5):
            self._extend(t_end)
            near = _panels(0.0, self.t0, h_max, start=-1.0)
            far = _panels(self.t0, t_end, h_max, start=-1.0)

            def integrate(pnls):
                ts, ws = _gl_nodes(pnls, cfg.gauss_nodes)
                vals = self.g_values(ts) * np.exp(-x * self.w * ts) * self.w * ws
                return complex(np.sum(vals)), float(np.sum(np.abs(vals)))

            v1, m1 = integrate(near + far)
            v2, _ = integrate(_split(near + far))
            g_end = abs(self.g_values(np.array([t_end]))[0])
            tail = g_end * math.exp(-kappa * t_end) / kappa
            if tail <= cfg.tail_tol * max(1.0, abs(v2)):
                cont_err = self.cont.error * m1 if self.cont else 0.0
                err = abs(v2 - v1) + 1e-15 * m1 + cont_err + self.series_err * m1
                factor = cmath.exp(float(self.rho) * x)
                return BorelResult(factor * (poly_val + v2), abs(factor) * err, abs(factor) * tail, self.checked)
            t_end = self.t0 + 2 * (t_end - self.t0)
        raise TailBoundExceeded(f"Borel tail {tail:.3g} did not drop below tolerance")


def borel_sum(ae: ExpLogSeries, borel_ode, theta, x: complex, config: Tolerances | None = None) -> BorelResult:
    """Borel-Laplace sum of ``exp(rho x) * sum a_n x^(-n-1)`` (plus a polynomial part) at ``x``."""
    return BorelSummer(ae, borel_ode, theta, config)(x)


# ---------------------------------------------------------------- optimal truncation


def sum_optimal_truncation(ae, x: complex, arg: float | None = None) -> tuple[complex, float]:
    """Sum an asymptotic expansion at infinity up to its smallest term.

    Terms with non-negative powers of ``x`` are always kept.  The bound is
    the magnitude of the first omitted term (zero when nothing is omitted).
    """
    x = complex(x)
    rho = 0
    body = ae
    if isinstance(ae, ExpLogSeries):
        rho, body = ae.rho, ae.body
    if body.point is not INFINITY:
        raise PreconditionError("optimal truncation applies to expansions at infinity")
    arg = cmath.phase(x) if arg is None else arg
    groups: dict[Fraction, complex] = {}
    for (e, j), c in body.monomials().items():
        groups[e] = groups.get(e, 0j) + complex(c) * _inf_monomial(e, j, x, arg)
    labels = sorted(groups)
    head = sum((groups[e] for e in labels if e < 0), 0j)
    tail_labels = [e for e in labels if e >= 0]
    value, bound = head, 0.0
    if tail_labels:
        mags = [abs(groups[e]) for e in tail_labels]
        m = int(np.argmin(mags))
        value += sum((groups[e] for e in tail_labels[:m]), 0j)
        bound = mags[m]
    factor = cmath.exp(float(rho) * x)
    return factor * value, abs(factor) * bound


def _inf_monomial(e, j: int, x: complex, arg: float) -> complex:
    lg = complex(math.log(abs(x)), arg)
    return cmath.exp((-float(e) - 1) * lg) * (-lg) ** j


# ---------------------------------------------------------------- matrices


@dataclass
class NumericMatrix:
    entries: np.ndarray
    row_labels: list[str]
    col_labels: list[str]
    condition: float
    determinant: complex
    residual: float = 0.0
    diagnostics: dict = field(default_factory=dict)

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def __getitem__(self, idx):
        return self.entries[idx]

    def to_dict(self) -> dict:
        return {
            "entries": [[[float(v.real), float(v.imag)] for v in row] for row in self.entries],
            "rows": list(self.row_labels),
            "columns": list(self.col_labels),
            "condition": float(self.condition),
            "determinant": [float(self.determinant.real), float(self.determinant.imag)],
            "residual": float(self.residual),
        }


def _matrix(entries, rows, cols, residual=0.0, diagnostics=None, check: bool = True,
            cfg: Tolerances | None = None) -> NumericMatrix:
    cfg = cfg or get_profile()
    entries = np.asarray(entries, dtype=complex)
    cond = float(np.linalg.cond(entries)) if entries.size else 1.0
    det = complex(np.linalg.det(entries)) if entries.size else 1.0 + 0j
    if check and not cond < cfg.cond_limit:
        raise IllConditioned(f"condition number {cond:.3g} exceeds {cfg.cond_limit:.3g}", cond)
    return NumericMatrix(entries, rows, cols, cond, det, residual, diagnostics or {})


def _pmap(fn, items, jobs: int):
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(it) for it in items]


def _solution_label(sol: LogSolution) -> str:
    where = "inf" if sol.point is INFINITY else str(sol.point.rho)
    return f"{where}:t={sol.exponent}:k={sol.log_degree}"


def kappa_matrix(d: DiffOp, theta, config: Tolerances | None = None, trunc: int | None = None) -> NumericMatrix:
    """Microsolution coordinates of the continued classes at infinity."""
    cfg = config or get_profile()
    theta = check_admissible(d, theta)
    trunc = trunc or cfg.series_trunc
    th = theta.radians
    sb = sinfty_basis(d, trunc)
    a = lifted_operator(d, sb.n_bound)
    mu = a.order
    rhos = finite_singularities(d).rhos
    sing = singular_points(a)
    R = 4 * max((abs(p) for p in sing), default=0.0) + 2
    direction = cmath.exp(-1j * th)
    zb = R * direction
    locals_ = {}
    for rho in rhos:
        basis = local_solution_basis(a, Finite(rho), trunc)
        micro = [s for s in basis if not s.is_trivial()]
        holo = [s for s in basis if s.is_trivial()]
        clearance = min((abs(p - complex(rho)) for p in sing if abs(p - complex(rho)) > 1e-12), default=1.0)
        probe = complex(rho) + clearance / 4 * direction
        arg = cut_arg(probe - complex(rho), th)
        W = np.array([SeriesFunction(s.series, mu).jet(probe, arg) for s in micro + holo]).T
        locals_[rho] = (micro, W, probe)

    def column(s: LogSolution):
        jet = SeriesFunction(s.series, mu).jet(zb, cut_arg(zb, th))
        col = []
        for rho in rhos:
            micro, W, probe = locals_[rho]
            path = PathSpec.polyline(zb, complex(rho) + R * direction, probe)
            cont = ode_continue(a, None, jet, path, cfg, estimate=False)
            cw = np.linalg.cond(W)
            if not cw < cfg.cond_limit:
                raise IllConditioned(f"local basis at {rho} is numerically degenerate", cw)
            coords = np.linalg.solve(W, np.array(cont.jet))
            col.extend(coords[: len(micro)])
        return col

    cols = _pmap(column, list(sb.entries), cfg.jobs)
    entries = np.array(cols, dtype=complex).T
    rows = [_solution_label(m) for rho in rhos for m in locals_[rho][0]]
    return _matrix(entries, rows, [_solution_label(s) for s in sb.entries], cfg=cfg,
                   diagnostics={"theta": str(theta), "N": sb.n_bound, "base_radius": R})


def _sample_radii(d: DiffOp, theta: float, cfg: Tolerances) -> list[float]:
    lo, hi = cfg.atheta_radii
    rhos = finite_singularities(d).rhos
    spread = max((abs((complex(a - b) * cmath.exp(1j * theta)).real) for a in rhos for b in rhos), default=0.0)
    if spread > 0:
        hi = min(hi, cfg.atheta_max_spread / spread)
        lo = min(lo, hi / 8)
    return list(np.geomspace(lo, hi, cfg.atheta_points))


def evaluate_zero_solution(f: LogSeries, e_op: DiffOp, theta: float, xs: Sequence[complex],
                           cfg: Tolerances) -> tuple[np.ndarray, float]:
    """Values of a solution at 0 (exact expansion) at points of the ray ``arg x = theta``.

    The expansion is summed at ``|x| = 1`` with ``arg log x = theta`` and the
    solution is then continued with ``e_op`` along the ray.
    """
    direction = cmath.exp(1j * theta)
    sf = SeriesFunction(f, e_op.order)
    r0 = min(1.0, min(abs(x) for x in xs) / 2)
    x0 = r0 * direction
    jet = sf.jet(x0, theta)
    rs = sorted(abs(x) for x in xs)
    path = PathSpec.polyline(x0, *[r * direction for r in rs])
    cont = ode_continue(e_op, None, jet, path, cfg)
    return cont.values(np.asarray(xs, dtype=complex)), cont.error


def atheta_matrix(d: DiffOp, theta, config: Tolerances | None = None, trunc: int | None = None) -> NumericMatrix:
    """Coordinates of the basis at 0 in the Borel-summed basis at infinity along ``arg x = theta``."""
    cfg = config or get_profile()
    theta = check_admissible(d, theta)
    trunc = trunc or cfg.series_trunc
    th = theta.radians
    eb = einfty_basis(d, trunc)
    zb = ezero_basis(d, trunc)
    radii = _sample_radii(d, th, cfg)
    xs = [r * cmath.exp(1j * th) for r in radii]

    def infinity_column(entry):
        summer = BorelSummer(entry.series, borel_operator(d, entry.rho), theta, cfg)
        return [summer(x).value for x in xs]

    E = np.array(_pmap(infinity_column, list(eb.entries), cfg.jobs), dtype=complex).T
    cols = _pmap(lambda f: evaluate_zero_solution(f, eb.operator, th, xs, cfg)[0], list(zb.entries), cfg.jobs)
    F = np.array(cols, dtype=complex).T
    w = 1.0 / np.max(np.abs(E), axis=1)
    Ew, Fw = E * w[:, None], F * w[:, None]
    sol, *_ = np.linalg.lstsq(Ew, Fw, rcond=None)
    resid = float(np.linalg.norm(Ew @ sol - Fw) / max(np.linalg.norm(Fw), 1e-300))
    design_cond = float(np.linalg.cond(Ew))
    if not design_cond < cfg.cond_limit:
        raise IllConditioned(f"sample matrix condition {design_cond:.3g} exceeds the limit", design_cond)
    rows = [f"einf[{i}]:rho={e.rho}:t={e.exponent}" for i, e in enumerate(eb.entries)]
    columns = [f"ezero[{j}]" for j in range(len(zb.entries))]
    return _matrix(sol, rows, columns, resid, cfg=cfg,
                   diagnostics={"theta": str(theta), "radii": [float(r) for r in radii],
                                "design_condition": design_cond})


def stokes_matrix(d: DiffOp, theta1, theta2, config: Tolerances | None = None) -> NumericMatrix:
    """``A(theta1)^-1 A(theta2)``: change of basis between the two Borel-summed bases."""
    cfg = config or get_profile()
    m1 = atheta_matrix(d, theta1, cfg)
    m2 = atheta_matrix(d, theta2, cfg)
    s = np.linalg.solve(m1.entries, m2.entries)
    return _matrix(s, m1.row_labels, m1.row_labels, max(m1.residual, m2.residual), cfg=cfg,
                   diagnostics={"theta1": m1.diagnostics["theta"], "theta2": m2.diagnostics["theta"]})


# ---------------------------------------------------------------- Watson checks


@dataclass
class WatsonPoint:
    x: complex
    contour: complex
    series: complex
    deviation: float
    bound: float
    numeric_error: float

    @property
    def passed(self) -> bool:
        return bool(self.deviation <= self.bound + 10 * self.numeric_error + 1e-14 * abs(self.contour))


@dataclass
class WatsonReport:
    rho: Fraction
    theta: str
    points: list[WatsonPoint]
    entire_leg: dict | None = None

    @property
    def passed(self) -> bool:
        ok = all(p.passed for p in self.points)
        if self.entire_leg is not None:
            ok = ok and self.entire_leg["passed"]
        return bool(ok)


def watson_check(d: DiffOp, rho, theta, micro: LogSolution | None = None, index: int = 0,
                 config: Tolerances | None = None, radii: Sequence[float] | None = None,
                 f_inf: FunctionSpec | None = None) -> WatsonReport:
    """Keyhole integrals of a microsolution against its optimally truncated transform."""
    cfg = config or get_profile()
    theta = as_direction(theta)
    mb = microsolution_basis(d, rho, cfg.watson_trunc)
    sol = micro if micro is not None else mb.entries[index]
    spec = FunctionSpec(sol.series, mb.operator)
    formal = apply_T(lrho_transform(sol.series), "inf")
    points = []
    for r in radii or cfg.watson_radii:
        x = r * cmath.exp(1j * theta.radians)
        q = contour_laplace(spec, PathSpec.gamma_rho(rho, theta), x, cfg)
        val, bound = sum_optimal_truncation(formal, x, theta.radians)
        points.append(WatsonPoint(x, complex(q.value), complex(val), float(abs(q.value - val)), float(bound),
                                  float(q.error + q.tail)))
    leg = entire_check(f_inf, 1.0, Direction(0.0, Fraction(0)), cfg) if f_inf is not None else None
    return WatsonReport(Fraction(rho), str(theta), points, leg)


def entire_check(spec: FunctionSpec, x: complex, theta=None, config: Tolerances | None = None,
                 tol: float = 1e-4) -> dict:
    """Large-circle integral of an expansion at infinity against the entire series of its transform."""
    cfg = config or get_profile()
    x = complex(x)
    th = as_direction(theta if theta is not None else cmath.phase(x)).radians
    q = contour_laplace(spec, PathSpec.gamma_prime(th), x, cfg)
    series = apply_T(linf_transform(spec.series), "0")
    val = evaluate(series, x, th)
    dev = abs(q.value - val)
    return {"contour": q.value, "series": val, "deviation": dev, "error": q.error, "passed": dev <= tol}
