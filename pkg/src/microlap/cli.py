"""``microlap`` command-line front end.

Every subcommand builds a :class:`ReportDocument`; ``--format json`` prints it
with sorted keys, rationals as ``"p/q"`` strings and complex numbers as
``{"re": ..., "im": ...}``.  Exit status is 0 on success, 1 on a domain error
or a failed check and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from .config import PROFILES, get_profile
from .errors import MicrolapError
from .exact import INFINITY, ExpLogSeries, Finite, LogSeries, as_point
from .frobenius import LogSolution, local_data, local_solution_basis, microsolution_basis, sinfty_basis
from .laplace import einfty_basis, ezero_basis, linf_transform, lrho_transform
from .parsing import parse_operator
from .weyl import (
    DiffOp,
    finite_singularities,
    fourier_laplace,
    indicial_at_infinity,
    mn_bounds,
    polynomial_index_data,
)

__all__ = ["ReportDocument", "build_parser", "main", "parse_operator", "run_command"]


# ---------------------------------------------------------------- serialization


def rational(q) -> str:
    return str(Fraction(q))


def cnum(v) -> dict:
    v = complex(v)
    return {"re": v.real, "im": v.imag}


def point_str(p) -> str:
    return "inf" if p is INFINITY else rational(p.rho)


def series_doc(f) -> dict:
    if isinstance(f, ExpLogSeries):
        return {"rho": rational(f.rho), "body": series_doc(f.body)}
    terms = []
    numeric = not isinstance(f, LogSeries)
    for (e, j), c in sorted(f.monomials().items()):
        if numeric:
            terms.append({"exponent": rational(e), "log": j, "coefficient": cnum(c), "error": f.error((e, j))})
        else:
            terms.append([rational(e), j, rational(c)])
    return {"point": point_str(f.point), "order": rational(f.order), "var": f.var, "terms": terms}


def solution_doc(sol: LogSolution) -> dict:
    return {
        "point": point_str(sol.point),
        "exponent": rational(sol.exponent),
        "log_degree": sol.log_degree,
        "series": series_doc(sol.series),
    }


def matrix_doc(m) -> dict:
    return {
        "entries": [[cnum(v) for v in row] for row in m.entries],
        "rows": list(m.row_labels),
        "columns": list(m.col_labels),
        "condition": float(m.condition),
        "determinant": cnum(m.determinant),
        "residual": float(m.residual),
    }


def _fmt_c(v: complex, digits: int = 12) -> str:
    v = complex(v)
    if abs(v.imag) <= 1e-14 * max(1.0, abs(v.real)):
        return f"{v.real:.{digits}g}"
    return f"{v.real:.{digits}g}{v.imag:+.{digits}g}i"


def _matrix_lines(m) -> list[str]:
    width = max(len(_fmt_c(v, 10)) for row in m.entries for v in row)
    lines = ["  [" + "  ".join(_fmt_c(v, 10).rjust(width) for v in row) + "]" for row in m.entries]
    lines.append(f"  cond={m.condition:.3g} det={_fmt_c(m.determinant, 10)} residual={m.residual:.2g}")
    return lines


@dataclass
class ReportDocument:
    command: str
    inputs: dict = field(default_factory=dict)
    exact: dict = field(default_factory=dict)
    numeric: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    lines: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "inputs": self.inputs,
            "exact": self.exact,
            "numeric": self.numeric,
            "checks": self.checks,
            "passed": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def to_pretty(self) -> str:
        out = list(self.lines)
        for name, ok in sorted(self.checks.items()):
            out.append(f"{'PASS' if ok else 'FAIL'} {name}")
        return "\n".join(out)


# ---------------------------------------------------------------- commands


def _op(args) -> DiffOp:
    return parse_operator(args.operator)


def _inputs(args, **extra) -> dict:
    out = {"trunc": args.trunc, "tol_profile": args.tol_profile}
    if getattr(args, "operator", None) is not None:
        out["operator"] = args.operator
    out.update(extra)
    return out


def cmd_transform(args) -> ReportDocument:
    d = _op(args)
    e = fourier_laplace(d)
    return ReportDocument("transform", _inputs(args), {"normal_form": str(d), "transform": str(e)}, lines=[str(e)])


def cmd_indicial(args) -> ReportDocument:
    d = _op(args)
    points = [INFINITY] + [Finite(r) for r in finite_singularities(d).rhos]
    if args.point is not None:
        points = [as_point(args.point)]
    exact, lines = {}, []
    for p in points:
        ld = local_data(d, p)
        roots = [[rational(r), m] for r, m in ld.roots]
        exact[point_str(p)] = {"indicial": str(ld.indicial), "roots": roots, "shift": ld.shift}
        lines.append(f"{point_str(p)}: {ld.indicial}  roots {', '.join(f'{r} (x{m})' for r, m in roots) or 'none'}")
    r_inf = indicial_at_infinity(d)
    exact["image_leading"] = str(r_inf)
    lines.append(f"leading image coefficient R(k) = {r_inf}")
    return ReportDocument("indicial", _inputs(args, point=args.point), exact, lines=lines)


def cmd_singularities(args) -> ReportDocument:
    d = _op(args)
    c = finite_singularities(d)
    exact = {
        "points": [[rational(r), m] for r, m in c.points],
        "total": c.total,
        "order": d.order,
        "degree": d.degree,
    }
    lines = [f"rho={r} m={m}" for r, m in c.points] + [f"mu={d.order} delta={d.degree}"]
    return ReportDocument("singularities", _inputs(args), exact, lines=lines)


def cmd_mn(args) -> ReportDocument:
    m, n = mn_bounds(_op(args))
    return ReportDocument("mn", _inputs(args), {"M": m, "N": n}, lines=[f"M={m} N={n}"])


def cmd_index(args) -> ReportDocument:
    d = _op(args)
    coker, ker = polynomial_index_data(d)
    exact = {"coker": coker, "ker": ker, "index": coker - ker, "delta_minus_mu": d.degree - d.order}
    checks = {"index identity": coker - ker == d.degree - d.order}
    lines = [f"dim coker={coker} dim ker={ker} index={coker - ker} delta-mu={d.degree - d.order}"]
    return ReportDocument("index", _inputs(args), exact, checks=checks, lines=lines)


def _solution_lines(sols) -> list[str]:
    return [f"t={s.exponent} k={s.log_degree}: {s.series}" for s in sols]


def cmd_frobenius(args) -> ReportDocument:
    sols = local_solution_basis(_op(args), args.point, args.trunc)
    exact = {"solutions": [solution_doc(s) for s in sols]}
    return ReportDocument("frobenius", _inputs(args, point=args.point), exact, lines=_solution_lines(sols))


def cmd_micro(args) -> ReportDocument:
    d = _op(args)
    mb = microsolution_basis(d, args.point, args.trunc)
    exact = {
        "rho": rational(mb.rho),
        "N": mb.n_bound,
        "lifted_operator": str(mb.operator),
        "microsolutions": [solution_doc(s) for s in mb.entries],
        "holomorphic": [solution_doc(s) for s in mb.holomorphic],
    }
    checks = {"dimension equals multiplicity": mb.dimension == finite_singularities(d).multiplicity(mb.rho)}
    lines = [f"dimension {mb.dimension}"] + _solution_lines(mb.entries)
    return ReportDocument("micro", _inputs(args, point=args.point), exact, checks=checks, lines=lines)


def cmd_sinf(args) -> ReportDocument:
    d = _op(args)
    sb = sinfty_basis(d, args.trunc)
    exact = {"classes": [solution_doc(s) for s in sb.entries], "N": sb.n_bound}
    checks = {"dimension equals degree": len(sb) == d.degree}
    lines = [f"dimension {len(sb)}"] + _solution_lines(sb.entries)
    return ReportDocument("sinf", _inputs(args), exact, checks=checks, lines=lines)


def _jordan_doc(rows) -> list:
    return [[rational(v) for v in row] for row in rows]


def cmd_einf(args) -> ReportDocument:
    eb = einfty_basis(_op(args), args.trunc)
    exact = {
        "entries": [
            {
                "rho": rational(e.rho),
                "exponent": rational(e.exponent),
                "log_degree": e.log_degree,
                "sign": e.sign,
                "series": series_doc(e.series),
            }
            for e in eb
        ],
        "delta": [rational(r) for r in eb.delta],
        "gamma_inf": _jordan_doc(eb.gamma_inf),
        "transform": str(eb.operator),
    }
    lines = [f"[{i}] {e.series}" for i, e in enumerate(eb)]
    return ReportDocument("einf-basis", _inputs(args), exact, lines=lines)


def cmd_ezero(args) -> ReportDocument:
    zb = ezero_basis(_op(args), args.trunc)
    exact = {
        "entries": [series_doc(f) for f in zb],
        "signs": list(zb.signs),
        "gamma_zero": _jordan_doc(zb.gamma_zero),
        "transform": str(zb.operator),
    }
    lines = [f"[{i}] {f}" for i, f in enumerate(zb)]
    return ReportDocument("ezero-basis", _inputs(args), exact, lines=lines)


def cmd_lrho(args) -> ReportDocument:
    mb = microsolution_basis(_op(args), args.point, args.trunc)
    images = [lrho_transform(s.series) for s in mb.entries]
    exact = {"images": [{"source": solution_doc(s), "image": series_doc(f)} for s, f in zip(mb.entries, images)]}
    lines = [f"[{i}] {f}" for i, f in enumerate(images)]
    return ReportDocument("lrho", _inputs(args, point=args.point), exact, lines=lines)


def cmd_linf(args) -> ReportDocument:
    sb = sinfty_basis(_op(args), args.trunc)
    images = [linf_transform(s.series) for s in sb.entries]
    exact = {"images": [{"source": solution_doc(s), "image": series_doc(f)} for s, f in zip(sb.entries, images)]}
    lines = [f"[{i}] {f}" for i, f in enumerate(images)]
    return ReportDocument("linf", _inputs(args), exact, lines=lines)


def cmd_apply_t(args) -> ReportDocument:
    from .gammanum import apply_T

    d = _op(args)
    if args.at == "inf":
        sources = [e.series for e in einfty_basis(d, args.trunc)]
    else:
        sources = list(ezero_basis(d, args.trunc))
    images = [apply_T(f, args.at) for f in sources]
    numeric = {"images": [series_doc(f) for f in images]}
    lines = [f"[{i}] {f}" for i, f in enumerate(images)]
    return ReportDocument("apply-t", _inputs(args, at=args.at), numeric=numeric, lines=lines)


def _cfg(args):
    return get_profile(args.tol_profile, jobs=args.jobs)


def cmd_borel_sum(args) -> ReportDocument:
    from .analytic import as_direction, borel_operator, borel_sum

    d = _op(args)
    eb = einfty_basis(d, args.trunc)
    if not 0 <= args.index < len(eb):
        raise MicrolapError(f"entry index {args.index} out of range (basis has {len(eb)} entries)")
    entry = eb[args.index]
    theta = as_direction(args.theta)
    x = complex(args.x)
    res = borel_sum(entry.series, borel_operator(d, entry.rho), theta, x, _cfg(args))
    numeric = {"value": cnum(res.value), "error": res.error, "tail": res.tail, "checked_coefficients": res.checked}
    inputs = _inputs(args, theta=str(theta), x=cnum(x), index=args.index)
    lines = [f"{_fmt_c(res.value, 16)}  (error {res.error:.2g})"]
    return ReportDocument("borel-sum", inputs, numeric=numeric, lines=lines)


def cmd_kappa(args) -> ReportDocument:
    from .analytic import as_direction, kappa_matrix

    theta = as_direction(args.theta)
    m = kappa_matrix(_op(args), theta, _cfg(args), args.trunc)
    return ReportDocument("kappa", _inputs(args, theta=str(theta)), numeric=matrix_doc(m), lines=_matrix_lines(m))


def cmd_atheta(args) -> ReportDocument:
    from .analytic import as_direction, atheta_matrix

    theta = as_direction(args.theta)
    m = atheta_matrix(_op(args), theta, _cfg(args), args.trunc)
    return ReportDocument("atheta", _inputs(args, theta=str(theta)), numeric=matrix_doc(m), lines=_matrix_lines(m))


def cmd_stokes(args) -> ReportDocument:
    from .analytic import as_direction, stokes_matrix

    t1, t2 = as_direction(args.theta1), as_direction(args.theta2)
    m = stokes_matrix(_op(args), t1, t2, _cfg(args))
    inputs = _inputs(args, theta1=str(t1), theta2=str(t2))
    return ReportDocument("stokes", inputs, numeric=matrix_doc(m), lines=_matrix_lines(m))


def cmd_watson(args) -> ReportDocument:
    from .analytic import as_direction, watson_check

    theta = as_direction(args.theta)
    d = _op(args)
    cfg = _cfg(args)
    mb = microsolution_basis(d, args.point, cfg.watson_trunc)
    reports = [watson_check(d, mb.rho, theta, micro=s, config=cfg) for s in mb.entries]
    numeric, checks, lines = {"microsolutions": []}, {}, []
    for i, rep in enumerate(reports):
        pts = [
            {
                "x": cnum(p.x),
                "contour": cnum(p.contour),
                "series": cnum(p.series),
                "deviation": p.deviation,
                "bound": p.bound,
                "numeric_error": p.numeric_error,
                "passed": p.passed,
            }
            for p in rep.points
        ]
        numeric["microsolutions"].append({"index": i, "points": pts})
        checks[f"microsolution {i}"] = rep.passed
        for p in rep.points:
            lines.append(f"[{i}] |x|={abs(p.x):g} deviation={p.deviation:.3g} bound={p.bound:.3g}")
    return ReportDocument("watson", _inputs(args, point=args.point, theta=str(theta)), numeric=numeric,
                          checks=checks, lines=lines)


def cmd_verify(args) -> ReportDocument:
    from .verify import run_suite

    checks = run_suite(args.suite)
    doc = ReportDocument("verify", {"suite": args.suite})
    doc.checks = {c.name: bool(c.passed) for c in checks}
    doc.exact = {"details": {c.name: c.detail for c in checks}}
    return doc


def cmd_demo(args) -> ReportDocument:
    from .analytic import atheta_matrix, borel_operator, borel_sum, kappa_matrix
    from .corpus import GOMPERTZ
    from .verify import EULER_GAMMA, GOMPERTZ_CONSTANT

    cfg = _cfg(args)
    d = parse_operator(GOMPERTZ)
    census = finite_singularities(d)
    _, n = mn_bounds(d)
    eb = einfty_basis(d, args.trunc)
    zb = ezero_basis(d, args.trunc)
    theta = Fraction(1, 2)
    kappa = kappa_matrix(d, theta, cfg)
    atheta = atheta_matrix(d, theta, cfg)
    g = borel_sum(eb[0].series, borel_operator(d, eb[0].rho), 0, 1.0, cfg)
    gamma = -atheta[1, 0] * atheta[1, 1]
    exact = {
        "operator": str(d),
        "transform": str(fourier_laplace(d)),
        "singularities": [[rational(r), m] for r, m in census.points],
        "N": n,
        "einf": [series_doc(e.series) for e in eb],
        "ezero": [series_doc(f) for f in zb],
    }
    numeric = {
        "kappa": matrix_doc(kappa),
        "atheta": matrix_doc(atheta),
        "gompertz_constant": {"value": cnum(g.value), "error": g.error},
        "euler_gamma": cnum(gamma),
    }
    checks = {
        "kappa is diagonal +-1": bool(
            all(abs(abs(kappa[i, i]) - 1) < 1e-6 for i in range(2))
            and abs(kappa[0, 1]) < 1e-6 and abs(kappa[1, 0]) < 1e-6
        ),
        "gompertz constant": abs(g.value - GOMPERTZ_CONSTANT) < 1e-8,
        "euler gamma recovered": abs(gamma - EULER_GAMMA) < 1e-5,
    }
    lines = [
        f"operator      {d}",
        f"transform     {fourier_laplace(d)}",
        f"singularities {', '.join(f'{r} (m={m})' for r, m in census.points)}   N={n}",
        "basis at infinity:",
        *[f"  [{i}] {e.series}" for i, e in enumerate(eb)],
        "basis at zero:",
        *[f"  [{i}] {f}" for i, f in enumerate(zb)],
        f"kappa at theta={theta}pi:",
        *_matrix_lines(kappa),
        f"A_theta at theta={theta}pi:",
        *_matrix_lines(atheta),
        f"Gompertz constant {g.value.real:.15f} (error {g.error:.2g})",
        f"Euler gamma       {gamma.real:.15f}",
    ]
    return ReportDocument("demo", _inputs(args, name=args.name), exact, numeric, checks, lines)


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--trunc", type=int, default=32, help="number of series terms (default 32)")
    common.add_argument("--format", choices=("json", "pretty"), default="pretty")
    common.add_argument("--tol-profile", choices=sorted(PROFILES), default="default")
    common.add_argument("--jobs", type=int, default=1, help="worker threads for matrix columns")
    common.add_argument("--out", metavar="PATH", help="write the report to PATH instead of stdout")

    parser = argparse.ArgumentParser(prog="microlap", description="Laplace transforms of Fuchsian operators.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, fn, help_text, operator=True):
        p = sub.add_parser(name, parents=[common], help=help_text)
        if operator:
            p.add_argument("operator", help='operator in z and Dz, e.g. "z*(1-z)*Dz - z"')
        p.set_defaults(func=fn)
        return p

    add("transform", cmd_transform, "Fourier-Laplace transform of the operator")
    add("indicial", cmd_indicial, "indicial polynomials").add_argument("--point", default=None)
    add("singularities", cmd_singularities, "finite singular points with multiplicities")
    add("mn", cmd_mn, "the bounds M and N")
    add("index", cmd_index, "index on polynomials")
    add("frobenius", cmd_frobenius, "local solution basis").add_argument("--point", required=True)
    add("micro", cmd_micro, "microsolutions at a singular point").add_argument("--point", required=True)
    add("sinf", cmd_sinf, "classes of solutions at infinity")
    add("einf-basis", cmd_einf, "formal solutions of the transform at infinity")
    add("ezero-basis", cmd_ezero, "formal solutions of the transform at 0")
    add("lrho", cmd_lrho, "transforms of the microsolutions at a point").add_argument("--point", required=True)
    add("linf", cmd_linf, "transforms of the classes at infinity")
    add("apply-t", cmd_apply_t, "gamma-jet operator on a basis").add_argument(
        "--at", choices=("0", "inf"), required=True
    )
    p = add("borel-sum", cmd_borel_sum, "Borel sum of a basis entry at infinity")
    p.add_argument("--theta", required=True, help="direction, e.g. 0 or 1/2pi")
    p.add_argument("--x", required=True, type=complex)
    p.add_argument("--index", type=int, default=0, help="entry of the basis at infinity")
    add("kappa", cmd_kappa, "connection matrix of microsolutions").add_argument("--theta", required=True)
    add("atheta", cmd_atheta, "matrix of the summation map").add_argument("--theta", required=True)
    p = add("stokes", cmd_stokes, "change of basis between two directions")
    p.add_argument("--theta1", required=True)
    p.add_argument("--theta2", required=True)
    p = add("watson", cmd_watson, "contour integrals against optimal truncation")
    p.add_argument("--point", required=True)
    p.add_argument("--theta", required=True)
    add("verify", cmd_verify, "run a self-check suite", operator=False).add_argument(
        "--suite", choices=("exact", "numeric", "all"), default="exact"
    )
    add("demo", cmd_demo, "end-to-end report", operator=False).add_argument("name", choices=("gompertz",))
    return parser


def run_command(argv) -> tuple[ReportDocument, int]:
    """Parse ``argv`` and run it; usage errors raise ``SystemExit(2)`` from argparse."""
    args = build_parser().parse_args(argv)
    doc = args.func(args)
    return doc, 0 if doc.passed else 1


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        doc = args.func(args)
    except MicrolapError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    text = doc.to_json() if args.format == "json" else doc.to_pretty()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0 if doc.passed else 1


if __name__ == "__main__":
    sys.exit(main())
