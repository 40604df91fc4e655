"""Command-line interface.

One subcommand per analysis; input systems come from text files in the
declaration format of `vfield.dsl`. Results are printed as a single
JSON document: {"command", "input", "result", "caveats"}, with
polynomials and forms rendered as canonical strings. Exit codes: 0 for
success, 1 for a domain error (reported on standard error), 2 for a
usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import errors
from .algebra import RatFunc, Scalar
from .darboux import DarbouxReport, darboux_search, invariant_family_b_eq_d
from .dsl import SystemSpec, parse_system
from .forms import DForm, d_log, exterior_derivative, lie_derivative_form
from .lv import (
    LVSystem,
    brestovski_reduce,
    enumerate_transform_solutions,
    lv_scale_transform,
    omega1_form,
)
from .minimality import check_strong_minimality
from .numeric import integrate_rk4
from .vectorfield import lie_derivative, singular_points


def _parse_set(values: Sequence[str]) -> Dict[str, Fraction]:
    out: Dict[str, Fraction] = {}
    for item in values:
        name, sep, text = item.partition("=")
        if not sep or not name:
            raise errors.DSLSyntaxError(f"--set expects NAME=VALUE, got {item!r}", 1, 1)
        try:
            out[name.strip()] = Fraction(text.strip())
        except (ValueError, ZeroDivisionError):
            raise errors.DSLSyntaxError(
                f"--set {name.strip()}: {text.strip()!r} is not rational", 1, 1
            )
    return out


def _scalar_arg(text: str, flag: str) -> Scalar:
    """A rate given on the command line: a rational literal or a
    parameter name left symbolic."""
    try:
        return Scalar.from_fraction(Fraction(text))
    except (ValueError, ZeroDivisionError):
        pass
    name = text[1:] if text.startswith("-") else text
    if name.isidentifier():
        value = Scalar.sym(name)
        return -value if text.startswith("-") else value
    raise errors.DSLSyntaxError(
        f"{flag} expects a rational or an identifier, got {text!r}", 1, 1
    )


def _load_system(path: str) -> Tuple[SystemSpec, str]:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return parse_system(text), text


def _curve_payload(report: DarbouxReport) -> List[Dict[str, object]]:
    return [
        {
            "polynomial": str(c.poly),
            "cofactor": str(c.cofactor),
            "degree": c.degree,
            "definition_field": c.definition_field,
        }
        for c in report.curves
    ]


def _report_payload(report: DarbouxReport) -> Dict[str, object]:
    return {
        "degree_bound": report.degree_bound,
        "completeness": report.completeness,
        "curves": _curve_payload(report),
        "branches": [
            {"kind": b.kind, "expression": b.expression, "detail": b.detail}
            for b in report.branches
        ],
    }


def _emit(command: str, inputs: Dict[str, object], result: object,
          caveats: Sequence[str]) -> None:
    payload = {
        "command": command,
        "input": inputs,
        "result": result,
        "caveats": list(caveats),
    }
    sys.stdout.write(json.dumps(payload, indent=2) + "\n")


def _cmd_lie(args: argparse.Namespace) -> int:
    spec, _ = _load_system(args.system)
    values = _parse_set(args.set)
    field = spec.to_vector_field(values)
    expr = spec.parse_expression(args.poly, values)
    if not expr.is_polynomial():
        raise errors.DSLSyntaxError("--poly must be a polynomial", 1, 1)
    image = lie_derivative(field, expr.as_poly())
    _emit(
        "lie",
        {"system": args.system, "poly": args.poly, "set": _set_echo(values)},
        {"lie_derivative": str(image)},
        [],
    )
    return 0


def _cmd_darboux(args: argparse.Namespace) -> int:
    spec, _ = _load_system(args.system)
    values = _parse_set(args.set)
    field = spec.to_vector_field(values)
    report = darboux_search(field, args.max_degree)
    _emit(
        "darboux",
        {
            "system": args.system,
            "max_degree": args.max_degree,
            "set": _set_echo(values),
        },
        _report_payload(report),
        report.notes,
    )
    return 0


def _cmd_singular(args: argparse.Namespace) -> int:
    spec, _ = _load_system(args.system)
    values = _parse_set(args.set)
    field = spec.to_vector_field(values)
    locus = singular_points(field)
    caveats = (
        ["non-rational singular points were discarded"]
        if locus.discarded_nonrational
        else []
    )
    _emit(
        "singular",
        {"system": args.system, "set": _set_echo(values)},
        {
            "points": [str(p) for p in locus],
            "complete": not locus.discarded_nonrational,
        },
        caveats,
    )
    return 0


def _cmd_minimality(args: argparse.Namespace) -> int:
    spec, _ = _load_system(args.system)
    values = _parse_set(args.set)
    field = spec.to_vector_field(values)
    report = check_strong_minimality(field, args.max_degree)
    _emit(
        "minimality",
        {
            "system": args.system,
            "max_degree": args.max_degree,
            "set": _set_echo(values),
        },
        {
            "verdict": report.verdict,
            "witness": str(report.witness) if report.witness else None,
            "curves": _curve_payload(report.curves_checked),
        },
        report.caveats,
    )
    return 0


def _cmd_forms_check(args: argparse.Namespace) -> int:
    if not args.exact and not args.dlog:
        raise errors.DSLSyntaxError(
            "forms-check needs at least one of --exact / --dlog", 1, 1
        )
    spec, _ = _load_system(args.system)
    values = _parse_set(args.set)
    field = spec.to_vector_field(values)
    space = field.space
    omega = DForm.zero(space, 1)
    if args.exact:
        f = spec.parse_expression(args.exact, values)
        omega = omega + exterior_derivative(
            DForm.function(space, RatFunc(f.num.with_variables(space),
                                          f.den.with_variables(space)))
        )
    dlog_echo: List[str] = []
    for item in args.dlog:
        coeff_text, sep, expr_text = item.partition(":")
        if not sep:
            raise errors.DSLSyntaxError(
                f"--dlog expects COEFF:EXPR, got {item!r}", 1, 1
            )
        coeff = _scalar_arg(coeff_text.strip(), "--dlog")
        g = spec.parse_expression(expr_text.strip(), values)
        omega = omega + d_log(
            RatFunc(g.num.with_variables(space), g.den.with_variables(space))
        ) * RatFunc.const(space, coeff)
        dlog_echo.append(item)
    derivative = lie_derivative_form(field, omega)
    closed = exterior_derivative(omega).is_zero()
    _emit(
        "forms-check",
        {
            "system": args.system,
            "exact": args.exact,
            "dlog": dlog_echo,
            "set": _set_echo(values),
        },
        {
            "form": str(omega),
            "closed": closed,
            "invariant": derivative.is_zero(),
            "lie_derivative": str(derivative),
        },
        [],
    )
    return 0


def _cmd_lv_analyze(args: argparse.Namespace) -> int:
    a = _scalar_arg(args.a, "--a")
    b = _scalar_arg(args.b, "--b")
    c = _scalar_arg(args.c, "--c")
    d = _scalar_arg(args.d, "--d")
    inputs = {"a": args.a, "b": args.b, "c": args.c, "d": args.d}
    if b == d:
        curve = invariant_family_b_eq_d(a, b, c)
        result = {
            "case": "equal rates",
            "invariant_curve": str(curve.poly),
            "cofactor": str(curve.cofactor),
            "definition_field": curve.definition_field,
        }
        _emit("lv-analyze", inputs, result, [])
        return 0
    if not (a.is_one() and c.is_one()):
        sys_norm, mapping = lv_scale_transform(LVSystem(a, b, c, d))
        map_echo: Optional[Dict[str, str]] = {
            k: str(v) for k, v in sorted(mapping.items())
        }
        b, d = sys_norm.b, sys_norm.d
    else:
        map_echo = None
    reduced = brestovski_reduce(b, d)
    omega = omega1_form(reduced)
    invariant = lie_derivative_form(reduced.phase_field(), omega).is_zero()
    result = {
        "case": "distinct rates",
        "normalizing_map": map_echo,
        "second_derivative": str(reduced.second_derivative()),
        "recovery_x": str(reduced.recovery_x),
        "recovery_y": str(reduced.recovery_y),
        "omega1": str(omega),
        "omega1_invariant": invariant,
    }
    _emit("lv-analyze", inputs, result, [])
    return 0


def _cmd_lv_ortho(args: argparse.Namespace) -> int:
    rates = {
        flag: _scalar_arg(getattr(args, flag), f"--{flag}")
        for flag in ("b1", "d1", "b2", "d2")
    }
    solutions = enumerate_transform_solutions(
        rates["b1"], rates["d1"], rates["b2"], rates["d2"]
    )
    _emit(
        "lv-ortho",
        {flag: getattr(args, flag) for flag in ("b1", "d1", "b2", "d2")},
        {
            "solutions": [
                {
                    "case": s.case_tag,
                    "e": str(s.e),
                    "f": str(s.f),
                    "constraints": list(s.constraints),
                }
                for s in solutions
            ]
        },
        [],
    )
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    spec, _ = _load_system(args.system)
    values = _parse_set(args.set)
    field = spec.to_vector_field(values)
    parts = args.start.split(",")
    if len(parts) != 2:
        raise errors.DSLSyntaxError(
            f"--start expects X,Y, got {args.start!r}", 1, 1
        )
    try:
        start = (float(Fraction(parts[0].strip())), float(Fraction(parts[1].strip())))
    except (ValueError, ZeroDivisionError):
        raise errors.DSLSyntaxError(
            f"--start expects numeric coordinates, got {args.start!r}", 1, 1
        )
    traj = integrate_rk4(field, start, args.t_end, args.step)
    if args.csv:
        writer = sys.stdout
        writer.write("t,{},{}\n".format(*field.variables))
        for t, (x, y) in zip(traj.times, traj.states):
            writer.write(f"{t!r},{x!r},{y!r}\n")
        return 0
    caveats = [traj.stop_reason] if traj.stop_reason else []
    _emit(
        "simulate",
        {
            "system": args.system,
            "start": args.start,
            "t_end": args.t_end,
            "step": args.step,
            "set": _set_echo(values),
        },
        {
            "samples": len(traj),
            "final_time": traj.times[-1],
            "final_state": list(traj.final_state()),
            "stop_reason": traj.stop_reason,
        },
        caveats,
    )
    return 0


def _set_echo(values: Dict[str, Fraction]) -> Dict[str, str]:
    return {k: str(v) for k, v in sorted(values.items())}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vfield",
        description="Symbolic analysis of polynomial vector fields.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def with_system(p: argparse.ArgumentParser) -> None:
        p.add_argument("--system", required=True, help="path to a system file")
        p.add_argument(
            "--set",
            action="append",
            default=[],
            metavar="NAME=VALUE",
            help="specialize a parameter to a rational value",
        )

    p = sub.add_parser("lie", help="Lie derivative of a polynomial along the field")
    with_system(p)
    p.add_argument("--poly", required=True, help="polynomial expression")
    p.set_defaults(fn=_cmd_lie)

    p = sub.add_parser("darboux", help="invariant curves up to a degree bound")
    with_system(p)
    p.add_argument("--max-degree", type=int, default=4)
    p.set_defaults(fn=_cmd_darboux)

    p = sub.add_parser("singular", help="rational singular points")
    with_system(p)
    p.set_defaults(fn=_cmd_singular)

    p = sub.add_parser("minimality", help="strong-minimality criterion")
    with_system(p)
    p.add_argument("--max-degree", type=int, default=4)
    p.set_defaults(fn=_cmd_minimality)

    p = sub.add_parser(
        "forms-check",
        help="closedness and invariance of d(exact) + sum of c*dG/G",
    )
    with_system(p)
    p.add_argument("--exact", help="expression f contributing df")
    p.add_argument(
        "--dlog",
        action="append",
        default=[],
        metavar="COEFF:EXPR",
        help="logarithmic term c*dG/G (repeatable)",
    )
    p.set_defaults(fn=_cmd_forms_check)

    p = sub.add_parser("lv-analyze", help="Lotka-Volterra reduction and invariants")
    p.add_argument("--a", default="1")
    p.add_argument("--b", required=True)
    p.add_argument("--c", default="1")
    p.add_argument("--d", required=True)
    p.set_defaults(fn=_cmd_lv_analyze)

    p = sub.add_parser(
        "lv-ortho", help="affine matchings between two reduced systems"
    )
    for flag in ("b1", "d1", "b2", "d2"):
        p.add_argument(f"--{flag}", required=True)
    p.set_defaults(fn=_cmd_lv_ortho)

    p = sub.add_parser("simulate", help="fixed-step RK4 trajectory")
    with_system(p)
    p.add_argument("--start", required=True, metavar="X,Y")
    p.add_argument("--t-end", type=float, required=True)
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--csv", action="store_true", help="emit t,x,y rows")
    p.set_defaults(fn=_cmd_simulate)

    return parser


def run_subcommand(argv: Sequence[str]) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except errors.VFieldError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


def main() -> None:
    sys.exit(run_subcommand(sys.argv[1:]))
