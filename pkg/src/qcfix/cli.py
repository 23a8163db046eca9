"""Command-line interface.

Exit codes: 0 success (contractive / converged / all certificates hold),
1 input error, 2 valid input but not contractive (or a certificate failed),
3 no convergence within max-iters.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from qcfix import __version__
from qcfix.classify import GENERALIZED, QUASI, classify_all, minimal_q, parse_terms, terms_mask, terms_name
from qcfix.metric import SelfMap, generate_space
from qcfix.multivalued import (
    DEFAULT_A,
    build_selection,
    mv_fixed_points,
    mv_iterate,
    mv_minimal_q,
    mv_rate_certificates,
)
from qcfix.picard import (
    DEFAULT_TOL,
    CycleDetected,
    FixedPointFound,
    cauchy_estimate_check,
    diameter_witness,
    find_fixed_points,
    iterate,
    orbit_diameter_bound_check,
    rate_certificates,
)
from qcfix.report import canonical_json, input_digest, make_report, render_text
from qcfix.samplers import hub_biased_multimap, random_self_map
from qcfix.spacespec import SpaceSpec, SpecError, emit_space_spec, parse_space_spec

TOL_ENV = "QCFIX_TOL"

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NOT_CONTRACTIVE = 2
EXIT_NO_CONVERGENCE = 3

# q used to build a selection when the certified modulus is exactly 0
ZERO_Q_SUBSTITUTE = 2.0**-30


class InputError(Exception):
    pass


def default_tolerance() -> float:
    raw = os.environ.get(TOL_ENV)
    if raw is None:
        return DEFAULT_TOL
    try:
        tol = float(raw)
    except ValueError:
        raise InputError(f"{TOL_ENV}={raw!r} is not a number") from None
    if not tol >= 0:
        raise InputError(f"{TOL_ENV}={raw!r} must be a nonnegative number")
    return tol


# payload builders ---------------------------------------------------------


def _labels(space, idx):
    return [space.labels[i] for i in idx]


def _contraction_entry(space, report, power=1) -> dict:
    wit = None if report.witness is None else list(report.witness)
    return {
        "terms": terms_name(report.terms),
        "mask": terms_mask(report.terms),
        "power": power,
        "minimal_q": report.minimal_q,
        "witness": wit,
        "witness_labels": None if wit is None else _labels(space, wit),
        "contractive": report.contractive,
    }


def _outcome(space, outcome) -> dict:
    if isinstance(outcome, FixedPointFound):
        return {"kind": "fixed_point", "point": outcome.point, "label": space.labels[outcome.point], "steps": outcome.steps}
    if isinstance(outcome, CycleDetected):
        return {"kind": "cycle", "cycle": list(outcome.cycle), "labels": _labels(space, outcome.cycle)}
    return {"kind": "max_iters_exceeded"}


def _trace_entry(space, trace) -> dict:
    return {
        "start": trace.start,
        "start_label": space.labels[trace.start],
        "steps": list(trace.steps),
        "step_labels": _labels(space, trace.steps),
        "residuals": list(trace.residuals),
        "outcome": _outcome(space, trace.outcome),
    }


def _cert(c) -> dict:
    out = {"n": c.n, "bound": c.bound_value, "actual": c.actual_distance, "holds": c.holds}
    if c.m is not None:
        out["m"] = c.m
    return out


def _points_entry(space, pts) -> dict:
    return {"points": list(pts), "labels": _labels(space, pts)}


def _starts(space, start) -> list[int]:
    if start is None:
        return list(space.points())
    if not 0 <= start < len(space):
        raise InputError(f"--start {start} is not a point index in [0, {len(space)})")
    return [start]


def _max_iters(space, value) -> int:
    if value is None:
        return 10 * len(space)
    if value < 1:
        raise InputError(f"--max-iters {value} must be at least 1")
    return value


def _require_single(spec, command) -> SelfMap:
    T = spec.self_map()
    if T is None:
        what = "no map" if spec.map is None else "a multi-valued map"
        raise InputError(f"map: {command} needs a single-valued map, file has {what}")
    return T


def _require_any_map(spec, command):
    if spec.map is None:
        raise InputError(f"map: {command} needs a map, file has none")


def _check_unit(flag, value):
    if not 0 < value < 1:
        raise InputError(f"{flag} {value} must lie in (0, 1)")


# commands -------------------------------------------------------------------


def cmd_validate(spec: SpaceSpec, args) -> tuple[dict, int]:
    space = spec.space()
    return {"valid": True, "points": len(space), "metric_kind": type(spec.metric).__name__.replace("Metric", "").lower()}, EXIT_OK


def cmd_classify(spec: SpaceSpec, args) -> tuple[dict, int]:
    _require_any_map(spec, "classify")
    space = spec.space()
    if args.power < 1:
        raise InputError(f"--power {args.power} must be at least 1")
    if isinstance(spec.self_map(), SelfMap):
        T = spec.self_map()
        if args.terms == "all":
            reports = classify_all(space, T, args.power)
        else:
            reports = [minimal_q(space, T, parse_terms(args.terms), args.power)]
        entries = [_contraction_entry(space, r, args.power) for r in reports]
        kind = "single"
    else:
        if args.power != 1:
            raise InputError("--power: multi-valued maps support power 1 only")
        F = spec.multi_map()
        names = ["banach", "kannan", "quasi", "generalized"] if args.terms == "all" else [args.terms]
        entries = [_contraction_entry(space, mv_minimal_q(space, F, parse_terms(t))) for t in names]
        kind = "multi"
    contractive = any(e["contractive"] for e in entries)
    return {"map_kind": kind, "reports": entries}, EXIT_OK if contractive else EXIT_NOT_CONTRACTIVE


def cmd_solve(spec: SpaceSpec, args) -> tuple[dict, int]:
    T = _require_single(spec, "solve")
    space = spec.space()
    max_iters = _max_iters(space, args.max_iters)
    traces = [iterate(space, T, x, max_iters) for x in _starts(space, args.start)]
    payload = {
        "max_iters": max_iters,
        "fixed_points": _points_entry(space, find_fixed_points(space, T)),
        "runs": [_trace_entry(space, t) for t in traces],
    }
    ok = all(t.converged for t in traces)
    payload["verdict"] = "converged" if ok else "no convergence"
    return payload, EXIT_OK if ok else EXIT_NO_CONVERGENCE


def _mv_effective_q(q: float) -> float:
    return q if q > 0 else ZERO_Q_SUBSTITUTE


def _mv_pipeline(space, F, starts, a, max_iters, tol) -> tuple[dict, int]:
    report = mv_minimal_q(space, F)
    five = mv_minimal_q(space, F, QUASI)
    fixed = mv_fixed_points(space, F)
    payload = {
        "reports": [_contraction_entry(space, five), _contraction_entry(space, report)],
        "strict_fixed_points": _points_entry(space, fixed.strict),
        "weak_fixed_points": _points_entry(space, fixed.weak),
    }
    if not report.contractive:
        payload["verdict"] = "not contractive"
        return payload, EXIT_NOT_CONTRACTIVE
    q = _mv_effective_q(report.minimal_q)
    sel = build_selection(space, F, q, a)
    rate = q ** (1 - a)
    sel_q = minimal_q(space, sel.underlying, GENERALIZED).minimal_q
    violations = sel.invariant_violations(space)
    payload["selection"] = {
        "a": a,
        "q_used": q,
        "images": list(sel.underlying.images),
        "image_labels": _labels(space, sel.underlying.images),
        "invariant_violations": violations,
        "q": sel_q,
        "rate": rate,
        "transfer_holds": sel_q <= rate + 1e-12,
    }
    runs = []
    ok_conv = True
    ok_certs = not violations and payload["selection"]["transfer_holds"] and len(fixed.strict) == 1
    for x in starts:
        trace = mv_iterate(space, F, x, q, a, max_iters)
        entry = _trace_entry(space, trace)
        if trace.converged and len(fixed.strict) == 1:
            certs = mv_rate_certificates(space, trace, fixed.strict[0], q, a, tol)
            entry["rate"] = [_cert(c) for c in certs]
            ok_certs &= all(c.holds for c in certs)
        ok_conv &= trace.converged
        runs.append(entry)
    payload["runs"] = runs
    if not ok_conv:
        payload["verdict"] = "no convergence"
        return payload, EXIT_NO_CONVERGENCE
    payload["verdict"] = "all certificates hold" if ok_certs else "certificate failure"
    return payload, EXIT_OK if ok_certs else EXIT_NOT_CONTRACTIVE


def cmd_mv_solve(spec: SpaceSpec, args) -> tuple[dict, int]:
    _require_any_map(spec, "mv-solve")
    _check_unit("--a", args.a)
    space = spec.space()
    return _mv_pipeline(
        space, spec.multi_map(), _starts(space, args.start), args.a, _max_iters(space, args.max_iters), args.tol
    )


def cmd_bound(spec: SpaceSpec, args) -> tuple[dict, int]:
    T = _require_single(spec, "bound")
    space = spec.space()
    if args.power < 1:
        raise InputError(f"--power {args.power} must be at least 1")
    horizon = 2 * len(space) if args.n is None else args.n
    if horizon < 0:
        raise InputError(f"--n {horizon} must be nonnegative")
    report = minimal_q(space, T, GENERALIZED, args.power)
    payload = {"reports": [_contraction_entry(space, report, args.power)], "horizon": horizon}
    if not report.contractive:
        payload["verdict"] = "not contractive"
        return payload, EXIT_NOT_CONTRACTIVE
    fixed = find_fixed_points(space, T)
    payload["fixed_points"] = _points_entry(space, fixed)
    runs = []
    ok = len(fixed) == 1
    for x in _starts(space, args.start):
        certs = rate_certificates(space, T, x, fixed[0], report.minimal_q, horizon, args.power, args.tol)
        ok &= all(c.holds for c in certs)
        pts = [T.iterate_from(x, n) for n in range(horizon + 1)]
        runs.append(
            {
                "start": x,
                "start_label": space.labels[x],
                "step_labels": _labels(space, pts),
                "outcome": {"kind": "fixed_point", "point": fixed[0], "label": space.labels[fixed[0]], "steps": _first_hit(pts, fixed[0])},
                "rate": [_cert(c) for c in certs],
            }
        )
    payload["runs"] = runs
    payload["verdict"] = "all certificates hold" if ok else "certificate failure"
    return payload, EXIT_OK if ok else EXIT_NOT_CONTRACTIVE


def _first_hit(pts, target):
    return pts.index(target) if target in pts else None


def _single_check(space, T, tol) -> tuple[dict, int]:
    reports = classify_all(space, T)
    q = reports[-1].minimal_q
    fixed = find_fixed_points(space, T)
    payload = {
        "reports": [_contraction_entry(space, r) for r in reports],
        "fixed_points": _points_entry(space, fixed),
        "unique_fixed_point": len(fixed) == 1,
    }
    max_iters = 10 * len(space)
    horizon = 2 * len(space)
    contractive = reports[-1].contractive
    ok_conv = True
    ok_certs = len(fixed) == 1
    runs = []
    for x in space.points():
        trace = iterate(space, T, x, max_iters, q if contractive else None)
        entry = _trace_entry(space, trace)
        ok_conv &= trace.converged
        if contractive and len(fixed) == 1:
            rate = rate_certificates(space, T, x, fixed[0], q, horizon, 1, tol)
            diam = [orbit_diameter_bound_check(space, T, x, n, q, tol) for n in range(horizon + 1)]
            wit = [diameter_witness(space, T, x, n) for n in range(horizon + 1)]
            cauchy = cauchy_estimate_check(space, T, x, q, horizon, tol)
            entry["rate"] = [_cert(c) for c in rate]
            entry["orbit_diameter"] = [_cert(c) for c in diam]
            entry["diameter_witness"] = wit
            entry["cauchy"] = {
                "checked": len(cauchy),
                "failures": [_cert(c) for c in cauchy if not c.holds],
            }
            ok_certs &= all(c.holds for c in rate + diam + cauchy) and None not in wit
        runs.append(entry)
    payload["runs"] = runs
    if not contractive:
        payload["verdict"] = "not contractive"
        return payload, EXIT_NOT_CONTRACTIVE
    if not ok_conv:
        payload["verdict"] = "no convergence"
        return payload, EXIT_NO_CONVERGENCE
    payload["verdict"] = "all certificates hold" if ok_certs else "certificate failure"
    return payload, EXIT_OK if ok_certs else EXIT_NOT_CONTRACTIVE


def cmd_check(spec: SpaceSpec, args) -> tuple[dict, int]:
    """validate -> classify -> solve from every start -> every bound certificate."""
    _require_any_map(spec, "check")
    space = spec.space()
    T = spec.self_map()
    if T is not None:
        payload, code = _single_check(space, T, args.tol)
        payload["map_kind"] = "single"
    else:
        payload, code = _mv_pipeline(space, spec.multi_map(), list(space.points()), args.a, 10 * len(space), args.tol)
        payload["map_kind"] = "multi"
    payload["valid"] = True
    return payload, code


def cmd_gen(args) -> str:
    if args.points < 1:
        raise InputError(f"--points {args.points} must be at least 1")
    if not 0 < args.density <= 1:
        raise InputError(f"--density {args.density} must lie in (0, 1]")
    space = generate_space(args.points, args.density, args.seed)
    rng = np.random.default_rng([args.seed, 1])
    if args.map == "single":
        mapping = random_self_map(space, rng, hub_bias=0.5)
    elif args.map == "multi":
        mapping = hub_biased_multimap(space, rng)
    else:
        mapping = None
    return emit_space_spec(SpaceSpec.from_objects(space, mapping))


COMMANDS = {
    "validate": cmd_validate,
    "classify": cmd_classify,
    "solve": cmd_solve,
    "mv-solve": cmd_mv_solve,
    "bound": cmd_bound,
    "check": cmd_check,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", help="SpaceSpec JSON file ('-' for stdin)")
    common.add_argument("--format", choices=["text", "json"], default="text")
    common.add_argument("--tol", type=float, default=None, help=f"bound tolerance (default {DEFAULT_TOL}, or ${TOL_ENV})")

    parser = argparse.ArgumentParser(prog="qcfix", description="Generalized quasi-contraction workbench.")
    parser.add_argument("--version", action="version", version=f"qcfix {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("validate", parents=[common], help="check the metric axioms")

    p = sub.add_parser("classify", parents=[common], help="minimal contraction modulus")
    p.add_argument("--terms", default="generalized", help="banach|kannan|quasi|generalized|all|custom:<9-bit mask>")
    p.add_argument("--power", type=int, default=1)

    p = sub.add_parser("solve", parents=[common], help="Picard iteration")
    p.add_argument("--start", type=int, default=None)
    p.add_argument("--max-iters", type=int, default=None)

    p = sub.add_parser("mv-solve", parents=[common], help="iterate a selection of a multi-valued map")
    p.add_argument("--a", type=float, default=DEFAULT_A)
    p.add_argument("--start", type=int, default=None)
    p.add_argument("--max-iters", type=int, default=None)

    p = sub.add_parser("bound", parents=[common], help="a-priori rate certificates")
    p.add_argument("--start", type=int, default=None)
    p.add_argument("--n", type=int, default=None, help="last step to certify (default 2|X|)")
    p.add_argument("--power", type=int, default=1)

    p = sub.add_parser("check", parents=[common], help="full verification pipeline")
    p.add_argument("--a", type=float, default=DEFAULT_A)

    p = sub.add_parser("gen", help="emit a seeded random SpaceSpec")
    p.add_argument("--points", type=int, required=True)
    p.add_argument("--density", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--map", choices=["single", "multi", "none"], default="single")
    return parser


def _read_input(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        if args.command == "gen":
            stdout.write(cmd_gen(args))
            return EXIT_OK
        if args.tol is None:
            args.tol = default_tolerance()
        elif not args.tol >= 0:
            raise InputError(f"--tol {args.tol} must be nonnegative")
        raw = _read_input(args.file)
    except InputError as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_INPUT

    digest = input_digest(raw)
    try:
        spec = parse_space_spec(raw.decode("utf-8"))
        payload, code = COMMANDS[args.command](spec, args)
    except UnicodeDecodeError:
        payload, code = {"error": f"{args.file}: not valid UTF-8"}, EXIT_INPUT
    except SpecError as exc:
        payload, code = {"error": str(exc)}, EXIT_INPUT
        if exc.verdict is not None:
            payload.update(valid=False, axiom=exc.verdict.axiom, witness=list(exc.verdict.witness))
    except (InputError, ValueError) as exc:
        payload, code = {"error": str(exc)}, EXIT_INPUT

    report = make_report(__version__, args.command, digest, payload, code)
    stdout.write(canonical_json(report) if args.format == "json" else render_text(report))
    if code == EXIT_INPUT:
        stderr.write(f"error: {payload['error']}\n")
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
