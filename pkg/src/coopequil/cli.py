"""coopctl: batch entry point over the full pipeline.

Human output goes to stdout, logs to stderr (level from COOP_LOG). Every
command takes --json for schema-stable machine output. Exit codes are stable:
0 success, 1 validation failure, 2 usage error, 3 solver non-convergence
under --strict-convergence.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .documents import (
    SCHEMA_VERSION,
    counterfactual_to_doc,
    equilibrium_to_doc,
    matrix_to_doc,
    score_to_doc,
    sweep_to_doc,
    violation_to_doc,
    wire,
)
from .equilibrium import SolveSettings, solve
from .experiments import (
    SweepAxis,
    SweepSizeError,
    SweepSpec,
    ValidationRubric,
    apply_parameter,
    edit_from_dict,
    run_counterfactual,
    run_sweep,
    rubric_from_dict,
    score_scenario,
    sweep_to_csv,
    validate_edit,
    validate_rubric,
)
from .interdependence import asymmetry_report, effective_matrix, matrix_to_csv
from .model import Scenario, ScenarioFormatError, ScenarioValidationError, canonical_actor_order
from .store import load_scenario

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_NON_CONVERGENCE = 3

log = logging.getLogger("coopequil")

_LOG_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}


def _configure_logging() -> None:
    level = _LOG_LEVELS.get(os.environ.get("COOP_LOG", "warn").lower(), logging.WARNING)
    logging.basicConfig(stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s")


def _emit_json(command: str, body: dict) -> None:
    doc = {"schema_version": SCHEMA_VERSION, "command": command}
    doc.update(wire(body))
    print(json.dumps(doc, sort_keys=True))


def _load(path: str):
    """Returns (scenario, exit_code, violations). Missing file is a usage error."""
    if not Path(path).is_file():
        print(f"error: no such file: {path}", file=sys.stderr)
        return None, EXIT_USAGE, []
    try:
        return load_scenario(path), EXIT_OK, []
    except ScenarioValidationError as e:
        return None, EXIT_VALIDATION, e.violations
    except ScenarioFormatError as e:
        print(f"error: {e}", file=sys.stderr)
        return None, EXIT_VALIDATION, []


def _settings_from_args(args) -> SolveSettings:
    settings = SolveSettings()
    if args.tol is not None:
        settings = replace(settings, tolerance=args.tol)
    if args.max_iter is not None:
        settings = replace(settings, max_iterations=args.max_iter)
    if getattr(args, "multi_start", None) is not None:
        settings = replace(settings, multi_start_count=args.multi_start)
    return settings


def _apply_mode(scenario: Scenario, args) -> Scenario:
    if getattr(args, "mode", None):
        return scenario.replace(appropriation_mode=args.mode)
    return scenario


def cmd_validate(args) -> int:
    if not Path(args.scenario).is_file():
        print(f"error: no such file: {args.scenario}", file=sys.stderr)
        return EXIT_USAGE
    violations = []
    try:
        load_scenario(args.scenario)
    except ScenarioValidationError as e:
        violations = e.violations
    except ScenarioFormatError as e:
        if args.json:
            _emit_json("validate", {"valid": False, "violations": [{"code": "format_error", "message": str(e), "where": ""}]})
        else:
            print(f"invalid: {e}")
        return EXIT_VALIDATION
    if args.json:
        _emit_json("validate", {"valid": not violations, "violations": [violation_to_doc(v) for v in violations]})
    elif violations:
        for v in violations:
            print(f"{v.code}: {v.message}" + (f" ({v.where})" if v.where else ""))
    else:
        print("valid")
    return EXIT_OK if not violations else EXIT_VALIDATION


def cmd_matrix(args) -> int:
    scenario, code, violations = _load(args.scenario)
    if scenario is None:
        _print_violations(violations)
        return code
    matrix = effective_matrix(scenario)
    report = asymmetry_report(matrix)
    if args.csv:
        Path(args.csv).write_text(matrix_to_csv(matrix), encoding="utf-8")
        log.info("matrix CSV written to %s", args.csv)
    if args.json:
        _emit_json("matrix", matrix_to_doc(matrix, report, from_override=scenario.matrix_override is not None))
        return EXIT_OK
    print(matrix_to_csv(matrix), end="")
    print("asymmetry (descending imbalance):")
    for row in report:
        print(f"  {row.pair[0]}<->{row.pair[1]}: D_ij={row.d_ij:.12g} D_ji={row.d_ji:.12g} imbalance={row.imbalance:.12g}")
    return EXIT_OK


def cmd_solve(args) -> int:
    scenario, code, violations = _load(args.scenario)
    if scenario is None:
        _print_violations(violations)
        return code
    scenario = _apply_mode(scenario, args)
    result = solve(scenario, _settings_from_args(args))
    doc = equilibrium_to_doc(result, scenario.appropriation_mode)
    if args.out:
        Path(args.out).write_text(json.dumps(wire(doc), sort_keys=True, indent=1) + "\n", encoding="utf-8")
    if args.json:
        _emit_json("solve", doc)
    else:
        print(f"mode: {scenario.appropriation_mode}")
        order = canonical_actor_order(scenario)
        for a in order:
            print(
                f"  {a}: action={result.actions[a]:.12g} payoff={result.payoffs[a]:.12g} "
                f"utility={result.utilities[a]:.12g} [{result.boundary_flags[a]}]"
            )
        print(
            f"converged={str(result.converged).lower()} iterations={result.iterations} "
            f"residual={result.residual:.6g} multi_start_agreement={str(result.multi_start_agreement).lower()}"
        )
    if args.strict_convergence and not result.converged:
        return EXIT_NON_CONVERGENCE
    return EXIT_OK


def parse_axis(text: str) -> SweepAxis:
    """Axis syntax: name=start:stop:step (endpoints inclusive within 1e-9) or
    name=v1,v2,v3. Non-numeric values stay strings (cost/mode axes)."""
    if "=" not in text:
        raise ValueError(f"axis must look like name=... , got {text!r}")
    name, spec = text.split("=", 1)
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ValueError(f"range axis must be start:stop:step, got {spec!r}")
        start, stop, step = (float(p) for p in parts)
        if step <= 0:
            raise ValueError("axis step must be > 0")
        values = []
        k = 0
        while True:
            v = start + k * step
            if v > stop + 1e-9:
                break
            values.append(v)
            k += 1
        return SweepAxis(name, tuple(values))
    values = []
    for piece in spec.split(","):
        try:
            values.append(float(piece))
        except ValueError:
            values.append(piece)
    return SweepAxis(name, tuple(values))


def cmd_sweep(args) -> int:
    scenario, code, violations = _load(args.scenario)
    if scenario is None:
        _print_violations(violations)
        return code
    try:
        axes = tuple(parse_axis(a) for a in args.axis)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    spec = SweepSpec(base=scenario, axes=axes, settings=_settings_from_args(args))
    try:
        result = run_sweep(spec)
    except SweepSizeError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE

    csv_text = sweep_to_csv(result)
    if args.out:
        Path(args.out).write_text(csv_text, encoding="utf-8")
    body: dict = {"rows": len(result.rows)}

    if args.rubric:
        rubric, edit, err = _load_rubric_and_edits(args)
        if err:
            return err
        scored = []
        for row, combo in zip(result.rows, _combos(spec)):
            point_scenario = scenario
            for axis, value in zip(spec.axes, combo):
                point_scenario = apply_parameter(point_scenario, axis.name, value)
            s = score_scenario(point_scenario, rubric, spec.settings, edit)
            scored.append({"params": dict(row.params), "total": s.total})
        best = max(scored, key=lambda r: r["total"])
        body["scores"] = scored
        body["best"] = best
        if not args.json:
            print(f"best-scoring row: {best['params']} -> {best['total']:.12g}/{rubric.max_total:.12g}")

    if args.json:
        body["sweep"] = sweep_to_doc(result)
        _emit_json("sweep", body)
    elif args.out:
        print(f"{len(result.rows)} rows written to {args.out}")
    else:
        print(csv_text, end="")
    return EXIT_OK


def _combos(spec: SweepSpec):
    from itertools import product

    return product(*(axis.values for axis in spec.axes))


def _load_rubric_and_edits(args):
    rubric = ValidationRubric()
    edit = None
    if getattr(args, "rubric", None):
        if not Path(args.rubric).is_file():
            print(f"error: no such file: {args.rubric}", file=sys.stderr)
            return None, None, EXIT_USAGE
        try:
            rubric = rubric_from_dict(json.loads(Path(args.rubric).read_text(encoding="utf-8")))
        except (json.JSONDecodeError, ScenarioFormatError, ValueError) as e:
            print(f"error: bad rubric: {e}", file=sys.stderr)
            return None, None, EXIT_VALIDATION
        problems = validate_rubric(rubric)
        if problems:
            _print_violations(problems)
            return None, None, EXIT_VALIDATION
    if getattr(args, "edits", None):
        if not Path(args.edits).is_file():
            print(f"error: no such file: {args.edits}", file=sys.stderr)
            return None, None, EXIT_USAGE
        try:
            edit = edit_from_dict(json.loads(Path(args.edits).read_text(encoding="utf-8")))
        except (json.JSONDecodeError, ScenarioFormatError, ValueError) as e:
            print(f"error: bad edits: {e}", file=sys.stderr)
            return None, None, EXIT_VALIDATION
    return rubric, edit, 0


def cmd_score(args) -> int:
    scenario, code, violations = _load(args.scenario)
    if scenario is None:
        _print_violations(violations)
        return code
    rubric, edit, err = _load_rubric_and_edits(args)
    if err:
        return err
    if edit is not None:
        problems = validate_edit(scenario, edit)
        if problems:
            _print_violations(problems)
            return EXIT_VALIDATION
    score = score_scenario(scenario, rubric, _settings_from_args(args), edit)
    if args.json:
        _emit_json("score", score_to_doc(score))
        return EXIT_OK
    for name, value in score.metrics.items():
        print(f"  {name}: " + ("n/a" if value is None else f"{value:.12g}"))
    for family, points in score.points.items():
        print(f"  {family}: {points:.12g}/{(score.max_total / 3):.12g}")
    print(f"total: {score.total:.12g}/{score.max_total:.12g}")
    for flag in score.flags:
        print(f"flag: {flag}")
    return EXIT_OK


def cmd_counterfactual(args) -> int:
    scenario, code, violations = _load(args.scenario)
    if scenario is None:
        _print_violations(violations)
        return code
    if not Path(args.edits).is_file():
        print(f"error: no such file: {args.edits}", file=sys.stderr)
        return EXIT_USAGE
    try:
        edit = edit_from_dict(json.loads(Path(args.edits).read_text(encoding="utf-8")))
    except (json.JSONDecodeError, ScenarioFormatError, ValueError) as e:
        print(f"error: bad edits: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    problems = validate_edit(scenario, edit)
    if problems:
        _print_violations(problems)
        return EXIT_VALIDATION
    report = run_counterfactual(scenario, edit, _settings_from_args(args))
    doc = counterfactual_to_doc(report, scenario.appropriation_mode)
    if args.json:
        _emit_json("counterfactual", doc)
        return EXIT_OK
    order = report.base_matrix.order
    print("coupling matrix (base -> edited):")
    for i, dep in enumerate(order):
        for j, dee in enumerate(order):
            if i == j:
                continue
            b = report.base_matrix.entries[i][j]
            e = report.edited_matrix.entries[i][j]
            pct = "" if b == 0 else f" ({(e - b) / b * 100:+.6g}%)"
            print(f"  D[{dep}->{dee}]: {b:.12g} -> {e:.12g}{pct}")
    print("shares (base -> edited):")
    for a in order:
        print(f"  {a}: {report.base_shares[a]:.12g} -> {report.edited_shares[a]:.12g}")
    print("actions (base -> edited, delta):")
    for a in order:
        print(
            f"  {a}: {report.base.actions[a]:.12g} -> {report.edited.actions[a]:.12g} "
            f"({report.action_deltas[a]:+.12g})"
        )
    print("payoffs (base -> edited, delta):")
    for a in order:
        print(
            f"  {a}: {report.base.payoffs[a]:.12g} -> {report.edited.payoffs[a]:.12g} "
            f"({report.payoff_deltas[a]:+.12g})"
        )
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    store_root = args.store or os.environ.get("COOP_STORE", "coop_store")
    app = create_app(store_root)
    uvicorn_levels = {"error": "error", "warn": "warning", "info": "info", "debug": "debug"}
    level = uvicorn_levels.get(os.environ.get("COOP_LOG", "warn").lower(), "warning")
    uvicorn.run(app, host=args.host, port=args.port, log_level=level)
    return EXIT_OK


def _print_violations(violations) -> None:
    for v in violations:
        print(f"{v.code}: {v.message}" + (f" ({v.where})" if getattr(v, "where", "") else ""), file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coopctl", description="Coopetitive-equilibrium engine")
    parser.add_argument("--version", action="version", version=f"coopctl {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, solver=False):
        p.add_argument("--json", action="store_true", help="machine output")
        if solver:
            p.add_argument("--tol", type=float, default=None)
            p.add_argument("--max-iter", type=int, default=None)

    p = sub.add_parser("validate", help="check a scenario file")
    p.add_argument("scenario")
    add_common(p)
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("matrix", help="coupling matrix and asymmetry report")
    p.add_argument("scenario")
    p.add_argument("--csv", default=None, help="write the matrix as CSV")
    add_common(p)
    p.set_defaults(fn=cmd_matrix)

    p = sub.add_parser("solve", help="compute the equilibrium")
    p.add_argument("scenario")
    p.add_argument("--mode", choices=["separable", "pooled"], default=None)
    p.add_argument("--multi-start", type=int, default=None)
    p.add_argument("--out", default=None, help="write the result document")
    p.add_argument("--strict-convergence", action="store_true")
    add_common(p, solver=True)
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("sweep", help="grid sweep to CSV")
    p.add_argument("scenario")
    p.add_argument("--axis", action="append", required=True, help="name=start:stop:step or name=v1,v2,v3")
    p.add_argument("--out", default=None, help="CSV output path")
    p.add_argument("--rubric", default=None, help="score each grid point and report the best")
    p.add_argument("--edits", default=None, help="counterfactual edit file for rubric scoring")
    add_common(p, solver=True)
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("score", help="60-point validation score")
    p.add_argument("scenario")
    p.add_argument("--rubric", default=None)
    p.add_argument("--edits", default=None)
    add_common(p, solver=True)
    p.set_defaults(fn=cmd_score)

    p = sub.add_parser("counterfactual", help="what-if comparison")
    p.add_argument("scenario")
    p.add_argument("--edits", required=True)
    add_common(p, solver=True)
    p.set_defaults(fn=cmd_counterfactual)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--store", default=None)
    p.set_defaults(fn=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    _configure_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
