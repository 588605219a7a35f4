"""``incdeg`` command line.

Exit status: 0 success (or consistent, for ``check``), 1 inconsistent,
2 input error, 3 solver unavailable, 4 solver failure.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import __version__
from .asp import (
    DIALECT_ENV,
    SOLVER_ENV,
    SolverError,
    SolverUnavailable,
    emit_repair_program,
    run_external_solver,
)
from .measure import MeasureRequest, inc_deg_g3
from .model import ConstraintSet, DatabaseInstance, SchemaError, Semantics
from .repairs import DEFAULT_CAP, c_repairs, enumerate_s_repairs
from .textio import (
    ParseError,
    dumps,
    format_fact,
    hypergraph_to_dict,
    parse_constraints,
    parse_instance,
    repair_to_dict,
    report_to_dict,
)
from .validation import align
from .violations import find_conflicts, format_hypergraph

EXIT_OK, EXIT_INCONSISTENT, EXIT_INPUT, EXIT_NO_SOLVER, EXIT_SOLVER = 0, 1, 2, 3, 4


class InputError(Exception):
    pass


def _load(args) -> tuple[DatabaseInstance, ConstraintSet]:
    try:
        facts = Path(args.instance).read_text(encoding="utf-8")
        rules = Path(args.constraints).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(str(exc)) from exc
    instance = parse_instance(facts, filename=args.instance)
    constraints = parse_constraints(rules, instance.schema, filename=args.constraints)
    return align(instance, constraints), constraints


def cmd_check(args) -> int:
    instance, constraints = _load(args)
    graph = find_conflicts(instance, constraints)
    consistent = not graph.edges
    if args.format == "text":
        print("consistent" if consistent else f"inconsistent: {len(graph)} violation(s)")
        sys.stdout.write(format_hypergraph(graph))
    else:
        payload = {
            "consistent": consistent,
            "violations": len(graph),
            "edges": hypergraph_to_dict(graph),
        }
        sys.stdout.write(dumps(payload))
    return EXIT_OK if consistent else EXIT_INCONSISTENT


def cmd_measure(args) -> int:
    try:
        request = MeasureRequest(args.semantics, args.normalizer)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    if args.witnesses < 0:
        raise InputError("--witnesses must be >= 0")
    instance, constraints = _load(args)
    report = inc_deg_g3(instance, constraints, request, witnesses=args.witnesses)
    if args.format == "text":
        label = f"inc-deg[{report.semantics.value},g3]"
        print(f"{label} = {report.numerator}/{report.denominator} ({report.decimal})")
        if report.irreparable:
            print("irreparable: no repair exists under this semantics")
        for w in report.witnesses:
            print("  delete " + " ".join(format_fact(instance[t])[:-1] for t in sorted(w.deleted)))
    else:
        sys.stdout.write(dumps(report_to_dict(report)))
    return EXIT_OK


def cmd_repairs(args) -> int:
    if args.cap < 1:
        raise InputError("--cap must be >= 1")
    instance, constraints = _load(args)
    semantics = Semantics(args.semantics)
    if semantics is Semantics.S:
        found = enumerate_s_repairs(instance, constraints, cap=args.cap)
    elif semantics is Semantics.C:
        found = c_repairs(instance, constraints, cap=args.cap)
    else:
        found = c_repairs(instance, constraints, instance.endogenous, cap=args.cap)
    if args.format == "text":
        for i, r in enumerate(found, 1):
            kept = ", ".join(format_fact(instance[t])[:-1] for t in sorted(r.kept))
            print(f"repair {i}: {{{kept}}}  deleted {sorted(r.deleted)}")
        if not found.repairs:
            print("no repair")
        if found.truncated:
            print(f"(stopped at --cap {args.cap})")
    else:
        payload = {
            "semantics": semantics.value,
            "count": len(found),
            "truncated": found.truncated,
            "repairs": [repair_to_dict(r, instance) for r in found],
        }
        sys.stdout.write(dumps(payload))
    return EXIT_OK


def cmd_emit_asp(args) -> int:
    instance, constraints = _load(args)
    program = emit_repair_program(instance, constraints, dialect=args.dialect)
    if args.out:
        try:
            program.write(args.out)
        except OSError as exc:
            raise InputError(str(exc)) from exc
    elif not args.solve:
        sys.stdout.write(program.text)
        return EXIT_OK
    payload: dict = {"program": args.out}
    if args.solve:
        deletable = instance.endogenous if instance.exogenous else None
        best = c_repairs(instance, constraints, deletable, cap=1)
        internal = len(best[0].deleted) if best.repairs else None
        try:
            external = run_external_solver(program, args.solver_cmd)
        except SolverUnavailable as exc:
            print(f"incdeg: {exc}", file=sys.stderr)
            return EXIT_NO_SOLVER
        except SolverError as exc:
            print(f"incdeg: {exc}", file=sys.stderr)
            return EXIT_SOLVER
        payload.update(
            external_numdel=external,
            internal_min_deletions=internal,
            agree=external == internal,
        )
    sys.stdout.write(dumps(payload))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="incdeg",
        description="Repair-based inconsistency degrees under denial constraints.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("instance", help="facts file (*.facts)")
        p.add_argument("constraints", help="constraints file (*.dc)")
        p.add_argument("--format", choices=("json", "text"), default="json")

    p = sub.add_parser("check", help="report constraint violations")
    common(p)
    p.set_defaults(func=cmd_check)

    semantics = [s.value for s in Semantics]
    p = sub.add_parser("measure", help="g3 inconsistency degree")
    common(p)
    p.add_argument("--semantics", choices=semantics, default="c")
    p.add_argument("--normalizer", choices=("full", "endo"), default="full")
    p.add_argument("--witnesses", type=int, default=1, metavar="K")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("repairs", help="list repairs")
    common(p)
    p.add_argument("--semantics", choices=semantics, default="c")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP, metavar="N")
    p.set_defaults(func=cmd_repairs)

    p = sub.add_parser("emit-asp", help="write the repair program")
    common(p)
    p.add_argument("--out", help="program file (*.lp); stdout if omitted")
    p.add_argument(
        "--dialect",
        choices=("dlv", "clingo"),
        default=os.environ.get(DIALECT_ENV, "dlv"),
    )
    p.add_argument("--solve", action="store_true", help="cross-check with a solver")
    p.add_argument(
        "--solver-cmd",
        help=f"command template with {{file}}; defaults to ${SOLVER_ENV}",
    )
    p.set_defaults(func=cmd_emit_asp)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ParseError, SchemaError, ValueError) as exc:
        print(f"incdeg: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
