"""Command-line interface.

Exit codes: 0 for a completed run (whatever the verdicts), 1 for any input
problem (unreadable file, malformed document, unknown ring, bad section),
2 when the library's own hierarchy self-check fails, which would mean the
implementation contradicts itself on the given model.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .analysis import analyze, render_json, render_text
from .bundle import export_bundle_dot
from .corpus import corpus, corpus_names, corpus_text
from .documents import (
    document_from_triple,
    materialize,
    parse_model,
    print_model,
)
from .errors import ContextualityError, DocumentError, SelfCheckError
from .model import DEFAULT_SEARCH_BUDGET
from .pauli import is_avn_triple, generate_subgroup, parse_triple, triple_model, triple_scenario
from .rings import RingSpec
from .scenario import Section
from .theory import is_avn, is_avn_at

BUDGET_VARIABLE = "CONTEXTUALITY_BUDGET"


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _read_document(path: str):
    if path == "-":
        return parse_model(sys.stdin.read())
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc.strerror or exc}") from None
    return parse_model(text)


def _parse_section_text(text: str) -> Section:
    pairs = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise DocumentError(
                f"bad section fragment {part!r}; expected measurement=outcome"
            )
        m, _, o = part.partition("=")
        try:
            pairs.append((m.strip(), int(o)))
        except ValueError:
            raise DocumentError(f"outcome {o!r} is not an integer") from None
    if not pairs:
        raise DocumentError("empty section")
    return Section.of(pairs)


def _parse_context_text(text: str) -> tuple[str, ...]:
    labels = tuple(part.strip() for part in text.split(",") if part.strip())
    if not labels:
        raise DocumentError("empty context")
    return labels


def _resolve_budget(value: int | None) -> int:
    if value is not None:
        if value <= 0:
            raise DocumentError("budget must be positive")
        return value
    env = os.environ.get(BUDGET_VARIABLE)
    if env is not None:
        try:
            parsed = int(env)
        except ValueError:
            raise DocumentError(
                f"{BUDGET_VARIABLE}={env!r} is not an integer"
            ) from None
        if parsed <= 0:
            raise DocumentError(f"{BUDGET_VARIABLE} must be positive")
        return parsed
    return DEFAULT_SEARCH_BUDGET


def _cmd_analyze(args) -> int:
    doc = _read_document(args.file)
    rings = tuple(RingSpec.parse(r) for r in args.ring) if args.ring else None
    report = analyze(doc, rings=rings, budget=_resolve_budget(args.budget))
    sys.stdout.write(render_json(report) if args.json else render_text(report))
    return 0


def _cmd_obstruction(args) -> int:
    from .cohomology import ObstructionSolver

    doc = _read_document(args.file)
    model = materialize(doc)
    ring = RingSpec.parse(args.ring)
    context = _parse_context_text(args.context)
    section = _parse_section_text(args.section)
    solver = ObstructionSolver(model, ring)
    family = solver.family(context, section)
    vanishes = family is not None
    if args.json:
        payload = {
            "context": list(context),
            "section": str(section),
            "ring": str(ring),
            "vanishes": vanishes,
            "family": (
                {
                    " ".join(model.scenario.contexts[i]): str(comp)
                    for i, comp in enumerate(family)
                }
                if family is not None
                else None
            ),
            "system": {
                "unknowns": solver.unknowns,
                "compatibility_rows": solver.compatibility_rows,
            },
        }
        sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        return 0
    word = "vanishes" if vanishes else "does not vanish"
    sys.stdout.write(
        f"obstruction of {section} at ({', '.join(context)}) over {ring}: {word}\n"
    )
    if family is not None:
        sys.stdout.write("compatible family of coefficients:\n")
        for i, comp in enumerate(family):
            ctx = model.scenario.contexts[i]
            sys.stdout.write(f"  ({', '.join(ctx)}): {comp}\n")
    return 0


def _cmd_avn(args) -> int:
    doc = _read_document(args.file)
    model = materialize(doc)
    ring = RingSpec.parse(args.ring)
    if args.at is not None:
        report = is_avn_at(model, _parse_section_text(args.at), ring)
    else:
        report = is_avn(model, ring)
    if args.json:
        payload = {
            "ring": str(ring),
            "avn": report.avn,
            "at": str(report.fixed) if report.fixed is not None else None,
            "equations": [str(eq) for eq in report.theory.equations],
            "solution": str(report.solution) if report.solution else None,
        }
        sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        return 0
    scope = f" fixing {report.fixed}" if report.fixed is not None else ""
    verdict = "yes" if report.avn else "no"
    sys.stdout.write(f"All-vs-Nothing over {ring}{scope}: {verdict}\n")
    sys.stdout.write(f"theory generators ({len(report.theory.equations)}):\n")
    for eq in report.theory.equations:
        sys.stdout.write(f"  {eq}\n")
    if report.solution is not None:
        sys.stdout.write(f"solution: {report.solution}\n")
    elif report.reduced_system is not None:
        sys.stdout.write("no solution; reduced system:\n")
        matrix = report.reduced_system.matrix
        for row, b in zip(matrix.rows(), report.reduced_system.rhs):
            sys.stdout.write(f"  {row} = {b}\n")
    return 0


def _cmd_corpus(args) -> int:
    if args.action == "list":
        for name in corpus_names():
            sys.stdout.write(name + "\n")
        return 0
    if args.name is None:
        raise _UsageError("corpus show needs an entry name")
    sys.stdout.write(corpus_text(args.name))
    return 0


def _cmd_bundle(args) -> int:
    doc = _read_document(args.file)
    dot = export_bundle_dot(materialize(doc))
    if args.output is None or args.output == "-":
        sys.stdout.write(dot)
    else:
        Path(args.output).write_text(dot, encoding="utf-8")
    return 0


def _cmd_stabiliser(args) -> int:
    e, f, g = parse_triple(args.triple)
    diagnosis = is_avn_triple(e, f, g)
    if args.emit_model:
        model = triple_model(e, f, g)
        doc = document_from_triple(
            (e, f, g), model.scenario, name=f"triple {e},{f},{g}"
        )
        sys.stdout.write(print_model(doc))
        return 0
    if args.json:
        payload = {
            "triple": [str(e), str(f), str(g)],
            "avn_triple": diagnosis.avn,
            "real_phases": diagnosis.real_phases,
            "commuting": diagnosis.commuting,
            "a1": diagnosis.a1_holds,
            "a2": diagnosis.a2_holds,
            "a2_count": diagnosis.a2_count,
            "failed": list(diagnosis.failed_conditions()),
            "subgroup_order": len(generate_subgroup((e, f, g)))
            if diagnosis.commuting
            else None,
        }
        sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        return 0
    verdict = "yes" if diagnosis.avn else "no"
    sys.stdout.write(f"AvN triple: {verdict}\n")
    if diagnosis.avn:
        subgroup = generate_subgroup((e, f, g))
        sys.stdout.write(f"generated subgroup order: {len(subgroup)}\n")
        scenario = triple_scenario(e, f, g)
        sys.stdout.write(
            f"scenario: {len(scenario.measurements)} measurements, "
            f"{len(scenario.contexts)} contexts\n"
        )
    else:
        for reason in diagnosis.failed_conditions():
            sys.stdout.write(f"  {reason}\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="contextuality",
        description="classify contextuality of empirical models",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="full classification of a model document")
    p.add_argument("file", help="document path, or - for stdin")
    p.add_argument(
        "--ring",
        action="append",
        metavar="R",
        help="coefficient ring, z or zN; repeatable (default: the document's own)",
    )
    p.add_argument("--budget", type=int, help="search node budget")
    p.add_argument("--json", action="store_true")
    p.set_defaults(run=_cmd_analyze)

    p = sub.add_parser("obstruction", help="vanishing of one section's obstruction")
    p.add_argument("file")
    p.add_argument("--context", required=True, metavar="C", help="e.g. a1,b1")
    p.add_argument("--section", required=True, metavar="S", help="e.g. a1=0,b1=0")
    p.add_argument("--ring", required=True, metavar="R", help="z or zN")
    p.add_argument("--json", action="store_true")
    p.set_defaults(run=_cmd_obstruction)

    p = sub.add_parser("avn", help="All-vs-Nothing verdict over a finite ring")
    p.add_argument("file")
    p.add_argument("--ring", required=True, metavar="R")
    p.add_argument("--at", metavar="S", help="fix a supported section, e.g. a1=0,b1=0")
    p.add_argument("--json", action="store_true")
    p.set_defaults(run=_cmd_avn)

    p = sub.add_parser("corpus", help="list or show built-in models")
    p.add_argument("action", choices=("list", "show"))
    p.add_argument("name", nargs="?")
    p.set_defaults(run=_cmd_corpus)

    p = sub.add_parser("bundle", help="DOT rendering of the bundle picture")
    p.add_argument("file")
    p.add_argument("-o", "--output", metavar="PATH", help="output path (default stdout)")
    p.set_defaults(run=_cmd_bundle)

    p = sub.add_parser("stabiliser", help="AvN triple diagnostics")
    p.add_argument("--triple", required=True, metavar="T", help='e.g. "XYY,YXY,YYX"')
    p.add_argument("--emit-model", action="store_true", help="print the model document")
    p.add_argument("--json", action="store_true")
    p.set_defaults(run=_cmd_stabiliser)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    try:
        return args.run(args)
    except _UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except SelfCheckError as exc:
        sys.stderr.write(f"self-check failure: {exc}\n")
        return 2
    except ContextualityError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
