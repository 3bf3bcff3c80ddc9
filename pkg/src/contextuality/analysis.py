"""One-call classification of a documented model.

Gathers every verdict the library can produce (no-signalling, logical and
strong contextuality, AvN and affine collapse per finite ring, cohomological
obstructions per ring and over the integers), asserts the implication
hierarchy between them before reporting, and renders the result as text or
JSON. A hierarchy violation means the library contradicts itself on this
input and is reported as a self-check failure, never silently.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass

from .cohomology import ObstructionReport, classify_cohomological
from .documents import ModelDocument, document_hash, materialize
from .errors import OutcomeCoercionError, SelfCheckError, UnsupportedRingError
from .model import (
    DEFAULT_SEARCH_BUDGET,
    ContextualityReport,
    EmpiricalModel,
    check_no_signalling,
    classify_contextuality,
)
from .rings import INTEGERS, RingSpec
from .theory import AvnReport, affine_closure_model, is_avn

_INTEGER_RING = INTEGERS


@dataclass(frozen=True)
class RingAnalysis:
    """Verdicts tied to one coefficient ring."""

    ring: RingSpec
    avn: bool | None
    avn_report: AvnReport | None
    avn_skipped: str | None
    aff_sc: bool | None
    aff_skipped: str | None
    obstructions: ObstructionReport
    clc: bool
    csc: bool


@dataclass(frozen=True)
class StageTiming:
    stage: str
    seconds: float


@dataclass(frozen=True)
class AnalysisReport:
    name: str | None
    payload_kind: str
    sha256: str
    model: EmpiricalModel
    no_signalling: bool
    classification: ContextualityReport
    rings: tuple[RingAnalysis, ...]
    budget: int
    timings: tuple[StageTiming, ...]

    @property
    def lc(self) -> bool | None:
        return self.classification.logically_contextual

    @property
    def sc(self) -> bool | None:
        return self.classification.strongly_contextual

    def ring_entry(self, ring: RingSpec) -> RingAnalysis:
        for entry in self.rings:
            if entry.ring == ring:
                return entry
        raise KeyError(f"no analysis over {ring}")


def default_rings(doc: ModelDocument) -> tuple[RingSpec, ...]:
    """The ring the document itself suggests: its theory's modulus, or the
    alphabet size when the alphabet is an initial segment 0..n-1."""
    if doc.modulus is not None:
        return (RingSpec(doc.modulus),)
    if doc.payload_kind == "pauli_triple":
        return (RingSpec(2),)
    outcomes = doc.scenario.outcomes
    if outcomes == tuple(range(len(outcomes))) and len(outcomes) >= 2:
        return (RingSpec(len(outcomes)),)
    return ()


def _implies(
    premises: list[str],
    antecedent: bool | None,
    consequent: bool | None,
    rule: str,
) -> None:
    if antecedent is True and consequent is False:
        premises.append(rule)


def _check_hierarchy(report: AnalysisReport) -> None:
    violations: list[str] = []
    lc = report.lc
    sc = report.sc
    integral = report.ring_entry(_INTEGER_RING)
    _implies(violations, integral.csc, sc, "CSC_Z must imply SC")
    _implies(violations, integral.clc, lc, "CLC_Z must imply LC")
    for entry in report.rings:
        ring = entry.ring
        if ring.is_integers:
            continue
        _implies(violations, entry.avn, entry.aff_sc, f"AvN_{ring} must imply SC of the affine closure")
        _implies(violations, entry.aff_sc, entry.csc, f"SC of the affine closure must imply CSC_{ring}")
        _implies(violations, entry.csc, integral.csc, f"CSC_{ring} must imply CSC_Z")
        _implies(violations, entry.clc, integral.clc, f"CLC_{ring} must imply CLC_Z")
        _implies(violations, entry.csc, entry.clc, f"CSC_{ring} must imply CLC_{ring}")
        _implies(violations, entry.csc, sc, f"CSC_{ring} must imply SC")
        _implies(violations, entry.clc, lc, f"CLC_{ring} must imply LC")
        if ring.is_field and entry.avn is not None and entry.aff_sc is not None:
            if entry.avn != entry.aff_sc:
                violations.append(
                    f"over the prime ring {ring}, AvN and SC of the affine "
                    "closure must coincide"
                )
    if violations:
        raise SelfCheckError(
            "hierarchy violation on this model: " + "; ".join(violations)
        )


def analyze(
    doc: ModelDocument,
    rings: tuple[RingSpec, ...] | None = None,
    budget: int | None = None,
) -> AnalysisReport:
    budget = DEFAULT_SEARCH_BUDGET if budget is None else budget
    timings: list[StageTiming] = []

    def timed(stage: str, thunk):
        start = time.perf_counter()
        result = thunk()
        timings.append(StageTiming(stage, time.perf_counter() - start))
        return result

    model = timed("materialise", lambda: materialize(doc))
    ns = timed("no-signalling", lambda: check_no_signalling(model))
    classification = timed("classify", lambda: classify_contextuality(model, budget=budget))

    requested = tuple(rings) if rings is not None else default_rings(doc)
    ordered: list[RingSpec] = []
    for ring in requested + (_INTEGER_RING,):
        if ring not in ordered:
            ordered.append(ring)

    entries = []
    for ring in ordered:
        avn_report = None
        avn = None
        avn_skipped = None
        aff_sc = None
        aff_skipped = None
        if ring.is_finite:
            try:
                avn_report = timed(f"avn {ring}", lambda: is_avn(model, ring))
                avn = avn_report.avn
            except OutcomeCoercionError as exc:
                avn_skipped = str(exc)
            try:
                aff = timed(f"affine {ring}", lambda: affine_closure_model(model, ring))
                aff_classification = timed(
                    f"classify affine {ring}",
                    lambda: classify_contextuality(aff, budget=budget),
                )
                aff_sc = aff_classification.strongly_contextual
                if aff_sc is None:
                    aff_skipped = "undecided within the search budget"
            except OutcomeCoercionError as exc:
                aff_skipped = str(exc)
        else:
            avn_skipped = "All-vs-Nothing needs a finite ring"
            aff_skipped = "affine closure needs a finite ring"
        obstructions = timed(
            f"cohomology {ring}", lambda: classify_cohomological(model, ring)
        )
        entries.append(
            RingAnalysis(
                ring,
                avn,
                avn_report,
                avn_skipped,
                aff_sc,
                aff_skipped,
                obstructions,
                obstructions.clc,
                obstructions.csc,
            )
        )

    report = AnalysisReport(
        name=doc.name,
        payload_kind=doc.payload_kind,
        sha256=document_hash(doc),
        model=model,
        no_signalling=ns.holds,
        classification=classification,
        rings=tuple(entries),
        budget=budget,
        timings=tuple(timings),
    )
    _check_hierarchy(report)
    return report


# ---------------------------------------------------------------------------
# rendering


def _verdict(value: bool | None) -> str:
    if value is None:
        return "undecided"
    return "yes" if value else "no"


def render_text(report: AnalysisReport) -> str:
    model = report.model
    scn = model.scenario
    lines = []
    title = report.name or "model"
    lines.append(f"{title}  (sha256 {report.sha256[:12]})")
    lines.append(
        f"scenario: {len(scn.measurements)} measurements, "
        f"{len(scn.contexts)} contexts, alphabet {set(scn.outcomes)}; "
        f"payload {report.payload_kind}"
    )
    lines.append(f"no-signalling: {_verdict(report.no_signalling)}")
    cls = report.classification
    lines.append(f"logically contextual (LC): {_verdict(cls.logically_contextual)}")
    failing = cls.failing_sections()
    if failing:
        shown = ", ".join(
            f"{v.section} at ({', '.join(v.context)})" for v in failing[:4]
        )
        more = "" if len(failing) <= 4 else f" and {len(failing) - 4} more"
        lines.append(f"  non-extending: {shown}{more}")
    lines.append(f"strongly contextual (SC): {_verdict(cls.strongly_contextual)}")
    if cls.global_section is not None:
        lines.append(f"  global section: {cls.global_section}")
    if not cls.decided:
        lines.append(f"  search budget exhausted after {cls.nodes_used} nodes")
    for entry in report.rings:
        lines.append(f"ring {entry.ring}:")
        if entry.avn is not None:
            detail = ""
            if entry.avn_report is not None:
                if entry.avn_report.solution is not None:
                    detail = f" (solution {entry.avn_report.solution})"
                elif entry.avn_report.reduced_system is not None:
                    rows = entry.avn_report.reduced_system.matrix.nrows
                    detail = f" (unsolvable; {rows} reduced rows)"
            lines.append(f"  AvN: {_verdict(entry.avn)}{detail}")
        else:
            lines.append(f"  AvN: skipped ({entry.avn_skipped})")
        if entry.aff_sc is not None:
            lines.append(f"  SC of affine closure: {_verdict(entry.aff_sc)}")
        elif entry.aff_skipped is not None:
            lines.append(f"  SC of affine closure: skipped ({entry.aff_skipped})")
        obs = entry.obstructions
        total = len(obs.verdicts)
        non_vanishing = len(obs.non_vanishing())
        lines.append(
            f"  obstructions: {non_vanishing} of {total} non-vanishing "
            f"(system {obs.unknowns} unknowns, {obs.compatibility_rows} "
            f"compatibility rows); CLC {_verdict(obs.clc)}, CSC {_verdict(obs.csc)}"
        )
    lines.append("hierarchy self-check: passed")
    lines.append(
        "timings: "
        + ", ".join(f"{t.stage} {t.seconds:.3f}s" for t in report.timings)
    )
    lines.append(f"search nodes: {cls.nodes_used} (budget {report.budget})")
    return "\n".join(lines) + "\n"


def report_json(report: AnalysisReport) -> dict:
    cls = report.classification
    return {
        "name": report.name,
        "sha256": report.sha256,
        "payload": report.payload_kind,
        "measurements": list(report.model.scenario.measurements),
        "contexts": [list(c) for c in report.model.scenario.contexts],
        "no_signalling": report.no_signalling,
        "logically_contextual": cls.logically_contextual,
        "strongly_contextual": cls.strongly_contextual,
        "global_section": str(cls.global_section) if cls.global_section else None,
        "non_extending": [
            {"context": list(v.context), "section": str(v.section)}
            for v in cls.failing_sections()
        ],
        "rings": [
            {
                "ring": str(entry.ring),
                "avn": entry.avn,
                "avn_skipped": entry.avn_skipped,
                "avn_solution": (
                    str(entry.avn_report.solution)
                    if entry.avn_report and entry.avn_report.solution is not None
                    else None
                ),
                "aff_sc": entry.aff_sc,
                "aff_skipped": entry.aff_skipped,
                "clc": entry.clc,
                "csc": entry.csc,
                "non_vanishing": len(entry.obstructions.non_vanishing()),
                "sections": len(entry.obstructions.verdicts),
                "system": {
                    "unknowns": entry.obstructions.unknowns,
                    "compatibility_rows": entry.obstructions.compatibility_rows,
                },
            }
            for entry in report.rings
        ],
        "budget": report.budget,
        "nodes": cls.nodes_used,
        "timings": {t.stage: t.seconds for t in report.timings},
        "hierarchy": "ok",
    }


def render_json(report: AnalysisReport) -> str:
    return json.dumps(report_json(report), indent=2, sort_keys=True) + "\n"
