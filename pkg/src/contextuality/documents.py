"""Reading and writing model documents.

One JSON document describes one model: a scenario block plus exactly one
payload (explicit supports, exact probabilities, a linear theory, a liar
cycle, or a Pauli triple). Parsing is total: any malformed input becomes a
DocumentError carrying the JSON path of the first offence. Printing is
canonical, so parse and print are mutually inverse on printed documents and
hashing the printed bytes identifies the model.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Mapping

from .errors import DocumentError
from .model import EmpiricalModel, ProbabilityTable, support_of_probability_table
from .paradox import LiarCycle, liar_cycle_model
from .pauli import PauliOperator, generate_subgroup, theory_of_subgroup
from .rings import RingSpec
from .scenario import Scenario, Section
from .theory import LinearEquation, Theory, model_of_theory

SCHEMA = "contextuality-model/1"

PAYLOAD_KINDS = ("supports", "probabilities", "theory", "liar_cycle", "pauli_triple")

_TOP_KEYS = {"format", "name", "notes", "provenance", "scenario", *PAYLOAD_KINDS}


@dataclass(frozen=True)
class RawEquation:
    """A theory equation as written: nonzero coefficients by measurement,
    expanded onto every cover context that contains them jointly."""

    coefficients: tuple[tuple[str, int], ...]
    constant: int


@dataclass(frozen=True)
class ModelDocument:
    scenario: Scenario
    payload_kind: str
    model: EmpiricalModel | None = None
    table: ProbabilityTable | None = None
    theory: Theory | None = None
    raw_equations: tuple[RawEquation, ...] | None = None
    modulus: int | None = None
    liar_cycle: LiarCycle | None = None
    pauli_triple: tuple[PauliOperator, ...] | None = None
    name: str | None = None
    notes: str | None = None
    provenance: str | None = None
    ring_outcomes: bool = False  # outcomes written as {"modulus": n}


# ---------------------------------------------------------------------------
# parsing


def _expect(value: Any, kind: type, what: str, path: str):
    if kind is int and isinstance(value, bool):
        raise DocumentError(f"expected {what}, got a boolean", path=path)
    if not isinstance(value, kind):
        raise DocumentError(
            f"expected {what}, got {type(value).__name__}", path=path
        )
    return value


def _check_keys(obj: Mapping, allowed: set[str], path: str) -> None:
    for key in obj:
        if key not in allowed:
            raise DocumentError(f"unknown field {key!r}", path=f"{path}.{key}")


def _parse_scenario(obj: Any, path: str) -> tuple[Scenario, bool]:
    _expect(obj, dict, "an object", path)
    _check_keys(obj, {"measurements", "contexts", "outcomes"}, path)
    for field in ("measurements", "contexts", "outcomes"):
        if field not in obj:
            raise DocumentError(f"missing field {field!r}", path=path)
    measurements = _expect(obj["measurements"], list, "a list", f"{path}.measurements")
    for i, m in enumerate(measurements):
        _expect(m, str, "a measurement name", f"{path}.measurements[{i}]")
    contexts = _expect(obj["contexts"], list, "a list", f"{path}.contexts")
    for i, ctx in enumerate(contexts):
        _expect(ctx, list, "a list of measurement names", f"{path}.contexts[{i}]")
        for j, m in enumerate(ctx):
            _expect(m, str, "a measurement name", f"{path}.contexts[{i}][{j}]")
    outcomes_obj = obj["outcomes"]
    ring_outcomes = False
    if isinstance(outcomes_obj, dict):
        _check_keys(outcomes_obj, {"modulus"}, f"{path}.outcomes")
        if "modulus" not in outcomes_obj:
            raise DocumentError("missing field 'modulus'", path=f"{path}.outcomes")
        n = _expect(outcomes_obj["modulus"], int, "an integer", f"{path}.outcomes.modulus")
        if n < 2:
            raise DocumentError(f"modulus must be at least 2, got {n}", path=f"{path}.outcomes.modulus")
        outcomes = tuple(range(n))
        ring_outcomes = True
    else:
        outcomes_list = _expect(outcomes_obj, list, "a list or a modulus object", f"{path}.outcomes")
        for i, o in enumerate(outcomes_list):
            _expect(o, int, "an integer outcome", f"{path}.outcomes[{i}]")
        outcomes = tuple(outcomes_list)
    scenario = Scenario(
        tuple(measurements), tuple(tuple(c) for c in contexts), outcomes
    )
    return scenario, ring_outcomes


def _parse_section(obj: Any, scenario: Scenario, context: tuple[str, ...], path: str) -> Section:
    _expect(obj, dict, "a section object", path)
    ctx_set = set(context)
    for m in obj:
        if m not in ctx_set:
            raise DocumentError(
                f"{m!r} is not a measurement of context {context}", path=f"{path}.{m}"
            )
    for m in context:
        if m not in obj:
            raise DocumentError(f"missing value for {m!r}", path=path)
        o = _expect(obj[m], int, "an integer outcome", f"{path}.{m}")
        if o not in scenario.outcomes:
            raise DocumentError(
                f"outcome {o} is not in the alphabet {scenario.outcomes}",
                path=f"{path}.{m}",
            )
    return Section.of((m, obj[m]) for m in context)


def _parse_supports(obj: Any, scenario: Scenario, path: str) -> EmpiricalModel:
    rows = _expect(obj, list, "a list of support rows", path)
    if len(rows) != len(scenario.contexts):
        raise DocumentError(
            f"expected {len(scenario.contexts)} rows (one per context), got {len(rows)}",
            path=path,
        )
    supports = []
    for i, (ctx, row) in enumerate(zip(scenario.contexts, rows)):
        _expect(row, list, "a list of sections", f"{path}[{i}]")
        supports.append(
            tuple(
                _parse_section(s, scenario, ctx, f"{path}[{i}][{j}]")
                for j, s in enumerate(row)
            )
        )
    return EmpiricalModel(scenario, tuple(supports))


def _parse_fraction(value: Any, path: str) -> Fraction:
    text = _expect(value, str, 'a rational written as a string like "3/8"', path)
    try:
        frac = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise DocumentError(f"invalid rational {text!r}: {exc}", path=path) from None
    return frac


def _parse_probabilities(obj: Any, scenario: Scenario, path: str) -> ProbabilityTable:
    rows = _expect(obj, list, "a list of probability rows", path)
    if len(rows) != len(scenario.contexts):
        raise DocumentError(
            f"expected {len(scenario.contexts)} rows (one per context), got {len(rows)}",
            path=path,
        )
    table_rows = []
    for i, (ctx, row) in enumerate(zip(scenario.contexts, rows)):
        _expect(row, list, "a list of probability entries", f"{path}[{i}]")
        entries = []
        for j, entry in enumerate(row):
            entry_path = f"{path}[{i}][{j}]"
            _expect(entry, dict, "an object", entry_path)
            _check_keys(entry, {"section", "p"}, entry_path)
            for field in ("section", "p"):
                if field not in entry:
                    raise DocumentError(f"missing field {field!r}", path=entry_path)
            section = _parse_section(entry["section"], scenario, ctx, f"{entry_path}.section")
            entries.append((section, _parse_fraction(entry["p"], f"{entry_path}.p")))
        table_rows.append(tuple(entries))
    return ProbabilityTable(scenario, tuple(table_rows))


def _parse_theory(obj: Any, scenario: Scenario, path: str) -> tuple[Theory, tuple[RawEquation, ...], int]:
    _expect(obj, dict, "an object", path)
    _check_keys(obj, {"modulus", "equations"}, path)
    for field in ("modulus", "equations"):
        if field not in obj:
            raise DocumentError(f"missing field {field!r}", path=path)
    modulus = _expect(obj["modulus"], int, "an integer", f"{path}.modulus")
    if modulus < 2:
        raise DocumentError(f"modulus must be at least 2, got {modulus}", path=f"{path}.modulus")
    ring = RingSpec(modulus)
    equations_obj = _expect(obj["equations"], list, "a list of equations", f"{path}.equations")
    raw: list[RawEquation] = []
    expanded: list[LinearEquation] = []
    measurements = set(scenario.measurements)
    for i, eq in enumerate(equations_obj):
        eq_path = f"{path}.equations[{i}]"
        _expect(eq, dict, "an object", eq_path)
        _check_keys(eq, {"coefficients", "constant"}, eq_path)
        for field in ("coefficients", "constant"):
            if field not in eq:
                raise DocumentError(f"missing field {field!r}", path=eq_path)
        coeffs_obj = _expect(eq["coefficients"], dict, "an object", f"{eq_path}.coefficients")
        constant = _expect(eq["constant"], int, "an integer", f"{eq_path}.constant")
        coeffs = {}
        for m, c in coeffs_obj.items():
            if m not in measurements:
                raise DocumentError(
                    f"{m!r} is not a measurement of the scenario",
                    path=f"{eq_path}.coefficients.{m}",
                )
            value = ring.canon(_expect(c, int, "an integer", f"{eq_path}.coefficients.{m}"))
            if value != 0:
                coeffs[m] = value
        names = set(coeffs)
        containing = [ctx for ctx in scenario.contexts if names <= set(ctx)]
        if not containing:
            raise DocumentError(
                f"no cover context contains {sorted(names)} jointly", path=eq_path
            )
        raw.append(
            RawEquation(
                tuple(sorted(coeffs.items())), ring.canon(constant)
            )
        )
        for ctx in containing:
            expanded.append(
                LinearEquation(
                    ring, ctx, tuple(coeffs.get(m, 0) for m in ctx), constant
                )
            )
    return Theory(ring, tuple(expanded)), tuple(raw), modulus


def _parse_liar(obj: Any, path: str) -> LiarCycle:
    _expect(obj, dict, "an object", path)
    _check_keys(obj, {"length"}, path)
    if "length" not in obj:
        raise DocumentError("missing field 'length'", path=path)
    n = _expect(obj["length"], int, "an integer", f"{path}.length")
    if n < 1:
        raise DocumentError(f"length must be positive, got {n}", path=f"{path}.length")
    return LiarCycle(n)


def _parse_triple(obj: Any, path: str) -> tuple[PauliOperator, ...]:
    _expect(obj, dict, "an object", path)
    _check_keys(obj, {"operators"}, path)
    if "operators" not in obj:
        raise DocumentError("missing field 'operators'", path=path)
    ops_obj = _expect(obj["operators"], list, "a list of three operators", f"{path}.operators")
    if len(ops_obj) != 3:
        raise DocumentError(
            f"expected exactly three operators, got {len(ops_obj)}", path=f"{path}.operators"
        )
    ops = []
    for i, text in enumerate(ops_obj):
        _expect(text, str, "an operator string", f"{path}.operators[{i}]")
        try:
            ops.append(PauliOperator.parse(text))
        except Exception as exc:
            raise DocumentError(str(exc), path=f"{path}.operators[{i}]") from None
    if len({op.arity for op in ops}) != 1:
        raise DocumentError("operators must share an arity", path=f"{path}.operators")
    return tuple(ops)


def parse_model(text: str) -> ModelDocument:
    """Parse and validate a document. Schema offences become DocumentError
    with a path; domain offences (non-antichain cover, signalling
    probabilities, empty supports) surface as their own error types."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(
            f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None
    _expect(data, dict, "an object", "$")
    _check_keys(data, _TOP_KEYS, "$")
    if "format" not in data:
        raise DocumentError("missing field 'format'", path="$")
    fmt = _expect(data["format"], str, "a string", "$.format")
    if fmt != SCHEMA:
        raise DocumentError(
            f"unsupported format {fmt!r}; this reader understands {SCHEMA!r}",
            path="$.format",
        )
    for field in ("name", "notes", "provenance"):
        if field in data:
            _expect(data[field], str, "a string", f"$.{field}")
    if "scenario" not in data:
        raise DocumentError("missing field 'scenario'", path="$")
    scenario, ring_outcomes = _parse_scenario(data["scenario"], "$.scenario")

    present = [k for k in PAYLOAD_KINDS if k in data]
    if len(present) != 1:
        raise DocumentError(
            "a document carries exactly one payload out of "
            f"{PAYLOAD_KINDS}, found {present or 'none'}",
            path="$",
        )
    kind = present[0]
    common = dict(
        scenario=scenario,
        payload_kind=kind,
        name=data.get("name"),
        notes=data.get("notes"),
        provenance=data.get("provenance"),
        ring_outcomes=ring_outcomes,
    )
    if kind == "supports":
        return ModelDocument(model=_parse_supports(data[kind], scenario, "$.supports"), **common)
    if kind == "probabilities":
        return ModelDocument(table=_parse_probabilities(data[kind], scenario, "$.probabilities"), **common)
    if kind == "theory":
        theory, raw, modulus = _parse_theory(data[kind], scenario, "$.theory")
        return ModelDocument(theory=theory, raw_equations=raw, modulus=modulus, **common)
    if kind == "liar_cycle":
        return ModelDocument(liar_cycle=_parse_liar(data[kind], "$.liar_cycle"), **common)
    return ModelDocument(pauli_triple=_parse_triple(data[kind], "$.pauli_triple"), **common)


# ---------------------------------------------------------------------------
# printing


def _scenario_json(doc: ModelDocument) -> dict:
    scn = doc.scenario
    outcomes: Any
    if doc.ring_outcomes:
        outcomes = {"modulus": len(scn.outcomes)}
    else:
        outcomes = list(scn.outcomes)
    return {
        "measurements": list(scn.measurements),
        "contexts": [list(c) for c in scn.contexts],
        "outcomes": outcomes,
    }


def _section_json(section: Section, context: tuple[str, ...]) -> dict:
    return {m: section[m] for m in context}


def _payload_json(doc: ModelDocument) -> Any:
    scn = doc.scenario
    if doc.payload_kind == "supports":
        return [
            [_section_json(s, ctx) for s in sup]
            for ctx, sup in zip(scn.contexts, doc.model.supports)
        ]
    if doc.payload_kind == "probabilities":
        return [
            [
                {"section": _section_json(s, ctx), "p": str(p)}
                for s, p in row
            ]
            for ctx, row in zip(scn.contexts, doc.table.rows)
        ]
    if doc.payload_kind == "theory":
        return {
            "modulus": doc.modulus,
            "equations": [
                {"coefficients": dict(eq.coefficients), "constant": eq.constant}
                for eq in doc.raw_equations
            ],
        }
    if doc.payload_kind == "liar_cycle":
        return {"length": doc.liar_cycle.length}
    return {"operators": [str(op) for op in doc.pauli_triple]}


def print_model(doc: ModelDocument) -> str:
    """Canonical rendering: sorted keys, two-space indent, trailing newline.
    Printing then parsing is the identity on documents, and parsing then
    printing is the identity on canonical text."""
    data: dict[str, Any] = {"format": SCHEMA}
    for field in ("name", "notes", "provenance"):
        value = getattr(doc, field)
        if value is not None:
            data[field] = value
    data["scenario"] = _scenario_json(doc)
    data[doc.payload_kind] = _payload_json(doc)
    return json.dumps(data, ensure_ascii=False, indent=2, sort_keys=True) + "\n"


def document_hash(doc: ModelDocument) -> str:
    return hashlib.sha256(print_model(doc).encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# materialisation


def materialize(doc: ModelDocument) -> EmpiricalModel:
    """The empirical model a document denotes.

    Theories materialise as their maximal models, liar cycles and Pauli
    triples through their describing constructions; a declared scenario
    inconsistent with the payload's own scenario is an authoring error.
    """
    if doc.payload_kind == "supports":
        return doc.model
    if doc.payload_kind == "probabilities":
        return support_of_probability_table(doc.table)
    if doc.payload_kind == "theory":
        return model_of_theory(doc.theory, doc.scenario)
    if doc.payload_kind == "liar_cycle":
        model = liar_cycle_model(doc.liar_cycle)
        if model.scenario != doc.scenario:
            raise DocumentError(
                f"declared scenario does not match a liar cycle of length "
                f"{doc.liar_cycle.length}",
                path="$.scenario",
            )
        return model
    subgroup = generate_subgroup(doc.pauli_triple)
    theory = theory_of_subgroup(subgroup, doc.scenario)
    return model_of_theory(theory, doc.scenario)


# ---------------------------------------------------------------------------
# document construction, used by the corpus and the CLI


def _common(name, notes, provenance, scenario, kind, ring_outcomes=False) -> dict:
    return dict(
        scenario=scenario,
        payload_kind=kind,
        name=name,
        notes=notes,
        provenance=provenance,
        ring_outcomes=ring_outcomes,
    )


def document_from_model(
    model: EmpiricalModel,
    name: str | None = None,
    notes: str | None = None,
    provenance: str | None = None,
) -> ModelDocument:
    return ModelDocument(
        model=model,
        **_common(name, notes, provenance, model.scenario, "supports"),
    )


def document_from_table(
    table: ProbabilityTable,
    name: str | None = None,
    notes: str | None = None,
    provenance: str | None = None,
) -> ModelDocument:
    return ModelDocument(
        table=table,
        **_common(name, notes, provenance, table.scenario, "probabilities"),
    )


def document_from_equations(
    scenario: Scenario,
    modulus: int,
    equations: Iterable[tuple[Mapping[str, int], int]],
    name: str | None = None,
    notes: str | None = None,
    provenance: str | None = None,
) -> ModelDocument:
    """Equations given as (coefficients-by-measurement, constant) pairs."""
    ring = RingSpec(modulus)
    raw = []
    expanded = []
    for coeffs, constant in equations:
        kept = {m: ring.canon(c) for m, c in coeffs.items() if ring.canon(c) != 0}
        names = set(kept)
        containing = [ctx for ctx in scenario.contexts if names <= set(ctx)]
        if not containing:
            raise DocumentError(f"no cover context contains {sorted(names)} jointly")
        raw.append(RawEquation(tuple(sorted(kept.items())), ring.canon(constant)))
        for ctx in containing:
            expanded.append(
                LinearEquation(ring, ctx, tuple(kept.get(m, 0) for m in ctx), constant)
            )
    return ModelDocument(
        theory=Theory(ring, tuple(expanded)),
        raw_equations=tuple(raw),
        modulus=modulus,
        **_common(name, notes, provenance, scenario, "theory"),
    )


def document_from_liar_cycle(
    length: int,
    name: str | None = None,
    notes: str | None = None,
    provenance: str | None = None,
) -> ModelDocument:
    model = liar_cycle_model(length)
    return ModelDocument(
        liar_cycle=LiarCycle(length),
        **_common(name, notes, provenance, model.scenario, "liar_cycle"),
    )


def document_from_triple(
    triple: tuple[PauliOperator, PauliOperator, PauliOperator],
    scenario: Scenario,
    name: str | None = None,
    notes: str | None = None,
    provenance: str | None = None,
) -> ModelDocument:
    return ModelDocument(
        pauli_triple=tuple(triple),
        **_common(name, notes, provenance, scenario, "pauli_triple"),
    )
