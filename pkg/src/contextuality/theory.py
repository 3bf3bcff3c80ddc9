"""Linear equations over a ring, fibred over contexts.

The theory of a model is the set of equations every supported section of a
context satisfies. The set itself is infinite, but the pairs (a, b) with
a.s = b for all s in S(C) form a module: the kernel of the matrix whose rows
are [s | -1]. A generating set of that kernel determines the same solution
set, so consistency questions (AvN) reduce to finite linear systems.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Mapping

from .errors import (
    DegenerateModelError,
    OutcomeCoercionError,
    RingError,
    UnsupportedRingError,
)
from .model import EmpiricalModel
from .rings import (
    FieldDecomposition,
    LinearSystem,
    ModularDecomposition,
    RingMatrix,
    RingSpec,
    normal_form,
    solve_linear_system,
)
from .scenario import Scenario, Section


@dataclass(frozen=True)
class LinearEquation:
    """Sum over the context of coefficient(m) * s(m) equals the constant."""

    ring: RingSpec
    context: tuple[str, ...]
    coefficients: tuple[int, ...]
    constant: int

    def __post_init__(self):
        if len(self.coefficients) != len(self.context):
            raise RingError(
                f"{len(self.coefficients)} coefficients for a context of "
                f"{len(self.context)} measurements"
            )
        if len(set(self.context)) != len(self.context):
            raise RingError(f"repeated measurement in context {self.context}")
        object.__setattr__(
            self, "coefficients", tuple(self.ring.canon(c) for c in self.coefficients)
        )
        object.__setattr__(self, "constant", self.ring.canon(self.constant))

    def coefficient(self, measurement: str) -> int:
        if measurement in self.context:
            return self.coefficients[self.context.index(measurement)]
        return 0

    def __str__(self) -> str:
        terms = []
        for m, a in zip(self.context, self.coefficients):
            if a == 0:
                continue
            terms.append(m if a == 1 else f"{a}*{m}")
        lhs = " + ".join(terms) if terms else "0"
        suffix = f" (mod {self.ring.modulus})" if self.ring.is_finite else ""
        return f"{lhs} = {self.constant}{suffix}"


def satisfies(section: Section, equation: LinearEquation) -> bool:
    """Section satisfies the equation, reading outcomes as ring elements."""
    ring = equation.ring
    total = 0
    for m, a in zip(equation.context, equation.coefficients):
        total = ring.add(total, ring.mul(a, ring.canon(section[m])))
    return total == ring.canon(equation.constant)


@dataclass(frozen=True)
class Theory:
    ring: RingSpec
    equations: tuple[LinearEquation, ...]

    def __post_init__(self):
        deduped = []
        seen = set()
        for eq in self.equations:
            if eq.ring != self.ring:
                raise RingError(f"equation over {eq.ring} in a theory over {self.ring}")
            if eq not in seen:
                seen.add(eq)
                deduped.append(eq)
        object.__setattr__(self, "equations", tuple(deduped))

    def __len__(self) -> int:
        return len(self.equations)


def outcome_embedding(ring: RingSpec, outcomes: Iterable[int]) -> dict[int, int]:
    """Identify the outcome alphabet with ring elements via canonical
    reduction; the identification must be injective or equations lose
    information about which outcome occurred."""
    mapping = {}
    images = set()
    for o in outcomes:
        image = ring.canon(o)
        if image in images:
            raise OutcomeCoercionError(
                f"outcomes do not embed injectively into {ring}: "
                f"{o} collides at {image}"
            )
        images.add(image)
        mapping[o] = image
    return mapping


def theory_of_sections(
    ring: RingSpec,
    context: tuple[str, ...],
    sections: Iterable[Section],
    embedding: Mapping[int, int] | None = None,
) -> tuple[LinearEquation, ...]:
    """Generators of all equations over the context satisfied by every
    section: the kernel of the matrix with one row [s(m_1)..s(m_k), -1]
    per section, unknowns (a_1..a_k, b)."""
    if not ring.is_finite:
        raise UnsupportedRingError(
            "theories need a finite coefficient ring matching the outcomes"
        )
    secs = list(sections)
    if embedding is None:
        values = sorted({o for s in secs for o in s.as_dict().values()})
        embedding = outcome_embedding(ring, values)
    width = len(context) + 1
    rows = [
        [embedding[s[m]] for m in context] + [ring.canon(-1)] for s in secs
    ]
    if ring.is_field:
        generators = FieldDecomposition(rows, ring.modulus).kernel_basis()
    else:
        generators = ModularDecomposition(rows, width, ring.modulus).kernel_generators()
    equations = []
    for gen in generators:
        if all(x == 0 for x in gen):
            continue
        equations.append(
            LinearEquation(ring, context, tuple(gen[:-1]), gen[-1])
        )
    return tuple(equations)


def theory_of_model(model: EmpiricalModel, ring: RingSpec) -> Theory:
    """Per-context kernel generators, one batch per cover context."""
    if not ring.is_finite:
        raise UnsupportedRingError(
            "theory of a model needs a finite ring; the outcome alphabet "
            "must embed into it"
        )
    embedding = outcome_embedding(ring, model.scenario.outcomes)
    equations: list[LinearEquation] = []
    for ctx, sup in zip(model.scenario.contexts, model.supports):
        equations.extend(theory_of_sections(ring, ctx, sup, embedding))
    return Theory(ring, tuple(equations))


def solutions(
    theory: Theory,
    context: Iterable[str],
    alphabet: Iterable[int] | None = None,
) -> tuple[Section, ...]:
    """Sections over the context satisfying every equation whose context is
    contained in it. The alphabet defaults to the ring's canonical elements."""
    ring = theory.ring
    ctx = tuple(context)
    if alphabet is None:
        if not ring.is_finite:
            raise UnsupportedRingError("cannot enumerate sections over an infinite ring")
        alphabet = tuple(ring.elements())
    else:
        alphabet = tuple(alphabet)
    ctx_set = set(ctx)
    applicable = [eq for eq in theory.equations if set(eq.context) <= ctx_set]
    found = []
    for values in product(alphabet, repeat=len(ctx)):
        s = Section.of(zip(ctx, values))
        if all(satisfies(s, eq) for eq in applicable):
            found.append(s)
    return tuple(found)


def model_of_theory(theory: Theory, scenario: Scenario) -> EmpiricalModel:
    """Largest model with the given theory: per-context solution sets.

    A context left without solutions is an inconsistency in the theory
    itself, reported as a degenerate model rather than silently dropped.
    """
    if not theory.ring.is_finite:
        raise UnsupportedRingError("materialising a theory needs a finite ring")
    outcome_embedding(theory.ring, scenario.outcomes)
    supports = []
    for ctx in scenario.contexts:
        sols = solutions(theory, ctx, scenario.outcomes)
        if not sols:
            raise DegenerateModelError(
                f"theory admits no section over context {ctx}", context=ctx
            )
        supports.append(sols)
    return EmpiricalModel(scenario, tuple(supports))


# ---------------------------------------------------------------------------
# AvN decisions


@dataclass(frozen=True)
class AvnReport:
    """Consistency verdict for the global theory system.

    avn means unsolvable: no assignment X -> R satisfies every generator.
    Exactly one certificate is present: a satisfying global assignment, or
    the system in reduced form with the impossible row visible.
    """

    ring: RingSpec
    avn: bool
    theory: Theory
    solution: Section | None
    reduced_system: LinearSystem | None
    fixed: Section | None = None


def _theory_rows(model: EmpiricalModel, theory: Theory) -> list[list[int]]:
    measurements = model.scenario.measurements
    index = {m: i for i, m in enumerate(measurements)}
    rows = []
    for eq in theory.equations:
        row = [0] * len(measurements)
        for m, a in zip(eq.context, eq.coefficients):
            row[index[m]] = a
        rows.append(row)
    return rows


def _reduced_system(ring: RingSpec, rows: list[list[int]], rhs: list[int]) -> LinearSystem:
    """Row-reduce the augmented system so unsolvability is visible."""
    ncols = len(rows[0]) if rows else 0
    augmented = RingMatrix(
        ring,
        len(rows),
        ncols + 1,
        tuple(ring.canon(x) for row, b in zip(rows, rhs) for x in row + [b]),
    )
    nf = normal_form(augmented)
    reduced = nf.hermite.rows() if ring.is_integers else nf.form.rows()
    kept = [row for row in reduced if any(x != 0 for x in row)]
    matrix = RingMatrix(
        ring, len(kept), ncols, tuple(x for row in kept for x in row[:-1])
    )
    return LinearSystem(matrix, tuple(row[-1] for row in kept))


def _decide_system(
    model: EmpiricalModel,
    theory: Theory,
    extra_rows: list[list[int]],
    extra_rhs: list[int],
) -> tuple[bool, Section | None, LinearSystem | None]:
    measurements = model.scenario.measurements
    rows = _theory_rows(model, theory) + extra_rows
    rhs = [eq.constant for eq in theory.equations] + extra_rhs
    if not rows:
        zero = Section.of({m: 0 for m in measurements})
        return False, zero, None
    system = LinearSystem(
        RingMatrix(
            theory.ring,
            len(rows),
            len(measurements),
            tuple(theory.ring.canon(x) for row in rows for x in row),
        ),
        tuple(theory.ring.canon(b) for b in rhs),
    )
    verdict = solve_linear_system(system)
    if verdict.solvable:
        solution = Section.of(dict(zip(measurements, verdict.solution)))
        return False, solution, None
    return True, None, _reduced_system(theory.ring, rows, rhs)


def is_avn(model: EmpiricalModel, ring: RingSpec) -> AvnReport:
    """All-vs-Nothing over the ring: the model's theory has no global solution."""
    theory = theory_of_model(model, ring)
    avn, solution, reduced = _decide_system(model, theory, [], [])
    return AvnReport(ring, avn, theory, solution, reduced)


def is_avn_at(model: EmpiricalModel, s0: Section, ring: RingSpec) -> AvnReport:
    """AvN relative to a section: no theory solution extends s0."""
    model.context_of_section(s0)
    theory = theory_of_model(model, ring)
    embedding = outcome_embedding(ring, model.scenario.outcomes)
    measurements = model.scenario.measurements
    index = {m: i for i, m in enumerate(measurements)}
    fixing_rows = []
    fixing_rhs = []
    for m in model.scenario.sorted_measurements(s0.domain):
        row = [0] * len(measurements)
        row[index[m]] = 1
        fixing_rows.append(row)
        fixing_rhs.append(embedding[s0[m]])
    avn, solution, reduced = _decide_system(model, theory, fixing_rows, fixing_rhs)
    return AvnReport(ring, avn, theory, solution, reduced, fixed=s0)


# ---------------------------------------------------------------------------
# affine closures


def affine_span(ring: RingSpec, vectors: Iterable[tuple[int, ...]]) -> frozenset[tuple[int, ...]]:
    """Closure of a set of R-vectors under affine combinations.

    Fixpoint iteration over combinations of bounded arity: ternary
    combinations c1*v1 + c2*v2 + (1 - c1 - c2)*v3 reach the full affine
    span over any Z_n; over fields with more than two elements binary
    combinations already do.
    """
    if not ring.is_finite:
        raise UnsupportedRingError("affine spans over the integers may be infinite")
    current = {tuple(ring.canon(x) for x in v) for v in vectors}
    if not current:
        return frozenset()
    dim = len(next(iter(current)))
    elements = tuple(ring.elements())

    def combine2(u, v, c):
        d = ring.sub(1, c)
        return tuple(
            ring.add(ring.mul(c, a), ring.mul(d, b)) for a, b in zip(u, v)
        )

    def combine3(u, v, w, c1, c2):
        c3 = ring.sub(ring.sub(1, c1), c2)
        return tuple(
            ring.add(
                ring.add(ring.mul(c1, a), ring.mul(c2, b)), ring.mul(c3, x)
            )
            for a, b, x in zip(u, v, w)
        )

    binary_only = ring.is_field and ring.modulus > 2
    # combinations are symmetric under permuting their arguments (the
    # coefficients range over everything), so each round only needs triples
    # touching an element from the previous round's additions; the closure
    # also cannot outgrow the full space, so reaching it ends the search
    full_size = len(elements) ** dim
    frontier = list(current)
    while frontier and len(current) < full_size:
        fresh: list[tuple[int, ...]] = []
        snapshot = tuple(current)
        if binary_only:
            for u in frontier:
                for v in snapshot:
                    for c in elements:
                        w = combine2(u, v, c)
                        if w not in current:
                            current.add(w)
                            fresh.append(w)
        else:
            for u in frontier:
                for v in snapshot:
                    for w0 in snapshot:
                        for c1 in elements:
                            for c2 in elements:
                                w = combine3(u, v, w0, c1, c2)
                                if w not in current:
                                    current.add(w)
                                    fresh.append(w)
        frontier = fresh
    return frozenset(current)


def affine_closure_sections(
    ring: RingSpec,
    context: tuple[str, ...],
    sections: Iterable[Section],
    embedding: Mapping[int, int],
) -> tuple[Section, ...]:
    vectors = {tuple(embedding[s[m]] for m in context) for s in sections}
    closed = affine_span(ring, vectors)
    return tuple(
        Section.of(zip(context, v)) for v in sorted(closed)
    )


def affine_closure_model(model: EmpiricalModel, ring: RingSpec) -> EmpiricalModel:
    """Per-context affine closure over the ring.

    The closed supports take values anywhere in the ring, so the returned
    model lives over the same cover with the ring's canonical elements as
    its outcome alphabet. Closure commutes with restriction, which is what
    keeps the result no-signalling.
    """
    if not ring.is_finite:
        raise UnsupportedRingError("affine closure over the integers may be infinite")
    embedding = outcome_embedding(ring, model.scenario.outcomes)
    scenario = Scenario(
        model.scenario.measurements,
        model.scenario.contexts,
        tuple(ring.elements()),
    )
    supports = tuple(
        affine_closure_sections(ring, ctx, sup, embedding)
        for ctx, sup in zip(scenario.contexts, model.supports)
    )
    return EmpiricalModel(scenario, supports)
