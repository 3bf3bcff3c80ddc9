"""Possibilistic empirical models over measurement scenarios.

A model assigns each cover context a non-empty set of supported sections
(E1) such that supports agree on overlaps (E2, no-signalling). Compatible
families of supported sections glue to global assignments, which is what the
contextuality classification searches for: a section is logically contextual
when no global assignment consistent with every context extends it, and the
model is strongly contextual when no global assignment exists at all.
"""

from __future__ import annotations

from dataclasses import InitVar, dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import (
    EmptySupportError,
    ModelError,
    NormalisationError,
    ScenarioError,
    SelfCheckError,
    SignallingError,
)
from .scenario import Scenario, Section, sections_of

DEFAULT_SEARCH_BUDGET = 2_000_000


@dataclass(frozen=True)
class EmpiricalModel:
    """Supports S(C) for each cover context, E1 and E2 enforced on entry.

    Construction with validate=False skips E1/E2 for diagnostic use (for
    example feeding a deliberately signalling table to check_no_signalling);
    every ingestion path in the library validates.
    """

    scenario: Scenario
    supports: tuple[tuple[Section, ...], ...]
    validate: InitVar[bool] = True

    def __post_init__(self, validate: bool):
        scn = self.scenario
        if len(self.supports) != len(scn.contexts):
            raise ModelError(
                f"expected {len(scn.contexts)} supports, got {len(self.supports)}"
            )
        outcome_pos = {o: i for i, o in enumerate(scn.outcomes)}
        normalised = []
        for ctx, sup in zip(scn.contexts, self.supports):
            ctx_set = frozenset(ctx)
            seen = set()
            for s in sup:
                if s.domain != ctx_set:
                    raise ModelError(f"section {s} is not a section over context {ctx}")
                for _, o in s.items:
                    if o not in outcome_pos:
                        raise ModelError(f"section {s} uses outcome outside the alphabet")
                seen.add(s)
            ordered = sorted(seen, key=lambda s: tuple(outcome_pos[s[m]] for m in ctx))
            normalised.append(tuple(ordered))
        object.__setattr__(self, "supports", tuple(normalised))
        object.__setattr__(self, "_restriction_cache", {})
        object.__setattr__(self, "_support_sets", tuple(frozenset(s) for s in self.supports))
        if validate:
            for ctx, sup in zip(scn.contexts, self.supports):
                if not sup:
                    raise EmptySupportError(f"context {ctx} has empty support (E1)")
            witness = _signalling_witness(scn, self.supports)
            if witness is not None:
                (i, j), t, side = witness
                raise SignallingError(
                    f"supports of {scn.contexts[i]} and {scn.contexts[j]} disagree "
                    f"on overlap section {t} (E2)",
                    contexts=(scn.contexts[i], scn.contexts[j]),
                    section=t,
                )

    # -- access ---------------------------------------------------------------

    def support(self, index: int) -> tuple[Section, ...]:
        return self.supports[index]

    def support_set(self, index: int) -> frozenset[Section]:
        return self._support_sets[index]

    def section_key(self, context: tuple[str, ...], s: Section) -> tuple[int, ...]:
        pos = {o: i for i, o in enumerate(self.scenario.outcomes)}
        return tuple(pos[s[m]] for m in context)

    def restricted_support(self, index: int, subset: Iterable[str]) -> tuple[Section, ...]:
        """Image of S(C_index) under restriction to the subset, ordered
        lexicographically. For subsets beneath the cover this is S(U) by E2."""
        sub = self.scenario.sorted_measurements(subset)
        key = (index, sub)
        cache = self._restriction_cache
        if key not in cache:
            if not set(sub) <= set(self.scenario.contexts[index]):
                raise ModelError(
                    f"{sub} is not beneath context {self.scenario.contexts[index]}"
                )
            image = {s.restrict(sub) for s in self.supports[index]}
            pos = {o: i for i, o in enumerate(self.scenario.outcomes)}
            cache[key] = tuple(sorted(image, key=lambda s: tuple(pos[s[m]] for m in sub)))
        return cache[key]

    def context_of_section(self, s: Section) -> int:
        """Index of the cover context equal to the section's domain; the
        section must be supported there."""
        idx = self.scenario.context_index(s.domain)
        if s not in self._support_sets[idx]:
            from .errors import SectionNotSupportedError

            raise SectionNotSupportedError(
                f"{s} is not in the support of {self.scenario.contexts[idx]}"
            )
        return idx


def _signalling_witness(scenario, supports):
    """First E2 violation in canonical order, or None.

    Canonical order: context pairs (i, j) with i < j in cover order, overlap
    sections in lexicographic order.
    """
    pos = {o: i for i, o in enumerate(scenario.outcomes)}
    n = len(scenario.contexts)
    for i in range(n):
        for j in range(i + 1, n):
            overlap = tuple(
                m for m in scenario.contexts[i] if m in set(scenario.contexts[j])
            )
            if not overlap:
                continue
            left = {s.restrict(overlap) for s in supports[i]}
            right = {s.restrict(overlap) for s in supports[j]}
            if left == right:
                continue
            diff = sorted(
                left.symmetric_difference(right),
                key=lambda s: tuple(pos[s[m]] for m in overlap),
            )
            t = diff[0]
            side = "first" if t in left else "second"
            return (i, j), t, side
    return None


@dataclass(frozen=True)
class SignallingWitness:
    context_a: tuple[str, ...]
    context_b: tuple[str, ...]
    section: Section
    present_in: str  # which context's restriction contains the section


@dataclass(frozen=True)
class NoSignallingVerdict:
    holds: bool
    witness: SignallingWitness | None = None


def check_no_signalling(model: EmpiricalModel) -> NoSignallingVerdict:
    """Support-level E2 over every context pair; a false verdict carries the
    first violating pair and overlap section in canonical order."""
    w = _signalling_witness(model.scenario, model.supports)
    if w is None:
        return NoSignallingVerdict(True)
    (i, j), t, side = w
    return NoSignallingVerdict(
        False,
        SignallingWitness(
            context_a=model.scenario.contexts[i],
            context_b=model.scenario.contexts[j],
            section=t,
            present_in=side,
        ),
    )


# ---------------------------------------------------------------------------
# probability tables


@dataclass(frozen=True)
class ProbabilityTable:
    """Exact-rational distributions, one per cover context.

    Rows are stored with zero entries dropped, sections in lexicographic
    order. Validation: non-negative entries, each row sums to one, and
    marginal distributions agree exactly on every overlap.
    """

    scenario: Scenario
    rows: tuple[tuple[tuple[Section, Fraction], ...], ...]
    validate: InitVar[bool] = True

    def __post_init__(self, validate: bool):
        scn = self.scenario
        if len(self.rows) != len(scn.contexts):
            raise ModelError(f"expected {len(scn.contexts)} rows, got {len(self.rows)}")
        pos = {o: i for i, o in enumerate(scn.outcomes)}
        normalised = []
        for ctx, row in zip(scn.contexts, self.rows):
            ctx_set = frozenset(ctx)
            cleaned = {}
            for s, p in row:
                if s.domain != ctx_set:
                    raise ModelError(f"{s} is not a section over {ctx}")
                p = Fraction(p)
                if p < 0:
                    raise NormalisationError(f"negative probability {p} at {s}")
                if s in cleaned:
                    raise ModelError(f"duplicate section {s} in row for {ctx}")
                if p > 0:
                    cleaned[s] = p
            ordered = sorted(cleaned.items(), key=lambda kv: tuple(pos[kv[0][m]] for m in ctx))
            normalised.append(tuple(ordered))
        object.__setattr__(self, "rows", tuple(normalised))
        if validate:
            for ctx, row in zip(scn.contexts, self.rows):
                total = sum((p for _, p in row), Fraction(0))
                if total != 1:
                    raise NormalisationError(f"row for {ctx} sums to {total}, not 1")
            self._check_marginals()

    def _check_marginals(self):
        scn = self.scenario
        n = len(scn.contexts)
        for i in range(n):
            for j in range(i + 1, n):
                overlap = tuple(
                    m for m in scn.contexts[i] if m in set(scn.contexts[j])
                )
                if not overlap:
                    continue
                mi = self.marginal(i, overlap)
                mj = self.marginal(j, overlap)
                if mi != mj:
                    bad = next(
                        t for t in sorted(set(mi) | set(mj), key=str)
                        if mi.get(t, Fraction(0)) != mj.get(t, Fraction(0))
                    )
                    raise SignallingError(
                        f"distributions of {scn.contexts[i]} and {scn.contexts[j]} "
                        f"have different marginals at {bad}",
                        contexts=(scn.contexts[i], scn.contexts[j]),
                        section=bad,
                    )

    def marginal(self, index: int, subset: tuple[str, ...]) -> dict[Section, Fraction]:
        out: dict[Section, Fraction] = {}
        for s, p in self.rows[index]:
            t = s.restrict(subset)
            out[t] = out.get(t, Fraction(0)) + p
        return out

    @classmethod
    def from_mappings(
        cls,
        scenario: Scenario,
        mappings: Iterable[Mapping[Section, Fraction]],
        validate: bool = True,
    ) -> "ProbabilityTable":
        rows = tuple(tuple(m.items()) for m in mappings)
        return cls(scenario, rows, validate)

    @classmethod
    def uniform(cls, model: EmpiricalModel, validate: bool = True) -> "ProbabilityTable":
        """Uniform weight on each support row. May legitimately fail marginal
        validation: possibilistic no-signalling does not force it."""
        rows = tuple(
            tuple((s, Fraction(1, len(sup))) for s in sup) for sup in model.supports
        )
        return cls(model.scenario, rows, validate)


def support_of_probability_table(table: ProbabilityTable) -> EmpiricalModel:
    """Forget the weights: supported sections are exactly those with p > 0."""
    supports = tuple(tuple(s for s, _ in row) for row in table.rows)
    return EmpiricalModel(table.scenario, supports)


# ---------------------------------------------------------------------------
# compatible families


@dataclass(frozen=True)
class CompatibleFamily:
    """One supported section per cover context, pairwise agreeing on overlaps."""

    model: EmpiricalModel
    sections: tuple[Section, ...]

    def __post_init__(self):
        scn = self.model.scenario
        if len(self.sections) != len(scn.contexts):
            raise ModelError("one section per cover context required")
        for idx, (ctx, s) in enumerate(zip(scn.contexts, self.sections)):
            if s not in self.model.support_set(idx):
                raise ModelError(f"{s} not supported in context {ctx}")
        n = len(scn.contexts)
        for i in range(n):
            for j in range(i + 1, n):
                overlap = [m for m in scn.contexts[i] if m in set(scn.contexts[j])]
                if overlap and self.sections[i].restrict(overlap) != self.sections[j].restrict(overlap):
                    raise ModelError(
                        f"sections for {scn.contexts[i]} and {scn.contexts[j]} "
                        "disagree on their overlap"
                    )

    def glue(self) -> Section:
        """The unique global section restricting to every member."""
        values: dict[str, int] = {}
        for s in self.sections:
            for m, o in s.items:
                values.setdefault(m, o)
        glued = Section.of(values)
        for ctx, s in zip(self.model.scenario.contexts, self.sections):
            if glued.restrict(ctx) != s:
                raise SelfCheckError("glued section does not restrict to the family")
        return glued


# ---------------------------------------------------------------------------
# global-section search

class _Restrictor:
    """Depth-first enumeration of S(U) in lexicographic order.

    Measurements of U are assigned in declared order; after each assignment
    every context is forward-checked: the partial tuple over the context's
    already-assigned overlap must be a projection of some supported section.
    Visiting order coincides with exhaustive lexicographic enumeration, so
    witnesses are canonical.
    """

    def __init__(self, model: EmpiricalModel, domain: tuple[str, ...]):
        self.model = model
        self.order = domain
        self.outcomes = model.scenario.outcomes
        checks: dict[str, list[tuple[tuple[str, ...], set[tuple[int, ...]]]]] = {
            m: [] for m in domain
        }
        for ci, ctx in enumerate(model.scenario.contexts):
            ctx_set = set(ctx)
            overlap = tuple(m for m in domain if m in ctx_set)
            if not overlap:
                continue
            sup = model.supports[ci]
            for t in range(1, len(overlap) + 1):
                prefix = overlap[:t]
                checks[overlap[t - 1]].append(
                    (prefix, {s.values_on(prefix) for s in sup})
                )
        self.checks = [checks[m] for m in domain]

    def search(
        self,
        fixed: Section | None,
        limit: int | None,
        budget: int,
    ) -> tuple[list[Section], int, bool]:
        """Returns (sections found, nodes visited, search completed)."""
        order = self.order
        k = len(order)
        fixed_vals = fixed.as_dict() if fixed is not None else {}
        values: dict[str, int] = {}
        results: list[Section] = []
        nodes = 0
        complete = True

        def admissible(depth: int) -> bool:
            for prefix, proj in self.checks[depth]:
                if tuple(values[m] for m in prefix) not in proj:
                    return False
            return True

        def dfs(depth: int) -> bool:
            """Returns False when the budget ran out."""
            nonlocal nodes, complete
            if depth == k:
                results.append(Section.of(values.copy()))
                return True
            m = order[depth]
            candidates = (
                (fixed_vals[m],) if m in fixed_vals else self.outcomes
            )
            for o in candidates:
                if nodes >= budget:
                    complete = False
                    return False
                nodes += 1
                values[m] = o
                if admissible(depth):
                    if not dfs(depth + 1):
                        del values[m]
                        return False
                    if limit is not None and len(results) >= limit:
                        del values[m]
                        return True
                del values[m]
            return True

        dfs(0)
        if limit is not None and len(results) >= limit:
            complete = True
        return results, nodes, complete


def model_restriction(
    model: EmpiricalModel, subset: Iterable[str], budget: int = DEFAULT_SEARCH_BUDGET
) -> tuple[Section, ...]:
    """S(U) for arbitrary U: sections over U whose restriction to every
    context overlap is admitted by that context's support.

    For U beneath the cover this equals the restriction image of any
    containing context (E2); for larger U it is the set of partial global
    assignments, computed by pruned depth-first search in lexicographic
    order.
    """
    scn = model.scenario
    sub = scn.sorted_measurements(subset)
    if len(set(subset)) != len(sub):
        raise ScenarioError(f"duplicate measurements in {tuple(subset)}")
    for ci, ctx in enumerate(scn.contexts):
        if set(sub) <= set(ctx):
            return model.restricted_support(ci, sub)
    results, _, complete = _Restrictor(model, sub).search(None, None, budget)
    if not complete:
        from .errors import BudgetExceededError

        raise BudgetExceededError(
            f"restriction to {sub} exceeded the search budget of {budget} nodes"
        )
    return tuple(results)


@dataclass(frozen=True)
class SectionVerdict:
    context_index: int
    context: tuple[str, ...]
    section: Section
    extends: bool | None  # None: undecided at budget


@dataclass(frozen=True)
class ContextualityReport:
    """Per-section extension flags plus the aggregate LC/SC verdicts.

    logically_contextual: some supported section extends to no compatible
    family. strongly_contextual: no global section at all (equivalently all
    sections fail). None marks verdicts undecided at the search budget.
    """

    verdicts: tuple[SectionVerdict, ...]
    logically_contextual: bool | None
    strongly_contextual: bool | None
    global_section: Section | None
    nodes_used: int
    budget: int

    @property
    def decided(self) -> bool:
        return (
            self.logically_contextual is not None
            and self.strongly_contextual is not None
            and all(v.extends is not None for v in self.verdicts)
        )

    def failing_sections(self) -> tuple[SectionVerdict, ...]:
        return tuple(v for v in self.verdicts if v.extends is False)


def classify_contextuality(
    model: EmpiricalModel, budget: int = DEFAULT_SEARCH_BUDGET
) -> ContextualityReport:
    """Classify a model as non-contextual / logically / strongly contextual.

    A section extends iff some global section restricts to it, since
    compatible families glue. Searches run in lexicographic order, so the
    witnessing global section is the first one; budget exhaustion yields an
    explicit undecided status, never a silent answer.
    """
    scn = model.scenario
    engine = _Restrictor(model, scn.measurements)
    remaining = budget
    total_nodes = 0

    found, nodes, complete = engine.search(None, 1, remaining)
    remaining -= nodes
    total_nodes += nodes
    witness = found[0] if found else None
    if witness is not None:
        sc: bool | None = False
    elif complete:
        sc = True
    else:
        sc = None

    verdicts: list[SectionVerdict] = []
    for ci, sup in enumerate(model.supports):
        ctx = scn.contexts[ci]
        for s in sup:
            if witness is not None and witness.restrict(ctx) == s:
                verdicts.append(SectionVerdict(ci, ctx, s, True))
                continue
            if sc is True:
                # no global section: nothing extends
                verdicts.append(SectionVerdict(ci, ctx, s, False))
                continue
            res, nodes, complete = engine.search(s, 1, max(remaining, 0))
            remaining -= nodes
            total_nodes += nodes
            if res:
                extends: bool | None = True
            elif complete:
                extends = False
            else:
                extends = None
            verdicts.append(SectionVerdict(ci, ctx, s, extends))

    if any(v.extends is False for v in verdicts):
        lc: bool | None = True
    elif all(v.extends is True for v in verdicts):
        lc = False
    else:
        lc = None

    if sc is None and all(v.extends is False for v in verdicts):
        # every section failed, decided: there can be no global section
        sc = True
    if sc is True and any(v.extends is True for v in verdicts):
        raise SelfCheckError("global search found nothing but a section extends")

    return ContextualityReport(
        verdicts=tuple(verdicts),
        logically_contextual=lc,
        strongly_contextual=sc,
        global_section=witness,
        nodes_used=total_nodes,
        budget=budget,
    )
