"""Cech cohomology of the free R-module presheaf over a model's supports.

Everything is finite: a q-cochain assigns to each q-simplex of the nerve a
formal R-linear combination of sections over the simplex's intersection, so
cochain groups have canonical finite bases and the coboundary is a matrix.
The obstruction attached to a local section asks for a compatible family of
combinations extending it; that is a linear system over the coefficient
ring, solvable exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import (
    DisconnectedCoverError,
    RingError,
    SectionNotSupportedError,
    SelfCheckError,
)
from .model import EmpiricalModel
from .rings import RingHom, RingMatrix, RingSpec, linear_decomposition
from .scenario import Section, Simplex, build_nerve, connected_components

# ---------------------------------------------------------------------------
# formal linear combinations and cochains


@dataclass(frozen=True)
class FormalLinearCombination:
    """An element of the free R-module on sections over a fixed context.

    Weights are kept canonical: reduced into the ring, zero weights dropped,
    sections ordered by their value tuples on the context.
    """

    ring: RingSpec
    context: tuple[str, ...]
    weights: tuple[tuple[Section, int], ...]

    def __post_init__(self):
        merged: dict[Section, int] = {}
        for section, w in self.weights:
            if section.domain != set(self.context):
                raise RingError(
                    f"section over {tuple(sorted(section.domain))} in a "
                    f"combination over {self.context}"
                )
            merged[section] = self.ring.add(merged.get(section, 0), w)
        kept = [(s, w) for s, w in merged.items() if w != 0]
        kept.sort(key=lambda pair: pair[0].values_on(self.context))
        object.__setattr__(self, "weights", tuple(kept))

    @classmethod
    def unit(cls, ring: RingSpec, section: Section, context: tuple[str, ...] | None = None):
        if context is None:
            context = tuple(sorted(section.domain))
        return cls(ring, context, ((section, 1),))

    @classmethod
    def zero(cls, ring: RingSpec, context: tuple[str, ...]):
        return cls(ring, context, ())

    def coefficient(self, section: Section) -> int:
        for s, w in self.weights:
            if s == section:
                return w
        return 0

    def total(self) -> int:
        acc = 0
        for _, w in self.weights:
            acc = self.ring.add(acc, w)
        return acc

    def restrict(self, subset: Iterable[str]) -> "FormalLinearCombination":
        """Pushforward along restriction of sections: weights of sections
        with the same restriction add up."""
        sub = tuple(m for m in self.context if m in set(subset))
        return FormalLinearCombination(
            self.ring, sub, tuple((s.restrict(sub), w) for s, w in self.weights)
        )

    def scale(self, c: int) -> "FormalLinearCombination":
        return FormalLinearCombination(
            self.ring, self.context, tuple((s, self.ring.mul(c, w)) for s, w in self.weights)
        )

    def __add__(self, other: "FormalLinearCombination") -> "FormalLinearCombination":
        if self.ring != other.ring or set(self.context) != set(other.context):
            raise RingError("cannot add combinations over different contexts or rings")
        return FormalLinearCombination(
            self.ring, self.context, self.weights + tuple(
                (s, w) for s, w in other.weights
            )
        )

    def __sub__(self, other: "FormalLinearCombination") -> "FormalLinearCombination":
        return self + other.scale(-1)

    def __str__(self) -> str:
        if not self.weights:
            return "0"
        parts = []
        for s, w in self.weights:
            prefix = "" if w == 1 else f"{w}*"
            parts.append(f"{prefix}[{s}]")
        return " + ".join(parts)


@dataclass(frozen=True)
class Cochain:
    """One combination per q-simplex, aligned with the nerve's canonical order."""

    ring: RingSpec
    degree: int
    components: tuple[FormalLinearCombination, ...]


@dataclass(frozen=True)
class CochainBasis:
    """Canonical basis of the q-cochain group: pairs of a simplex and a
    section over its intersection, simplices in nerve order, sections in
    lexicographic order."""

    degree: int
    simplices: tuple[Simplex, ...]
    sections: tuple[tuple[Section, ...], ...]  # aligned with simplices
    entries: tuple[tuple[int, Section], ...]
    index: Mapping[tuple[int, Section], int]

    def __len__(self) -> int:
        return len(self.entries)


def simplex_sections(model: EmpiricalModel, sigma: Simplex) -> tuple[Section, ...]:
    """S at the simplex's intersection; the intersection lies beneath any of
    its contexts, so this is a restriction image and context choice does not
    matter."""
    return model.restricted_support(sigma.contexts[0], sigma.intersection)


def cochain_basis(model: EmpiricalModel, q: int, nerve=None) -> CochainBasis:
    if nerve is None:
        nerve = build_nerve(model.scenario, q)
    simplices = nerve[q] if q < len(nerve) else ()
    sections = tuple(simplex_sections(model, sigma) for sigma in simplices)
    entries = []
    index = {}
    for si, secs in enumerate(sections):
        for s in secs:
            index[(si, s)] = len(entries)
            entries.append((si, s))
    return CochainBasis(q, simplices, sections, tuple(entries), index)


def cochain_to_vector(basis: CochainBasis, cochain: Cochain) -> list[int]:
    if cochain.degree != basis.degree:
        raise RingError(
            f"degree {cochain.degree} cochain against a degree {basis.degree} basis"
        )
    vec = [0] * len(basis)
    for si, comp in enumerate(cochain.components):
        for s, w in comp.weights:
            vec[basis.index[(si, s)]] = w
    return vec


def vector_to_cochain(
    ring: RingSpec, basis: CochainBasis, vector: Iterable[int]
) -> Cochain:
    vec = list(vector)
    components = []
    for si, sigma in enumerate(basis.simplices):
        weights = []
        for s in basis.sections[si]:
            weights.append((s, vec[basis.index[(si, s)]]))
        components.append(FormalLinearCombination(ring, sigma.intersection, tuple(weights)))
    return Cochain(ring, basis.degree, tuple(components))


def coboundary(model: EmpiricalModel, cochain: Cochain, nerve=None) -> Cochain:
    """Alternating sum of restrictions: the q+1 component at a simplex is
    the sum over deleted vertices j of (-1)^j times the component at the
    j-th face, pushed forward to the smaller intersection."""
    q = cochain.degree
    if nerve is None:
        nerve = build_nerve(model.scenario, q + 1)
    ring = cochain.ring
    face_index = {sigma.contexts: i for i, sigma in enumerate(nerve[q])} if q < len(nerve) else {}
    upper = nerve[q + 1] if q + 1 < len(nerve) else ()
    components = []
    for tau in upper:
        acc = FormalLinearCombination.zero(ring, tau.intersection)
        for j in range(tau.dimension + 1):
            face_contexts = tau.contexts[:j] + tau.contexts[j + 1 :]
            part = cochain.components[face_index[face_contexts]].restrict(tau.intersection)
            acc = acc + (part if j % 2 == 0 else part.scale(-1))
        components.append(acc)
    return Cochain(ring, q + 1, tuple(components))


def coboundary_matrix(
    model: EmpiricalModel, q: int, ring: RingSpec, nerve=None
) -> RingMatrix:
    """Matrix of the degree-q coboundary in the canonical bases; rows are
    indexed by the (q+1)-basis, columns by the q-basis."""
    if nerve is None:
        nerve = build_nerve(model.scenario, q + 1)
    lower = cochain_basis(model, q, nerve)
    upper = cochain_basis(model, q + 1, nerve)
    entries = [[0] * len(lower) for _ in range(len(upper))]
    face_index = {sigma.contexts: i for i, sigma in enumerate(lower.simplices)}
    for ti, tau in enumerate(upper.simplices):
        for j in range(tau.dimension + 1):
            face_contexts = tau.contexts[:j] + tau.contexts[j + 1 :]
            si = face_index[face_contexts]
            sign = 1 if j % 2 == 0 else -1
            for s in lower.sections[si]:
                row = upper.index[(ti, s.restrict(tau.intersection))]
                col = lower.index[(si, s)]
                entries[row][col] = ring.add(entries[row][col], sign)
    return RingMatrix.from_rows(ring, entries) if entries else RingMatrix(
        ring, 0, len(lower), ()
    )


# ---------------------------------------------------------------------------
# obstructions


def _require_connected(model: EmpiricalModel) -> None:
    components = connected_components(model.scenario)
    if len(components) > 1:
        named = [
            tuple(model.scenario.contexts[i] for i in comp) for comp in components
        ]
        raise DisconnectedCoverError(
            "the cover is disconnected, so obstructions are only defined per "
            f"component; components: {named}"
        )


class ObstructionSolver:
    """Decides vanishing of the obstruction of local sections, one model and
    one ring at a time.

    Vanishing of the class of a section s0 at context C0 is equivalent to the
    existence of a family of combinations r_C over the supports, restricting
    consistently on overlaps, with r_C0 the unit combination at s0. The
    compatibility block is the degree-0 coboundary matrix and is shared by
    every query; the fixing block depends only on C0, so one decomposition
    per context serves all its sections.
    """

    def __init__(self, model: EmpiricalModel, ring: RingSpec):
        _require_connected(model)
        self.model = model
        self.ring = ring
        self.nerve = build_nerve(model.scenario, 1)
        self.basis = cochain_basis(model, 0, self.nerve)
        self.compat = coboundary_matrix(model, 0, ring, self.nerve).rows()
        self._decompositions: dict[int, object] = {}

    def _context_index(self, context: Iterable[str]) -> int:
        return self.model.scenario.context_index(context)

    def _decomposition(self, ci: int):
        dec = self._decompositions.get(ci)
        if dec is None:
            rows = [list(row) for row in self.compat]
            width = len(self.basis)
            for s in self.model.support(ci):
                row = [0] * width
                row[self.basis.index[(ci, s)]] = 1
                rows.append(row)
            dec = linear_decomposition(self.ring, rows, width)
            self._decompositions[ci] = dec
        return dec

    def _rhs(self, ci: int, s0: Section) -> list[int]:
        rhs = [0] * len(self.compat)
        for s in self.model.support(ci):
            rhs.append(1 if s == s0 else 0)
        return rhs

    def _solve(self, ci: int, s0: Section) -> list[int] | None:
        if s0 not in self.model.support_set(ci):
            raise SectionNotSupportedError(
                f"{s0} is not supported at context {self.model.scenario.contexts[ci]}"
            )
        return self._decomposition(ci).solve(self._rhs(ci, s0))

    def vanishes(self, context: Iterable[str], s0: Section) -> bool:
        return self._solve(self._context_index(context), s0) is not None

    def family(
        self, context: Iterable[str], s0: Section
    ) -> tuple[FormalLinearCombination, ...] | None:
        """The witnessing compatible family, one combination per context, or
        None when the obstruction does not vanish."""
        solution = self._solve(self._context_index(context), s0)
        if solution is None:
            return None
        return vector_to_cochain(self.ring, self.basis, solution).components

    @property
    def unknowns(self) -> int:
        return len(self.basis)

    @property
    def compatibility_rows(self) -> int:
        return len(self.compat)


def obstruction_vanishes(
    model: EmpiricalModel, context: Iterable[str], s0: Section, ring: RingSpec
) -> bool:
    """Whether the cohomological obstruction of s0 at the context vanishes
    over the ring."""
    return ObstructionSolver(model, ring).vanishes(context, s0)


@dataclass(frozen=True)
class SectionObstruction:
    context: tuple[str, ...]
    section: Section
    vanishes: bool


@dataclass(frozen=True)
class ObstructionReport:
    """Vanishing verdicts for every supported section.

    clc: some section has non-vanishing obstruction (a cohomological witness
    of logical contextuality). csc: every section does (the cohomological
    strengthening of strong contextuality).
    """

    ring: RingSpec
    verdicts: tuple[SectionObstruction, ...]
    clc: bool
    csc: bool
    unknowns: int
    compatibility_rows: int

    def vanishing(self) -> tuple[SectionObstruction, ...]:
        return tuple(v for v in self.verdicts if v.vanishes)

    def non_vanishing(self) -> tuple[SectionObstruction, ...]:
        return tuple(v for v in self.verdicts if not v.vanishes)


def classify_cohomological(model: EmpiricalModel, ring: RingSpec) -> ObstructionReport:
    solver = ObstructionSolver(model, ring)
    verdicts = []
    for ci, ctx in enumerate(model.scenario.contexts):
        for s in model.support(ci):
            verdicts.append(SectionObstruction(ctx, s, solver.vanishes(ctx, s)))
    clc = any(not v.vanishes for v in verdicts)
    csc = all(not v.vanishes for v in verdicts)
    return ObstructionReport(
        ring,
        tuple(verdicts),
        clc,
        csc,
        solver.unknowns,
        solver.compatibility_rows,
    )


# ---------------------------------------------------------------------------
# the connecting-homomorphism formulation, kept as an independent check


def connecting_hom_check(
    model: EmpiricalModel, context: Iterable[str], s0: Section, ring: RingSpec
) -> bool:
    """Vanishing via the image of the connecting homomorphism.

    Lift s0 to a 0-cochain of the full presheaf, take its coboundary z (a
    cocycle of the subpresheaf of combinations vanishing on the fixed
    context), and ask whether z is a coboundary within that subpresheaf.
    Must agree with the compatible-family formulation everywhere.
    """
    _require_connected(model)
    scenario = model.scenario
    c0 = scenario.context_index(context)
    c0_set = set(scenario.contexts[c0])
    if s0 not in model.support_set(c0):
        raise SectionNotSupportedError(
            f"{s0} is not supported at context {scenario.contexts[c0]}"
        )
    nerve = build_nerve(scenario, 1)
    basis = cochain_basis(model, 0, nerve)
    width = len(basis)

    # canonical lift: the fixed section at C0; on overlapping contexts the
    # first supported section agreeing with s0 on the overlap; anywhere else
    # the first supported section
    lift: list[Section] = []
    for ci, ctx in enumerate(scenario.contexts):
        if ci == c0:
            lift.append(s0)
            continue
        overlap = scenario.sorted_measurements(set(ctx) & c0_set)
        if overlap:
            target = s0.restrict(overlap)
            chosen = None
            for s in model.support(ci):
                if s.restrict(overlap) == target:
                    chosen = s
                    break
            if chosen is None:
                raise SelfCheckError(
                    f"no section at {ctx} agrees with {s0} on {overlap}; "
                    "the model cannot be flasque beneath the cover"
                )
            lift.append(chosen)
        else:
            lift.append(model.support(ci)[0])

    omega = Cochain(
        ring,
        0,
        tuple(
            FormalLinearCombination.unit(ring, s, scenario.contexts[ci])
            for ci, s in enumerate(lift)
        ),
    )
    z = coboundary(model, omega, nerve)

    rows: list[list[int]] = []
    rhs: list[int] = []

    # theta lives in the subpresheaf: it vanishes identically at C0 and its
    # pushforward to the overlap with C0 vanishes elsewhere (total weight
    # zero where the overlap is empty)
    for s in model.support(c0):
        row = [0] * width
        row[basis.index[(c0, s)]] = 1
        rows.append(row)
        rhs.append(0)
    for ci, ctx in enumerate(scenario.contexts):
        if ci == c0:
            continue
        overlap = scenario.sorted_measurements(set(ctx) & c0_set)
        if overlap:
            for t in model.restricted_support(ci, overlap):
                row = [0] * width
                for s in model.support(ci):
                    if s.restrict(overlap) == t:
                        row[basis.index[(ci, s)]] = 1
                rows.append(row)
                rhs.append(0)
        else:
            row = [0] * width
            for s in model.support(ci):
                row[basis.index[(ci, s)]] = 1
            rows.append(row)
            rhs.append(0)

    # delta theta = z
    delta = coboundary_matrix(model, 0, ring, nerve)
    one_basis = cochain_basis(model, 1, nerve)
    z_vec = cochain_to_vector(one_basis, z)
    for row, b in zip(delta.rows(), z_vec):
        rows.append(list(row))
        rhs.append(b)

    dec = linear_decomposition(ring, rows, width)
    return dec.solve(rhs) is not None


# ---------------------------------------------------------------------------
# functoriality in the coefficient ring


@dataclass(frozen=True)
class HomMonotonicityReport:
    """Vanishing over the source ring must push to vanishing over the target:
    a homomorphism maps witnessing families to witnessing families."""

    hom: RingHom
    holds: bool
    counterexamples: tuple[SectionObstruction, ...]


def monotone_under_hom(model: EmpiricalModel, hom: RingHom) -> HomMonotonicityReport:
    source = ObstructionSolver(model, hom.source)
    target = ObstructionSolver(model, hom.target)
    counterexamples = []
    for ci, ctx in enumerate(model.scenario.contexts):
        for s in model.support(ci):
            if source.vanishes(ctx, s) and not target.vanishes(ctx, s):
                counterexamples.append(SectionObstruction(ctx, s, False))
    return HomMonotonicityReport(hom, not counterexamples, tuple(counterexamples))
