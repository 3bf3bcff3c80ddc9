"""Propositional layer: the formula grammar round-trips, the satisfiability
bound is exact over Fractions, and the liar constructions land on the known
models (length four is the PR box, the correspondence included)."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from contextuality import (
    And,
    BudgetExceededError,
    DegenerateModelError,
    EmpiricalModel,
    FormulaError,
    Iff,
    LiarCycle,
    Not,
    Or,
    ProbabilityTable,
    Proposition,
    Scenario,
    Var,
    chsh_propositions,
    classify_contextuality,
    format_formula,
    holds_in,
    liar_cycle_model,
    logical_bell_bound,
    model_isomorphic,
    parse_formula,
    proposition_probability,
    specker_triangle,
)
from contextuality.paradox import evaluate, truth, variables

from conftest import BIPARTITE, bell_table, bipartite_model, pr_box, ALL4, CORR


# ---------------------------------------------------------------------------
# formulas


def test_parse_precedence_and_associativity():
    a, b, c = Var("a"), Var("b"), Var("c")
    assert parse_formula("a | b & c") == Or(a, And(b, c))
    assert parse_formula("!a & b") == And(Not(a), b)
    assert parse_formula("a <-> b <-> c") == Iff(Iff(a, b), c)
    assert parse_formula("a & b & c") == And(And(a, b), c)
    assert parse_formula("¬a ∧ (b ∨ c) ↔ d") == Iff(And(Not(a), Or(b, c)), Var("d"))
    assert parse_formula("!!a") == Not(Not(a))


def test_format_uses_minimal_parentheses():
    a, b, c = Var("a"), Var("b"), Var("c")
    assert format_formula(Or(a, And(b, c))) == "a ∨ b ∧ c"
    assert format_formula(And(Or(a, b), c)) == "(a ∨ b) ∧ c"
    assert format_formula(Or(a, Or(b, c))) == "a ∨ (b ∨ c)"
    assert format_formula(Or(Or(a, b), c)) == "a ∨ b ∨ c"
    assert format_formula(Iff(Iff(a, b), c)) == "a ↔ b ↔ c"
    assert format_formula(Not(And(a, b))) == "¬(a ∧ b)"


_FORMULAS = st.recursive(
    st.builds(Var, st.sampled_from(("a", "b", "c", "x1", "p_q"))),
    lambda inner: st.one_of(
        st.builds(Not, inner),
        st.builds(And, inner, inner),
        st.builds(Or, inner, inner),
        st.builds(Iff, inner, inner),
    ),
    max_leaves=12,
)


@given(formula=_FORMULAS)
@settings(max_examples=200)
def test_format_parse_round_trip(formula):
    assert parse_formula(format_formula(formula)) == formula


def test_parse_error_positions():
    with pytest.raises(FormulaError, match="position 2"):
        parse_formula("a @ b")
    with pytest.raises(FormulaError, match="end of input"):
        parse_formula("(a")
    with pytest.raises(FormulaError, match="position 2"):
        parse_formula("a b")
    with pytest.raises(FormulaError, match="position 0"):
        parse_formula(")")
    with pytest.raises(FormulaError, match="end of input"):
        parse_formula("!")
    with pytest.raises(FormulaError):
        parse_formula("")


def test_evaluate_and_variables():
    f = parse_formula("a <-> !b")
    assert variables(f) == {"a", "b"}
    assert evaluate(f, {"a": True, "b": False})
    assert not evaluate(f, {"a": True, "b": True})
    with pytest.raises(FormulaError, match="no value"):
        evaluate(f, {"a": True})


def test_truth_convention_reads_zero_as_true():
    assert truth(0) and not truth(1)
    s = BIPARTITE.section(("a1", "b1"), (0, 1))
    assert holds_in(s, Var("a1"))
    assert not holds_in(s, Var("b1"))
    assert holds_in(s, Iff(Var("a1"), Not(Var("b1"))))


# ---------------------------------------------------------------------------
# propositions and bounds


def test_proposition_validation():
    with pytest.raises(FormulaError, match="outside"):
        Proposition(("a1", "b1"), Var("a2"))
    with pytest.raises(FormulaError, match="probability"):
        Proposition(("a1", "b1"), Var("a1"), Fraction(9, 8))
    p = Proposition(("a1", "b1"), Var("a1"), Fraction(1, 2))
    assert p.probability == Fraction(1, 2)


def test_proposition_probability_on_the_bell_table():
    table = bell_table()
    assert proposition_probability(
        table, ("a1", "b1"), Iff(Var("a1"), Var("b1"))
    ) == Fraction(1)
    assert proposition_probability(
        table, ("a2", "b2"), Iff(Var("a2"), Not(Var("b2")))
    ) == Fraction(3, 4)


def test_chsh_bound_on_the_bell_table():
    props = chsh_propositions(bell_table())
    assert [p.probability for p in props] == [
        Fraction(1),
        Fraction(3, 4),
        Fraction(3, 4),
        Fraction(3, 4),
    ]
    report = logical_bell_bound(props)
    assert not report.jointly_satisfiable
    assert report.witness is None
    assert report.proposition_count == 4
    assert report.sum_probabilities == Fraction(13, 4)
    assert report.bound == 3
    assert report.violation == Fraction(1, 4)
    assert "violation 1/4" in report.describe()


def test_satisfiable_propositions_support_no_bound():
    props = (
        Proposition(("x", "y"), parse_formula("x <-> y"), Fraction(1)),
        Proposition(("y", "z"), parse_formula("y <-> z"), Fraction(3, 4)),
    )
    report = logical_bell_bound(props)
    assert report.jointly_satisfiable
    assert report.bound is None and report.violation is None
    env = dict(report.witness)
    assert all(evaluate(p.formula, env) for p in props)
    assert "jointly satisfiable" in report.describe()


def test_bound_input_validation():
    with pytest.raises(FormulaError):
        logical_bell_bound(())
    with pytest.raises(FormulaError, match="no probability"):
        logical_bell_bound((Proposition(("x",), Var("x")),))
    many = tuple(
        Proposition((f"m{i}",), Var(f"m{i}"), Fraction(1)) for i in range(21)
    )
    with pytest.raises(BudgetExceededError):
        logical_bell_bound(many)


def test_chsh_needs_two_measurement_contexts():
    scn = Scenario(("a", "b", "c"), (("a", "b", "c"),), (0, 1))
    model = EmpiricalModel(scn, ((scn.section(("a", "b", "c"), (0, 0, 0)),),))
    with pytest.raises(FormulaError):
        chsh_propositions(ProbabilityTable.uniform(model))


# ---------------------------------------------------------------------------
# liar cycles


def test_short_cycles_collapse_to_contradictions():
    with pytest.raises(FormulaError):
        LiarCycle(0)
    for n in (1, 2):
        with pytest.raises(DegenerateModelError):
            liar_cycle_model(n)


def test_liar_cycle_model_shape():
    model = liar_cycle_model(LiarCycle(4))
    assert model.scenario.contexts == (
        ("x1", "x2"),
        ("x2", "x3"),
        ("x3", "x4"),
        ("x1", "x4"),
    )
    values = [
        {s.values_on(ctx) for s in sup}
        for ctx, sup in zip(model.scenario.contexts, model.supports)
    ]
    assert values == [set(CORR), set(CORR), set(CORR), {(0, 1), (1, 0)}]


def test_liar_cycles_are_strongly_contextual():
    for n in range(3, 7):
        report = classify_contextuality(liar_cycle_model(n))
        assert report.strongly_contextual, n


def test_liar_four_is_the_pr_box_with_the_usual_correspondence():
    report = model_isomorphic(liar_cycle_model(4), pr_box())
    assert report.isomorphic
    # reading x1 = x2 as "a2 correlated with b1" and x4 = !x1 as
    # "a2 anticorrelated with b2"
    usual_map = (("x1", "a2"), ("x2", "b1"), ("x3", "a1"), ("x4", "b2"))
    identity = tuple((f"x{i}", ((0, 0), (1, 1))) for i in range(1, 5))
    assert any(
        w.measurement_map == usual_map and w.outcome_maps == identity
        for w in report.witnesses
    )


def test_witnesses_carry_supports_onto_supports():
    liar, pr = liar_cycle_model(4), pr_box()
    report = model_isomorphic(liar, pr)
    for w in report.witnesses:
        for ci, ctx in enumerate(liar.scenario.contexts):
            image = tuple(sorted(w.measurement(m) for m in ctx))
            cj = pr.scenario.context_index(image)
            assert {w.apply(s) for s in liar.support(ci)} == set(pr.support(cj))
    with pytest.raises(FormulaError):
        report.witnesses[0].measurement("zz")


def test_liar_three_is_the_specker_triangle_up_to_one_flip():
    report = model_isomorphic(liar_cycle_model(3), specker_triangle())
    assert report.isomorphic
    flip = ((0, 1), (1, 0))
    keep = ((0, 0), (1, 1))
    identity_names = (("x1", "x1"), ("x2", "x2"), ("x3", "x3"))
    assert any(
        w.measurement_map == identity_names
        and w.outcome_maps == (("x1", keep), ("x2", flip), ("x3", keep))
        for w in report.witnesses
    )


def test_non_isomorphic_pairs():
    assert not model_isomorphic(pr_box(), liar_cycle_model(3)).isomorphic
    bell = bipartite_model(CORR, ALL4, ALL4, ALL4)
    assert not model_isomorphic(pr_box(), bell).isomorphic
    assert not model_isomorphic(liar_cycle_model(4), liar_cycle_model(5)).isomorphic


def test_isomorphism_search_budget():
    with pytest.raises(BudgetExceededError):
        model_isomorphic(liar_cycle_model(4), pr_box(), budget=3)


# ---------------------------------------------------------------------------
# the Specker triangle


def drop_context(model: EmpiricalModel, ci: int) -> EmpiricalModel:
    scn = model.scenario
    contexts = tuple(c for i, c in enumerate(scn.contexts) if i != ci)
    supports = tuple(s for i, s in enumerate(model.supports) if i != ci)
    return EmpiricalModel(Scenario(scn.measurements, contexts, scn.outcomes), supports)


def test_specker_triangle_contextuality_is_tight():
    model = specker_triangle()
    assert classify_contextuality(model).strongly_contextual
    for ci in range(3):
        sub = drop_context(model, ci)
        report = classify_contextuality(sub)
        assert not report.logically_contextual
        assert report.global_section is not None
