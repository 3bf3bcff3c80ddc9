"""Document layer: canonical print/parse inverses (byte-for-byte on the
bundled corpus), path-carrying diagnostics, and materialisation of every
payload kind."""

import hashlib
import json

import pytest

from contextuality import (
    DocumentError,
    LiarCycle,
    ModelDocument,
    NormalisationError,
    SCHEMA,
    Scenario,
    SignallingError,
    UnknownCorpusEntryError,
    corpus,
    corpus_names,
    corpus_text,
    document_from_equations,
    document_from_liar_cycle,
    document_from_model,
    document_from_table,
    document_from_triple,
    document_hash,
    ghz_model,
    liar_cycle_model,
    materialize,
    parse_model,
    print_model,
    support_of_probability_table,
)

from conftest import BIPARTITE, bell_table, pr_box


def doc(payload: str, **extra) -> str:
    data = {
        "format": SCHEMA,
        "scenario": {
            "measurements": ["a1", "b1"],
            "contexts": [["a1", "b1"]],
            "outcomes": [0, 1],
        },
    }
    data.update(json.loads(payload) if isinstance(payload, str) else payload)
    data.update(extra)
    return json.dumps(data)


SUPPORTS = '{"supports": [[{"a1": 0, "b1": 0}, {"a1": 1, "b1": 1}]]}'


# ---------------------------------------------------------------------------
# canonical form


def test_corpus_round_trips_byte_for_byte(corpus_documents):
    for name in corpus_names():
        text = corpus_text(name)
        parsed = parse_model(text)
        assert print_model(parsed) == text
        assert document_hash(parsed) == hashlib.sha256(
            text.encode("utf-8")
        ).hexdigest()


def test_corpus_names_and_metadata(corpus_documents):
    assert corpus_names() == (
        "bell",
        "hardy",
        "pr-box",
        "ghz-mermin",
        "specker-triangle",
        "liar-4",
        "box-25",
        "peres-mermin-square",
        "ks-18",
    )
    for name, document in corpus_documents.items():
        assert document.name == name
    for name in ("peres-mermin-square", "ks-18"):
        assert corpus_documents[name].provenance.startswith("external:")
    with pytest.raises(UnknownCorpusEntryError):
        corpus("no-such-entry")


def test_print_parse_inverse_on_constructed_documents():
    documents = [
        document_from_model(pr_box(), name="pr", notes="n"),
        document_from_table(bell_table(), provenance="made up"),
        document_from_equations(
            BIPARTITE, 2, (({"a1": 1, "b1": 1}, 0), ({"a1": 1}, 1))
        ),
        document_from_liar_cycle(4, name="liar"),
        document_from_triple(
            tuple(__import__("contextuality").GHZ_TRIPLE),
            ghz_model().scenario,
        ),
    ]
    for document in documents:
        text = print_model(document)
        again = parse_model(text)
        assert print_model(again) == text
        assert again.payload_kind == document.payload_kind
        assert document_hash(again) == document_hash(document)


def test_hashes_distinguish_corpus_entries(corpus_documents):
    hashes = {document_hash(d) for d in corpus_documents.values()}
    assert len(hashes) == len(corpus_documents)


def test_modulus_outcome_form_round_trips():
    text = doc(
        {
            "scenario": {
                "measurements": ["a1", "b1"],
                "contexts": [["a1", "b1"]],
                "outcomes": {"modulus": 3},
            },
            "supports": [[{"a1": 0, "b1": 2}]],
        }
    )
    parsed = parse_model(text)
    assert parsed.scenario.outcomes == (0, 1, 2)
    assert parsed.ring_outcomes
    printed = print_model(parsed)
    assert '"modulus": 3' in printed
    assert parse_model(printed).scenario == parsed.scenario


# ---------------------------------------------------------------------------
# diagnostics


def test_json_and_shape_errors():
    with pytest.raises(DocumentError, match="invalid JSON at line 1"):
        parse_model("{not json")
    with pytest.raises(DocumentError, match=r"expected an object"):
        parse_model("[]")
    with pytest.raises(DocumentError, match=r"\$\.bogus"):
        parse_model(doc(SUPPORTS, bogus=1))
    with pytest.raises(DocumentError, match="missing field 'format'"):
        parse_model('{"scenario": {}}')
    with pytest.raises(DocumentError, match=r"\$\.format"):
        parse_model(doc(SUPPORTS, format="contextuality-model/0"))
    with pytest.raises(DocumentError, match=r"\$\.name"):
        parse_model(doc(SUPPORTS, name=3))


def test_payload_multiplicity_errors():
    with pytest.raises(DocumentError, match="exactly one payload"):
        parse_model(doc(SUPPORTS, liar_cycle={"length": 4}))
    with pytest.raises(DocumentError, match="exactly one payload"):
        parse_model(doc("{}"))


def test_scenario_errors():
    with pytest.raises(DocumentError, match=r"\$\.scenario\.measurements"):
        parse_model(doc(SUPPORTS, scenario={"measurements": "a", "contexts": [], "outcomes": []}))
    with pytest.raises(DocumentError, match=r"\$\.scenario\.contexts\[0\]\[0\]"):
        parse_model(
            doc(
                SUPPORTS,
                scenario={
                    "measurements": ["a1", "b1"],
                    "contexts": [[0, "b1"]],
                    "outcomes": [0, 1],
                },
            )
        )
    with pytest.raises(DocumentError, match=r"\$\.scenario\.outcomes\.modulus"):
        parse_model(
            doc(
                SUPPORTS,
                scenario={
                    "measurements": ["a1", "b1"],
                    "contexts": [["a1", "b1"]],
                    "outcomes": {"modulus": 1},
                },
            )
        )
    # booleans are not integers here, even though Python thinks so
    with pytest.raises(DocumentError, match="got a boolean"):
        parse_model(
            doc(
                SUPPORTS,
                scenario={
                    "measurements": ["a1", "b1"],
                    "contexts": [["a1", "b1"]],
                    "outcomes": [True, 1],
                },
            )
        )


def test_support_payload_errors():
    with pytest.raises(DocumentError, match="one per context"):
        parse_model(doc('{"supports": []}'))
    with pytest.raises(DocumentError, match=r"\$\.supports\[0\]\[0\]\.zz"):
        parse_model(doc('{"supports": [[{"a1": 0, "b1": 0, "zz": 0}]]}'))
    with pytest.raises(DocumentError, match="missing value for 'b1'"):
        parse_model(doc('{"supports": [[{"a1": 0}]]}'))
    with pytest.raises(DocumentError, match="not in the alphabet"):
        parse_model(doc('{"supports": [[{"a1": 0, "b1": 7}]]}'))


def test_probability_payload_errors():
    def table(p):
        return doc(
            json.dumps(
                {
                    "probabilities": [
                        [
                            {"section": {"a1": 0, "b1": 0}, "p": p},
                            {"section": {"a1": 1, "b1": 1}, "p": "1/2"},
                        ]
                    ]
                }
            )
        )

    with pytest.raises(DocumentError, match=r"\$\.probabilities\[0\]\[0\]\.p"):
        parse_model(table("3/0"))
    with pytest.raises(DocumentError, match="rational written as a string"):
        parse_model(table(0.5))
    with pytest.raises(NormalisationError):
        parse_model(table("1/4"))
    with pytest.raises(NormalisationError):
        parse_model(table("-1/2"))


def test_probability_payload_signalling_is_caught():
    text = json.dumps(
        {
            "format": SCHEMA,
            "scenario": {
                "measurements": ["a1", "a2", "b1", "b2"],
                "contexts": [["a1", "b1"], ["a1", "b2"], ["a2", "b1"], ["a2", "b2"]],
                "outcomes": [0, 1],
            },
            "probabilities": [
                [{"section": {"a1": 0, "b1": 0}, "p": "1"}],
                [{"section": {"a1": 1, "b2": 0}, "p": "1"}],
                [{"section": {"a2": 0, "b1": 0}, "p": "1"}],
                [{"section": {"a2": 0, "b2": 0}, "p": "1"}],
            ],
        }
    )
    with pytest.raises(SignallingError):
        parse_model(text)


def test_theory_payload_errors():
    def theory(equations):
        return doc(json.dumps({"theory": {"modulus": 2, "equations": equations}}))

    with pytest.raises(DocumentError, match=r"coefficients\.zz"):
        parse_model(theory([{"coefficients": {"zz": 1}, "constant": 0}]))
    with pytest.raises(DocumentError, match="no cover context"):
        parse_model(
            json.dumps(
                {
                    "format": SCHEMA,
                    "scenario": {
                        "measurements": ["a1", "a2", "b1", "b2"],
                        "contexts": [["a1", "b1"], ["a1", "b2"], ["a2", "b1"], ["a2", "b2"]],
                        "outcomes": [0, 1],
                    },
                    "theory": {
                        "modulus": 2,
                        "equations": [{"coefficients": {"a1": 1, "a2": 1}, "constant": 0}],
                    },
                }
            )
        )
    with pytest.raises(DocumentError, match=r"\$\.theory\.modulus"):
        parse_model(doc('{"theory": {"modulus": 1, "equations": []}}'))


def test_liar_and_triple_payload_errors():
    with pytest.raises(DocumentError, match=r"\$\.liar_cycle\.length"):
        parse_model(doc('{"liar_cycle": {"length": 0}}'))
    with pytest.raises(DocumentError, match=r"\$\.liar_cycle\.depth"):
        parse_model(doc('{"liar_cycle": {"length": 4, "depth": 1}}'))
    with pytest.raises(DocumentError, match="exactly three operators"):
        parse_model(doc('{"pauli_triple": {"operators": ["XX", "YY"]}}'))
    with pytest.raises(DocumentError, match=r"operators\[1\]"):
        parse_model(doc('{"pauli_triple": {"operators": ["XX", "WW", "YY"]}}'))
    with pytest.raises(DocumentError, match="share an arity"):
        parse_model(doc('{"pauli_triple": {"operators": ["XX", "YYY", "XX"]}}'))


def test_root_errors_carry_no_path_prefix():
    try:
        parse_model("[]")
    except DocumentError as exc:
        assert not str(exc).startswith("$")


# ---------------------------------------------------------------------------
# materialisation and constructors


def test_materialize_each_payload_kind(corpus_documents, corpus_models):
    assert corpus_models["pr-box"].supports == pr_box().supports
    bell = corpus_models["bell"]
    assert sorted(len(s) for s in bell.supports) == [2, 4, 4, 4]
    assert bell.supports == support_of_probability_table(bell_table()).supports
    assert corpus_models["ghz-mermin"] == ghz_model()
    assert corpus_models["liar-4"] == liar_cycle_model(4)


def test_materialize_rejects_mismatched_liar_scenario():
    bad = ModelDocument(
        scenario=BIPARTITE, payload_kind="liar_cycle", liar_cycle=LiarCycle(4)
    )
    with pytest.raises(DocumentError, match=r"\$\.scenario"):
        materialize(bad)


def test_equation_documents_expand_onto_containing_contexts():
    document = document_from_equations(
        BIPARTITE, 2, (({"a1": 1, "b1": 1}, 0), ({"a1": 1, "b2": 2}, 1))
    )
    # the b2 coefficient reduces to zero, so the second equation mentions a1
    # alone and lands on both contexts containing it
    assert len(document.raw_equations) == 2
    assert document.raw_equations[1].coefficients == (("a1", 1),)
    contexts = sorted(eq.context for eq in document.theory.equations)
    assert contexts == [("a1", "b1"), ("a1", "b1"), ("a1", "b2")]
    with pytest.raises(DocumentError, match="no cover context"):
        document_from_equations(BIPARTITE, 2, (({"a1": 1, "a2": 1}, 0),))
