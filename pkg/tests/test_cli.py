"""Command-line behaviour: exit codes, output shapes, environment handling.

Everything goes through main(argv) in-process; stdout and stderr are
captured with capsys, documents are written to tmp_path.
"""

from __future__ import annotations

import io
import json

import pytest

from contextuality import SelfCheckError, corpus_names, corpus_text, materialize, parse_model
from contextuality.cli import BUDGET_VARIABLE, main
import contextuality.cli as cli_module


@pytest.fixture
def pr_path(tmp_path):
    path = tmp_path / "pr.json"
    path.write_text(corpus_text("pr-box"), encoding="utf-8")
    return str(path)


@pytest.fixture
def hardy_path(tmp_path):
    path = tmp_path / "hardy.json"
    path.write_text(corpus_text("hardy"), encoding="utf-8")
    return str(path)


def test_analyze_text_output(pr_path, capsys):
    assert main(["analyze", pr_path]) == 0
    out = capsys.readouterr().out
    assert "no-signalling: yes" in out
    assert "hierarchy self-check: passed" in out
    assert "ring Z2:" in out


def test_analyze_json_output(pr_path, capsys):
    assert main(["analyze", pr_path, "--json", "--ring", "z2", "--ring", "z3"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["name"] == "pr-box"
    assert payload["hierarchy"] == "ok"
    by_ring = {entry["ring"]: entry for entry in payload["rings"]}
    assert set(by_ring) == {"Z2", "Z3", "Z"}
    assert by_ring["Z2"]["avn"] is True


def test_analyze_reads_stdin(pr_path, capsys, monkeypatch):
    monkeypatch.setattr("sys.stdin", io.StringIO(corpus_text("pr-box")))
    assert main(["analyze", "-"]) == 0
    assert "strongly contextual (SC): yes" in capsys.readouterr().out


def test_missing_file_is_an_input_error(tmp_path, capsys):
    assert main(["analyze", str(tmp_path / "absent.json")]) == 1
    err = capsys.readouterr().err
    assert err.startswith("error:")
    assert "cannot read" in err


def test_malformed_document_is_an_input_error(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    assert main(["analyze", str(path)]) == 1
    assert "error:" in capsys.readouterr().err


def test_unknown_ring_is_an_input_error(pr_path, capsys):
    assert main(["analyze", pr_path, "--ring", "q7"]) == 1
    assert "unrecognised ring" in capsys.readouterr().err


def test_usage_errors_exit_one(capsys):
    assert main([]) == 1
    assert main(["no-such-command"]) == 1
    assert main(["corpus", "delete"]) == 1
    err = capsys.readouterr().err
    assert "error:" in err


def test_self_check_failure_exits_two(pr_path, capsys, monkeypatch):
    def explode(doc, rings=None, budget=None):
        raise SelfCheckError("hierarchy violation: forced")

    monkeypatch.setattr(cli_module, "analyze", explode)
    assert main(["analyze", pr_path]) == 2
    assert "self-check failure" in capsys.readouterr().err


def test_budget_flag_must_be_positive(pr_path, capsys):
    assert main(["analyze", pr_path, "--budget", "-3"]) == 1
    assert "positive" in capsys.readouterr().err


def test_budget_environment_variable(pr_path, capsys, monkeypatch):
    monkeypatch.setenv(BUDGET_VARIABLE, "nope")
    assert main(["analyze", pr_path]) == 1
    assert "not an integer" in capsys.readouterr().err

    monkeypatch.setenv(BUDGET_VARIABLE, "0")
    assert main(["analyze", pr_path]) == 1
    assert "positive" in capsys.readouterr().err

    monkeypatch.setenv(BUDGET_VARIABLE, "50000")
    assert main(["analyze", pr_path]) == 0
    capsys.readouterr()


def test_corpus_list(capsys):
    assert main(["corpus", "list"]) == 0
    out = capsys.readouterr().out
    assert tuple(out.split()) == corpus_names()


def test_corpus_show_round_trips(capsys):
    assert main(["corpus", "show", "ghz-mermin"]) == 0
    assert capsys.readouterr().out == corpus_text("ghz-mermin")


def test_corpus_show_errors(capsys):
    assert main(["corpus", "show"]) == 1
    assert "needs an entry name" in capsys.readouterr().err
    assert main(["corpus", "show", "nonesuch"]) == 1
    assert "error:" in capsys.readouterr().err


def test_avn_text_and_json(pr_path, capsys):
    assert main(["avn", pr_path, "--ring", "z2"]) == 0
    out = capsys.readouterr().out
    assert "All-vs-Nothing over Z2: yes" in out
    assert "theory generators (4):" in out

    assert main(["avn", pr_path, "--ring", "z2", "--json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["avn"] is True
    assert payload["solution"] is None
    assert len(payload["equations"]) == 4


def test_avn_at_unsupported_section(pr_path, capsys):
    assert main(["avn", pr_path, "--ring", "z2", "--at", "a1=0,b1=1"]) == 1
    assert "error:" in capsys.readouterr().err


def test_avn_bad_section_text(pr_path, capsys):
    assert main(["avn", pr_path, "--ring", "z2", "--at", "a1:0"]) == 1
    assert "bad section fragment" in capsys.readouterr().err


def test_obstruction_vanishing_family(hardy_path, capsys):
    argv = [
        "obstruction", hardy_path,
        "--context", "a1,b1", "--section", "a1=0,b1=0", "--ring", "z",
    ]
    assert main(argv) == 0
    out = capsys.readouterr().out
    assert "over Z: vanishes" in out
    assert "compatible family of coefficients:" in out

    assert main(argv + ["--json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["vanishes"] is True
    assert payload["family"] is not None
    assert payload["system"]["unknowns"] > 0


def test_obstruction_non_vanishing(pr_path, capsys):
    argv = [
        "obstruction", pr_path,
        "--context", "a1,b1", "--section", "a1=0,b1=0", "--ring", "z2",
    ]
    assert main(argv) == 0
    out = capsys.readouterr().out
    assert "does not vanish" in out
    assert "compatible family" not in out


def test_bundle_to_stdout_and_file(pr_path, tmp_path, capsys):
    assert main(["bundle", pr_path]) == 0
    out = capsys.readouterr().out
    assert out.startswith("graph bundle {")

    target = tmp_path / "pr.dot"
    assert main(["bundle", pr_path, "-o", str(target)]) == 0
    assert target.read_text(encoding="utf-8") == out


def test_stabiliser_verdicts(capsys):
    assert main(["stabiliser", "--triple", "XYY,YXY,YYX"]) == 0
    out = capsys.readouterr().out
    assert "AvN triple: yes" in out
    assert "generated subgroup order: 8" in out

    assert main(["stabiliser", "--triple", "XXX,YYY,ZZZ"]) == 0
    out = capsys.readouterr().out
    assert "AvN triple: no" in out
    assert "do not commute" in out


def test_stabiliser_json(capsys):
    assert main(["stabiliser", "--triple", "XYY,YXY,YYX", "--json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["avn_triple"] is True
    assert payload["a2_count"] == 1
    assert payload["subgroup_order"] == 8
    assert payload["failed"] == []


def test_stabiliser_emit_model_is_a_document(capsys):
    assert main(["stabiliser", "--triple", "XYY,YXY,YYX", "--emit-model"]) == 0
    doc = parse_model(capsys.readouterr().out)
    model = materialize(doc)
    assert sorted(len(s) for s in model.supports) == [4, 4, 4, 4, 8, 8, 8, 8]


def test_stabiliser_malformed_triple(capsys):
    assert main(["stabiliser", "--triple", "XY"]) == 1
    assert "error:" in capsys.readouterr().err
