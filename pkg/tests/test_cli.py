"""End-to-end checks of the command-line interface through main(argv).

Exit codes are contractual: 0 valid/falsified/clean, 1 invalid/not
falsified/failed, 2 usage or input errors, 3 internal invariant failures.
"""

import json

import jsonschema
import pytest

from biint.cli import EXIT_INTERNAL, EXIT_INVALID, EXIT_USAGE, EXIT_VALID, main
from biint.countermodel import countermodel
from biint.render import MODEL_SCHEMA
from biint.semantics import model_to_json
from biint.syntax import parse_sequent


def test_exit_code_values():
    assert (EXIT_VALID, EXIT_INVALID, EXIT_USAGE, EXIT_INTERNAL) == (0, 1, 2, 3)


# ----------------------------------------------------------------- prove


def test_prove_valid_formula(capsys):
    assert main(["prove", "p -> p"]) == EXIT_VALID
    assert capsys.readouterr().out.strip() == "VALID"


def test_prove_invalid_formula_prints_model(capsys):
    assert main(["prove", "p | (p -> false)"]) == EXIT_INVALID
    out = capsys.readouterr().out
    assert out.startswith("INVALID (countermodel verified at world ")
    assert "world 0: {}" in out
    assert "edges: 0 -> 1" in out


def test_prove_accepts_sequent_text(capsys):
    assert main(["prove", "p, q |- p & q"]) == EXIT_VALID
    assert main(["prove", "p |- q"]) == EXIT_INVALID


def test_prove_sequent_flag_rejects_bare_formula(capsys):
    assert main(["prove", "--sequent", "p -> p"]) == EXIT_USAGE
    assert "parse error" in capsys.readouterr().err


def test_prove_parse_error(capsys):
    assert main(["prove", "p -> ("]) == EXIT_USAGE
    assert "parse error" in capsys.readouterr().err


def test_prove_emit_json_keeps_stdout_clean(capsys):
    assert main(["prove", "--emit", "json", "p | (p -> false)"]) == EXIT_INVALID
    captured = capsys.readouterr()
    assert "INVALID" in captured.err
    payload = json.loads(captured.out)
    jsonschema.validate(payload, MODEL_SCHEMA)


def test_prove_emit_dot(capsys):
    assert main(["prove", "--emit", "dot", "p | (p -> false)"]) == EXIT_INVALID
    assert capsys.readouterr().out.startswith("digraph model {")


def test_prove_trace_shows_search_tree(capsys):
    assert main(["prove", "--trace", "p -> p"]) == EXIT_VALID
    out = capsys.readouterr().out
    assert "search tree:" in out
    assert "Id [derivable]" in out


def test_prove_trace_json_is_two_documents(capsys):
    assert main(["prove", "--emit", "json", "--trace", "p -> p"]) == EXIT_VALID
    out = capsys.readouterr().out
    payload = json.loads(out)  # valid verdict: only the trace is printed
    assert payload["status"] == "derivable"


def test_prove_budget_exhaustion_is_internal(capsys):
    big = "p -> (q | (r -> ((p -< q) & r)))"
    assert main(["prove", "--budget", "2", big]) == EXIT_INTERNAL
    assert "internal error" in capsys.readouterr().err


# ----------------------------------------------------------- check-model


@pytest.fixture()
def lem_model_file(tmp_path):
    model, _, _ = countermodel(parse_sequent("|- p | (p -> false)"))
    path = tmp_path / "model.json"
    path.write_text(model_to_json(model), encoding="utf-8")
    return str(path)


def test_check_model_falsifies(lem_model_file, capsys):
    code = main(["check-model", lem_model_file, "0", "p | (p -> false)"])
    assert code == EXIT_VALID
    assert "falsified at world 0" in capsys.readouterr().out


def test_check_model_not_falsified(lem_model_file, capsys):
    code = main(["check-model", lem_model_file, "1", "p | (p -> false)"])
    assert code == EXIT_INVALID
    assert "not falsified at world 1" in capsys.readouterr().out


def test_check_model_unknown_world(lem_model_file, capsys):
    assert main(["check-model", lem_model_file, "7", "p"]) == EXIT_USAGE
    assert "no world 7" in capsys.readouterr().err


def test_check_model_sequent_argument(lem_model_file):
    assert main(["check-model", lem_model_file, "0", "|- p"]) == EXIT_VALID


def test_check_model_missing_file(capsys):
    assert main(["check-model", "/nonexistent/m.json", "0", "p"]) == EXIT_USAGE
    assert "cannot read" in capsys.readouterr().err


def test_check_model_malformed_json(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{\"worlds\": []}", encoding="utf-8")
    assert main(["check-model", str(path), "0", "p"]) == EXIT_USAGE
    assert "model error" in capsys.readouterr().err


def test_check_model_persistence_violation(tmp_path, capsys):
    doc = {
        "worlds": [{"id": 0, "atoms": ["p"]}, {"id": 1, "atoms": []}],
        "edges": [[0, 1]],
    }
    path = tmp_path / "drop.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    assert main(["check-model", str(path), "0", "p"]) == EXIT_USAGE
    assert "persistence violation" in capsys.readouterr().err


def test_check_model_parse_error(lem_model_file, capsys):
    assert main(["check-model", lem_model_file, "0", "p &"]) == EXIT_USAGE
    assert "parse error" in capsys.readouterr().err


# ------------------------------------------------------------------ fuzz


def test_fuzz_small_corpus_passes(capsys):
    assert main(["fuzz", "--atoms", "1", "--size", "2"]) == EXIT_VALID
    out = capsys.readouterr().out
    assert "corpus: atoms {p}, <= 2 connectives" in out
    assert "failures: 0" in out


def test_fuzz_limit_marks_report(capsys):
    assert main(["fuzz", "--atoms", "1", "--size", "3", "--limit", "10"]) == EXIT_VALID
    assert "complete (limited)" in capsys.readouterr().out


# ----------------------------------------------------------------- bench


def test_bench_clean_corpus(tmp_path, capsys):
    corpus = tmp_path / "corpus.txt"
    corpus.write_text(
        "# comment lines and blanks are skipped\n"
        "\n"
        "VALID: p -> p\n"
        "INVALID: p |- q\n",
        encoding="utf-8",
    )
    assert main(["bench", str(corpus)]) == EXIT_VALID
    out = capsys.readouterr().out
    assert "2 items, 0 mismatches" in out
    assert out.count("ok ") >= 2


def test_bench_mismatch(tmp_path, capsys):
    corpus = tmp_path / "corpus.txt"
    corpus.write_text("VALID: p | (p -> false)\n", encoding="utf-8")
    assert main(["bench", str(corpus)]) == EXIT_INVALID
    out = capsys.readouterr().out
    assert "MISMATCH" in out
    assert "1 items, 1 mismatches" in out


def test_bench_rejects_unprefixed_line(tmp_path, capsys):
    corpus = tmp_path / "corpus.txt"
    corpus.write_text("p -> p\n", encoding="utf-8")
    assert main(["bench", str(corpus)]) == EXIT_USAGE
    assert "missing VALID:/INVALID: prefix" in capsys.readouterr().err


def test_bench_missing_file(capsys):
    assert main(["bench", "/nonexistent/corpus.txt"]) == EXIT_USAGE
    assert "cannot read" in capsys.readouterr().err


def test_bench_parse_error_line(tmp_path, capsys):
    corpus = tmp_path / "corpus.txt"
    corpus.write_text("VALID: p ->\n", encoding="utf-8")
    assert main(["bench", str(corpus)]) == EXIT_USAGE
    assert "parse error" in capsys.readouterr().err
