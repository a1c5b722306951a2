import sys
import os
import io
import pytest
from unittest.mock import patch

# Ensure app is importable
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))
from app.main import main
from app.schemas.proof import ProofTree, RuleInstance, SearchResult, SearchStatus
from app.services.lce import lce_prove
from app.services.parser import parse_model, parse_proof_file, parse_stoup_sequent, proof_file_text


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


@pytest.fixture
def lce_proof(tmp_path):
    proof = lce_prove(parse_stoup_sequent("|- ; ~~a_i ->c a_i")).proof
    path = tmp_path / "dne.proof"
    path.write_text(proof_file_text("lce", proof), encoding="utf-8")
    return path, proof


@pytest.mark.parametrize("argv, code", [
    (["prove", "|- ; ~~a_i ->c a_i"], 0),
    (["prove", "|- ; a_i \\/c ~a_i"], 0),
    (["prove", "|- ; a_i \\/i ~a_i"], 1),
    (["prove", "--calculus", "le", "a_i /\\ (a_i ->i b_i) |- b_i"], 0),
    (["prove", "--calculus", "nek", "--ext", "t", "!(box a_i ->i a_i)"], 0),
    (["prove", "--calculus", "labek", "|- ; x:diac a_i ->i ~box ~a_i"], 0),
])
def test_prove_exit_codes(capsys, argv, code):
    assert run(capsys, *argv)[0] == code


def test_prove_prints_a_checkable_proof_file(capsys):
    code, out = run(capsys, "prove", "--check", "--calculus", "nek", "--ext", "t", "!(box a_i ->i a_i)")
    assert code == 0
    pf = parse_proof_file(out)
    assert pf.calculus == "nek"
    assert pf.options == {"ext": "t"}


def test_prove_refuted_line(capsys):
    code, out = run(capsys, "prove", "|- ; a_i \\/i ~a_i")
    assert out.startswith("refuted ")


def test_prove_reads_stdin(capsys, monkeypatch):
    monkeypatch.setattr(sys, "stdin", io.StringIO("a_i |- ; a_i\n"))
    assert run(capsys, "prove")[0] == 0


def test_prove_latex(capsys):
    code, out = run(capsys, "prove", "--format", "latex", "a_i |- ; a_i")
    assert code == 0 and "\\vdash" in out


@pytest.mark.parametrize("argv", [
    ["prove", "|- ; a_i \\/"],
    ["prove", "--calculus", "foo", "|- ; a_i"],
    ["prove", "--format", "pdf", "a_i |- ; a_i"],
    ["prove", "--calculus", "le", "|- box a_i"],
    ["prove", "--ext", "t", "|- ; a_i"],
    ["prove", "--calculus", "labek", "--ext", "4", "|- ; x:a_i"],
    ["prove", "--calculus", "labek", "--ext", "t", "|- ; x:box a_i ->i a_i"],
    ["nonsense"],
])
def test_bad_input_exits_3(capsys, argv):
    assert run(capsys, *argv)[0] == 3


def test_check_valid_file(capsys, lce_proof):
    path, proof = lce_proof
    code, out = run(capsys, "check", str(path))
    assert code == 0
    assert out.strip() == f"valid lce {proof.size()} nodes"


def test_check_tampered_file(capsys, tmp_path, lce_proof):
    _, proof = lce_proof
    bad = ProofTree(proof.conclusion, RuleInstance("init"), ())
    path = tmp_path / "bad.proof"
    path.write_text(proof_file_text("lce", bad), encoding="utf-8")
    code, out = run(capsys, "check", str(path))
    assert code == 1
    assert out.startswith("invalid . ")


def test_check_missing_file(capsys, tmp_path):
    assert run(capsys, "check", str(tmp_path / "nope.proof"))[0] == 3


def test_translate_lce_to_le_sequent(capsys):
    code, out = run(capsys, "translate", "--what", "lce-to-le-seq", "a_c |- b_i ; c_i")
    assert code == 0 and "|-" in out


def test_translate_proof_round_trip(capsys, tmp_path, lce_proof):
    path, _ = lce_proof
    code, out = run(capsys, "translate", "--what", "lce-to-le-proof", str(path))
    assert code == 0
    le_path = tmp_path / "dne.le"
    le_path.write_text(out, encoding="utf-8")
    assert parse_proof_file(out).calculus == "le"
    assert run(capsys, "check", "--allow-cuts", str(le_path))[0] == 0
    code, out = run(capsys, "translate", "--what", "le-to-lce-proof", str(le_path))
    assert code == 0 and parse_proof_file(out).calculus == "lce"


def test_translate_rejects_wrong_calculus(capsys, lce_proof):
    path, _ = lce_proof
    assert run(capsys, "translate", "--what", "le-to-lce-proof", str(path))[0] == 3


@pytest.mark.parametrize("what, text, expected", [
    ("fm", "+a_i, !b_i", "a_i ->i b_i"),
    ("modal-to-fo", "box a_i", "forall"),
    ("nested-to-labeled", "+a_i, [ !b_i ]", "R(x,w0)"),
])
def test_translate_text_forms(capsys, what, text, expected):
    code, out = run(capsys, "translate", "--what", what, text)
    assert code == 0
    assert expected in out


def test_countermodel_found(capsys):
    code, out = run(capsys, "countermodel", "~~p_i ->i p_i")
    assert code == 1
    assert out.startswith("# refuted at world(s)")
    m = parse_model(out)
    assert m.worlds == 2


def test_countermodel_not_found(capsys):
    assert run(capsys, "countermodel", "--max-worlds", "2", "p_i ->i p_i")[0] == 2


@pytest.mark.parametrize("argv", [
    ["countermodel", "--max-worlds", "9", "p_i"],
    ["countermodel", "--frame", "dense", "p_i"],
    ["countermodel", "forall x. p_i(x)"],
])
def test_countermodel_bad_input(capsys, argv):
    assert run(capsys, *argv)[0] == 3


def test_reflexive_frame_flag(capsys):
    assert run(capsys, "countermodel", "--max-worlds", "2", "--frame", "refl", "box p_i ->i p_i")[0] == 2
    assert run(capsys, "countermodel", "--max-worlds", "2", "box p_i ->i p_i")[0] == 1


def test_cutelim_on_cut_free_proof(capsys, lce_proof):
    path, proof = lce_proof
    code, out = run(capsys, "cutelim", str(path))
    assert code == 0
    assert parse_proof_file(out).tree == proof


def test_cutelim_rejects_le_proofs(capsys, tmp_path):
    path = tmp_path / "id.le"
    path.write_text('calculus le\n(init "a_i |- a_i")\n', encoding="utf-8")
    assert run(capsys, "cutelim", str(path))[0] == 3


@pytest.fixture
def chain_model(tmp_path):
    path = tmp_path / "chain.model"
    path.write_text("# two worlds\nworlds 2\nle 0 1\nval 1 p\n", encoding="utf-8")
    return path


@pytest.mark.parametrize("argv, code, out", [
    (["~~p_i", "--world", "0"], 0, "true"),
    (["p_i", "--world", "0"], 1, "false"),
    (["~~p_i ->i p_i"], 1, "false at 0"),
    (["p_i ->i p_i"], 0, "true"),
])
def test_eval(capsys, chain_model, argv, code, out):
    got, text = run(capsys, "eval", "--model", str(chain_model), *argv)
    assert got == code
    assert text.strip() == out


def test_eval_unknown_world(capsys, chain_model):
    assert run(capsys, "eval", "--model", str(chain_model), "--world", "5", "p_i")[0] == 3


def test_t_axiom_needs_its_extension(capsys):
    assert run(capsys, "prove", "--calculus", "nek", "!(box a_i ->i a_i)")[0] == 1


@patch("app.routers.prove.lce_prove")
def test_prove_budget_exhaustion_exits_2(mock_prove, capsys):
    mock_prove.return_value = SearchResult(SearchStatus.UNKNOWN)
    code, out = run(capsys, "prove", "|- ; a_i")
    assert code == 2
    assert out.startswith("unknown ")
