import sys
import os
import pytest

# Ensure app is importable
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))
from app.schemas.errors import TranslationError
from app.schemas.formula import AtomI
from app.schemas.proof import CheckOptions, ProofTree, RuleInstance
from app.services import kernel
from app.services.cutelim import CutTrace, eliminate_cuts
from app.services.lce import lce_prove
from app.services.le import le_prove
from app.services.parser import parse_expect_lines, parse_le_sequent, parse_stoup_sequent
from app.services.translate import le_to_lce_proof, lce_to_le_proof, lce_to_le_sequent

DATA = os.path.join(os.path.dirname(__file__), "data")


def _corpus():
    with open(os.path.join(DATA, "lce_corpus.txt"), encoding="utf-8") as fh:
        return parse_expect_lines(fh.read())


CORPUS = _corpus()
PROVABLE = [text for ok, _, text in CORPUS if ok]
CUTS = CheckOptions(allow_cuts=True)


def test_corpus_size():
    assert len(CORPUS) == 40
    assert {calc for _, calc, _ in CORPUS} == {"lce"}


@pytest.mark.parametrize("expected, calc, text", CORPUS)
def test_lce_agrees_with_le_on_the_translation(expected, calc, text):
    s = parse_stoup_sequent(text)
    lce = lce_prove(s)
    le = le_prove(lce_to_le_sequent(s))
    assert lce.proved == le.proved == expected


@pytest.mark.parametrize("text", PROVABLE)
def test_lce_proofs_translate_to_valid_le_proofs(text):
    s = parse_stoup_sequent(text)
    tree = lce_to_le_proof(lce_prove(s).proof)
    assert tree.conclusion == lce_to_le_sequent(s)
    assert kernel.check("le", tree, CUTS).valid


@pytest.mark.parametrize("text", PROVABLE)
def test_le_proofs_translate_to_valid_lce_proofs(text):
    le = lce_to_le_sequent(parse_stoup_sequent(text))
    tree = le_to_lce_proof(le_prove(le).proof)
    assert kernel.check("lce", tree, CUTS).valid


@pytest.mark.parametrize("text", PROVABLE)
def test_cut_elimination_on_translated_proofs(text):
    le = lce_to_le_sequent(parse_stoup_sequent(text))
    tree = le_to_lce_proof(le_prove(le).proof)
    trace = CutTrace()
    out = eliminate_cuts(tree, trace)
    assert out.conclusion == tree.conclusion
    assert out.is_cut_free()
    assert kernel.check("lce", out).valid
    assert trace.is_decreasing()


@pytest.mark.parametrize("text, expected", [
    ("|- a_c ; .", "~a_c |- bot"),
    ("p_i |- ; p_i", "p_i |- p_i"),
    ("a_i |- b_i, c_i ; d_i", "a_i, ~b_i, ~c_i |- d_i"),
])
def test_lce_to_le_sequent(text, expected):
    assert lce_to_le_sequent(parse_stoup_sequent(text)) == parse_le_sequent(expected)


def test_init_translates_to_init():
    p = AtomI("p")
    tree = ProofTree(parse_stoup_sequent("p_i |- ; p_i"), RuleInstance("init", side="S", principal=p))
    out = lce_to_le_proof(tree)
    assert out.conclusion == parse_le_sequent("p_i |- p_i")
    assert out.rule.rule == "init"


def test_store_becomes_an_le_cut():
    tree = lce_prove(parse_stoup_sequent("a_c |- ; a_c")).proof
    assert "store" in tree.rules_used()
    assert "cut" in lce_to_le_proof(tree).rules_used()


def test_le_classical_disjunction_goes_through_store():
    tree = le_prove(parse_le_sequent("a_i |- a_i \\/c b_i")).proof
    out = le_to_lce_proof(tree)
    assert {"store", "orcR"} <= out.rules_used()


def test_le_classical_existential_uses_an_n_cut():
    tree = le_prove(parse_le_sequent("a_i(c) |- existsc x. a_i(x)")).proof
    assert "existscR" in tree.rules_used()
    out = le_to_lce_proof(tree)
    assert "Ncut" in out.rules_used()
    assert kernel.check("lce", out, CUTS).valid
    assert kernel.check("lce", eliminate_cuts(out)).valid


def test_invalid_input_is_a_translation_error():
    bad = ProofTree(parse_stoup_sequent("q_i |- ; p_i"), RuleInstance("init", side="S", principal=AtomI("p")))
    with pytest.raises(TranslationError):
        lce_to_le_proof(bad)
    with pytest.raises(TranslationError):
        eliminate_cuts(bad)


def test_cut_free_input_is_returned_unchanged():
    tree = lce_prove(parse_stoup_sequent("|- ; ~~a_i ->c a_i")).proof
    assert eliminate_cuts(tree) is tree


def test_p_cut_against_init_reduces_to_left_subtree():
    p = AtomI("p")
    left = ProofTree(parse_stoup_sequent("p_i |- ; p_i"), RuleInstance("init", side="S", principal=p))
    right = ProofTree(parse_stoup_sequent("p_i |- ; p_i"), RuleInstance("init", side="S", principal=p))
    tree = ProofTree(parse_stoup_sequent("p_i |- ; p_i"), RuleInstance("Pcut", cut=p), (left, right))
    out = eliminate_cuts(tree)
    assert out.is_cut_free()
    assert out.conclusion == tree.conclusion
