import sys
import os
import pytest

# Ensure app is importable
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))
from app.schemas.errors import ParseError
from app.schemas.formula import And, AtomC, AtomI, Box, DiaC, ImpC, ImpI, Neg
from app.schemas.proof import ProofTree, RuleInstance
from app.schemas.sequent import Labeled, Node, RelAtom
from app.services.parser import (
    parse_formula,
    parse_labeled_sequent,
    parse_model,
    parse_nested_sequent,
    parse_proof_file,
    parse_stoup_sequent,
    proof_file_text,
)
from app.services.render import render

a, b = AtomI("a"), AtomI("b")


def test_formula_shapes():
    assert parse_formula("~~a_i ->c a_i") == ImpC(Neg(Neg(a)), a)
    assert parse_formula("box (p_i ->i q_i)") == Box(ImpI(AtomI("p"), AtomI("q")))
    assert parse_formula("a_i /\\ b_i ->i c_i") == ImpI(And(a, b), AtomI("c"))


def test_implication_is_right_associative():
    assert parse_formula("a_i ->i b_i ->i a_i") == ImpI(a, ImpI(b, a))


@pytest.mark.parametrize("text", ["a_i ->i", "a_i $ b_i", "forall x.", "p", "(a_i"])
def test_formula_errors_carry_a_span(text):
    with pytest.raises(ParseError) as err:
        parse_formula(text)
    assert 0 <= err.value.span.start <= err.value.span.end <= len(text)


def test_stoup_sequents():
    s = parse_stoup_sequent("p_i |- ; p_i")
    assert s.left == {AtomI("p")} and not s.right and s.stoup == AtomI("p")
    s = parse_stoup_sequent("|- a_c, b_c ; .")
    assert s.right == {AtomC("a"), AtomC("b")} and s.stoup is None
    with pytest.raises(ParseError):
        parse_stoup_sequent("p_i, q_i |- ; . ; r_i")


def test_nested_sequents():
    s = parse_nested_sequent("-diac a_i, [ !~b_i ], [ +a_i /\\ b_i ]")
    assert s.right == {DiaC(a)}
    assert set(s.children) == {Node(output=Neg(b)), Node(left=frozenset({And(a, b)}))}
    assert parse_nested_sequent("!p_i ->i p_i") == Node(output=ImpI(AtomI("p"), AtomI("p")))
    with pytest.raises(ParseError):
        parse_nested_sequent("!a_i, [ !b_i ]")


def test_labeled_sequents():
    s = parse_labeled_sequent("R(x,y), x:box p_i |- ; y:p_i")
    assert s.relations == {RelAtom("x", "y")}
    assert s.left == {Labeled("x", Box(AtomI("p")))}
    assert s.stoup == Labeled("y", AtomI("p"))
    s = parse_labeled_sequent("x: diac p_i |- x: diac p_i ; .")
    assert s.left == s.right and s.stoup is None
    with pytest.raises(ParseError):
        parse_labeled_sequent("x:p_i |- y:q_i ; z:r_i ; w:s_i")


@pytest.mark.parametrize("text", [
    "~~a_i ->c a_i",
    "box (p_i ->i q_i)",
    "forall x. existsc y. r_i(x, f(y)) \\/c q_c",
    "(a_i ->i b_i) ->i a_i",
    "~diai ~a_c ->i box a_c",
])
def test_render_reparses(text):
    f = parse_formula(text)
    assert parse_formula(render(f)) == f


def test_render_text_and_latex():
    assert render(parse_formula("~~a_i ->c a_i")) == "~~a_i ->c a_i"
    assert render(parse_stoup_sequent("|- a_c ; .")).endswith("; .")
    tree = ProofTree(parse_stoup_sequent("p_i |- ; p_i"), RuleInstance("init", side="S", principal=AtomI("p")))
    assert "init" in render(tree, "latex")
    assert "\\vdash" in render(tree, "latex")


def test_proof_file_text_parses_back():
    tree = ProofTree(parse_stoup_sequent("p_i |- ; p_i"), RuleInstance("init", side="S", principal=AtomI("p")))
    pf = parse_proof_file(proof_file_text("lce", tree, {"fragment": "full"}))
    assert pf.calculus == "lce"
    assert pf.options == {"fragment": "full"}
    assert pf.tree == tree


def test_frame_rule_principal_parses_back():
    rule = RuleInstance("B", principal=RelAtom("x", "y"))
    tree = ProofTree(parse_labeled_sequent("R(x,y), R(y,x) |- ; ."), rule)
    assert parse_proof_file(proof_file_text("labek", tree)).tree == tree


def test_proof_file_rejects_unknown_calculus():
    with pytest.raises(ParseError):
        parse_proof_file('calculus foo\n(init "p_i |- ; p_i")')


def test_proof_file_rejects_unknown_meta_key():
    with pytest.raises(ParseError):
        parse_proof_file('calculus lce\n(init {colour="red"} "p_i |- ; p_i")')


def test_parse_model():
    m = parse_model("# chain\nworlds 2\nle 0 1\nrel 0 1\nval 1 p\n")
    assert m.worlds == 2
    assert (0, 0) in m.le and (0, 1) in m.le
    assert m.rel == {(0, 1)}
    assert m.true_at(1) == {"p"} and not m.true_at(0)


def test_parse_model_rejects_unknown_world():
    with pytest.raises(ParseError):
        parse_model("worlds 1\nrel 0 3\n")
