import sys
import os
import pytest

# Ensure app is importable
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))
from app.schemas.errors import MergeError, ModeError, RuleError
from app.schemas.formula import And, AtomI, Box, DiaC, DiaI, ImpC, ImpI, Neg
from app.schemas.proof import CheckOptions, FragmentMode, ProofTree, RuleInstance, SearchStatus
from app.schemas.sequent import Node
from app.services import kernel
from app.services.labek import labek_prove
from app.services.nek import (
    Context,
    absorbed,
    as_full,
    fm,
    k1_variant,
    k2_variant,
    k3_variant,
    k4_variant,
    k_axiom_variant,
    merge,
    nek_fragment_of,
    nek_premises,
    nek_prove,
    nested_to_labeled,
)
from app.services.parser import parse_expect_lines, parse_formula, parse_labeled_sequent, parse_nested_sequent
from app.services.semantics import countermodel_search

DATA = os.path.join(os.path.dirname(__file__), "data")
a, b = AtomI("a"), AtomI("b")
nested = parse_nested_sequent


def full(text):
    return as_full(nested(text))


def _corpus():
    with open(os.path.join(DATA, "nested_corpus.txt"), encoding="utf-8") as fh:
        return parse_expect_lines(fh.read())


CORPUS = _corpus()


def _goal(f):
    return Node(output=f)


# ---- rules ----

def test_classical_diamond_copies_into_a_bracket():
    rule = RuleInstance("cdiaR", side="R", principal=DiaC(a), target=(0,))
    assert nek_premises(rule, nested("-diac a_i, [ +b_i ]")) == [full("-diac a_i, [ +b_i, -a_i ]")]


def test_box_output_opens_a_bracket():
    rule = RuleInstance("boxR", side="S", principal=Box(a))
    assert nek_premises(rule, nested("!box a_i")) == [nested("[ !a_i ]")]


def test_reflexive_right_rule():
    rule = RuleInstance("t_right", side="R", principal=DiaC(a))
    with pytest.raises(RuleError):
        nek_premises(rule, nested("-diac a_i"))
    out = nek_premises(rule, nested("-diac a_i"), CheckOptions(extensions={"t"}))
    assert out == [full("-a_i")]


def test_printed_four_rule_sits_behind_an_option():
    rule = RuleInstance("4_right_printed", side="R", principal=DiaC(a), target=(0,))
    s = nested("-diac a_i, [ +b_i ]")
    with pytest.raises(RuleError):
        nek_premises(rule, s, CheckOptions(extensions={"4"}))
    out = nek_premises(rule, s, CheckOptions(extensions={"4"}, printed_a4=True))
    assert out == [nested("[ +b_i, !diai a_i ]")]


def test_four_right_propagates_the_diamond_inward():
    rule = RuleInstance("4_right", side="R", principal=DiaC(a), target=(0,))
    out = nek_premises(rule, nested("-diac a_i, [ +b_i ]"), CheckOptions(extensions={"4"}))
    assert out == [full("[ +b_i, -diac a_i ]")]


def test_fragment_gates_rules():
    rule = RuleInstance("impcL", side="L", principal=ImpC(a, b))
    with pytest.raises(RuleError):
        nek_premises(rule, nested("+a_i ->c b_i"), CheckOptions(fragment=FragmentMode.INTUITIONISTIC))


def test_second_output_is_out_of_language():
    two = Node(output=a, children=(Node(output=b),))
    assert kernel.get_calculus("nek").accepts(two, CheckOptions()) is not None


# ---- search ----

@pytest.mark.parametrize("text", [
    "!(~ box ~ a_i ->i diac a_i)",
    "!(~ diai ~ (a_c) ->i box (a_c))",
])
def test_diamond_box_consequences(text):
    result = nek_prove(nested(text))
    assert result.proved
    assert kernel.check("nek", result.proof).valid


@pytest.mark.parametrize("f", [
    k_axiom_variant("i", "i", "i"),
    k1_variant(),
    k2_variant(),
    k3_variant(),
    k4_variant(),
])
def test_intuitionistic_k_family_is_provable(f):
    assert nek_prove(_goal(f)).proved
    assert nek_prove(_goal(f), fragment=FragmentMode.INTUITIONISTIC).proved


def test_classical_box_premise_is_refuted():
    f = k_axiom_variant("c", "i", "i")
    assert f == parse_formula("box (a_i ->c b_i) ->i (box a_i ->i box b_i)")
    assert nek_prove(_goal(f)).status is SearchStatus.REFUTED


@pytest.mark.parametrize("f", [
    k_axiom_variant("c", "c", "i"),
    k_axiom_variant("c", "c", "c"),
    k3_variant(beta="c"),
])
def test_classical_k_variants_are_refuted_by_saturation(f):
    assert nek_prove(_goal(f)).status is SearchStatus.REFUTED
    assert countermodel_search(f, 3) is not None


def test_absorbed_drops_brackets_inside_an_input_sibling():
    s = nested("-b_i, [ +a_i, +b_i ], [ +a_i ], [ !b_i ]")
    assert absorbed(s) == nested("-b_i, [ +a_i, +b_i ], [ !b_i ]")
    assert absorbed(nested("[ +a_i ], [ +a_i ]")) == nested("[ +a_i ]")


def test_absorbed_keeps_incomparable_and_output_brackets():
    s = nested("[ +a_i ], [ +b_i ], [ +a_i, !b_i ]")
    assert absorbed(s) == s
    deep = nested("[ +a_i, [ +b_i ] ], [ +a_i, [ +b_i, +a_i ] ]")
    assert absorbed(deep) == nested("[ +a_i, [ +b_i, +a_i ] ]")


AXIOMS = [
    ("t", "box a_i ->i a_i"),
    ("t", "a_i ->i diai a_i"),
    ("4", "box a_i ->i box box a_i"),
    ("b", "a_i ->i box diai a_i"),
    ("5", "diai a_i ->i box diai a_i"),
]


@pytest.mark.parametrize("ext, text", AXIOMS)
def test_extension_axioms(ext, text):
    s = _goal(parse_formula(text))
    assert nek_prove(s).status is SearchStatus.REFUTED
    result = nek_prove(s, extensions={ext})
    assert result.proved
    assert kernel.check("nek", result.proof, CheckOptions(extensions={ext})).valid


def test_fragment_language_is_enforced():
    with pytest.raises(ModeError):
        nek_prove(nested("!(a_i ->c b_i)"), fragment=FragmentMode.INTUITIONISTIC)


@pytest.mark.parametrize("expected, calc, text", CORPUS)
def test_nested_and_labeled_provers_agree(expected, calc, text):
    s = nested(text)
    assert nek_prove(s).proved == labek_prove(nested_to_labeled(s)).proved == expected


# ---- interpretations ----

@pytest.mark.parametrize("text, expected", [
    ("!a_i", a),
    ("+a_i, !b_i", ImpI(a, b)),
    ("-a_i, [ !b_i ]", ImpI(Neg(a), Box(b))),
    ("+a_i, +b_i", And(a, b)),
])
def test_formula_interpretation(text, expected):
    assert fm(nested(text)) == expected


@pytest.mark.parametrize("text, expected", [
    ("-diac a_i, [ !~b_i ]", "R(x,w0) |- x:diac a_i ; w0:~b_i"),
    ("!a_i", "|- ; x:a_i"),
    ("+a_i", "x:a_i |- ; ."),
])
def test_nested_to_labeled(text, expected):
    assert nested_to_labeled(nested(text)) == parse_labeled_sequent(expected)


def test_fragment_classification():
    assert nek_fragment_of(parse_formula("box a_i ->i diai b_i")) == "int"
    assert nek_fragment_of(parse_formula("box a_c ->c diac b_c")) == "cls"
    assert nek_fragment_of(parse_formula("box bot /\\ bot")) == "both"
    assert nek_fragment_of(parse_formula("a_i ->c b_i")) == "neither"


# ---- contexts ----

def test_merge_zips_matching_depths():
    c1 = Context((Node(left=frozenset({a})), Node()))
    c2 = Context((Node(right=frozenset({b})), Node()))
    assert merge(c1, c2) == Context((Node(left=frozenset({a}), right=frozenset({b})), Node()))
    assert merge(Context.hole(), Context.hole()) == Context.hole()


def test_merge_rejects_different_depths():
    with pytest.raises(MergeError):
        merge(Context.hole(2), Context.hole(1))


def test_merge_is_associative():
    c1 = Context((Node(left=frozenset({a})), Node(right=frozenset({b}))))
    c2 = Context((Node(right=frozenset({a})), Node()))
    c3 = Context((Node(), Node(left=frozenset({b}))))
    assert merge(merge(c1, c2), c3) == merge(c1, merge(c2, c3))


def test_split_then_plug_restores_the_sequent():
    s = nested("+a_i, [ !b_i, [ -a_i ] ], [ +b_i ]")
    for path, _ in s.walk():
        ctx, sub = Context.split(s, path)
        assert ctx.plug(sub) == s


def test_euclidean_rules_need_a_bracketed_principal():
    rule = RuleInstance("5_out", side="S", principal=DiaI(a), path=(), target=(0,))
    with pytest.raises(RuleError):
        nek_premises(rule, full("!diai a_i, [ +b_i ]"), CheckOptions(extensions={"5"}))


def test_euclidean_rules_need_a_distinct_target():
    rule = RuleInstance("5_left", side="L", principal=Box(a), path=(0,), target=(0,))
    with pytest.raises(RuleError):
        nek_premises(rule, full("[ +box a_i ]"), CheckOptions(extensions={"5"}))


def test_euclidean_diamond_reaches_its_sibling_through_the_root():
    result = nek_prove(_goal(parse_formula("diai a_i ->i box diai a_i")), extensions={"5"})
    assert result.proved
    moves = [t.rule for _, t in result.proof.nodes() if t.rule.rule.startswith("5_")]
    assert moves and moves[0].path and moves[0].target == ()


CUTS = [
    ("icut", "+box (a_i /\\ b_i), !(box a_i /\\ box b_i)", "box a_i", ()),
    ("icut", "+box (a_i /\\ b_i), [ !b_i ]", "a_i /\\ b_i", (0,)),
    ("icut", "+diai a_i, +box (a_i ->i b_i), !diai b_i", "diai (a_i /\\ (a_i ->i b_i))", ()),
    ("ccut", "+~~a_c, !a_c", "a_c", ()),
    ("ccut", "+box ~~a_c, [ !a_c ]", "a_c", (0,)),
]


@pytest.mark.parametrize("name, text, cut, path", CUTS)
def test_cuts_are_admissible(name, text, cut, path):
    s = full(text)
    rule = RuleInstance(name, cut=parse_formula(cut), path=path)
    allow = CheckOptions(allow_cuts=True)
    parts = [nek_prove(p) for p in nek_premises(rule, s, allow)]
    assert all(p.proved for p in parts)
    golden = ProofTree(s, rule, tuple(p.proof for p in parts))
    assert kernel.check("nek", golden, allow).valid
    assert not kernel.check("nek", golden).valid
    assert nek_prove(s).proved
