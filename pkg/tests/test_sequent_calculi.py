import sys
import os
import pytest

# Ensure app is importable
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))
from app.schemas.errors import ModeError
from app.schemas.formula import Fun, Var
from app.schemas.proof import MACRO_RULES, CheckOptions, SearchBudget, SearchStatus
from app.services import kernel
from app.services.lce import expand_general_init, general_cinit, general_init, lce_prove
from app.services.le import le_dne, le_identity, le_prove
from app.services.parser import parse_formula, parse_le_sequent, parse_stoup_sequent
from app.services.search import witness_terms
from app.services.transform import weaken_by

f = parse_formula


def _both_ways(x, y):
    return [f"({x}) ->i ({y})", f"({y}) ->i ({x})"]


# Classical connectives against their negative readings, then the
# ecumenical consequences; items 7-9 use a classical atom for the stable part.
PROVED = (
    _both_ways("a_i \\/c b_i", "~(~a_i /\\ ~b_i)")
    + _both_ways("a_i ->c b_i", "~(a_i /\\ ~b_i)")
    + _both_ways("existsc x. a_i(x)", "~forall x. ~a_i(x)")
    + [
        "~~a_i ->c a_i",
        "a_i /\\ (a_i ->i b_i) ->i b_i",
        "(forall x. a_i(x)) ->i ~existsc x. ~a_i(x)",
        "b_i /\\ (b_i ->c a_c) ->i a_c",
        "~~a_c ->i a_c",
        "(~existsc x. ~a_c(x)) ->i forall x. a_c(x)",
    ]
)

REFUTED = [
    "~~a_i ->i a_i",
    "a_i /\\ (a_i ->c b_i) ->i b_i",
]


@pytest.mark.parametrize("text", PROVED)
def test_ecumenical_theorems_are_proved_cut_free(text):
    le = le_prove(parse_le_sequent(f"|- {text}"))
    lce = lce_prove(parse_stoup_sequent(f"|- ; {text}"))
    assert le.proved and lce.proved
    assert le.proof.is_cut_free() and lce.proof.is_cut_free()
    assert kernel.check("le", le.proof).valid
    assert kernel.check("lce", lce.proof).valid


@pytest.mark.parametrize("text", REFUTED)
def test_non_theorems_are_refuted_by_saturation(text):
    assert le_prove(parse_le_sequent(f"|- {text}")).status is SearchStatus.REFUTED
    assert lce_prove(parse_stoup_sequent(f"|- ; {text}")).status is SearchStatus.REFUTED


def test_first_order_converse_is_not_proved():
    text = "(~existsc x. ~a_i(x)) ->i forall x. a_i(x)"
    assert not lce_prove(parse_stoup_sequent(f"|- ; {text}")).proved


def test_excluded_middle_is_refuted():
    assert lce_prove(parse_stoup_sequent("|- ; a_i \\/i ~a_i")).status is SearchStatus.REFUTED


@pytest.mark.parametrize("text", [
    "~b_i, a_i ->c b_i, a_i |- ; c_i",
    "|- b_i, a_i /\\ ~b_i, ~a_i ; c_i",
])
def test_weakened_succedent_needs_w(text):
    result = lce_prove(parse_stoup_sequent(text))
    assert result.proved
    assert "W" in result.proof.rules_used()


def test_le_modus_ponens():
    assert le_prove(parse_le_sequent("a_i /\\ (a_i ->i b_i) |- b_i")).proved
    assert le_prove(parse_le_sequent("a_i /\\ (a_i ->c b_i) |- b_i")).status is SearchStatus.REFUTED


def test_provers_reject_modal_input():
    with pytest.raises(ModeError):
        lce_prove(parse_stoup_sequent("|- ; box a_i"))
    with pytest.raises(ModeError):
        le_prove(parse_le_sequent("|- diai a_i"))


@pytest.mark.parametrize("text", ["a_i ->c b_c", "forall x. a_i(x) \\/i ~a_c(x)", "existsc y. b_c(y) /\\ c_i"])
def test_le_identity_and_double_negation(text):
    a = f(text)
    left = [f("d_i")]
    assert kernel.check("le", le_identity(left, a)).valid
    n = f("~" + text)
    assert kernel.check("le", le_dne(left, n), CheckOptions(allow_cuts=True)).valid


@pytest.mark.parametrize("text", ["a_i ->c b_c", "a_c \\/i b_i", "forall x. existsc y. r_i(x, y)"])
def test_general_axioms_expand_to_atomic_derivations(text):
    a = f(text)
    for tree in (general_init([f("d_i")], [], a), general_cinit([], [f("d_i")], a)):
        assert kernel.check("lce", tree).valid
        assert not (tree.rules_used() & MACRO_RULES)


def test_expand_general_init_removes_macros():
    result = lce_prove(parse_stoup_sequent("a_i ->c b_i |- ; a_i ->c b_i"))
    assert result.proved
    out = expand_general_init(result.proof)
    assert not (out.rules_used() & MACRO_RULES)
    assert kernel.check("lce", out, CheckOptions(expand_macros=False)).valid


def test_weakening_renames_clashing_eigenvariables():
    result = lce_prove(parse_stoup_sequent("|- ; forall x. a_i(x) ->i a_i(x)"))
    assert result.proved
    eigen = next(n.rule.eigen for _, n in result.proof.nodes() if n.rule.eigen)
    clash = f(f"q_i({eigen})")
    out = weaken_by("lce", result.proof, left=[clash], right=[f("r_c")])
    assert clash in out.conclusion.left
    assert kernel.check("lce", out).valid


def test_witness_terms_pad_with_fresh_constants():
    terms = witness_terms([f("forall x. p_i(x, c0(), y)")], SearchBudget(max_terms=3))
    assert terms == [Fun("c0"), Var("y"), Fun("c1")]


def test_empty_domain_witness_is_a_constant():
    result = lce_prove(parse_stoup_sequent("forall x. p_i(x) |- ; existsi x. p_i(x)"))
    assert result.proved
    witnesses = {t.rule.witness for _, t in result.proof.nodes() if t.rule.witness is not None}
    assert witnesses and all(isinstance(w, Fun) and not w.args for w in witnesses)
    assert kernel.check("lce", result.proof).valid
