import sys
import os
import pytest

# Ensure app is importable
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))
from app.schemas.formula import (
    BOT,
    And,
    AtomC,
    AtomI,
    DiaC,
    DiaI,
    ForAll,
    ImpC,
    ImpI,
    Neg,
    OrI,
    Polarity,
    Var,
)
from app.services.formula import (
    dn_expand,
    ecumenical_weight,
    free_vars,
    fresh_var,
    is_eec,
    is_externally_classical,
    polarity,
    subformulas,
    substitute,
)
from app.services.parser import parse_formula

a, b, p = AtomI("a"), AtomI("b"), AtomI("p")


@pytest.mark.parametrize("f, expected", [
    (AtomC("p"), Polarity.NEGATIVE),
    (p, Polarity.POSITIVE),
    (Neg(p), Polarity.NEGATIVE),
    (DiaI(AtomC("p")), Polarity.POSITIVE),
])
def test_polarity(f, expected):
    assert polarity(f) is expected


def test_externally_classical():
    assert is_externally_classical(ImpC(a, b))
    assert not is_externally_classical(And(AtomC("a"), AtomC("b")))
    assert is_externally_classical(BOT)


def test_eec():
    assert is_eec(Neg(OrI(a, b)))
    assert not is_eec(ImpI(AtomC("a"), b))
    assert is_eec(ForAll("x", ImpC(AtomI("a", (Var("x"),)), AtomI("b", (Var("x"),)))))


@pytest.mark.parametrize("f, expected", [
    (AtomC("p"), 4),
    (ImpI(a, b), 1),
    (DiaC(Neg(p)), 5),
])
def test_ecumenical_weight(f, expected):
    assert ecumenical_weight(f) == expected


def _classical_count(f):
    n = 0
    for g in subformulas(f):
        n += 2 if isinstance(g, AtomC) else 0
        n += 1 if type(g).__name__ in ("ImpC", "ExistsC", "DiaC") else 0
    return n


@pytest.mark.parametrize("text", [
    "a_c",
    "a_c ->c b_i",
    "a_i \\/c ~b_c",
    "existsc x. p_i(x) ->c q_c(x)",
    "diac (a_c /\\ box b_i)",
    "~~a_i ->c a_i",
    "(a_i \\/c b_i) ->i ~(~a_i /\\ ~b_i)",
])
def test_weight_matches_double_negation_expansion(text):
    f = parse_formula(text)
    assert ecumenical_weight(f) == ecumenical_weight(dn_expand(f)) + _classical_count(f)


def test_substitute_renames_to_avoid_capture():
    f = ForAll("y", AtomI("r", (Var("x"), Var("y"))))
    out = substitute(f, "x", Var("y"))
    assert out == parse_formula("forall z. r_i(y, z)")
    assert out.var != "y"


def test_substitute_simple_cases():
    assert substitute(AtomI("p", (Var("x"),)), "x", Var("c")) == parse_formula("p_i(c)")
    assert substitute(BOT, "x", Var("c")) == BOT


def test_free_and_fresh_vars():
    assert free_vars(parse_formula("forall x. r_i(x, y)")) == {"y"}
    assert fresh_var({"y0", "y1"}) == "y2"
    assert free_vars(BOT) == frozenset()


def test_alpha_equivalent_formulas_are_equal():
    f = parse_formula("forall x. p_i(x)")
    g = parse_formula("forall y. p_i(y)")
    assert f == g
    assert hash(f) == hash(g)
