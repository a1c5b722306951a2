import sys
import os
import pytest

# Ensure app is importable
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))
from app.schemas.errors import SemanticsError
from app.schemas.formula import BOT, TOP
from app.schemas.model import CONDITION_OF_EXTENSION, BirelationalModel, FrameCondition
from app.schemas.sequent import Node
from app.services.labek import labek_prove, root_sequent
from app.services.nek import fm, nek_prove
from app.services.parser import parse_formula, parse_model
from app.services.semantics import (
    closure,
    countermodel_search,
    enumerate_models,
    eval_formula,
    format_model,
    frame_ok,
    is_valid_in_model,
    random_model,
    validate_model,
)

f = parse_formula


def chain(val=None, rel=()):
    return BirelationalModel(worlds=2, le={(0, 1)}, rel=frozenset(rel), val=val or {})


def test_one_world_model_is_valid():
    assert validate_model(BirelationalModel(worlds=1)) == []


def test_valuation_must_be_monotone():
    m = chain({0: frozenset({"p"})})
    assert "V not monotone at (0,1,p)" in validate_model(m)


def test_f1_violation_is_reported():
    # 0 R 1 and 1 <= 2, but no world above 0 reaches 2
    m = BirelationalModel(worlds=3, le={(1, 2)}, rel={(0, 1)})
    assert "F1 at (0,1,2)" in validate_model(m)


def test_le_is_reflexive_by_construction():
    m = BirelationalModel(worlds=2)
    assert {(0, 0), (1, 1)} <= m.le


def test_double_negation_on_a_chain():
    m = chain({1: frozenset({"p"})})
    assert validate_model(m) == []
    assert eval_formula(m, 0, f("~~p_i"))
    assert not eval_formula(m, 0, f("p_i"))
    assert not eval_formula(m, 0, f("~~p_i ->i p_i"))
    assert eval_formula(m, 0, f("p_c"))


def test_constants():
    m = chain()
    for w in range(m.worlds):
        assert not eval_formula(m, w, BOT)
        assert eval_formula(m, w, TOP)


def test_box_on_a_reflexive_world():
    m = BirelationalModel(worlds=1, rel={(0, 0)}, val={0: frozenset({"p"})})
    assert eval_formula(m, 0, f("box p_i"))
    assert eval_formula(m, 0, f("diai p_i"))


def test_first_order_input_is_rejected():
    with pytest.raises(SemanticsError):
        eval_formula(chain(), 0, f("forall x. p_i(x)"))
    with pytest.raises(SemanticsError):
        countermodel_search(f("forall x. p_i(x)"), 2)


def test_countermodel_for_double_negation_elimination():
    m = countermodel_search(f("~~p_i ->i p_i"), 2)
    assert m is not None and m.worlds == 2
    assert validate_model(m) == []
    assert not is_valid_in_model(m, f("~~p_i ->i p_i"))


def test_no_countermodel_for_a_theorem():
    assert countermodel_search(f("~ box ~ p_i ->i diac p_i"), 3) is None


def test_reflexive_frames_validate_t():
    t = f("box p_i ->i p_i")
    assert countermodel_search(t, 2, [FrameCondition.REFLEXIVE]) is None
    assert countermodel_search(t, 2) is not None


def test_enumeration_is_deduplicated():
    models = list(enumerate_models(["p"], 2))
    assert len({m.signature() for m in models}) == len(models)
    assert all(validate_model(m) == [] for m in models)
    # relabelling worlds must not produce a second copy
    two = [m for m in models if m.worlds == 2 and m.le == frozenset({(0, 0), (1, 1), (0, 1)}) and not m.rel and not m.val]
    flipped = [m for m in models if m.worlds == 2 and (1, 0) in m.le and not m.rel and not m.val]
    assert len(two) + len(flipped) == 1


@pytest.mark.parametrize("cond", list(FrameCondition))
def test_closure_satisfies_its_condition(cond):
    m = BirelationalModel(worlds=3, rel={(0, 1), (1, 2)})
    assert frame_ok(closure(m, [cond]), [cond])


def test_random_model_is_deterministic_and_valid():
    for seed in range(25):
        m1 = random_model(seed, 3)
        m2 = random_model(seed, 3)
        assert m1 == m2
        assert validate_model(m1) == []


def test_random_model_honours_frame_conditions():
    conds = [FrameCondition.REFLEXIVE, FrameCondition.TRANSITIVE]
    for seed in range(10):
        m = random_model(seed, 3, conds)
        assert frame_ok(m, conds) and validate_model(m) == []


def test_random_model_seed_comes_from_settings(monkeypatch):
    from app.config import settings

    monkeypatch.setattr(settings, "seed", 7)
    assert random_model() == random_model(7)


def test_single_world_sample():
    m = random_model(3, 1)
    assert m.worlds == 1 and m.le == frozenset({(0, 0)})


def test_model_text_round_trip():
    m = chain({1: frozenset({"p", "q"})}, rel={(0, 1), (1, 1)})
    assert parse_model(format_model(m)) == m


def test_truth_is_persistent():
    for m in enumerate_models(["p"], 2):
        for g in [f("p_i"), f("~p_i"), f("box p_i"), f("diai p_i"), f("diac p_i"), f("p_c \\/c ~p_i")]:
            for a, b in m.le:
                if eval_formula(m, a, g):
                    assert eval_formula(m, b, g)


SOUNDNESS = [
    ("labek", "", "diac a_i ->i ~ box ~ a_i"),
    ("labek", "", "~ box ~ a_i ->i diac a_i"),
    ("labek", "", "box a_c ->i ~ diac ~ a_c"),
    ("nek", "", "~ diai ~ a_c ->i box a_c"),
    ("nek", "", "box (a_i ->i b_i) ->i diai a_i ->i diai b_i"),
    ("nek", "t", "box a_i ->i a_i"),
    ("nek", "t", "a_i ->i diai a_i"),
    ("nek", "4", "box a_i ->i box box a_i"),
    ("nek", "b", "a_i ->i box diai a_i"),
    ("nek", "5", "diai a_i ->i box diai a_i"),
]


@pytest.mark.slow
@pytest.mark.parametrize("calc, ext, text", SOUNDNESS)
def test_proved_formulas_are_valid(calc, ext, text):
    g = f(text)
    exts = {ext} if ext else set()
    if calc == "labek":
        assert labek_prove(root_sequent(g)).proved
    else:
        assert nek_prove(Node(output=g), extensions=exts).proved
    conds = [CONDITION_OF_EXTENSION[e] for e in exts]
    assert countermodel_search(g, 3, conds) is None
    atoms = ["a", "b"]
    for seed in range(1000):
        m = random_model(seed, 3, conds, atoms)
        assert is_valid_in_model(m, g)


@pytest.mark.slow
def test_unprovable_axioms_have_countermodels():
    for ext, text in [("t", "box a_i ->i a_i"), ("4", "box a_i ->i box box a_i"), ("b", "a_i ->i box diai a_i"), ("5", "diai a_i ->i box diai a_i")]:
        g = f(text)
        assert countermodel_search(g, 3) is not None
        assert countermodel_search(g, 3, [CONDITION_OF_EXTENSION[ext]]) is None


@pytest.mark.slow
@pytest.mark.parametrize("ext, text", [(e, t) for c, e, t in SOUNDNESS if c == "nek"] + [
    ("", "box (a_i /\\ b_i) ->i box a_i /\\ box b_i"),
    ("", "(diai a_i ->i box b_i) ->i box (a_i ->i b_i)"),
    ("", "diai (a_i \\/i b_i) ->i diai a_i \\/i diai b_i"),
    ("", "~~a_c ->i a_c"),
])
def test_every_nested_rule_preserves_validity(ext, text):
    exts = {ext} if ext else set()
    proof = nek_prove(Node(output=f(text)), extensions=exts).proof
    conds = [CONDITION_OF_EXTENSION[e] for e in exts]
    models = [random_model(seed, 3, conds, ["a", "b"]) for seed in range(50)]
    models += list(enumerate_models(["a", "b"], 2, conds))
    for _, node in proof.nodes():
        conclusion = fm(node.conclusion)
        premises = [fm(p.conclusion) for p in node.premises]
        for m in models:
            if all(is_valid_in_model(m, p) for p in premises):
                assert is_valid_in_model(m, conclusion), node.rule.rule
