import sys
import os
import pytest

# Ensure app is importable
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))
from app.schemas.formula import TOP, And, AtomC, Box, DiaI, ImpI, Neg
from app.schemas.proof import MACRO_RULES, CheckOptions, ProofTree, RuleInstance, SearchBudget, SearchStatus
from app.schemas.sequent import StoupSequent
from app.services import kernel
from app.services.formula import dn_expand, ecumenical_weight, subformulas
from app.services.lce import LCEProblem, expand_general_init, general_cinit, general_init, lce_prove
from app.services.nek import NEKProblem, as_full, fm, merge, nek_prove
from app.services.parser import parse_formula, parse_stoup_sequent
from app.services.render import formula_text
from app.services.semantics import eval_formula, random_model
from app.services.transform import weaken_by

# Every test here is parametrized over generated cases (see conftest.py).

LCE_BUDGET = SearchBudget(max_depth=80, max_nodes=20_000)
NEK_BUDGET = SearchBudget(max_depth=40, max_labels=4, max_nodes=5_000)


def _preserved(conclusion, premises):
    if conclusion.proved:
        assert not any(p.status is SearchStatus.REFUTED for p in premises)
    if all(p.proved for p in premises):
        assert conclusion.status is not SearchStatus.REFUTED


# ---- invertibility ----

@pytest.mark.slow
def test_eager_lce_step_keeps_provability(stoup_sequent):
    step = LCEProblem(stoup_sequent, LCE_BUDGET).eager(stoup_sequent)
    if step is None:
        return
    _preserved(lce_prove(stoup_sequent, LCE_BUDGET), [lce_prove(p, LCE_BUDGET) for p in step.premises])


@pytest.mark.slow
def test_eager_nek_step_keeps_provability(nested_sequent):
    s = as_full(nested_sequent)
    step = NEKProblem(s, NEK_BUDGET, CheckOptions()).eager(s)
    if step is None:
        return
    _preserved(nek_prove(s, budget=NEK_BUDGET), [nek_prove(p, budget=NEK_BUDGET) for p in step.premises])


# ---- structural rules ----

def test_weakening_rebuilds_the_derivation(axiom_case):
    left, right, a, extra_left, extra_right = axiom_case
    weak = weaken_by("lce", general_init(left, right, a), left=[extra_left], right=[extra_right])
    assert weak.conclusion == StoupSequent(left | {a, extra_left}, right | {extra_right}, a)
    assert kernel.check("lce", weak).valid


def _text(left, right, stoup=None):
    side = lambda fs: ", ".join(formula_text(f) for f in fs)  # noqa: E731
    return f"{side(left)} |- {side(right)} ; {formula_text(stoup) if stoup is not None else '.'}"


def test_contraction_is_absorbed_by_the_contexts(axiom_case):
    left, right, a, _, _ = axiom_case
    tree = general_cinit(left, right, a)
    doubled = parse_stoup_sequent(_text(list(left) + [a, a], list(right) + [a, a]))
    assert doubled == tree.conclusion
    assert kernel.check("lce", tree).valid


# ---- general axioms ----

def test_general_axioms_expand_to_atomic_derivations(axiom_case):
    left, right, a, _, _ = axiom_case
    atomic = CheckOptions(expand_macros=False)
    macros = [
        ProofTree(StoupSequent(left | {a}, right, a), RuleInstance("ginit", side="S", principal=a)),
        ProofTree(StoupSequent(left | {a}, right | {a}), RuleInstance("gcinit", side="R", principal=a)),
    ]
    for macro in macros:
        tree = expand_general_init(macro)
        assert tree.conclusion == macro.conclusion
        assert not any(t.rule.rule in MACRO_RULES for _, t in tree.nodes())
        assert kernel.check("lce", tree, atomic).valid


# ---- syntax ----

def test_rendered_formula_parses_back(any_formula):
    assert parse_formula(formula_text(any_formula)) == any_formula


def test_weight_tracks_double_negation_expansion(classical_formula):
    lost = sum(
        2 if isinstance(g, AtomC) else 1 if type(g).__name__ in ("ImpC", "ExistsC", "DiaC") else 0
        for g in subformulas(classical_formula)
    )
    assert ecumenical_weight(classical_formula) == ecumenical_weight(dn_expand(classical_formula)) + lost


# ---- nested sequents ----

def _unsimplified(s):
    parts = list(s.left) + [Neg(f) for f in s.right] + [DiaI(_unsimplified(c)) for c in s.children if not c.outputs()]
    body = TOP
    for p in reversed(parts):
        body = And(p, body)
    if s.outputs() == 0:
        return body
    if s.output is not None:
        return ImpI(body, s.output)
    return ImpI(body, Box(_unsimplified(next(c for c in s.children if c.outputs()))))


def test_formula_interpretation_drops_top(nested_sequent):
    got = fm(nested_sequent)
    assert (TOP in set(subformulas(got))) == any(n.is_empty() for _, n in nested_sequent.walk())
    m = random_model(seed=len(nested_sequent.key), atoms=("a", "b"))
    raw = _unsimplified(nested_sequent)
    assert all(eval_formula(m, w, got) == eval_formula(m, w, raw) for w in range(m.worlds))


def test_merge_is_associative_and_commutative(context_triple):
    a, b, c = context_triple
    assert merge(merge(a, b), c) == merge(a, merge(b, c))
    assert merge(a, b) == merge(b, a)
