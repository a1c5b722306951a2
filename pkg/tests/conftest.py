import os
import random
import sys

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))
from app.schemas.formula import (
    BOT,
    TOP,
    And,
    AtomC,
    AtomI,
    Box,
    DiaC,
    DiaI,
    ExistsC,
    ExistsI,
    ForAll,
    ImpC,
    ImpI,
    Neg,
    OrC,
    OrI,
    Var,
)
from app.schemas.sequent import Node, StoupSequent
from app.services.nek import Context

SEED = 20240611
CASES = 300

_BINARY = (And, OrI, OrC, ImpI, ImpC)
_MODAL = (Box, DiaI, DiaC)
_QUANT = (ForAll, ExistsI, ExistsC)


def random_formula(rng, depth, modal=False, quantifiers=False, top=False, bound=()):
    """Depth-bounded formula over a_i, b_i, a_c (and p_i(x) under a binder)."""
    if depth == 0 or rng.random() < 0.25:
        leaves = [AtomI("a"), AtomI("b"), AtomC("a"), BOT]
        if top:
            leaves.append(TOP)
        if bound:
            leaves += [AtomI("p", (Var(x),)) for x in bound]
        return rng.choice(leaves)
    kinds = ["bin", "bin", "neg"] + (["modal"] if modal else []) + (["quant"] if quantifiers else [])
    kind = rng.choice(kinds)
    sub = lambda: random_formula(rng, depth - 1, modal, quantifiers, top, bound)  # noqa: E731
    if kind == "bin":
        return rng.choice(_BINARY)(sub(), sub())
    if kind == "neg":
        return Neg(sub())
    if kind == "modal":
        return rng.choice(_MODAL)(sub())
    x = "xy"[len(bound) % 2]
    return rng.choice(_QUANT)(x, random_formula(rng, depth - 1, modal, quantifiers, top, bound + (x,)))


def random_stoup_sequent(rng, depth=2):
    some = lambda k: [random_formula(rng, depth) for _ in range(rng.randint(0, k))]  # noqa: E731
    stoup = random_formula(rng, depth) if rng.random() < 0.7 else None
    return StoupSequent(frozenset(some(2)), frozenset(some(1)), stoup)


def random_axiom_case(rng):
    """Context, principal and two extra formulas for the identity and weakening checks."""
    some = lambda k: frozenset(random_formula(rng, 1) for _ in range(rng.randint(0, k)))  # noqa: E731
    return some(2), some(1), random_formula(rng, 3), random_formula(rng, 2), random_formula(rng, 2)


def random_node(rng, depth, formula_depth=1, output=True):
    """Nested sequent with at most one output; brackets up to ``depth`` deep."""
    pick = lambda k: frozenset(random_formula(rng, formula_depth, modal=True) for _ in range(rng.randint(0, k)))  # noqa: E731
    kids = []
    out_in_child = output and depth > 0 and rng.random() < 0.4
    for i in range(rng.randint(0, 2) if depth > 0 else 0):
        kids.append(random_node(rng, depth - 1, formula_depth, output=out_in_child and i == 0))
    here = output and not any(k.outputs() for k in kids)
    out = random_formula(rng, formula_depth, modal=True) if here and rng.random() < 0.7 else None
    return Node(pick(2), pick(1), out, tuple(kids))


def random_context(rng, depth):
    return Context(tuple(random_node(rng, 0, output=False) for _ in range(depth + 1)))


def random_context_triple(rng):
    depth = rng.randint(0, 2)
    return tuple(random_context(rng, depth) for _ in range(3))


def _cases(make):
    rng = random.Random(SEED)
    return [make(rng) for _ in range(CASES)]


GENERATED = {
    "any_formula": lambda: _cases(lambda r: random_formula(r, 3, modal=True, quantifiers=True, top=True)),
    "classical_formula": lambda: _cases(lambda r: random_formula(r, 3, modal=True, quantifiers=True)),
    "stoup_sequent": lambda: _cases(random_stoup_sequent),
    "axiom_case": lambda: _cases(random_axiom_case),
    "nested_sequent": lambda: _cases(lambda r: random_node(r, 2)),
    "context_triple": lambda: _cases(random_context_triple),
}


def pytest_generate_tests(metafunc):
    for name, make in GENERATED.items():
        if name in metafunc.fixturenames:
            metafunc.parametrize(name, make(), ids=[f"{name}{i}" for i in range(CASES)])
