# app/services/formula.py
"""Classification, weights and substitution over ecumenical formulas."""
from __future__ import annotations

from functools import lru_cache
from itertools import count
from typing import Dict, FrozenSet, Iterable, Iterator, Set, Tuple

from app.schemas.formula import (
    Atom,
    AtomC,
    AtomI,
    And,
    Binary,
    Bottom,
    Box,
    DiaC,
    DiaI,
    ExistsC,
    ExistsI,
    ForAll,
    Formula,
    Fun,
    ImpC,
    ImpI,
    Neg,
    OrC,
    OrI,
    Polarity,
    Quant,
    Term,
    Top,
    Unary,
    Var,
)

_NEGATIVE_TOPS = (AtomC, Bottom, OrC, ImpC, ExistsC, DiaC, Neg)
_EXT_CLASSICAL = (AtomC, Bottom, OrC, ImpC, ExistsC, DiaC)


def polarity(f: Formula) -> Polarity:
    return Polarity.NEGATIVE if isinstance(f, _NEGATIVE_TOPS) else Polarity.POSITIVE


def is_positive(f: Formula) -> bool:
    return not isinstance(f, _NEGATIVE_TOPS)


def is_negative(f: Formula) -> bool:
    return isinstance(f, _NEGATIVE_TOPS)


def is_externally_classical(f: Formula) -> bool:
    # DiaC is admitted for the modal language; its leading connective is a classical existential.
    return isinstance(f, _EXT_CLASSICAL)


def is_eec(f: Formula) -> bool:
    match f:
        case _ if is_externally_classical(f):
            return True
        case Neg():
            return True
        case And(left, right):
            return is_eec(left) and is_eec(right)
        case ForAll(_, body):
            return is_eec(body)
        case ImpI(_, right):
            return is_eec(right)
        case Box(body):
            return is_eec(body)
    return False


@lru_cache(maxsize=65536)
def ecumenical_weight(f: Formula) -> int:
    match f:
        case AtomI() | Bottom() | Top():
            return 0
        case AtomC():
            return 4
        case And(a, b) | ImpI(a, b) | OrI(a, b):
            return ecumenical_weight(a) + ecumenical_weight(b) + 1
        case ImpC(a, b) | OrC(a, b):
            return ecumenical_weight(a) + ecumenical_weight(b) + 4
        case Neg(a) | Box(a) | DiaI(a) | ForAll(_, a) | ExistsI(_, a):
            return ecumenical_weight(a) + 1
        case DiaC(a) | ExistsC(_, a):
            return ecumenical_weight(a) + 4
    raise TypeError(f"not a formula: {f!r}")


def dn_expand(f: Formula) -> Formula:
    """Rewrite classical connectives into neutral/intuitionistic ones via double negation."""
    match f:
        case AtomC(name, terms):
            return Neg(Neg(AtomI(name, terms)))
        case OrC(a, b):
            return Neg(And(Neg(dn_expand(a)), Neg(dn_expand(b))))
        case ImpC(a, b):
            return Neg(And(dn_expand(a), Neg(dn_expand(b))))
        case ExistsC(x, a):
            return Neg(ForAll(x, Neg(dn_expand(a))))
        case DiaC(a):
            return Neg(Box(Neg(dn_expand(a))))
        case Binary(a, b):
            return type(f)(dn_expand(a), dn_expand(b))
        case Unary(a):
            return type(f)(dn_expand(a))
        case Quant(x, a):
            return type(f)(x, dn_expand(a))
    return f


# ---- variables and terms ----

def free_vars(f: Formula) -> FrozenSet[str]:
    return f.fv


def vars_of_all(formulas: Iterable[Formula]) -> Set[str]:
    out: Set[str] = set()
    for f in formulas:
        out |= f.fv
        out |= bound_vars(f)
    return out


def bound_vars(f: Formula) -> Set[str]:
    out: Set[str] = set()
    for g in subformulas(f):
        if isinstance(g, Quant):
            out.add(g.var)
    return out


def fresh_var(avoid: Iterable[str], prefix: str = "y") -> str:
    taken = set(avoid)
    for i in count():
        name = f"{prefix}{i}"
        if name not in taken:
            return name
    raise AssertionError("unreachable")


def substitute_term(s: Term, x: str, t: Term) -> Term:
    match s:
        case Var(name):
            return t if name == x else s
        case Fun(name, args):
            if x not in s.fv:
                return s
            return Fun(name, tuple(substitute_term(a, x, t) for a in args))
    raise TypeError(f"not a term: {s!r}")


def substitute(f: Formula, x: str, t: Term) -> Formula:
    """Capture-avoiding f[t/x]."""
    if x not in f.fv:
        return f
    match f:
        case Atom(name, terms):
            return type(f)(name, tuple(substitute_term(s, x, t) for s in terms))
        case Binary(a, b):
            return type(f)(substitute(a, x, t), substitute(b, x, t))
        case Unary(a):
            return type(f)(substitute(a, x, t))
        case Quant(y, body):
            if y in t.fv:
                renamed = fresh_var(t.fv | body.fv | {x})
                body = substitute(body, y, Var(renamed))
                y = renamed
            return type(f)(y, substitute(body, x, t))
    return f


def instantiate(q: Quant, t: Term) -> Formula:
    return substitute(q.body, q.var, t)


@lru_cache(maxsize=16384)
def alpha_normalize(f: Formula) -> Formula:
    """Rename binders v0, v1, ... in preorder, skipping the free variables of f."""
    avoid = set(f.fv)
    counter = count()

    def next_name() -> str:
        while True:
            name = f"v{next(counter)}"
            if name not in avoid:
                return name

    def go(g: Formula) -> Formula:
        match g:
            case Binary(a, b):
                return type(g)(go(a), go(b))
            case Unary(a):
                return type(g)(go(a))
            case Quant(y, body):
                name = next_name()
                return type(g)(name, go(substitute(body, y, Var(name))))
        return g

    return go(f)


# ---- traversal ----

def subformulas(f: Formula) -> Iterator[Formula]:
    yield f
    match f:
        case Binary(a, b):
            yield from subformulas(a)
            yield from subformulas(b)
        case Unary(a) | Quant(_, a):
            yield from subformulas(a)


def is_modal(f: Formula) -> bool:
    return any(isinstance(g, (Box, DiaI, DiaC)) for g in subformulas(f))


def has_quantifier(f: Formula) -> bool:
    return any(isinstance(g, Quant) for g in subformulas(f))


def is_propositional(f: Formula) -> bool:
    return not any(isinstance(g, Quant) or (isinstance(g, Atom) and g.terms) for g in subformulas(f))


def atom_names(f: Formula) -> Set[str]:
    return {g.name for g in subformulas(f) if isinstance(g, Atom)}


def _subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, Fun):
        for a in t.args:
            yield from _subterms(a)


def closed_terms(f: Formula) -> Set[Term]:
    """Terms occurring in f that mention no variable bound in f."""
    out: Set[Term] = set()

    def go(g: Formula, bound: FrozenSet[str]) -> None:
        match g:
            case Atom(_, terms):
                for t in terms:
                    for s in _subterms(t):
                        if not (s.fv & bound):
                            out.add(s)
            case Binary(a, b):
                go(a, bound)
                go(b, bound)
            case Unary(a):
                go(a, bound)
            case Quant(y, a):
                go(a, bound | {y})

    go(f, frozenset())
    return out


def symbol_arities(f: Formula) -> Iterator[Tuple[str, str, int]]:
    """Yield (kind, symbol, arity) for every predicate and function occurrence."""

    def terms(t: Term) -> Iterator[Tuple[str, str, int]]:
        if isinstance(t, Fun):
            yield ("function", t.name, len(t.args))
            for a in t.args:
                yield from terms(a)

    for g in subformulas(f):
        if isinstance(g, Atom):
            yield ("predicate", f"{g.name}_{g.suffix}", len(g.terms))
            for t in g.terms:
                yield from terms(t)


def check_arities(formulas: Iterable[Formula], table: Dict[Tuple[str, str], int] | None = None) -> Dict[Tuple[str, str], int]:
    table = {} if table is None else table
    for f in formulas:
        for kind, name, n in symbol_arities(f):
            seen = table.setdefault((kind, name), n)
            if seen != n:
                raise ValueError(f"arity clash for {kind} {name}: {seen} vs {n}")
    return table
