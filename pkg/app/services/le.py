# app/services/le.py
"""The single-succedent ecumenical calculus LE: rules, checker hook, search."""
from __future__ import annotations

from typing import Callable, Dict, Iterator, List, Optional

from app.schemas.errors import RuleError
from app.schemas.formula import (
    BOT,
    And,
    AtomC,
    AtomI,
    Bottom,
    ExistsC,
    ExistsI,
    ForAll,
    Formula,
    ImpC,
    ImpI,
    Neg,
    OrC,
    OrI,
    Var,
)
from app.schemas.proof import CheckOptions, ProofTree, RuleInstance, SearchBudget, SearchResult
from app.schemas.sequent import LESequent, ordered
from app.services import kernel
from app.services.formula import fresh_var, instantiate, is_modal, is_propositional, vars_of_all
from app.services.search import Expansion, ProofProblem, prove_with, witness_terms
from app.utils.logging import get_logger

logger = get_logger(__name__)

NAME = "le"


def _fv(s: LESequent) -> set:
    out = set(s.right.fv)
    for f in s.left:
        out |= f.fv
    return out


def _need_left(s: LESequent, rule: RuleInstance, kind) -> Formula:
    p = rule.principal
    if not isinstance(p, kind):
        raise RuleError(f"{rule.rule} needs a principal {kind.__name__}")
    if p not in s.left:
        raise RuleError(f"{rule.rule}: principal {p} is not in the antecedent")
    return p


def _need_right(s: LESequent, rule: RuleInstance, kind) -> Formula:
    if not isinstance(s.right, kind):
        raise RuleError(f"{rule.rule} needs a succedent {kind.__name__}")
    return s.right


def _need_bot(s: LESequent, rule: RuleInstance) -> None:
    if not isinstance(s.right, Bottom):
        raise RuleError(f"{rule.rule} needs succedent bot")


def _rest(s: LESequent, p: Formula, rule: RuleInstance) -> frozenset:
    return s.left if rule.keep else s.left - {p}


def _eigen(s: LESequent, rule: RuleInstance) -> str:
    y = rule.eigen
    if not y:
        raise RuleError(f"{rule.rule} needs an eigenvariable")
    if y in _fv(s):
        raise RuleError(f"{rule.rule}: eigenvariable {y} is not fresh")
    return y


def _witness(rule: RuleInstance):
    if rule.witness is None:
        raise RuleError(f"{rule.rule} needs a witness term")
    return rule.witness


def _init(rule, s):
    if not isinstance(s.right, AtomI) or s.right not in s.left:
        raise RuleError("init needs p_i on both sides")
    return []


def _bot_l(rule, s):
    if BOT not in s.left:
        raise RuleError("botL needs bot in the antecedent")
    return []


def _and_l(rule, s):
    p = _need_left(s, rule, And)
    return [LESequent(_rest(s, p, rule) | {p.left, p.right}, s.right)]


def _and_r(rule, s):
    c = _need_right(s, rule, And)
    return [LESequent(s.left, c.left), LESequent(s.left, c.right)]


def _or_i_l(rule, s):
    p = _need_left(s, rule, OrI)
    rest = _rest(s, p, rule)
    return [LESequent(rest | {p.left}, s.right), LESequent(rest | {p.right}, s.right)]


def _or_i_r(rule, s):
    c = _need_right(s, rule, OrI)
    if rule.index not in (1, 2):
        raise RuleError("oriR needs index 1 or 2")
    return [LESequent(s.left, c.left if rule.index == 1 else c.right)]


def _imp_i_l(rule, s):
    p = _need_left(s, rule, ImpI)
    return [LESequent(s.left, p.left), LESequent(_rest(s, p, rule) | {p.right}, s.right)]


def _imp_i_r(rule, s):
    c = _need_right(s, rule, ImpI)
    return [LESequent(s.left | {c.left}, c.right)]


def _neg_l(rule, s):
    p = _need_left(s, rule, Neg)
    _need_bot(s, rule)
    return [LESequent(s.left, p.body)]


def _neg_r(rule, s):
    c = _need_right(s, rule, Neg)
    return [LESequent(s.left | {c.body}, BOT)]


def _forall_l(rule, s):
    p = _need_left(s, rule, ForAll)
    return [LESequent(s.left | {instantiate(p, _witness(rule))}, s.right)]


def _forall_r(rule, s):
    c = _need_right(s, rule, ForAll)
    y = _eigen(s, rule)
    return [LESequent(s.left, instantiate(c, Var(y)))]


def _exists_i_l(rule, s):
    p = _need_left(s, rule, ExistsI)
    y = _eigen(s, rule)
    return [LESequent(_rest(s, p, rule) | {instantiate(p, Var(y))}, s.right)]


def _exists_i_r(rule, s):
    c = _need_right(s, rule, ExistsI)
    return [LESequent(s.left, instantiate(c, _witness(rule)))]


def _or_c_l(rule, s):
    p = _need_left(s, rule, OrC)
    _need_bot(s, rule)
    rest = _rest(s, p, rule)
    return [LESequent(rest | {p.left}, BOT), LESequent(rest | {p.right}, BOT)]


def _or_c_r(rule, s):
    c = _need_right(s, rule, OrC)
    return [LESequent(s.left | {Neg(c.left), Neg(c.right)}, BOT)]


def _imp_c_l(rule, s):
    p = _need_left(s, rule, ImpC)
    _need_bot(s, rule)
    return [LESequent(s.left, p.left), LESequent(_rest(s, p, rule) | {p.right}, BOT)]


def _imp_c_r(rule, s):
    c = _need_right(s, rule, ImpC)
    return [LESequent(s.left | {c.left, Neg(c.right)}, BOT)]


def _l_c(rule, s):
    p = _need_left(s, rule, AtomC)
    _need_bot(s, rule)
    return [LESequent(_rest(s, p, rule) | {AtomI(p.name, p.terms)}, BOT)]


def _r_c(rule, s):
    c = _need_right(s, rule, AtomC)
    return [LESequent(s.left | {Neg(AtomI(c.name, c.terms))}, BOT)]


def _exists_c_l(rule, s):
    p = _need_left(s, rule, ExistsC)
    _need_bot(s, rule)
    y = _eigen(s, rule)
    return [LESequent(_rest(s, p, rule) | {instantiate(p, Var(y))}, BOT)]


def _exists_c_r(rule, s):
    c = _need_right(s, rule, ExistsC)
    return [LESequent(s.left | {ForAll(c.var, Neg(c.body))}, BOT)]


def _weaken(rule, s):
    if isinstance(s.right, Bottom):
        raise RuleError("W on a bot succedent changes nothing")
    return [LESequent(s.left, BOT)]


def _cut(rule, s):
    a = rule.cut
    if not isinstance(a, Formula):
        raise RuleError("cut needs a cut formula")
    return [LESequent(s.left, a), LESequent(s.left | {a}, s.right)]


RULES: Dict[str, Callable[[RuleInstance, LESequent], List[LESequent]]] = {
    "init": _init,
    "botL": _bot_l,
    "andL": _and_l,
    "andR": _and_r,
    "oriL": _or_i_l,
    "oriR": _or_i_r,
    "impiL": _imp_i_l,
    "impiR": _imp_i_r,
    "negL": _neg_l,
    "negR": _neg_r,
    "forallL": _forall_l,
    "forallR": _forall_r,
    "existsiL": _exists_i_l,
    "existsiR": _exists_i_r,
    "orcL": _or_c_l,
    "orcR": _or_c_r,
    "impcL": _imp_c_l,
    "impcR": _imp_c_r,
    "Lc": _l_c,
    "Rc": _r_c,
    "existscL": _exists_c_l,
    "existscR": _exists_c_r,
    "W": _weaken,
    "cut": _cut,
}


def le_premises(rule: RuleInstance, s: LESequent) -> List[LESequent]:
    fn = RULES.get(rule.rule)
    if fn is None:
        raise RuleError(f"unknown LE rule {rule.rule!r}")
    return fn(rule, s)


class LECalculus:
    name = NAME

    def premises(self, rule: RuleInstance, conclusion, options: CheckOptions) -> List[LESequent]:
        if not isinstance(conclusion, LESequent):
            raise RuleError("LE expects single-succedent sequents")
        return le_premises(rule, conclusion)

    def accepts(self, conclusion, options: CheckOptions) -> Optional[str]:
        if not isinstance(conclusion, LESequent):
            return "LE expects single-succedent sequents"
        if any(is_modal(f) for f in conclusion.formulas()):
            return "LE formulas carry no modalities"
        return None


kernel.register(LECalculus())


# ---- search ----

_LEFT_RULES = {
    And: "andL", OrI: "oriL", ImpI: "impiL", Neg: "negL", ForAll: "forallL", ExistsI: "existsiL",
    OrC: "orcL", ImpC: "impcL", AtomC: "Lc", ExistsC: "existscL",
}
_BOT_ONLY = (Neg, OrC, ImpC, AtomC, ExistsC)


class LEProblem(ProofProblem):
    """Plain backtracking: right rules, then left rules, then W."""

    def __init__(self, root: LESequent, budget: SearchBudget):
        self.budget = budget
        self.complete = all(is_propositional(f) for f in root.formulas())

    def closing(self, s: LESequent) -> Optional[RuleInstance]:
        if BOT in s.left:
            return RuleInstance("botL", side="L", principal=BOT)
        if isinstance(s.right, AtomI) and s.right in s.left:
            return RuleInstance("init", side="R", principal=s.right)
        return None

    def _expand(self, s: LESequent, rule: RuleInstance) -> Expansion:
        return Expansion(rule, tuple(le_premises(rule, s)))

    def _fresh(self, s: LESequent) -> str:
        return fresh_var(vars_of_all(s.formulas()))

    def choices(self, s: LESequent) -> Iterator[Expansion]:
        c = s.right
        R = lambda name, **kw: self._expand(s, RuleInstance(name, side="R", principal=c, **kw))  # noqa: E731
        match c:
            case And():
                yield R("andR")
            case ImpI():
                yield R("impiR")
            case Neg():
                yield R("negR")
            case ForAll():
                yield R("forallR", eigen=self._fresh(s))
            case OrC():
                yield R("orcR")
            case ImpC():
                yield R("impcR")
            case AtomC():
                yield R("Rc")
            case ExistsC():
                yield R("existscR")
            case OrI():
                yield R("oriR", index=1)
                yield R("oriR", index=2)
            case ExistsI():
                for t in witness_terms(s.formulas(), self.budget):
                    yield R("existsiR", witness=t)
        for p in ordered(s.left):
            name = _LEFT_RULES.get(type(p))
            if name is None:
                continue
            if isinstance(p, _BOT_ONLY) and not isinstance(c, Bottom):
                continue
            rule = RuleInstance(name, side="L", principal=p)
            if name in ("existsiL", "existscL"):
                rule = rule.with_(eigen=self._fresh(s))
            if name == "forallL":
                for t in witness_terms(s.formulas(), self.budget):
                    if instantiate(p, t) not in s.left:
                        yield self._expand(s, rule.with_(witness=t))
                continue
            yield self._expand(s, rule)
        if not isinstance(c, Bottom):
            yield self._expand(s, RuleInstance("W", side="R", principal=c))


def le_prove(s: LESequent, budget: Optional[SearchBudget] = None) -> SearchResult:
    budget = budget or SearchBudget()
    kernel.require_language(NAME, s)
    result = prove_with(LEProblem(s, budget), s, budget)
    logger.info("le_prove %s -> %s", s, result.status.value)
    return result


# ---- derived derivations used by the translations ----

def _node(concl: LESequent, rule: RuleInstance, *premises: ProofTree) -> ProofTree:
    return ProofTree(concl, rule, tuple(premises))


def _fresh_for(left, *extra: Formula) -> str:
    return fresh_var(vars_of_all(list(left) + list(extra)))


def le_identity(left, a: Formula) -> ProofTree:
    """A cut-free derivation of left, a |- a."""
    ctx = frozenset(left) | {a}
    s = LESequent(ctx, a)
    L = lambda name, p, **kw: RuleInstance(name, side="L", principal=p, **kw)  # noqa: E731
    R = lambda name, **kw: RuleInstance(name, side="R", principal=a, **kw)  # noqa: E731
    match a:
        case AtomI():
            return _node(s, R("init"))
        case Bottom():
            return _node(s, L("botL", BOT))
        case AtomC(name, terms):
            pi = AtomI(name, terms)
            npi = Neg(pi)
            s1 = LESequent(ctx | {npi}, BOT)
            s2 = LESequent((ctx - {a}) | {npi, pi}, BOT)
            s3 = LESequent(s2.left, pi)
            return _node(s, R("Rc"), _node(s1, L("Lc", a), _node(s2, L("negL", npi), _node(s3, R("init").with_(principal=pi)))))
        case And(b, c):
            s1 = LESequent((ctx - {a}) | {b, c}, a)
            return _node(s, L("andL", a), _node(s1, R("andR"), le_identity(s1.left, b), le_identity(s1.left, c)))
        case OrI(b, c):
            rest = ctx - {a}
            s1, s2 = LESequent(rest | {b}, a), LESequent(rest | {c}, a)
            return _node(
                s, L("oriL", a),
                _node(s1, R("oriR", index=1), le_identity(s1.left, b)),
                _node(s2, R("oriR", index=2), le_identity(s2.left, c)),
            )
        case ImpI(b, c):
            s1 = LESequent(ctx | {b}, c)
            return _node(
                s, R("impiR"),
                _node(s1, L("impiL", a), le_identity(s1.left, b), le_identity((s1.left - {a}) | {c}, c)),
            )
        case Neg(b):
            s1 = LESequent(ctx | {b}, BOT)
            return _node(s, R("negR"), _node(s1, L("negL", a), le_identity(s1.left, b)))
        case OrC(b, c):
            s1 = LESequent(ctx | {Neg(b), Neg(c)}, BOT)
            rest = s1.left - {a}
            sb, sc = LESequent(rest | {b}, BOT), LESequent(rest | {c}, BOT)
            return _node(
                s, R("orcR"),
                _node(
                    s1, L("orcL", a),
                    _node(sb, L("negL", Neg(b)), le_identity(sb.left, b)),
                    _node(sc, L("negL", Neg(c)), le_identity(sc.left, c)),
                ),
            )
        case ImpC(b, c):
            s1 = LESequent(ctx | {b, Neg(c)}, BOT)
            sc = LESequent((s1.left - {a}) | {c}, BOT)
            return _node(
                s, R("impcR"),
                _node(s1, L("impcL", a), le_identity(s1.left, b), _node(sc, L("negL", Neg(c)), le_identity(sc.left, c))),
            )
        case ForAll():
            y = _fresh_for(ctx)
            inst = instantiate(a, Var(y))
            s1 = LESequent(ctx, inst)
            return _node(s, R("forallR", eigen=y), _node(s1, L("forallL", a, witness=Var(y)), le_identity(ctx, inst)))
        case ExistsI():
            y = _fresh_for(ctx)
            inst = instantiate(a, Var(y))
            s1 = LESequent((ctx - {a}) | {inst}, a)
            return _node(s, L("existsiL", a, eigen=y), _node(s1, R("existsiR", witness=Var(y)), le_identity(s1.left, inst)))
        case ExistsC():
            return _node(s, R("existscR"), _exists_c_refute(ctx | {ForAll(a.var, Neg(a.body))}, a))
    raise RuleError(f"no LE identity derivation for {a}")


def _exists_c_refute(left: frozenset, a: ExistsC) -> ProofTree:
    """left (containing a and forall x.~A) |- bot, by existscL, forallL, negL and identity."""
    allneg = ForAll(a.var, Neg(a.body))
    y = _fresh_for(left)
    inst = instantiate(a, Var(y))
    s = LESequent(left, BOT)
    s1 = LESequent((left - {a}) | {inst}, BOT)
    s2 = LESequent(s1.left | {Neg(inst)}, BOT)
    return _node(
        s, RuleInstance("existscL", side="L", principal=a, eigen=y),
        _node(
            s1, RuleInstance("forallL", side="L", principal=allneg, witness=Var(y)),
            _node(s2, RuleInstance("negL", side="L", principal=Neg(inst)), le_identity(s2.left, inst)),
        ),
    )


def le_dne(left, n: Formula) -> ProofTree:
    """A cut-free derivation of left, ~~n |- n for negative n."""
    nn = Neg(Neg(n))
    ctx = frozenset(left) | {nn}
    s = LESequent(ctx, n)
    neg_l = RuleInstance("negL", side="L", principal=nn)

    def reopen(extra: frozenset, finish: Callable[[frozenset], ProofTree]) -> ProofTree:
        # ctx + extra |- bot by negL(~~n) and negR, leaving ctx + extra + n |- bot.
        base = ctx | extra
        s1 = LESequent(base, BOT)
        s2 = LESequent(base, Neg(n))
        return _node(s1, neg_l, _node(s2, RuleInstance("negR", side="R", principal=Neg(n)), finish(base | {n})))

    right = lambda name: RuleInstance(name, side="R", principal=n)  # noqa: E731
    match n:
        case Bottom():
            s1 = LESequent(ctx, Neg(BOT))
            s2 = LESequent(ctx | {BOT}, BOT)
            return _node(s, neg_l, _node(s1, RuleInstance("negR", side="R", principal=Neg(BOT)), _node(s2, RuleInstance("botL", side="L", principal=BOT))))
        case Neg(b):
            return _node(s, right("negR"), reopen(frozenset({b}), lambda g: _neg_close(g, n)))
        case AtomC(name, terms):
            return _node(s, right("Rc"), reopen(frozenset({Neg(AtomI(name, terms))}), lambda g: _lc_close(g, n)))
        case OrC(b, c):
            return _node(s, right("orcR"), reopen(frozenset({Neg(b), Neg(c)}), lambda g: _left_open(g, n)))
        case ImpC(b, c):
            return _node(s, right("impcR"), reopen(frozenset({b, Neg(c)}), lambda g: _left_open(g, n)))
        case ExistsC(x, b):
            return _node(s, right("existscR"), reopen(frozenset({ForAll(x, Neg(b))}), lambda g: _exists_c_refute(g, n)))
    raise RuleError(f"le_dne needs a negative formula, got {n}")


def _neg_close(left: frozenset, n: Neg) -> ProofTree:
    """left (with n = ~b and b) |- bot."""
    s = LESequent(left, BOT)
    return _node(s, RuleInstance("negL", side="L", principal=n), le_identity(left, n.body))


def _lc_close(left: frozenset, pc: AtomC) -> ProofTree:
    """left (with p_c and ~p_i) |- bot."""
    pi = AtomI(pc.name, pc.terms)
    s = LESequent(left, BOT)
    s1 = LESequent((left - {pc}) | {pi}, BOT)
    s2 = LESequent(s1.left, pi)
    return _node(
        s, RuleInstance("Lc", side="L", principal=pc),
        _node(s1, RuleInstance("negL", side="L", principal=Neg(pi)), _node(s2, RuleInstance("init", side="R", principal=pi))),
    )


def _left_open(left: frozenset, n: Formula) -> ProofTree:
    """left |- bot where n is b \\/c c (with ~b, ~c) or b ->c c (with b, ~c)."""
    s = LESequent(left, BOT)
    match n:
        case OrC(b, c):
            rest = left - {n}
            sb, sc = LESequent(rest | {b}, BOT), LESequent(rest | {c}, BOT)
            return _node(
                s, RuleInstance("orcL", side="L", principal=n),
                _node(sb, RuleInstance("negL", side="L", principal=Neg(b)), le_identity(sb.left, b)),
                _node(sc, RuleInstance("negL", side="L", principal=Neg(c)), le_identity(sc.left, c)),
            )
        case ImpC(b, c):
            sc = LESequent((left - {n}) | {c}, BOT)
            return _node(
                s, RuleInstance("impcL", side="L", principal=n),
                le_identity(left, b),
                _node(sc, RuleInstance("negL", side="L", principal=Neg(c)), le_identity(sc.left, c)),
            )
    raise RuleError(f"unexpected formula {n}")
