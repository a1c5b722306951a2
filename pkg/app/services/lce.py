# app/services/lce.py
"""
The ecumenical calculus with stoup, LCE.

Sequents are ``Γ ⊢ Δ ; Π``. Positive formulas are decomposed in the stoup,
negative ones in the right context; D and store move formulas between the
two. Search saturates invertible rules before it branches.
"""
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
from app.schemas.proof import MACRO_RULES, CheckOptions, ProofTree, RuleInstance, SearchBudget, SearchResult
from app.schemas.sequent import StoupSequent, ordered
from app.services import kernel
from app.services.formula import fresh_var, instantiate, is_modal, is_negative, is_positive, is_propositional, vars_of_all
from app.services.search import Expansion, ProofProblem, prove_with, witness_terms
from app.utils.logging import get_logger

logger = get_logger(__name__)

NAME = "lce"

Seq = StoupSequent


def _fv(s: Seq) -> set:
    out: set = set()
    for f in s.formulas():
        out |= f.fv
    return out


def _in_left(s: Seq, rule: RuleInstance, kind) -> Formula:
    p = rule.principal
    if not isinstance(p, kind):
        raise RuleError(f"{rule.rule} needs a principal {kind.__name__}")
    if p not in s.left:
        raise RuleError(f"{rule.rule}: principal {p} is not in the antecedent")
    return p


def _in_right(s: Seq, rule: RuleInstance, kind) -> Formula:
    p = rule.principal
    if not isinstance(p, kind):
        raise RuleError(f"{rule.rule} needs a principal {kind.__name__}")
    if p not in s.right:
        raise RuleError(f"{rule.rule}: principal {p} is not in the right context")
    return p


def _in_stoup(s: Seq, rule: RuleInstance, kind) -> Formula:
    if not isinstance(s.stoup, kind):
        raise RuleError(f"{rule.rule} needs a stoup {kind.__name__}")
    return s.stoup


def _empty_stoup(s: Seq, rule: RuleInstance) -> None:
    if s.stoup is not None:
        raise RuleError(f"{rule.rule} needs an empty stoup")


def _left_rest(s: Seq, p: Formula, rule: RuleInstance) -> frozenset:
    return s.left if rule.keep else s.left - {p}


def _right_rest(s: Seq, p: Formula, rule: RuleInstance) -> frozenset:
    return s.right if rule.keep else s.right - {p}


def _eigen(s: Seq, rule: RuleInstance) -> str:
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


# ---- rules ----

def _init(rule, s):
    if not isinstance(s.stoup, AtomI) or s.stoup not in s.left:
        raise RuleError("init needs p_i in the stoup and the antecedent")
    return []


def _bot_l(rule, s):
    if BOT not in s.left:
        raise RuleError("botL needs bot in the antecedent")
    return []


def _and_l(rule, s):
    p = _in_left(s, rule, And)
    return [Seq(_left_rest(s, p, rule) | {p.left, p.right}, s.right, s.stoup)]


def _and_r(rule, s):
    c = _in_stoup(s, rule, And)
    return [Seq(s.left, s.right, c.left), Seq(s.left, s.right, c.right)]


def _or_i_l(rule, s):
    p = _in_left(s, rule, OrI)
    rest = _left_rest(s, p, rule)
    return [Seq(rest | {p.left}, s.right, s.stoup), Seq(rest | {p.right}, s.right, s.stoup)]


def _or_i_r(rule, s):
    c = _in_stoup(s, rule, OrI)
    if rule.index not in (1, 2):
        raise RuleError("oriR needs index 1 or 2")
    return [Seq(s.left, s.right, c.left if rule.index == 1 else c.right)]


def _imp_i_l(rule, s):
    p = _in_left(s, rule, ImpI)
    return [Seq(s.left, s.right, p.left), Seq(_left_rest(s, p, rule) | {p.right}, s.right, s.stoup)]


def _imp_i_r(rule, s):
    c = _in_stoup(s, rule, ImpI)
    return [Seq(s.left | {c.left}, s.right, c.right)]


def _neg_l(rule, s):
    p = _in_left(s, rule, Neg)
    _empty_stoup(s, rule)
    return [Seq(s.left, s.right, p.body)]


def _neg_r(rule, s):
    p = _in_right(s, rule, Neg)
    _empty_stoup(s, rule)
    return [Seq(s.left | {p.body}, _right_rest(s, p, rule))]


def _forall_l(rule, s):
    p = _in_left(s, rule, ForAll)
    return [Seq(s.left | {instantiate(p, _witness(rule))}, s.right, s.stoup)]


def _forall_r(rule, s):
    c = _in_stoup(s, rule, ForAll)
    return [Seq(s.left, s.right, instantiate(c, Var(_eigen(s, rule))))]


def _exists_i_l(rule, s):
    p = _in_left(s, rule, ExistsI)
    y = _eigen(s, rule)
    return [Seq(_left_rest(s, p, rule) | {instantiate(p, Var(y))}, s.right, s.stoup)]


def _exists_i_r(rule, s):
    c = _in_stoup(s, rule, ExistsI)
    return [Seq(s.left, s.right, instantiate(c, _witness(rule)))]


def _or_c_l(rule, s):
    p = _in_left(s, rule, OrC)
    _empty_stoup(s, rule)
    rest = _left_rest(s, p, rule)
    return [Seq(rest | {p.left}, s.right), Seq(rest | {p.right}, s.right)]


def _or_c_r(rule, s):
    p = _in_right(s, rule, OrC)
    _empty_stoup(s, rule)
    return [Seq(s.left, _right_rest(s, p, rule) | {p.left, p.right})]


def _imp_c_l(rule, s):
    p = _in_left(s, rule, ImpC)
    _empty_stoup(s, rule)
    return [Seq(s.left, s.right, p.left), Seq(_left_rest(s, p, rule) | {p.right}, s.right)]


def _imp_c_r(rule, s):
    p = _in_right(s, rule, ImpC)
    _empty_stoup(s, rule)
    return [Seq(s.left | {p.left}, _right_rest(s, p, rule) | {p.right})]


def _l_c(rule, s):
    p = _in_left(s, rule, AtomC)
    _empty_stoup(s, rule)
    return [Seq(_left_rest(s, p, rule) | {AtomI(p.name, p.terms)}, s.right)]


def _r_c(rule, s):
    p = _in_right(s, rule, AtomC)
    _empty_stoup(s, rule)
    return [Seq(s.left, _right_rest(s, p, rule) | {AtomI(p.name, p.terms)})]


def _exists_c_l(rule, s):
    p = _in_left(s, rule, ExistsC)
    _empty_stoup(s, rule)
    y = _eigen(s, rule)
    return [Seq(_left_rest(s, p, rule) | {instantiate(p, Var(y))}, s.right)]


def _exists_c_r(rule, s):
    p = _in_right(s, rule, ExistsC)
    _empty_stoup(s, rule)
    return [Seq(s.left, s.right | {instantiate(p, _witness(rule))})]


def _dereliction(rule, s):
    p = rule.principal
    _empty_stoup(s, rule)
    if not isinstance(p, Formula) or p not in s.right:
        raise RuleError("D needs a principal in the right context")
    if not is_positive(p):
        raise RuleError("D requires a positive formula")
    return [Seq(s.left, s.right, p)]


def _store(rule, s):
    n = s.stoup
    if n is None:
        raise RuleError("store needs a stoup formula")
    if not is_negative(n):
        raise RuleError("store requires a negative formula")
    return [Seq(s.left, s.right | {n})]


def _weaken(rule, s):
    if s.stoup is None:
        raise RuleError("W needs a stoup formula")
    return [Seq(s.left, s.right)]


def _p_cut(rule, s):
    a = rule.cut
    if not isinstance(a, Formula):
        raise RuleError("Pcut needs a cut formula")
    if not is_positive(a):
        raise RuleError("Pcut needs a positive cut formula")
    return [Seq(s.left, s.right, a), Seq(s.left | {a}, s.right, s.stoup)]


def _n_cut(rule, s):
    a = rule.cut
    if not isinstance(a, Formula):
        raise RuleError("Ncut needs a cut formula")
    if not is_negative(a):
        raise RuleError("Ncut needs a negative cut formula")
    residue = rule.residue
    if residue is not None and (residue not in s.right or not is_positive(residue)):
        raise RuleError("Ncut residue must be a positive member of the right context")
    return [Seq(s.left, s.right | {a}, residue), Seq(s.left | {a}, s.right, s.stoup)]


def _ginit(rule, s):
    a = rule.principal
    if not isinstance(a, Formula) or s.stoup != a or a not in s.left:
        raise RuleError("ginit needs the stoup formula in the antecedent")
    return []


def _gcinit(rule, s):
    a = rule.principal
    _empty_stoup(s, rule)
    if not isinstance(a, Formula) or a not in s.left or a not in s.right:
        raise RuleError("gcinit needs the formula on both sides")
    return []


RULES: Dict[str, Callable[[RuleInstance, Seq], List[Seq]]] = {
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
    "D": _dereliction,
    "store": _store,
    "W": _weaken,
    "Pcut": _p_cut,
    "Ncut": _n_cut,
    "ginit": _ginit,
    "gcinit": _gcinit,
}


def lce_premises(rule: RuleInstance, s: Seq) -> List[Seq]:
    fn = RULES.get(rule.rule)
    if fn is None:
        raise RuleError(f"unknown LCE rule {rule.rule!r}")
    return fn(rule, s)


class LCECalculus:
    name = NAME

    def premises(self, rule: RuleInstance, conclusion, options: CheckOptions) -> List[Seq]:
        if not isinstance(conclusion, Seq):
            raise RuleError("LCE expects stoup sequents")
        if rule.rule in MACRO_RULES and not options.expand_macros:
            raise RuleError(f"{rule.rule} is disabled; expand general axioms first")
        return lce_premises(rule, conclusion)

    def accepts(self, conclusion, options: CheckOptions) -> Optional[str]:
        if not isinstance(conclusion, Seq):
            return "LCE expects stoup sequents"
        if any(is_modal(f) for f in conclusion.formulas()):
            return "LCE formulas carry no modalities"
        return None


kernel.register(LCECalculus())


# ---- general axioms ----

def _node(concl: Seq, rule: RuleInstance, *premises: ProofTree) -> ProofTree:
    return ProofTree(concl, rule, tuple(premises))


def _fresh(s: Seq) -> str:
    return fresh_var(vars_of_all(s.formulas()))


def general_init(left, right, a: Formula) -> ProofTree:
    """Atomic-axiom derivation of ``left, a ⊢ right ; a``."""
    s = Seq(frozenset(left) | {a}, right, a)
    L = lambda name, **kw: RuleInstance(name, side="L", principal=a, **kw)  # noqa: E731
    S = lambda name, **kw: RuleInstance(name, side="S", principal=a, **kw)  # noqa: E731
    if isinstance(a, AtomI):
        return _node(s, S("init"))
    if isinstance(a, Bottom):
        return _node(s, L("botL"))
    if is_negative(a):
        s1 = Seq(s.left, s.right | {a})
        return _node(s, S("store"), general_cinit(s1.left, s1.right, a))
    rest = s.left - {a}
    match a:
        case And(b, c):
            s1 = Seq(rest | {b, c}, s.right, a)
            return _node(s, L("andL"), _node(s1, S("andR"), general_init(s1.left, s1.right, b), general_init(s1.left, s1.right, c)))
        case OrI(b, c):
            sb, sc = Seq(rest | {b}, s.right, a), Seq(rest | {c}, s.right, a)
            return _node(
                s, L("oriL"),
                _node(sb, S("oriR", index=1), general_init(sb.left, sb.right, b)),
                _node(sc, S("oriR", index=2), general_init(sc.left, sc.right, c)),
            )
        case ImpI(b, c):
            s1 = Seq(s.left | {b}, s.right, c)
            return _node(
                s, S("impiR"),
                _node(s1, L("impiL"), general_init(s1.left, s1.right, b), general_init(s1.left - {a}, s1.right, c)),
            )
        case ForAll():
            y = _fresh(s)
            inst = instantiate(a, Var(y))
            s1 = Seq(s.left, s.right, inst)
            return _node(s, S("forallR", eigen=y), _node(s1, L("forallL", witness=Var(y)), general_init(s.left, s.right, inst)))
        case ExistsI():
            y = _fresh(s)
            inst = instantiate(a, Var(y))
            s1 = Seq(rest | {inst}, s.right, a)
            return _node(s, L("existsiL", eigen=y), _node(s1, S("existsiR", witness=Var(y)), general_init(s1.left, s1.right, inst)))
    raise RuleError(f"no general init for {a}")


def general_cinit(left, right, a: Formula) -> ProofTree:
    """Atomic-axiom derivation of ``left, a ⊢ right, a ; ·``."""
    s = Seq(frozenset(left) | {a}, frozenset(right) | {a})
    L = lambda name, **kw: RuleInstance(name, side="L", principal=a, **kw)  # noqa: E731
    R = lambda name, **kw: RuleInstance(name, side="R", principal=a, **kw)  # noqa: E731
    if isinstance(a, Bottom):
        return _node(s, L("botL"))
    if is_positive(a):
        s1 = Seq(s.left, s.right, a)
        return _node(s, R("D"), general_init(s1.left, s1.right, a))
    lrest, rrest = s.left - {a}, s.right - {a}
    match a:
        case AtomC(name, terms):
            pi = AtomI(name, terms)
            s1 = Seq(s.left, rrest | {pi})
            s2 = Seq(lrest | {pi}, s1.right)
            s3 = Seq(s2.left, s2.right, pi)
            return _node(
                s, R("Rc"),
                _node(s1, L("Lc"), _node(s2, RuleInstance("D", side="R", principal=pi), _node(s3, RuleInstance("init", side="S", principal=pi)))),
            )
        case Neg(b):
            s1 = Seq(s.left | {b}, rrest)
            return _node(s, R("negR"), _node(s1, L("negL"), general_init(s1.left, s1.right, b)))
        case OrC(b, c):
            s1 = Seq(s.left, rrest | {b, c})
            rest = s1.left - {a}
            return _node(
                s, R("orcR"),
                _node(s1, L("orcL"), general_cinit(rest | {b}, s1.right, b), general_cinit(rest | {c}, s1.right, c)),
            )
        case ImpC(b, c):
            s1 = Seq(s.left | {b}, rrest | {c})
            return _node(
                s, R("impcR"),
                _node(
                    s1, L("impcL"),
                    general_init(s1.left, s1.right, b),
                    general_cinit((s1.left - {a}) | {c}, s1.right, c),
                ),
            )
        case ExistsC():
            y = _fresh(s)
            inst = instantiate(a, Var(y))
            s1 = Seq(lrest | {inst}, s.right)
            return _node(s, L("existscL", eigen=y), _node(s1, R("existscR", witness=Var(y)), general_cinit(s1.left, s1.right, inst)))
    raise RuleError(f"no general classical init for {a}")


def expand_general_init(tree: ProofTree) -> ProofTree:
    """Replace every ginit/gcinit node by its atomic derivation."""
    rule = tree.rule
    s = tree.conclusion
    if rule.rule == "ginit":
        _ginit(rule, s)
        return general_init(s.left, s.right, rule.principal)
    if rule.rule == "gcinit":
        _gcinit(rule, s)
        return general_cinit(s.left, s.right, rule.principal)
    if not tree.premises:
        return tree
    return ProofTree(s, rule, tuple(expand_general_init(p) for p in tree.premises))


# ---- search ----

_EAGER_LEFT = {And: "andL", OrI: "oriL", ExistsI: "existsiL"}
_EAGER_LEFT_EMPTY = {OrC: "orcL", AtomC: "Lc", ExistsC: "existscL"}
_EAGER_RIGHT_EMPTY = {OrC: "orcR", ImpC: "impcR", Neg: "negR", AtomC: "Rc"}
_EIGEN_RULES = {"existsiL", "existscL", "forallR"}


class LCEProblem(ProofProblem):
    """
    Invertible rules first: left decompositions, stoup right rules and
    store, then (with an empty stoup) the classical rules. Dereliction,
    the left implication and negation rules, quantifier instances and W
    are backtracking points.
    """

    def __init__(self, root: Seq, budget: SearchBudget):
        self.budget = budget
        self.complete = all(is_propositional(f) for f in root.formulas())

    def closing(self, s: Seq) -> Optional[RuleInstance]:
        if BOT in s.left:
            return RuleInstance("botL", side="L", principal=BOT)
        if isinstance(s.stoup, AtomI) and s.stoup in s.left:
            return RuleInstance("init", side="S", principal=s.stoup)
        return None

    def _apply(self, s: Seq, rule: RuleInstance) -> Expansion:
        if rule.rule in _EIGEN_RULES:
            rule = rule.with_(eigen=_fresh(s))
        return Expansion(rule, tuple(lce_premises(rule, s)))

    def eager(self, s: Seq) -> Optional[Expansion]:
        for p in ordered(s.left):
            name = _EAGER_LEFT.get(type(p))
            if name:
                return self._apply(s, RuleInstance(name, side="L", principal=p))
        c = s.stoup
        if c is not None:
            if is_negative(c):
                return self._apply(s, RuleInstance("store", side="S", principal=c))
            match c:
                case And():
                    return self._apply(s, RuleInstance("andR", side="S", principal=c))
                case ImpI():
                    return self._apply(s, RuleInstance("impiR", side="S", principal=c))
                case ForAll():
                    return self._apply(s, RuleInstance("forallR", side="S", principal=c))
            return None
        for p in ordered(s.left):
            name = _EAGER_LEFT_EMPTY.get(type(p))
            if name:
                return self._apply(s, RuleInstance(name, side="L", principal=p))
        for p in ordered(s.right):
            name = _EAGER_RIGHT_EMPTY.get(type(p))
            if name:
                return self._apply(s, RuleInstance(name, side="R", principal=p))
        return None

    def _left_choices(self, s: Seq, empty: bool) -> Iterator[Expansion]:
        terms = None
        for p in ordered(s.left):
            match p:
                case Neg() if empty:
                    yield self._apply(s, RuleInstance("negL", side="L", principal=p))
                case ImpC() if empty:
                    yield self._apply(s, RuleInstance("impcL", side="L", principal=p))
                case ImpI():
                    yield self._apply(s, RuleInstance("impiL", side="L", principal=p))
                case ForAll():
                    terms = terms if terms is not None else witness_terms(s.formulas(), self.budget)
                    for t in terms:
                        if instantiate(p, t) not in s.left:
                            yield self._apply(s, RuleInstance("forallL", side="L", principal=p, witness=t))

    def choices(self, s: Seq) -> Iterator[Expansion]:
        c = s.stoup
        if c is None:
            for p in ordered(s.right):
                if is_positive(p):
                    yield self._apply(s, RuleInstance("D", side="R", principal=p))
            yield from self._left_choices(s, True)
            terms = witness_terms(s.formulas(), self.budget)
            for p in ordered(s.right):
                if isinstance(p, ExistsC):
                    for t in terms:
                        if instantiate(p, t) not in s.right:
                            yield self._apply(s, RuleInstance("existscR", side="R", principal=p, witness=t))
            return
        match c:
            case OrI():
                yield self._apply(s, RuleInstance("oriR", side="S", principal=c, index=1))
                yield self._apply(s, RuleInstance("oriR", side="S", principal=c, index=2))
            case ExistsI():
                for t in witness_terms(s.formulas(), self.budget):
                    yield self._apply(s, RuleInstance("existsiR", side="S", principal=c, witness=t))
        yield from self._left_choices(s, False)
        yield self._apply(s, RuleInstance("W", side="S", principal=c))


def lce_prove(s: Seq, budget: Optional[SearchBudget] = None) -> SearchResult:
    budget = budget or SearchBudget()
    kernel.require_language(NAME, s)
    result = prove_with(LCEProblem(s, budget), s, budget)
    logger.info("lce_prove %s -> %s", s, result.status.value)
    return result
