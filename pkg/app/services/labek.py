# app/services/labek.py
"""
The labeled ecumenical modal calculus labEK.

Sequents are ``R, Γ ⊢ Δ ; Π`` over labeled formulas ``x:A``. The
propositional rules are those of LCE with every formula carrying a label;
the modal rules read the relational atoms R. Both identity axioms are
general: ``init_i`` closes ``x:A`` against the stoup and ``init_c``
against the right context.
"""
from __future__ import annotations

from typing import Callable, Dict, FrozenSet, Iterable, Iterator, List, Optional

from app.schemas.errors import RuleError
from app.schemas.formula import (
    And,
    AtomC,
    AtomI,
    Bottom,
    Box,
    DiaC,
    DiaI,
    ExistsC,
    ExistsI,
    ForAll,
    Formula,
    ImpC,
    ImpI,
    Neg,
    OrC,
    OrI,
    Top,
    Var,
)
from app.schemas.proof import CheckOptions, RuleInstance, SearchBudget, SearchResult
from app.schemas.sequent import Labeled, LabeledSequent, RelAtom, ordered
from app.services import kernel
from app.services.formula import fresh_var, has_quantifier, is_negative, is_positive
from app.services.search import Expansion, ProofProblem, prove_with
from app.utils.logging import get_logger

logger = get_logger(__name__)

NAME = "labek"

Seq = LabeledSequent


def fresh_label(used: Iterable[str]) -> str:
    """First of w0, w1, … not in ``used``."""
    used = set(used)
    i = 0
    while f"w{i}" in used:
        i += 1
    return f"w{i}"


def _principal(rule: RuleInstance, kind) -> Labeled:
    p = rule.principal
    if not isinstance(p, Labeled) or not isinstance(p.formula, kind):
        raise RuleError(f"{rule.rule} needs a labeled principal {kind.__name__}")
    return p


def _in_left(s: Seq, rule: RuleInstance, kind) -> Labeled:
    p = _principal(rule, kind)
    if p not in s.left:
        raise RuleError(f"{rule.rule}: principal {p.key} is not in the antecedent")
    return p


def _in_right(s: Seq, rule: RuleInstance, kind) -> Labeled:
    p = _principal(rule, kind)
    if p not in s.right:
        raise RuleError(f"{rule.rule}: principal {p.key} is not in the right context")
    return p


def _in_stoup(s: Seq, rule: RuleInstance, kind) -> Labeled:
    if s.stoup is None or not isinstance(s.stoup.formula, kind):
        raise RuleError(f"{rule.rule} needs a stoup {kind.__name__}")
    return s.stoup


def _empty_stoup(s: Seq, rule: RuleInstance) -> None:
    if s.stoup is not None:
        raise RuleError(f"{rule.rule} needs an empty stoup")


def _left_rest(s: Seq, p: Labeled, rule: RuleInstance) -> FrozenSet[Labeled]:
    return s.left if rule.keep else s.left - {p}


def _right_rest(s: Seq, p: Labeled, rule: RuleInstance) -> FrozenSet[Labeled]:
    return s.right if rule.keep else s.right - {p}


def _at(x: str, *formulas: Formula) -> FrozenSet[Labeled]:
    return frozenset(Labeled(x, f) for f in formulas)


def _eigen(s: Seq, rule: RuleInstance) -> str:
    y = rule.eigen
    if not y:
        raise RuleError(f"{rule.rule} needs an eigenlabel")
    if y in s.labels():
        raise RuleError(f"{rule.rule}: eigenlabel {y} occurs in the conclusion")
    return y


def _successor(s: Seq, rule: RuleInstance, x: str) -> str:
    y = rule.witness
    if not isinstance(y, str) or not y:
        raise RuleError(f"{rule.rule} needs a witness label")
    if RelAtom(x, y) not in s.relations:
        raise RuleError(f"{rule.rule} needs R({x},{y}) in the antecedent")
    return y


# ---- rules ----

def _init_i(rule, s):
    if s.stoup is None or s.stoup not in s.left:
        raise RuleError("init_i needs the stoup formula in the antecedent")
    return []


def _init_c(rule, s):
    p = rule.principal
    if not isinstance(p, Labeled) or p not in s.left or p not in s.right:
        raise RuleError("init_c needs the principal on both sides")
    return []


def _bot_l(rule, s):
    _in_left(s, rule, Bottom)
    return []


def _and_l(rule, s):
    p = _in_left(s, rule, And)
    x, a = p.label, p.formula
    return [Seq(s.relations, _left_rest(s, p, rule) | _at(x, a.left, a.right), s.right, s.stoup)]


def _and_r(rule, s):
    c = _in_stoup(s, rule, And)
    x, a = c.label, c.formula
    return [Seq(s.relations, s.left, s.right, Labeled(x, a.left)), Seq(s.relations, s.left, s.right, Labeled(x, a.right))]


def _or_i_l(rule, s):
    p = _in_left(s, rule, OrI)
    x, a = p.label, p.formula
    rest = _left_rest(s, p, rule)
    return [Seq(s.relations, rest | _at(x, a.left), s.right, s.stoup), Seq(s.relations, rest | _at(x, a.right), s.right, s.stoup)]


def _or_i_r(rule, s):
    c = _in_stoup(s, rule, OrI)
    if rule.index not in (1, 2):
        raise RuleError("oriR needs index 1 or 2")
    part = c.formula.left if rule.index == 1 else c.formula.right
    return [Seq(s.relations, s.left, s.right, Labeled(c.label, part))]


def _imp_i_l(rule, s):
    p = _in_left(s, rule, ImpI)
    x, a = p.label, p.formula
    return [
        Seq(s.relations, s.left, s.right, Labeled(x, a.left)),
        Seq(s.relations, _left_rest(s, p, rule) | _at(x, a.right), s.right, s.stoup),
    ]


def _imp_i_r(rule, s):
    c = _in_stoup(s, rule, ImpI)
    x, a = c.label, c.formula
    return [Seq(s.relations, s.left | _at(x, a.left), s.right, Labeled(x, a.right))]


def _neg_l(rule, s):
    p = _in_left(s, rule, Neg)
    _empty_stoup(s, rule)
    return [Seq(s.relations, s.left, s.right, Labeled(p.label, p.formula.body))]


def _neg_r(rule, s):
    p = _in_right(s, rule, Neg)
    _empty_stoup(s, rule)
    return [Seq(s.relations, s.left | _at(p.label, p.formula.body), _right_rest(s, p, rule))]


def _or_c_l(rule, s):
    p = _in_left(s, rule, OrC)
    _empty_stoup(s, rule)
    x, a = p.label, p.formula
    rest = _left_rest(s, p, rule)
    return [Seq(s.relations, rest | _at(x, a.left), s.right), Seq(s.relations, rest | _at(x, a.right), s.right)]


def _or_c_r(rule, s):
    p = _in_right(s, rule, OrC)
    _empty_stoup(s, rule)
    x, a = p.label, p.formula
    return [Seq(s.relations, s.left, _right_rest(s, p, rule) | _at(x, a.left, a.right))]


def _imp_c_l(rule, s):
    p = _in_left(s, rule, ImpC)
    _empty_stoup(s, rule)
    x, a = p.label, p.formula
    return [
        Seq(s.relations, s.left, s.right, Labeled(x, a.left)),
        Seq(s.relations, _left_rest(s, p, rule) | _at(x, a.right), s.right),
    ]


def _imp_c_r(rule, s):
    p = _in_right(s, rule, ImpC)
    _empty_stoup(s, rule)
    x, a = p.label, p.formula
    return [Seq(s.relations, s.left | _at(x, a.left), _right_rest(s, p, rule) | _at(x, a.right))]


def _l_c(rule, s):
    p = _in_left(s, rule, AtomC)
    _empty_stoup(s, rule)
    a = p.formula
    return [Seq(s.relations, _left_rest(s, p, rule) | _at(p.label, AtomI(a.name, a.terms)), s.right)]


def _r_c(rule, s):
    p = _in_right(s, rule, AtomC)
    _empty_stoup(s, rule)
    a = p.formula
    return [Seq(s.relations, s.left, _right_rest(s, p, rule) | _at(p.label, AtomI(a.name, a.terms)))]


def _box_l(rule, s):
    p = _in_left(s, rule, Box)
    y = _successor(s, rule, p.label)
    return [Seq(s.relations, s.left | _at(y, p.formula.body), s.right, s.stoup)]


def _box_r(rule, s):
    c = _in_stoup(s, rule, Box)
    y = _eigen(s, rule)
    return [Seq(s.relations | {RelAtom(c.label, y)}, s.left, s.right, Labeled(y, c.formula.body))]


def _dia_i_l(rule, s):
    p = _in_left(s, rule, DiaI)
    y = _eigen(s, rule)
    return [Seq(s.relations | {RelAtom(p.label, y)}, _left_rest(s, p, rule) | _at(y, p.formula.body), s.right, s.stoup)]


def _dia_i_r(rule, s):
    c = _in_stoup(s, rule, DiaI)
    y = _successor(s, rule, c.label)
    return [Seq(s.relations, s.left, s.right, Labeled(y, c.formula.body))]


def _dia_c_l(rule, s):
    p = _in_left(s, rule, DiaC)
    _empty_stoup(s, rule)
    y = _eigen(s, rule)
    return [Seq(s.relations | {RelAtom(p.label, y)}, _left_rest(s, p, rule) | _at(y, p.formula.body), s.right)]


def _dia_c_r(rule, s):
    p = _in_right(s, rule, DiaC)
    _empty_stoup(s, rule)
    y = _successor(s, rule, p.label)
    return [Seq(s.relations, s.left, s.right | _at(y, p.formula.body))]


def _dereliction(rule, s):
    p = rule.principal
    _empty_stoup(s, rule)
    if not isinstance(p, Labeled) or p not in s.right:
        raise RuleError("D needs a principal in the right context")
    if not is_positive(p.formula):
        raise RuleError("D requires a positive formula")
    return [Seq(s.relations, s.left, s.right, p)]


def _store(rule, s):
    n = s.stoup
    if n is None:
        raise RuleError("store needs a stoup formula")
    if not is_negative(n.formula):
        raise RuleError("store requires a negative formula")
    return [Seq(s.relations, s.left, s.right | {n})]


def _weaken(rule, s):
    if s.stoup is None:
        raise RuleError("W needs a stoup formula")
    return [Seq(s.relations, s.left, s.right)]


def _cut_formula(rule: RuleInstance) -> Labeled:
    a = rule.cut
    if not isinstance(a, Labeled):
        raise RuleError(f"{rule.rule} needs a labeled cut formula")
    return a


def _p_cut(rule, s):
    a = _cut_formula(rule)
    if not is_positive(a.formula):
        raise RuleError("Pcut needs a positive cut formula")
    return [Seq(s.relations, s.left, s.right, a), Seq(s.relations, s.left | {a}, s.right, s.stoup)]


def _n_cut(rule, s):
    a = _cut_formula(rule)
    if not is_negative(a.formula):
        raise RuleError("Ncut needs a negative cut formula")
    residue = rule.residue
    if residue is not None and (not isinstance(residue, Labeled) or residue not in s.right or not is_positive(residue.formula)):
        raise RuleError("Ncut residue must be a positive member of the right context")
    return [Seq(s.relations, s.left, s.right | {a}, residue), Seq(s.relations, s.left | {a}, s.right, s.stoup)]


# ---- frame rules ----
# Checked under the matching extension so that labeled derivations of the
# nested extension rules can be replayed. The search never uses them.

def _relation(s: Seq, rule: RuleInstance) -> RelAtom:
    r = rule.principal
    if not isinstance(r, RelAtom) or r not in s.relations:
        raise RuleError(f"{rule.rule} needs a relational atom of the antecedent")
    return r


def _relate(s: Seq, x: str, y: str) -> List[Seq]:
    return [Seq(s.relations | {RelAtom(x, y)}, s.left, s.right, s.stoup)]


def _reflexive(rule, s):
    x = rule.witness
    if not isinstance(x, str) or x not in s.labels():
        raise RuleError("T needs a witness label of the conclusion")
    return _relate(s, x, x)


def _symmetric(rule, s):
    r = _relation(s, rule)
    return _relate(s, r.dst, r.src)


def _transitive(rule, s):
    r = _relation(s, rule)
    return _relate(s, r.src, _successor(s, rule, r.dst))


def _euclidean(rule, s):
    r = _relation(s, rule)
    return _relate(s, r.dst, _successor(s, rule, r.src))


RULES: Dict[str, Callable[[RuleInstance, Seq], List[Seq]]] = {
    "init_i": _init_i,
    "init_c": _init_c,
    "botL": _bot_l,
    "andL": _and_l,
    "andR": _and_r,
    "oriL": _or_i_l,
    "oriR": _or_i_r,
    "impiL": _imp_i_l,
    "impiR": _imp_i_r,
    "negL": _neg_l,
    "negR": _neg_r,
    "orcL": _or_c_l,
    "orcR": _or_c_r,
    "impcL": _imp_c_l,
    "impcR": _imp_c_r,
    "Lc": _l_c,
    "Rc": _r_c,
    "boxL": _box_l,
    "boxR": _box_r,
    "diaiL": _dia_i_l,
    "diaiR": _dia_i_r,
    "cdiaL": _dia_c_l,
    "cdiaR": _dia_c_r,
    "D": _dereliction,
    "store": _store,
    "W": _weaken,
    "Pcut": _p_cut,
    "Ncut": _n_cut,
    "T": _reflexive,
    "B": _symmetric,
    "4": _transitive,
    "5": _euclidean,
}

_EXTENSION_RULES = {"T": "t", "B": "b", "4": "4", "5": "5"}


def labek_premises(rule: RuleInstance, s: Seq, options: Optional[CheckOptions] = None) -> List[Seq]:
    fn = RULES.get(rule.rule)
    if fn is None:
        raise RuleError(f"unknown labEK rule {rule.rule!r}")
    ext = _EXTENSION_RULES.get(rule.rule)
    if ext and (options is None or ext not in options.extensions):
        raise RuleError(f"{rule.rule} needs the {ext} extension")
    return fn(rule, s)


class LabEKCalculus:
    name = NAME

    def premises(self, rule: RuleInstance, conclusion, options: CheckOptions) -> List[Seq]:
        if not isinstance(conclusion, Seq):
            raise RuleError("labEK expects labeled sequents")
        return labek_premises(rule, conclusion, options)

    def accepts(self, conclusion, options: CheckOptions) -> Optional[str]:
        if not isinstance(conclusion, Seq):
            return "labEK expects labeled sequents"
        return labeled_language_error(conclusion)


kernel.register(LabEKCalculus())


def labeled_language_error(s: Seq) -> Optional[str]:
    if any(not isinstance(r, RelAtom) for r in s.relations):
        return "relational atoms must be R(x,y)"
    slots = list(s.left) + list(s.right) + ([s.stoup] if s.stoup is not None else [])
    if any(not isinstance(lf, Labeled) for lf in slots):
        return "relational atoms may only occur in the antecedent"
    if any(has_quantifier(lf.formula) for lf in slots):
        return "labEK formulas are propositional"
    return None


# ---- search ----

_EAGER_LEFT = {And: "andL", OrI: "oriL"}
_EAGER_LEFT_EMPTY = {OrC: "orcL", AtomC: "Lc"}
_EAGER_RIGHT_EMPTY = {OrC: "orcR", ImpC: "impcR", Neg: "negR", AtomC: "Rc"}


class LabEKProblem(ProofProblem):
    """
    Same phases as the LCE search. Rules that introduce a label are eager
    but capped by ``max_labels``; hitting the cap makes a failed search
    inconclusive. □L and ◇cR fire once per successor.
    """

    def __init__(self, root: Seq, budget: SearchBudget):
        self.budget = budget
        self.options = CheckOptions(allow_cuts=False)
        self.complete = True

    def closing(self, s: Seq) -> Optional[RuleInstance]:
        for lf in ordered(s.left):
            if isinstance(lf.formula, Bottom):
                return RuleInstance("botL", side="L", principal=lf)
        if s.stoup is not None and s.stoup in s.left:
            return RuleInstance("init_i", side="S", principal=s.stoup)
        both = s.left & s.right
        if both:
            return RuleInstance("init_c", side="R", principal=ordered(both)[0])
        return None

    def _apply(self, s: Seq, rule: RuleInstance) -> Expansion:
        return Expansion(rule, tuple(labek_premises(rule, s, self.options)))

    def _with_label(self, s: Seq, rule: RuleInstance) -> Optional[Expansion]:
        labels = s.labels()
        if len(labels) >= self.budget.max_labels:
            self.complete = False
            return None
        return self._apply(s, rule.with_(eigen=fresh_label(labels)))

    def eager(self, s: Seq) -> Optional[Expansion]:
        for lf in ordered(s.left):
            name = _EAGER_LEFT.get(type(lf.formula))
            if name:
                return self._apply(s, RuleInstance(name, side="L", principal=lf))
        for lf in ordered(s.left):
            if isinstance(lf.formula, DiaI):
                exp = self._with_label(s, RuleInstance("diaiL", side="L", principal=lf))
                if exp is not None:
                    return exp
        c = s.stoup
        if c is not None:
            if is_negative(c.formula):
                return self._apply(s, RuleInstance("store", side="S", principal=c))
            match c.formula:
                case And():
                    return self._apply(s, RuleInstance("andR", side="S", principal=c))
                case ImpI():
                    return self._apply(s, RuleInstance("impiR", side="S", principal=c))
                case Box():
                    return self._with_label(s, RuleInstance("boxR", side="S", principal=c))
            return None
        for lf in ordered(s.left):
            name = _EAGER_LEFT_EMPTY.get(type(lf.formula))
            if name:
                return self._apply(s, RuleInstance(name, side="L", principal=lf))
        for lf in ordered(s.right):
            name = _EAGER_RIGHT_EMPTY.get(type(lf.formula))
            if name:
                return self._apply(s, RuleInstance(name, side="R", principal=lf))
        for lf in ordered(s.left):
            if isinstance(lf.formula, DiaC):
                exp = self._with_label(s, RuleInstance("cdiaL", side="L", principal=lf))
                if exp is not None:
                    return exp
        return None

    def _successors(self, s: Seq, x: str) -> List[str]:
        return sorted(r.dst for r in s.relations if r.src == x)

    def _left_choices(self, s: Seq, empty: bool) -> Iterator[Expansion]:
        for lf in ordered(s.left):
            match lf.formula:
                case Neg() if empty:
                    yield self._apply(s, RuleInstance("negL", side="L", principal=lf))
                case ImpC() if empty:
                    yield self._apply(s, RuleInstance("impcL", side="L", principal=lf))
                case ImpI():
                    yield self._apply(s, RuleInstance("impiL", side="L", principal=lf))
                case Box(body):
                    for y in self._successors(s, lf.label):
                        if Labeled(y, body) not in s.left:
                            yield self._apply(s, RuleInstance("boxL", side="L", principal=lf, witness=y))

    def choices(self, s: Seq) -> Iterator[Expansion]:
        c = s.stoup
        if c is None:
            for lf in ordered(s.right):
                if is_positive(lf.formula):
                    yield self._apply(s, RuleInstance("D", side="R", principal=lf))
            yield from self._left_choices(s, True)
            for lf in ordered(s.right):
                if isinstance(lf.formula, DiaC):
                    for y in self._successors(s, lf.label):
                        if Labeled(y, lf.formula.body) not in s.right:
                            yield self._apply(s, RuleInstance("cdiaR", side="R", principal=lf, witness=y))
            return
        match c.formula:
            case OrI():
                yield self._apply(s, RuleInstance("oriR", side="S", principal=c, index=1))
                yield self._apply(s, RuleInstance("oriR", side="S", principal=c, index=2))
            case DiaI():
                for y in self._successors(s, c.label):
                    yield self._apply(s, RuleInstance("diaiR", side="S", principal=c, witness=y))
        yield from self._left_choices(s, False)
        yield self._apply(s, RuleInstance("W", side="S", principal=c))


def labek_prove(s: Seq, budget: Optional[SearchBudget] = None) -> SearchResult:
    budget = budget or SearchBudget()
    kernel.require_language(NAME, s, CheckOptions())
    problem = LabEKProblem(s, budget)
    result = prove_with(problem, s, budget)
    logger.info("labek_prove %s -> %s", s, result.status.value)
    return result


def root_sequent(f: Formula, x: str = "x") -> Seq:
    """``⊢ · ; x:f``."""
    return Seq(frozenset(), frozenset(), frozenset(), Labeled(x, f))


# ---- first-order reading ----

REL = "rel"


def modal_to_fo(f: Formula, x: str, avoid: Iterable[str] = ()) -> Formula:
    """
    Standard translation at world variable ``x``. Atoms gain ``x`` as their
    argument; the accessibility relation becomes the intuitionistic atom
    ``rel_i(x, y)``.
    """
    used = set(avoid) | {x}

    def go(g: Formula, w: str) -> Formula:
        match g:
            case AtomI(name, terms):
                return AtomI(name, tuple(terms) + (Var(w),))
            case AtomC(name, terms):
                return AtomC(name, tuple(terms) + (Var(w),))
            case Bottom() | Top():
                return g
            case Neg(a):
                return Neg(go(a, w))
            case And(a, b) | OrI(a, b) | OrC(a, b) | ImpI(a, b) | ImpC(a, b):
                return type(g)(go(a, w), go(b, w))
            case Box(a) | DiaI(a) | DiaC(a):
                y = fresh_var(used)
                used.add(y)
                edge = AtomI(REL, (Var(w), Var(y)))
                body = go(a, y)
                if isinstance(g, Box):
                    return ForAll(y, ImpI(edge, body))
                return (ExistsI if isinstance(g, DiaI) else ExistsC)(y, And(edge, body))
        raise ValueError(f"not a propositional modal formula: {g}")

    return go(f, x)
