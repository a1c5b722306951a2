# app/services/cutelim.py
"""
Cut elimination for LCE.

Cuts are removed topmost first. A cut between two cut-free proofs either
closes at an axiom, moves upward past the last rule of the premise in
which the cut formula is not principal, or, when the formula is principal
on both sides, is replaced by cuts on its immediate subformulas. Every
cut the rewriter creates is smaller than its parent under the measure
(ecumenical weight of the cut formula, sum of the premise heights), and
the pairs are recorded in a ``CutTrace``.

Internally an N-cut may also take its stoup from the left premise
(``Γ ⊢ Δ, N ; S`` against ``Γ, N ⊢ Δ ; ·``). That shape absorbs the
printed D and W cases: dereliction in the left premise simply moves the
cut above it.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from app.schemas.errors import CheckError, TranslationError
from app.schemas.formula import BOT, And, AtomC, AtomI, ExistsC, ExistsI, ForAll, Formula, ImpC, ImpI, Neg, OrC, OrI
from app.schemas.proof import CheckOptions, ProofTree, RuleInstance
from app.schemas.sequent import StoupSequent
from app.services.formula import ecumenical_weight, instantiate, is_positive
from app.services.kernel import premises_of, require_valid
from app.services.lce import expand_general_init
from app.services.transform import freshen, node, rebuild, sequent_fv, subst_tree, weaken
from app.services.translate import move_left, unstore
from app.utils.logging import get_logger

logger = get_logger(__name__)

CALC = "lce"
Seq = StoupSequent
Measure = Tuple[int, int]

_LEFT_CONTEXT_RULES = {"andL", "oriL", "impiL", "existsiL", "forallL"}
_STOUP_RULES = {"andR", "oriR", "impiR", "forallR", "existsiR"}
_NEG_LEFT = {"negL", "orcL", "impcL", "Lc", "existscL"}
_NEG_RIGHT = {"negR", "orcR", "impcR", "Rc", "existscR"}


@dataclass
class CutTrace:
    """(parent measure, child measure) for every cut created while reducing another."""

    steps: List[Tuple[Measure, Measure]] = field(default_factory=list)

    def record(self, parent: Measure, child: Measure) -> None:
        self.steps.append((parent, child))

    def is_decreasing(self) -> bool:
        return all(child < parent for parent, child in self.steps)


def eliminate_cuts(tree: ProofTree, trace: Optional[CutTrace] = None) -> ProofTree:
    """A cut-free LCE proof of the same conclusion. Cut-free input comes back unchanged."""
    try:
        require_valid(CALC, tree, CheckOptions(allow_cuts=True))
    except CheckError as e:
        raise TranslationError(f"input is not a valid lce proof: {e}") from e
    if tree.is_cut_free():
        return tree
    eliminator = _Eliminator(trace if trace is not None else CutTrace())
    out = eliminator.run(expand_general_init(tree))
    try:
        require_valid(CALC, out, CheckOptions(allow_cuts=False))
    except CheckError as e:
        raise TranslationError(f"cut elimination produced an invalid proof: {e}") from e
    logger.info("eliminate_cuts: %d nodes -> %d nodes, %d rewrites", tree.size(), out.size(), eliminator.rewrites)
    return out


def _axiom(concl: Seq, name: str, principal: Formula) -> ProofTree:
    side = "L" if name == "botL" else "S"
    return ProofTree(concl, RuleInstance(name, side=side, principal=principal), ())


def _bare(s: Seq) -> Seq:
    return Seq(s.left, s.right)


def _w(concl: Seq, below: ProofTree) -> ProofTree:
    return node(concl, RuleInstance("W", side="S", principal=concl.stoup), below)


class _Eliminator:
    def __init__(self, trace: CutTrace):
        self.trace = trace
        self.rewrites = 0
        self._parents: List[Measure] = []

    def run(self, tree: ProofTree) -> ProofTree:
        if not tree.premises:
            return tree
        kids = [self.run(p) for p in tree.premises]
        rule = tree.rule
        concl = tree.conclusion
        match rule.rule:
            case "Pcut":
                return self.cut_p(rule.cut, kids[0], kids[1], concl)
            case "Ncut" if rule.residue is None:
                return self.cut_n(rule.cut, kids[0], kids[1], concl)
            case "Ncut":
                # the residue is derelicted once the cut is gone
                p = rule.residue
                if concl.stoup is None:
                    inner = self.cut_n(rule.cut, kids[0], kids[1], Seq(concl.left, concl.right, p))
                    return node(concl, RuleInstance("D", side="R", principal=p), inner)
                first = kids[0].conclusion
                derelict = node(_bare(first), RuleInstance("D", side="R", principal=p), kids[0])
                return self.cut_n(rule.cut, derelict, kids[1], concl)
        return ProofTree(concl, rule, tuple(kids))

    # ---- bookkeeping ----

    def _enter(self, a: Formula, left: ProofTree, right: ProofTree) -> Measure:
        m = (ecumenical_weight(a), left.height() + right.height())
        if self._parents:
            self.trace.record(self._parents[-1], m)
        self._parents.append(m)
        self.rewrites += 1
        logger.debug("cut on %s with measure %s", a, m)
        return m

    def _leave(self) -> None:
        self._parents.pop()

    # ---- entry points ----

    def cut_any(self, a: Formula, left: ProofTree, right: ProofTree, concl: Seq) -> ProofTree:
        """Cut ``Γ ⊢ Δ ; A`` against ``Γ, A ⊢ Δ ; S``."""
        if is_positive(a):
            return self.cut_p(a, left, right, concl)
        return self.cut_n(a, unstore(left), right, concl)

    def cut_right(self, a: Formula, left: ProofTree, right: ProofTree, concl: Seq) -> ProofTree:
        """Cut ``Γ ⊢ Δ, A ; S`` against ``Γ, A ⊢ Δ ; ·``, going through ¬A for positive A."""
        if a in concl.right:
            return weaken(CALC, left, concl)
        if a in concl.left:
            return weaken(CALC, right, concl)
        if not is_positive(a):
            return self.cut_n(a, left, right, concl)
        na = Neg(a)
        negated = rebuild(CALC, RuleInstance("negR", side="R", principal=na), Seq(concl.left, concl.right | {na}), [right])
        return self.cut_n(na, negated, move_left(left, a), concl)

    def cut_p(self, p: Formula, left: ProofTree, right: ProofTree, concl: Seq) -> ProofTree:
        if p in concl.left:
            return weaken(CALC, right, concl)
        if concl.stoup == p:
            return weaken(CALC, left, concl)
        left = weaken(CALC, left, Seq(concl.left, concl.right, p))
        right = weaken(CALC, right, Seq(concl.left | {p}, concl.right, concl.stoup))
        self._enter(p, left, right)
        try:
            return self._pcut(p, left, right, concl)
        finally:
            self._leave()

    def cut_n(self, n: Formula, left: ProofTree, right: ProofTree, concl: Seq) -> ProofTree:
        if n in concl.right:
            return weaken(CALC, left, concl)
        if n in concl.left:
            return weaken(CALC, right, concl)
        if left.conclusion.stoup is not None:
            if right.conclusion.stoup is not None or left.conclusion.stoup != concl.stoup:
                raise TranslationError(f"N-cut on {n} with two stoups")
            right_stoup = None
        else:
            right_stoup = concl.stoup
        left = weaken(CALC, left, Seq(concl.left, concl.right | {n}, left.conclusion.stoup))
        right = weaken(CALC, right, Seq(concl.left | {n}, concl.right, right_stoup))
        self._enter(n, left, right)
        try:
            return self._ncut(n, left, right, concl)
        finally:
            self._leave()

    # ---- P-cut ----

    def _pcut(self, p: Formula, left: ProofTree, right: ProofTree, concl: Seq) -> ProofTree:
        if BOT in concl.left:
            return _axiom(concl, "botL", BOT)
        lname = left.rule.rule
        if lname == "W":
            return weaken(CALC, left.premises[0], concl)
        if lname in _LEFT_CONTEXT_RULES:
            return self._permute_p_left(p, left, right, concl)
        if lname not in _STOUP_RULES:
            raise TranslationError(f"unexpected {lname} above a P-cut on {p}")
        rrule = right.rule
        if rrule.rule == "init":
            return _axiom(concl, "init", concl.stoup)
        if rrule.rule in _LEFT_CONTEXT_RULES and rrule.principal == p:
            return self._pcut_principal(p, left, right, concl)
        return self._permute_p_right(p, left, right, concl)

    def _permute_p_left(self, p, left, right, concl):
        left = freshen(CALC, left, sequent_fv(concl))
        rule = left.rule.with_(keep=True)
        wanted = premises_of(CALC, rule, concl)
        children = []
        for c, q in zip(left.premises, wanted):
            if c.conclusion.stoup == p and q.stoup == concl.stoup:
                children.append(self.cut_p(p, c, right, q))
            else:
                children.append(weaken(CALC, c, q))
        return rebuild(CALC, left.rule, concl, children)

    def _permute_p_right(self, p, left, right, concl):
        rule = right.rule.with_(keep=True)
        wanted = premises_of(CALC, rule, concl)
        children = []
        for c, q in zip(right.premises, wanted):
            if p in c.conclusion.left:
                children.append(self.cut_p(p, left, c, q))
            else:
                children.append(weaken(CALC, c, q))
        return rebuild(CALC, right.rule, concl, children)

    def _drop_p(self, p, left, c):
        s = c.conclusion
        if p not in s.left:
            return c
        return self.cut_p(p, left, c, Seq(s.left - {p}, s.right, s.stoup))

    def _pcut_principal(self, p, left, right, concl):
        gamma, delta, stoup = concl.left, concl.right, concl.stoup
        match p:
            case And(a, b):
                rest = self._drop_p(p, left, right.premises[0])
                x = self.cut_any(b, left.premises[1], rest, Seq(gamma | {a}, delta, stoup))
                return self.cut_any(a, left.premises[0], x, concl)
            case OrI(a, b):
                j = left.rule.index - 1
                branch = self._drop_p(p, left, right.premises[j])
                return self.cut_any((a, b)[j], left.premises[0], branch, concl)
            case ImpI(a, b):
                ra = self.cut_p(p, left, right.premises[0], Seq(gamma, delta, a))
                rb = self._drop_p(p, left, right.premises[1])
                y = self.cut_any(b, left.premises[0], rb, Seq(gamma | {a}, delta, stoup))
                return self.cut_any(a, ra, y, concl)
            case ForAll():
                t = right.rule.witness
                inst = instantiate(p, t)
                rest = self._drop_p(p, left, right.premises[0])
                body = subst_tree(CALC, left.premises[0], left.rule.eigen, t)
                return self.cut_any(inst, body, rest, concl)
            case ExistsI():
                t = left.rule.witness
                inst = instantiate(p, t)
                rest = self._drop_p(p, left, right.premises[0])
                body = subst_tree(CALC, rest, right.rule.eigen, t)
                return self.cut_any(inst, left.premises[0], body, concl)
        raise TranslationError(f"no principal P-cut reduction for {p}")

    # ---- N-cut ----

    def _ncut(self, n: Formula, left: ProofTree, right: ProofTree, concl: Seq) -> ProofTree:
        if BOT in concl.left:
            return _axiom(concl, "botL", BOT)
        lrule, rrule = left.rule, right.rule
        if lrule.rule == "init":
            return _axiom(concl, "init", concl.stoup)
        if rrule.rule == "init":
            return _axiom(concl, "init", concl.stoup)
        if rrule.rule == "botL":
            # n is bot, which no right rule decomposes
            if left.conclusion.stoup is None and concl.stoup is not None:
                bare = _bare(concl)
                leaf = _axiom(Seq(bare.left | {n}, bare.right), "botL", BOT)
                return _w(concl, self._permute_n_left(n, weaken(CALC, left, Seq(bare.left, bare.right | {n})), leaf, bare))
            return self._permute_n_left(n, left, right, concl)
        if left.conclusion.stoup is not None:
            return self._permute_n_left(n, left, right, concl)
        if not (rrule.rule in _NEG_LEFT and rrule.principal == n):
            return self._permute_n_right(n, left, right, concl)
        if not (lrule.rule in _NEG_RIGHT and lrule.principal == n):
            return self._permute_n_left(n, left, right, concl)
        return self._ncut_principal(n, left, right, concl)

    def _permute_n_left(self, n, left, right, concl):
        left = freshen(CALC, left, sequent_fv(concl))
        rule = left.rule.with_(keep=True)
        wanted = premises_of(CALC, rule, concl)
        children = []
        for c, q in zip(left.premises, wanted):
            if n in c.conclusion.right:
                children.append(self.cut_n(n, c, right, q))
            else:
                children.append(weaken(CALC, c, q))
        return rebuild(CALC, left.rule, concl, children)

    def _permute_n_right(self, n, left, right, concl):
        rule = right.rule.with_(keep=True)
        wanted = premises_of(CALC, rule, concl)
        children = []
        for c, q in zip(right.premises, wanted):
            if n in c.conclusion.left:
                children.append(self.cut_n(n, left, c, q))
            else:
                children.append(weaken(CALC, c, q))
        return rebuild(CALC, right.rule, concl, children)

    def _drop_n_left(self, n, left, c):
        s = c.conclusion
        if n not in s.left:
            return c
        return self.cut_n(n, left, c, Seq(s.left - {n}, s.right, s.stoup))

    def _drop_n_right(self, n, c, right):
        s = c.conclusion
        if n not in s.right:
            return c
        return self.cut_n(n, c, right, Seq(s.left, s.right - {n}, s.stoup))

    def _ncut_principal(self, n, left, right, concl):
        gamma, delta = concl.left, concl.right
        lp = self._drop_n_right(n, left.premises[0], right)
        match n:
            case Neg(a):
                rp = self.cut_n(n, left, right.premises[0], Seq(gamma, delta, a))
                return self.cut_any(a, rp, lp, concl)
            case OrC(a, b):
                ra = self._drop_n_left(n, left, right.premises[0])
                rb = self._drop_n_left(n, left, right.premises[1])
                x = self.cut_right(a, lp, ra, Seq(gamma, delta | {b}))
                return self.cut_right(b, x, rb, concl)
            case ImpC(a, b):
                ra = self.cut_n(n, left, right.premises[0], Seq(gamma, delta, a))
                rb = self._drop_n_left(n, left, right.premises[1])
                y = self.cut_right(b, lp, rb, Seq(gamma | {a}, delta))
                return self.cut_any(a, ra, y, concl)
            case AtomC(name, terms):
                rp = self._drop_n_left(n, left, right.premises[0])
                return self.cut_right(AtomI(name, terms), lp, rp, concl)
            case ExistsC():
                t = left.rule.witness
                rp = self._drop_n_left(n, left, right.premises[0])
                body = subst_tree(CALC, rp, right.rule.eigen, t)
                return self.cut_right(instantiate(n, t), lp, body, concl)
        raise TranslationError(f"no principal N-cut reduction for {n}")
