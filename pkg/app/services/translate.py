# app/services/translate.py
"""
Translations between LE and LCE: sequents ``Γ ⊢ Δ ; Π`` read as
``Γ, ¬Δ ⊢ Π`` and proofs carried across in both directions.
"""
from __future__ import annotations

from typing import List

from app.schemas.errors import CheckError, TranslationError
from app.schemas.formula import BOT, AtomC, AtomI, Bottom, ExistsC, ForAll, Formula, ImpC, Neg, OrC, Var
from app.schemas.proof import MACRO_RULES, CheckOptions, ProofTree, RuleInstance
from app.schemas.sequent import LESequent, StoupSequent
from app.services.formula import fresh_var, instantiate, is_positive, vars_of_all
from app.services.kernel import require_valid
from app.services.lce import expand_general_init, general_cinit
from app.services.le import le_dne, le_identity
from app.services.transform import node, rebuild, weaken
from app.utils.logging import get_logger

logger = get_logger(__name__)

_LEFT = {"andL", "oriL", "impiL", "negL", "forallL", "existsiL", "orcL", "impcL", "Lc", "existscL"}
_STOUP = {"andR", "oriR", "impiR", "forallR", "existsiR"}
_CLASSICAL_RIGHT = {"negR", "orcR", "impcR", "Rc", "existscR"}


def _checked(calc: str, tree: ProofTree) -> None:
    try:
        require_valid(calc, tree, CheckOptions(allow_cuts=True))
    except CheckError as e:
        raise TranslationError(f"input is not a valid {calc} proof: {e}") from e


# ---- LCE to LE ----

def lce_to_le_sequent(s: StoupSequent) -> LESequent:
    left = s.left | frozenset(Neg(d) for d in s.right)
    return LESequent(left, s.stoup if s.stoup is not None else BOT)


def lce_to_le_proof(tree: ProofTree) -> ProofTree:
    """Carry a valid LCE proof over to LE. Store and N-cut nodes become LE cuts."""
    _checked("lce", tree)
    out = _to_le(expand_general_init(tree))
    logger.debug("lce_to_le_proof: %d nodes -> %d nodes", tree.size(), out.size())
    return out


def _r(name: str, principal: Formula = None, **kw) -> RuleInstance:
    return RuleInstance(name, side="R", principal=principal, **kw)


def _l(name: str, principal: Formula = None, **kw) -> RuleInstance:
    return RuleInstance(name, side="L", principal=principal, **kw)


def _to_le(tree: ProofTree) -> ProofTree:
    s = tree.conclusion
    rule = tree.rule
    target = lce_to_le_sequent(s)
    kids = [_to_le(p) for p in tree.premises]
    name = rule.rule
    if name in ("init", "botL"):
        return ProofTree(target, rule.with_(side="R" if name == "init" else "L"), ())
    if name in _LEFT:
        return rebuild("le", rule, target, kids)
    if name in _STOUP:
        return rebuild("le", rule.with_(side="R"), target, kids)
    if name in _CLASSICAL_RIGHT:
        return _le_classical_right(target, rule, kids[0])
    match name:
        case "D":
            return rebuild("le", _l("negL", Neg(rule.principal)), target, kids)
        case "store":
            return _le_store(target, s.stoup, kids[0])
        case "W":
            if isinstance(target.right, Bottom):
                return weaken("le", kids[0], target)
            return rebuild("le", _r("W", target.right), target, kids)
        case "Pcut":
            return rebuild("le", RuleInstance("cut", cut=rule.cut), target, kids)
        case "Ncut":
            return _le_ncut(target, rule.cut, rule.residue, kids)
    raise TranslationError(f"no LE counterpart for LCE rule {name!r}")


def _le_classical_right(target: LESequent, rule: RuleInstance, kid: ProofTree) -> ProofTree:
    """A classical right rule on P in Δ: negL on ¬P over the LE right rule for P."""
    p = rule.principal
    inner = LESequent(target.left, p)
    if rule.rule == "existscR":
        allneg = ForAll(p.var, Neg(p.body))
        mid = LESequent(target.left | {allneg}, BOT)
        kid = rebuild("le", _l("forallL", allneg, witness=rule.witness), mid, [kid])
        right = rebuild("le", _r("existscR", p), inner, [kid])
    else:
        right = rebuild("le", _r(rule.rule, p), inner, [kid])
    return rebuild("le", _l("negL", Neg(p)), target, [right])


def _le_store(target: LESequent, n: Formula, kid: ProofTree) -> ProofTree:
    """Γ,¬Δ ⊢ N by a cut on ¬¬N against the derivation of ¬¬N ⊢ N."""
    nn = Neg(Neg(n))
    left = rebuild("le", _r("negR", nn), LESequent(target.left, nn), [kid])
    return node(target, RuleInstance("cut", cut=nn), left, le_dne(target.left, n))


def _le_ncut(target: LESequent, n: Formula, residue, kids: List[ProofTree]) -> ProofTree:
    ctx = target.left
    nn = Neg(Neg(n))
    first = kids[0]
    if residue is not None:
        # ctx, ¬N ⊢ R closes against ¬R, which is in ctx since R is in Δ
        refute = LESequent(ctx | {Neg(n), residue}, BOT)
        closing = node(refute, _l("negL", Neg(residue)), le_identity(refute.left, residue))
        first = rebuild("le", RuleInstance("cut", cut=residue), LESequent(ctx | {Neg(n)}, BOT), [first, closing])
    left = rebuild("le", _r("negR", nn), LESequent(ctx, nn), [first])
    right_ctx = ctx | {nn}
    right = rebuild(
        "le", RuleInstance("cut", cut=n), LESequent(right_ctx, target.right),
        [le_dne(ctx, n), kids[1]],
    )
    return node(target, RuleInstance("cut", cut=nn), left, right)


# ---- LE to LCE ----

def le_to_lce_sequent(s: LESequent) -> StoupSequent:
    stoup = None if isinstance(s.right, Bottom) else s.right
    return StoupSequent(s.left, frozenset(), stoup)


def le_to_lce_proof(tree: ProofTree) -> ProofTree:
    """
    Carry a valid LE proof over to LCE, reading ``Γ ⊢ C`` as ``Γ ⊢ · ; C``.
    LE cuts become P-cuts or N-cuts and the classical existential on the
    right goes through an N-cut on ¬∀x.¬A; everything else is cut-free.
    """
    _checked("le", tree)
    out = _to_lce(tree)
    logger.debug("le_to_lce_proof: %d nodes -> %d nodes", tree.size(), out.size())
    return out


def _to_lce(tree: ProofTree) -> ProofTree:
    s = tree.conclusion
    rule = tree.rule
    target = le_to_lce_sequent(s)
    kids = [_to_lce(p) for p in tree.premises]
    name = rule.rule
    if name == "init":
        return ProofTree(target, rule.with_(side="S"), ())
    if name == "botL":
        return ProofTree(target, rule, ())
    if name in _LEFT:
        return rebuild("lce", rule, target, kids)
    if name in _STOUP:
        return rebuild("lce", rule.with_(side="S"), target, kids)
    c = s.right
    match name:
        case "negR" | "orcR" | "impcR" | "Rc":
            return _lce_stored_right(target, c, kids[0])
        case "existscR":
            return _lce_exists_c(target, c, kids[0])
        case "W":
            return rebuild("lce", RuleInstance("W", side="S", principal=c), target, kids)
        case "cut":
            return _lce_cut(target, rule.cut, kids)
    raise TranslationError(f"no LCE counterpart for LE rule {name!r}")


def _lce_stored_right(target: StoupSequent, c: Formula, kid: ProofTree) -> ProofTree:
    """store over the classical right rule, with the LE negations moved back to Δ."""
    match c:
        case OrC(a, b):
            kid = move_right(move_right(kid, Neg(a)), Neg(b))
        case ImpC(_, b):
            kid = move_right(kid, Neg(b))
        case AtomC(name, terms):
            kid = move_right(kid, Neg(AtomI(name, terms)))
    inner = StoupSequent(target.left, frozenset({c}))
    right = rebuild("lce", _r(_RIGHT_NAME[type(c)], c), inner, [kid])
    return node(target, RuleInstance("store", side="S", principal=c), right)


_RIGHT_NAME = {Neg: "negR", OrC: "orcR", ImpC: "impcR", AtomC: "Rc"}


def _lce_exists_c(target: StoupSequent, c: ExistsC, kid: ProofTree) -> ProofTree:
    """
    Γ ⊢ · ; ∃c x.A from Γ, ∀x.¬A ⊢ · ; · by storing and cutting ¬∀x.¬A.
    The right premise of the N-cut derives ∃c x.A from ¬∀x.¬A directly.
    """
    gamma = target.left
    allneg = ForAll(c.var, Neg(c.body))
    nall = Neg(allneg)
    stored = StoupSequent(gamma, frozenset({c}))
    left = rebuild("lce", _r("negR", nall), StoupSequent(gamma, frozenset({c, nall})), [kid])

    g2 = gamma | {nall}
    y = fresh_var(vars_of_all(list(g2) + [c]))
    inst = instantiate(c, Var(y))
    ninst = Neg(inst)
    s_neg = StoupSequent(g2, frozenset({c}))
    s_all = StoupSequent(g2, frozenset({c}), allneg)
    s_inst = StoupSequent(g2, frozenset({c}), ninst)
    s_store = StoupSequent(g2, frozenset({c, ninst}))
    s_ex = StoupSequent(g2 | {inst}, frozenset({c}))
    right = node(
        s_neg, _l("negL", nall),
        node(
            s_all, RuleInstance("forallR", side="S", principal=allneg, eigen=y),
            node(
                s_inst, RuleInstance("store", side="S", principal=ninst),
                node(
                    s_store, _r("negR", ninst),
                    node(s_ex, _r("existscR", c, witness=Var(y)), general_cinit(s_ex.left, s_ex.right, inst)),
                ),
            ),
        ),
    )
    cut = node(stored, RuleInstance("Ncut", cut=nall), left, right)
    return node(target, RuleInstance("store", side="S", principal=c), cut)


def _lce_cut(target: StoupSequent, a: Formula, kids: List[ProofTree]) -> ProofTree:
    if isinstance(a, Bottom):
        return weaken("lce", kids[0], target)
    if is_positive(a):
        return rebuild("lce", RuleInstance("Pcut", cut=a), target, kids)
    return rebuild("lce", RuleInstance("Ncut", cut=a), target, [unstore(kids[0]), kids[1]])


# ---- structural moves on LCE proofs ----

def unstore(tree: ProofTree) -> ProofTree:
    """From a proof of ``Γ ⊢ Δ ; N`` build one of ``Γ ⊢ Δ, N ; ·``."""
    s = tree.conclusion
    n = s.stoup
    if n is None or is_positive(n):
        raise TranslationError(f"unstore needs a negative stoup, got {n}")
    target = StoupSequent(s.left, s.right | {n})
    rule = tree.rule
    match rule.rule:
        case "store" | "W":
            return weaken("lce", tree.premises[0], target)
        case "botL":
            return ProofTree(target, rule, ())
        case "ginit":
            return general_cinit(s.left, s.right, n)
    children = [unstore(c) if c.conclusion.stoup == n else c for c in tree.premises]
    return rebuild("lce", rule, target, children)


def move_right(tree: ProofTree, na: Neg) -> ProofTree:
    """From a proof of ``Γ, ¬A ⊢ Δ ; Π`` build one of ``Γ ⊢ Δ, A ; Π``, cut-free."""
    s = tree.conclusion
    if na not in s.left:
        return tree
    if tree.rule.rule in MACRO_RULES:
        tree = expand_general_init(tree)
    a = na.body
    target = StoupSequent(s.left - {na}, s.right | {a}, s.stoup)
    rule = tree.rule
    if rule.is_cut and tree.premises[1].conclusion == s:
        return move_right(tree.premises[1], na)
    if rule.rule == "negL" and rule.principal == na:
        moved = move_right(tree.premises[0], na)
        if is_positive(a):
            return rebuild("lce", _r("D", a), target, [moved])
        return weaken("lce", unstore(moved), target)
    return rebuild("lce", rule, target, [move_right(c, na) for c in tree.premises])


def move_left(tree: ProofTree, a: Formula) -> ProofTree:
    """From a proof of ``Γ ⊢ Δ, P ; Π`` (P positive) build one of ``Γ, ¬P ⊢ Δ ; Π``."""
    s = tree.conclusion
    if a not in s.right:
        return tree
    if tree.rule.rule in MACRO_RULES:
        tree = expand_general_init(tree)
    na = Neg(a)
    target = StoupSequent(s.left | {na}, s.right - {a}, s.stoup)
    rule = tree.rule
    if rule.rule == "D" and rule.principal == a:
        return node(target, _l("negL", na), move_left(tree.premises[0], a))
    if rule.rule == "Ncut" and rule.residue == a:
        # the residue leaves Δ, so derelict it inside the left premise first
        p0 = tree.premises[0]
        derelict = node(StoupSequent(p0.conclusion.left, p0.conclusion.right), _r("D", a), p0)
        return rebuild(
            "lce", rule.with_(residue=None), target,
            [move_left(derelict, a), move_left(tree.premises[1], a)],
        )
    return rebuild("lce", rule, target, [move_left(c, a) for c in tree.premises])
