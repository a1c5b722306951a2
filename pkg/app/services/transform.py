# app/services/transform.py
"""
Structural operations on LE and LCE proof trees: weakening, term
substitution, eigenvariable renaming and re-deriving a node after its
conclusion changed. Everything goes back through ``premises_of`` so the
results are checker-valid by construction.
"""
from __future__ import annotations

from typing import Any, Iterable, Optional, Sequence, Set

from app.schemas.errors import RuleError, TranslationError
from app.schemas.formula import BOT, Bottom, Formula, Term, Var
from app.schemas.proof import ProofTree, RuleInstance
from app.schemas.sequent import LESequent, StoupSequent
from app.services.formula import fresh_var, substitute, substitute_term, vars_of_all
from app.services.kernel import premises_of
from app.utils.logging import get_logger

logger = get_logger(__name__)


def _formulas(s: Any) -> Iterable[Formula]:
    return s.formulas()


def sequent_fv(s: Any) -> Set[str]:
    out: Set[str] = set()
    for f in _formulas(s):
        out |= f.fv
    return out


def tree_vars(tree: ProofTree) -> Set[str]:
    """Every variable name mentioned anywhere in the tree."""
    out: Set[str] = set()
    for _, node in tree.nodes():
        out |= vars_of_all(_formulas(node.conclusion))
        rule = node.rule
        if rule.eigen:
            out.add(rule.eigen)
        if isinstance(rule.witness, Term):
            out |= rule.witness.fv
    return out


def subsumes(calc: str, big: Any, small: Any) -> bool:
    """True when ``small`` derives ``big`` by weakening alone."""
    if calc == "le":
        return small.left <= big.left and (small.right == big.right or isinstance(small.right, Bottom))
    if calc == "lce":
        return (
            small.left <= big.left
            and small.right <= big.right
            and (small.stoup == big.stoup or small.stoup is None)
        )
    raise TranslationError(f"no weakening for calculus {calc!r}")


def _needs_w(calc: str, target: Any, s: Any) -> bool:
    if calc == "le":
        return isinstance(s.right, Bottom) and not isinstance(target.right, Bottom)
    return s.stoup is None and target.stoup is not None


def _without_succedent(calc: str, s: Any) -> Any:
    if calc == "le":
        return LESequent(s.left, BOT)
    return StoupSequent(s.left, s.right)


def _w_rule(calc: str, target: Any) -> RuleInstance:
    if calc == "le":
        return RuleInstance("W", side="R", principal=target.right)
    return RuleInstance("W", side="S", principal=target.stoup)


def weaken(calc: str, tree: ProofTree, target: Any) -> ProofTree:
    """Re-derive ``tree`` with the larger conclusion ``target``."""
    s = tree.conclusion
    if s == target:
        return tree
    if not subsumes(calc, target, s):
        raise TranslationError(f"cannot weaken {s} to {target}")
    if _needs_w(calc, target, s):
        mid = _without_succedent(calc, target)
        return ProofTree(target, _w_rule(calc, target), (weaken(calc, tree, mid),))
    tree = freshen(calc, tree, sequent_fv(target))
    try:
        wanted = premises_of(calc, tree.rule, target)
    except RuleError as e:
        raise TranslationError(f"{tree.rule.rule} does not apply to {target}: {e.reason}") from e
    children = tuple(weaken(calc, c, p) for c, p in zip(tree.premises, wanted))
    return ProofTree(target, tree.rule, children)


def weaken_by(calc: str, tree: ProofTree, left: Iterable[Formula] = (), right: Iterable[Formula] = ()) -> ProofTree:
    s = tree.conclusion
    if calc == "le":
        target = LESequent(s.left | frozenset(left), s.right)
    else:
        target = StoupSequent(s.left | frozenset(left), s.right | frozenset(right), s.stoup)
    return weaken(calc, tree, target)


def freshen(calc: str, tree: ProofTree, avoid: Set[str]) -> ProofTree:
    """Rename the root eigenvariable when it occurs in ``avoid``."""
    y = tree.rule.eigen
    if not y or y not in avoid:
        return tree
    z = fresh_var(set(avoid) | tree_vars(tree))
    logger.debug("renaming eigenvariable %s to %s", y, z)
    children = tuple(subst_tree(calc, c, y, Var(z)) for c in tree.premises)
    return ProofTree(tree.conclusion, tree.rule.with_(eigen=z), children)


def subst_sequent(s: Any, x: str, t: Term) -> Any:
    sub = lambda f: substitute(f, x, t)  # noqa: E731
    if isinstance(s, LESequent):
        return LESequent(frozenset(sub(f) for f in s.left), sub(s.right))
    if isinstance(s, StoupSequent):
        return StoupSequent(
            frozenset(sub(f) for f in s.left),
            frozenset(sub(f) for f in s.right),
            sub(s.stoup) if s.stoup is not None else None,
        )
    raise TranslationError(f"cannot substitute into {type(s).__name__}")


def subst_rule(rule: RuleInstance, x: str, t: Term) -> RuleInstance:
    changes = {}
    for name in ("principal", "cut", "residue"):
        value = getattr(rule, name)
        if isinstance(value, Formula):
            changes[name] = substitute(value, x, t)
    if isinstance(rule.witness, Term):
        changes["witness"] = substitute_term(rule.witness, x, t)
    return rule.with_(**changes) if changes else rule


def subst_tree(calc: str, tree: ProofTree, x: str, t: Term) -> ProofTree:
    """The instance of ``tree`` under x := t, re-derived node by node."""
    s = tree.conclusion
    if x not in sequent_fv(s):
        return tree
    tree = freshen(calc, tree, set(t.fv) | {x})
    concl = subst_sequent(s, x, t)
    children = [subst_tree(calc, c, x, t) for c in tree.premises]
    return rebuild(calc, subst_rule(tree.rule, x, t), concl, children)


def rebuild(calc: str, rule: RuleInstance, concl: Any, children: Sequence[ProofTree]) -> ProofTree:
    """
    Apply ``rule`` to ``concl`` and hang ``children`` under it, weakening
    each child up to the premise it has to prove. Falls back to the variant
    that keeps the principal formula when the plain one drops something a
    child still needs.
    """
    variants = [rule] if rule.keep else [rule, rule.with_(keep=True)]
    last: Optional[str] = None
    for r in variants:
        try:
            wanted = premises_of(calc, r, concl)
        except RuleError as e:
            last = e.reason
            continue
        if len(wanted) != len(children):
            last = f"{r.rule} has {len(wanted)} premise(s), got {len(children)}"
            continue
        if all(subsumes(calc, p, c.conclusion) for p, c in zip(wanted, children)):
            return ProofTree(concl, r, tuple(weaken(calc, c, p) for c, p in zip(children, wanted)))
        last = f"premises of {r.rule} do not cover the given subproofs"
    raise TranslationError(f"cannot rebuild {rule.rule} at {concl}: {last}")


def node(concl: Any, rule: RuleInstance, *premises: ProofTree) -> ProofTree:
    return ProofTree(concl, rule, tuple(premises))
