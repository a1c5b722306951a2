# app/services/kernel.py
"""
Calculus-independent proof checking.

Each calculus registers a ``Calculus`` implementation. ``check`` walks a
proof tree and asks the calculus for the exact premises of every rule
instance; a node is valid iff the recorded premises are exactly those.
"""
from __future__ import annotations

from typing import Any, Dict, List, Optional, Protocol

from app.schemas.errors import CheckError, ModeError, RuleError
from app.schemas.proof import CUT_RULES, VALID, CheckOptions, CheckResult, ProofTree, RuleInstance
from app.utils.logging import get_logger

logger = get_logger(__name__)


class Calculus(Protocol):
    name: str

    def premises(self, rule: RuleInstance, conclusion: Any, options: CheckOptions) -> List[Any]:
        ...

    def accepts(self, conclusion: Any, options: CheckOptions) -> Optional[str]:
        """Return a reason when the sequent lies outside the calculus language."""
        ...


def _normalizer(calc: Calculus):
    # Calculi whose sequents have several spellings expose a normal form.
    return getattr(calc, "normalize", None) or (lambda s: s)


_REGISTRY: Dict[str, Calculus] = {}
_LOADED = False


def register(calculus: Calculus) -> Calculus:
    _REGISTRY[calculus.name] = calculus
    return calculus


def get_calculus(calculus_id: str) -> Calculus:
    _load_builtin()
    try:
        return _REGISTRY[calculus_id]
    except KeyError:
        raise RuleError(f"unknown calculus {calculus_id!r}") from None


def _load_builtin() -> None:
    global _LOADED
    if _LOADED:
        return
    # Importing registers each calculus.
    from app.services import labek, lce, le, nek  # noqa: F401

    _LOADED = True


def premises_of(calculus_id: str, rule: RuleInstance, conclusion: Any, options: Optional[CheckOptions] = None) -> List[Any]:
    calc = get_calculus(calculus_id)
    return calc.premises(rule, conclusion, options or CheckOptions(allow_cuts=True))


def check(calculus_id: str, tree: ProofTree, options: Optional[CheckOptions] = None) -> CheckResult:
    options = options or CheckOptions()
    calc = get_calculus(calculus_id)
    norm = _normalizer(calc)
    reason = calc.accepts(tree.conclusion, options)
    if reason:
        return CheckResult(False, (), reason)
    stack = [((), tree)]
    while stack:
        path, node = stack.pop()
        if node.rule.rule in CUT_RULES and not options.allow_cuts:
            return CheckResult(False, path, "cut disallowed")
        try:
            expected = calc.premises(node.rule, node.conclusion, options)
        except RuleError as e:
            logger.debug("rule %s rejected at %s: %s", node.rule.rule, path, e.reason)
            return CheckResult(False, path, e.reason)
        actual = [p.conclusion for p in node.premises]
        if len(expected) != len(actual):
            return CheckResult(False, path, f"{node.rule.rule} expects {len(expected)} premise(s), found {len(actual)}")
        for i, (want, got) in enumerate(zip(expected, actual)):
            if norm(want) != norm(got):
                return CheckResult(False, path + (i,), f"premise {i} of {node.rule.rule} should be: {want}")
        for i in reversed(range(len(node.premises))):
            stack.append((path + (i,), node.premises[i]))
    return VALID


def require_valid(calculus_id: str, tree: ProofTree, options: Optional[CheckOptions] = None) -> None:
    result = check(calculus_id, tree, options)
    if not result.valid:
        raise CheckError(result.path, result.reason)


def require_language(calculus_id: str, conclusion: Any, options: Optional[CheckOptions] = None) -> None:
    reason = get_calculus(calculus_id).accepts(conclusion, options or CheckOptions())
    if reason:
        raise ModeError(reason)
