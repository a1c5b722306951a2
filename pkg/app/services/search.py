# app/services/search.py
"""
Backward proof search shared by every calculus.

A calculus supplies a ``ProofProblem``: axioms that close a sequent, an
optional eager (invertible) expansion to commit to, and an ordered stream
of alternatives to backtrack over. The engine adds depth budgets, a
branch-local loop check, and success/failure memoisation. A failure is
memoised together with the ancestors it was pruned against and is only
reused when all of them are again on the current branch.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass
from typing import Any, Dict, FrozenSet, Iterable, List, NamedTuple, Optional, Set, Tuple

from app.schemas.formula import Formula, Fun, Term, Var
from app.schemas.proof import ProofTree, RuleInstance, SearchBudget, SearchResult, SearchStats, SearchStatus
from app.services.formula import closed_terms, fresh_var
from app.utils.logging import get_logger

logger = get_logger(__name__)

if sys.getrecursionlimit() < 20000:
    sys.setrecursionlimit(20000)


class Expansion(NamedTuple):
    rule: RuleInstance
    premises: Tuple[Any, ...]


class ProofProblem:
    """Hooks a calculus implements to drive the engine."""

    # False when some alternatives were capped (witness terms, labels), so
    # exhausting the space does not refute the root.
    complete: bool = True

    def closing(self, s: Any) -> Optional[RuleInstance]:
        return None

    def eager(self, s: Any) -> Optional[Expansion]:
        return None

    def choices(self, s: Any) -> Iterable[Expansion]:
        return ()

    def key(self, s: Any) -> Any:
        """
        Representative of the sequents provable exactly when ``s`` is. The
        failure memo and the loop check work on keys; proofs stay per sequent.
        """
        return s


class _NodeCap(Exception):
    pass


@dataclass
class _Outcome:
    proof: Optional[ProofTree]
    deps: FrozenSet[Any] = frozenset()
    cut: bool = False


_EMPTY: FrozenSet[Any] = frozenset()


class BacktrackProver:
    def __init__(self, problem: ProofProblem, budget: SearchBudget):
        self.problem = problem
        self.budget = budget
        self.stats = SearchStats()
        self.success: Dict[Any, ProofTree] = {}
        self.failure: Dict[Any, FrozenSet[Any]] = {}
        self._path: Set[Any] = set()

    def run(self, root: Any) -> SearchResult:
        try:
            out = self._search(root, 0)
        except _NodeCap:
            logger.debug("node cap %d reached", self.budget.max_nodes)
            return SearchResult(SearchStatus.UNKNOWN, None, self.stats)
        logger.debug(
            "search done: expanded=%d memo_hits=%d loops=%d depth_cuts=%d",
            self.stats.expanded, self.stats.memo_hits, self.stats.loop_prunes, self.stats.depth_cuts,
        )
        if out.proof is not None:
            return SearchResult(SearchStatus.PROVED, out.proof, self.stats)
        if out.cut or not self.problem.complete:
            return SearchResult(SearchStatus.UNKNOWN, None, self.stats)
        return SearchResult(SearchStatus.REFUTED, None, self.stats)

    def _search(self, s: Any, depth: int) -> _Outcome:
        hit = self.success.get(s)
        if hit is not None:
            self.stats.memo_hits += 1
            return _Outcome(hit)
        k = self.problem.key(s)
        deps = self.failure.get(k)
        if deps is not None and deps <= self._path:
            self.stats.memo_hits += 1
            return _Outcome(None, deps)
        if self.budget.loop_check and k in self._path:
            self.stats.loop_prunes += 1
            return _Outcome(None, frozenset({k}))
        if depth >= self.budget.max_depth:
            self.stats.depth_cuts += 1
            return _Outcome(None, _EMPTY, cut=True)
        self.stats.expanded += 1
        if self.stats.expanded > self.budget.max_nodes:
            raise _NodeCap()

        axiom = self.problem.closing(s)
        if axiom is not None:
            tree = ProofTree(s, axiom, ())
            self.success[s] = tree
            return _Outcome(tree)

        self._path.add(k)
        try:
            eager = self.problem.eager(s)
            alternatives = [eager] if eager is not None else self.problem.choices(s)
            gathered: Set[Any] = set()
            cut = False
            for alt in alternatives:
                subproofs: List[ProofTree] = []
                for premise in alt.premises:
                    out = self._search(premise, depth + 1)
                    if out.proof is None:
                        gathered |= out.deps
                        cut = cut or out.cut
                        break
                    subproofs.append(out.proof)
                else:
                    tree = ProofTree(s, alt.rule, tuple(subproofs))
                    self.success[s] = tree
                    return _Outcome(tree)
        finally:
            self._path.discard(k)

        deps = frozenset(gathered - {k})
        if not cut:
            self.failure[k] = deps
        return _Outcome(None, deps, cut)


def prove_with(problem: ProofProblem, root: Any, budget: Optional[SearchBudget] = None) -> SearchResult:
    return BacktrackProver(problem, budget or SearchBudget()).run(root)


def witness_terms(formulas: Iterable[Formula], budget: SearchBudget) -> List[Term]:
    """Terms of the sequent, padded with fresh constants up to the budget."""
    found: Set[Term] = set()
    names: Set[str] = set()
    for f in formulas:
        found |= closed_terms(f)
        for v in f.fv:
            found.add(Var(v))
        names |= f.fv
    names |= {t.name for t in found if isinstance(t, Fun)}
    out = sorted(found, key=lambda t: t.key)
    while len(out) < budget.max_terms:
        name = fresh_var(names, prefix="c")
        out.append(Fun(name))
        names.add(name)
    return out
