# app/services/semantics.py
"""
Finite birelational Kripke models: validity checks, evaluation, and a
countermodel finder that enumerates small models up to world renaming.

Classical connectives are evaluated through their double-negation reading,
so a model only stores the intuitionistic atoms true at each world.
"""
from __future__ import annotations

import random
from itertools import combinations, permutations, product
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

from app.config import settings
from app.schemas.errors import SemanticsError
from app.schemas.formula import (
    And,
    Atom,
    AtomC,
    AtomI,
    Bottom,
    Box,
    DiaC,
    DiaI,
    Formula,
    ImpC,
    ImpI,
    Neg,
    OrC,
    OrI,
    Quant,
    Top,
)
from app.schemas.model import BirelationalModel, FrameCondition, Pair
from app.services.formula import atom_names, subformulas
from app.utils.logging import get_logger

logger = get_logger(__name__)

Conditions = Iterable[FrameCondition]


# ---- model conditions ----

def validate_model(m: BirelationalModel) -> List[str]:
    """Every violated model condition, each naming its witnessing worlds."""
    ws = range(m.worlds)
    le, rel = m.le, m.rel
    out: List[str] = []
    for a, b in le:
        if a != b and (b, a) in le:
            out.append(f"<= not antisymmetric at ({a},{b})")
    for a, b in le:
        for c in ws:
            if (b, c) in le and (a, c) not in le:
                out.append(f"<= not transitive at ({a},{b},{c})")
    for a, b in sorted(le):
        for p in sorted(m.true_at(a) - m.true_at(b)):
            out.append(f"V not monotone at ({a},{b},{p})")
    for w, v in sorted(rel):
        for v2 in m.above(v):
            if not any((w2, v2) in rel for w2 in m.above(w)):
                out.append(f"F1 at ({w},{v},{v2})")
    for w, w2 in sorted(le):
        for v in m.successors(w):
            if not any((v2 in m.above(v)) for v2 in m.successors(w2)):
                out.append(f"F2 at ({w},{w2},{v})")
    return out


def frame_ok(m: BirelationalModel, cond: Conditions) -> bool:
    rel = m.rel
    ws = range(m.worlds)
    for c in cond:
        if c is FrameCondition.REFLEXIVE and any((w, w) not in rel for w in ws):
            return False
        if c is FrameCondition.SYMMETRIC and any((b, a) not in rel for a, b in rel):
            return False
        if c is FrameCondition.TRANSITIVE and any((a, d) not in rel for a, b in rel for c2, d in rel if b == c2):
            return False
        if c is FrameCondition.EUCLIDEAN and any((b, d) not in rel for a, b in rel for c2, d in rel if a == c2):
            return False
    return True


def _close_rel(n: int, rel: Set[Pair], cond: Sequence[FrameCondition]) -> Set[Pair]:
    rel = set(rel)
    changed = True
    while changed:
        before = len(rel)
        if FrameCondition.REFLEXIVE in cond:
            rel |= {(w, w) for w in range(n)}
        if FrameCondition.SYMMETRIC in cond:
            rel |= {(b, a) for a, b in rel}
        if FrameCondition.TRANSITIVE in cond:
            rel |= {(a, d) for a, b in rel for c, d in rel if b == c}
        if FrameCondition.EUCLIDEAN in cond:
            rel |= {(b, d) for a, b in rel for c, d in rel if a == c}
        changed = len(rel) != before
    return rel


def closure(m: BirelationalModel, cond: Conditions) -> BirelationalModel:
    """Least extension of R satisfying ``cond``."""
    rel = _close_rel(m.worlds, set(m.rel), list(cond))
    return BirelationalModel(worlds=m.worlds, le=m.le, rel=frozenset(rel), val=m.val)


# ---- evaluation ----

class _Evaluator:
    def __init__(self, m: BirelationalModel):
        self.m = m
        self.cache: Dict[Tuple[int, str], bool] = {}

    def holds(self, w: int, f: Formula) -> bool:
        key = (w, f.key)
        hit = self.cache.get(key)
        if hit is None:
            hit = self.cache[key] = self._holds(w, f)
        return hit

    def _holds(self, w: int, f: Formula) -> bool:
        m = self.m
        match f:
            case Quant():
                raise SemanticsError("first-order evaluation unsupported")
            case Atom(terms=terms) if terms:
                raise SemanticsError("first-order evaluation unsupported")
            case AtomI(name):
                return name in m.true_at(w)
            case AtomC(name):
                return self.holds(w, Neg(Neg(AtomI(name))))
            case Bottom():
                return False
            case Top():
                return True
            case And(a, b):
                return self.holds(w, a) and self.holds(w, b)
            case OrI(a, b):
                return self.holds(w, a) or self.holds(w, b)
            case ImpI(a, b):
                return all(not self.holds(v, a) or self.holds(v, b) for v in m.above(w))
            case Neg(a):
                return not any(self.holds(v, a) for v in m.above(w))
            case Box(a):
                return all(self.holds(v, a) for w2 in m.above(w) for v in m.successors(w2))
            case DiaI(a):
                return any(self.holds(v, a) for v in m.successors(w))
            case OrC(a, b):
                return self.holds(w, Neg(And(Neg(a), Neg(b))))
            case ImpC(a, b):
                return self.holds(w, Neg(And(a, Neg(b))))
            case DiaC(a):
                return self.holds(w, Neg(Box(Neg(a))))
        raise SemanticsError(f"cannot evaluate {f}")


def eval_formula(m: BirelationalModel, w: int, f: Formula) -> bool:
    if not 0 <= w < m.worlds:
        raise SemanticsError(f"no world {w} in a model with {m.worlds} worlds")
    return _Evaluator(m).holds(w, f)


def refuting_worlds(m: BirelationalModel, f: Formula) -> List[int]:
    ev = _Evaluator(m)
    return [w for w in range(m.worlds) if not ev.holds(w, f)]


def is_valid_in_model(m: BirelationalModel, f: Formula) -> bool:
    return not refuting_worlds(m, f)


# ---- enumeration ----

def _transitive(n: int, le: FrozenSet[Pair]) -> bool:
    return all((a, c) in le for a, b in le for b2, c in le if b == b2)


def _partial_orders(n: int) -> Iterator[FrozenSet[Pair]]:
    diagonal = frozenset((w, w) for w in range(n))
    pairs = [(a, b) for a in range(n) for b in range(n) if a < b]
    # orient each unordered pair: unrelated, a<=b or b<=a
    for choice in product((None, 0, 1), repeat=len(pairs)):
        le = set(diagonal)
        for (a, b), c in zip(pairs, choice):
            if c == 0:
                le.add((a, b))
            elif c == 1:
                le.add((b, a))
        le = frozenset(le)
        if _transitive(n, le):
            yield le


def _up_sets(n: int, le: FrozenSet[Pair]) -> List[FrozenSet[int]]:
    out = []
    for bits in product((False, True), repeat=n):
        s = frozenset(w for w in range(n) if bits[w])
        if all(b in s for a, b in le if a in s):
            out.append(s)
    return out


def _canonical(n: int, le: FrozenSet[Pair], rel: FrozenSet[Pair], val: Sequence[FrozenSet[str]]) -> Tuple:
    best = None
    for perm in permutations(range(n)):
        sig = (
            tuple(sorted((perm[a], perm[b]) for a, b in le)),
            tuple(sorted((perm[a], perm[b]) for a, b in rel)),
            tuple(tuple(sorted(val[perm.index(w)])) for w in range(n)),
        )
        if best is None or sig < best:
            best = sig
    return best


def enumerate_models(
    atoms: Iterable[str],
    max_worlds: int,
    cond: Conditions = (),
) -> Iterator[BirelationalModel]:
    """
    Every model with at most ``max_worlds`` worlds over ``atoms`` satisfying
    the model conditions and ``cond``, one per isomorphism class, smallest
    first.
    """
    atoms = sorted(set(atoms))
    cond = list(cond)
    for n in range(1, max_worlds + 1):
        seen: Set[Tuple] = set()
        all_pairs = [(a, b) for a in range(n) for b in range(n)]
        for le in _partial_orders(n):
            ups = _up_sets(n, le)
            for bits in product((False, True), repeat=len(all_pairs)):
                rel = frozenset(p for p, bit in zip(all_pairs, bits) if bit)
                frame = BirelationalModel(worlds=n, le=le, rel=rel)
                if not frame_ok(frame, cond) or validate_model(frame):
                    continue
                for choice in product(ups, repeat=len(atoms)):
                    val = [frozenset(a for a, up in zip(atoms, choice) if w in up) for w in range(n)]
                    sig = _canonical(n, le, rel, val)
                    if sig in seen:
                        continue
                    seen.add(sig)
                    yield BirelationalModel(
                        worlds=n, le=le, rel=rel, val={w: val[w] for w in range(n) if val[w]},
                    )


def countermodel_search(
    f: Formula,
    max_worlds: Optional[int] = None,
    cond: Conditions = (),
) -> Optional[BirelationalModel]:
    """First enumerated model with a world refuting ``f``; None when none exists within the bound."""
    max_worlds = max_worlds or settings.max_worlds
    if any(isinstance(g, Quant) for g in subformulas(f)):
        raise SemanticsError("first-order evaluation unsupported")
    count = 0
    for m in enumerate_models(atom_names(f), max_worlds, cond):
        count += 1
        if not is_valid_in_model(m, f):
            logger.info("countermodel after %d models: %d worlds", count, m.worlds)
            return m
    logger.info("no countermodel among %d models up to %d worlds", count, max_worlds)
    return None


# ---- sampling ----

def _repair(n: int, le: FrozenSet[Pair], rel: Set[Pair], cond: Sequence[FrameCondition]) -> Set[Pair]:
    """Add R edges until F1, F2 and ``cond`` hold."""
    above = {w: [v for (u, v) in le if u == w] for w in range(n)}
    while True:
        rel = _close_rel(n, rel, cond)
        extra: Set[Pair] = set()
        for w, v in rel:
            for v2 in above[v]:
                if not any((w2, v2) in rel for w2 in above[w]):
                    extra.add((w, v2))
        for w in range(n):
            for w2 in above[w]:
                for v in [b for a, b in rel if a == w]:
                    if not any((w2, v2) in rel for v2 in above[v]):
                        extra.add((w2, v))
        if not extra:
            return rel
        rel |= extra


def random_model(
    seed: Optional[int] = None,
    n_worlds: int = 3,
    cond: Conditions = (),
    atoms: Iterable[str] = ("p", "q"),
    retries: int = 20,
) -> BirelationalModel:
    """Deterministic for a given seed; always passes ``validate_model``."""
    rng = random.Random(settings.seed if seed is None else seed)
    cond = list(cond)
    atoms = sorted(set(atoms))
    n = n_worlds
    for attempt in range(retries + 1):
        edges = {(a, b) for a, b in combinations(range(n), 2) if rng.random() < 0.4}
        le = {(w, w) for w in range(n)} | edges
        while True:
            more = {(a, d) for a, b in le for c, d in le if b == c} - le
            if not more:
                break
            le |= more
        le = frozenset(le)
        rel = {(a, b) for a in range(n) for b in range(n) if rng.random() < 0.35}
        rel = _close_rel(n, rel, cond)
        if attempt == retries:
            rel = _repair(n, le, rel, cond)
        ups = _up_sets(n, le)
        val = {w: frozenset() for w in range(n)}
        for a in atoms:
            up = rng.choice(ups)
            for w in up:
                val[w] = val[w] | {a}
        m = BirelationalModel(worlds=n, le=le, rel=frozenset(rel), val={w: s for w, s in val.items() if s})
        if not validate_model(m) and frame_ok(m, cond):
            return m
    # unreachable: the repaired attempt is always valid
    raise SemanticsError("could not build a valid model")


# ---- text format ----

def format_model(m: BirelationalModel) -> str:
    lines = [f"worlds {m.worlds}"]
    lines += [f"le {a} {b}" for a, b in sorted(m.le) if a != b]
    lines += [f"rel {a} {b}" for a, b in sorted(m.rel)]
    for w in range(m.worlds):
        lines += [f"val {w} {p}" for p in sorted(m.true_at(w))]
    return "\n".join(lines) + "\n"
