# app/schemas/proof.py
from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Dict, FrozenSet, Iterator, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

from app.config import settings
from app.schemas.formula import Formula, Term

CUT_RULES = frozenset({"cut", "Pcut", "Ncut", "icut", "ccut"})
MACRO_RULES = frozenset({"ginit", "gcinit"})


@dataclass(frozen=True)
class RuleInstance:
    """
    One fully determined rule application.

    ``principal`` is a Formula (LE/LCE/nEK) or a Labeled formula (labEK).
    ``side`` says where it sits: L (left), R (right context), S (stoup or
    succedent). For nEK, ``path`` addresses the node of the principal and
    ``target`` a second node the rule touches. ``witness`` is a Term for
    quantifier rules and a label name for labEK relational premises.
    """

    rule: str
    side: Optional[str] = None
    principal: Any = None
    witness: Any = None
    eigen: Optional[str] = None
    index: Optional[int] = None
    cut: Any = None
    residue: Any = None
    path: Tuple[int, ...] = ()
    target: Optional[Tuple[int, ...]] = None
    keep: bool = False

    def with_(self, **changes) -> "RuleInstance":
        return replace(self, **changes)

    @property
    def is_cut(self) -> bool:
        return self.rule in CUT_RULES


@dataclass(frozen=True)
class ProofTree:
    conclusion: Any
    rule: RuleInstance
    premises: Tuple["ProofTree", ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "premises", tuple(self.premises))

    def nodes(self, path: Tuple[int, ...] = ()) -> Iterator[Tuple[Tuple[int, ...], "ProofTree"]]:
        yield path, self
        for i, p in enumerate(self.premises):
            yield from p.nodes(path + (i,))

    def height(self) -> int:
        return 1 + max((p.height() for p in self.premises), default=0)

    def size(self) -> int:
        return sum(1 for _ in self.nodes())

    def rules_used(self) -> FrozenSet[str]:
        return frozenset(n.rule.rule for _, n in self.nodes())

    def is_cut_free(self) -> bool:
        return not (self.rules_used() & CUT_RULES)

    def at(self, path: Tuple[int, ...]) -> "ProofTree":
        node = self
        for i in path:
            node = node.premises[i]
        return node


class SearchStatus(str, Enum):
    PROVED = "proved"
    REFUTED = "refuted"
    UNKNOWN = "unknown"


@dataclass
class SearchStats:
    expanded: int = 0
    memo_hits: int = 0
    loop_prunes: int = 0
    depth_cuts: int = 0


@dataclass
class SearchResult:
    status: SearchStatus
    proof: Optional[ProofTree] = None
    stats: SearchStats = field(default_factory=SearchStats)

    @property
    def proved(self) -> bool:
        return self.status is SearchStatus.PROVED


class SearchBudget(BaseModel):
    model_config = ConfigDict(frozen=True)

    max_depth: int = Field(default_factory=lambda: settings.budget_depth, ge=1)
    max_terms: int = Field(default_factory=lambda: settings.budget_terms, ge=1)
    max_labels: int = Field(default_factory=lambda: settings.budget_labels, ge=1)
    loop_check: bool = Field(default=True)
    # Hard cap on expanded nodes so a single call cannot run away.
    max_nodes: int = Field(default=200_000, ge=1)


class FragmentMode(str, Enum):
    FULL = "full"
    INTUITIONISTIC = "int"
    CLASSICAL = "cls"


EXTENSIONS = ("t", "b", "4", "5")


class CheckOptions(BaseModel):
    model_config = ConfigDict(frozen=True)

    allow_cuts: bool = False
    extensions: FrozenSet[str] = Field(default_factory=frozenset)
    fragment: FragmentMode = FragmentMode.FULL
    expand_macros: bool = Field(default_factory=lambda: settings.lce_macro_expand)
    # Accept the bracketed output-diamond reading of the classical 4 rule as well.
    printed_a4: bool = False

    @field_validator("extensions", mode="before")
    @classmethod
    def _parse_extensions(cls, v):
        if isinstance(v, str):
            v = [x.strip() for x in v.split(",") if x.strip()]
        v = frozenset(v or ())
        bad = v - set(EXTENSIONS)
        if bad:
            raise ValueError(f"unknown extensions: {sorted(bad)}")
        return v


@dataclass(frozen=True)
class CheckResult:
    valid: bool
    path: Tuple[int, ...] = ()
    reason: str = ""

    def __bool__(self) -> bool:
        return self.valid


VALID = CheckResult(True)


def meta_of(rule: RuleInstance) -> Dict[str, Any]:
    out: Dict[str, Any] = {}
    for name in ("side", "principal", "witness", "eigen", "index", "cut", "residue", "target"):
        value = getattr(rule, name)
        if value is not None:
            out[name] = value
    if rule.path:
        out["path"] = rule.path
    if rule.keep:
        out["keep"] = True
    return out
