# app/schemas/model.py
from __future__ import annotations

from enum import Enum
from typing import Dict, FrozenSet, List, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

Pair = Tuple[int, int]


class FrameCondition(str, Enum):
    REFLEXIVE = "refl"
    SYMMETRIC = "sym"
    TRANSITIVE = "trans"
    EUCLIDEAN = "eucl"


# Modal extension letter -> frame condition on R.
CONDITION_OF_EXTENSION: Dict[str, FrameCondition] = {
    "t": FrameCondition.REFLEXIVE,
    "b": FrameCondition.SYMMETRIC,
    "4": FrameCondition.TRANSITIVE,
    "5": FrameCondition.EUCLIDEAN,
}


class BirelationalModel(BaseModel):
    """
    Finite model over worlds ``0..worlds-1``. ``le`` always contains the
    diagonal; ``val`` maps a world to the names of the intuitionistic atoms
    true there.
    """

    model_config = ConfigDict(frozen=True)

    worlds: int = Field(ge=1)
    le: FrozenSet[Pair] = frozenset()
    rel: FrozenSet[Pair] = frozenset()
    val: Dict[int, FrozenSet[str]] = Field(default_factory=dict)

    @model_validator(mode="before")
    @classmethod
    def _with_diagonal(cls, data):
        if isinstance(data, dict) and "worlds" in data:
            data = dict(data)
            data["le"] = frozenset(data.get("le") or ()) | {(w, w) for w in range(int(data["worlds"]))}
        return data

    @model_validator(mode="after")
    def _in_range(self):
        ws = range(self.worlds)
        for name, pairs in (("le", self.le), ("rel", self.rel)):
            for a, b in pairs:
                if a not in ws or b not in ws:
                    raise ValueError(f"{name} pair ({a},{b}) names a world outside 0..{self.worlds - 1}")
        for w in self.val:
            if w not in ws:
                raise ValueError(f"valuation for unknown world {w}")
        return self

    def __hash__(self):
        return hash(self.signature())

    def above(self, w: int) -> List[int]:
        return sorted(v for (u, v) in self.le if u == w)

    def successors(self, w: int) -> List[int]:
        return sorted(v for (u, v) in self.rel if u == w)

    def true_at(self, w: int) -> FrozenSet[str]:
        return self.val.get(w, frozenset())

    def atoms(self) -> FrozenSet[str]:
        out: FrozenSet[str] = frozenset()
        for names in self.val.values():
            out |= names
        return out

    def signature(self) -> Tuple:
        return (
            self.worlds,
            tuple(sorted(self.le)),
            tuple(sorted(self.rel)),
            tuple(tuple(sorted(self.true_at(w))) for w in range(self.worlds)),
        )
