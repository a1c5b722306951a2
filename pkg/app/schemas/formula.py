# app/schemas/formula.py
"""
Ecumenical formula AST.

Formulas are immutable. Equality and hashing go through ``key``, a locally
nameless rendering in which bound variables are replaced by de Bruijn
indices, so alpha-equivalent formulas compare equal and share a hash.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import ClassVar, FrozenSet, Tuple


class Polarity(str, Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    UNPOLARIZED = "unpolarized"


# ---- terms ----

class Term:
    def _key(self, env: Tuple[str, ...]) -> str:
        raise NotImplementedError

    @cached_property
    def key(self) -> str:
        return self._key(())

    @cached_property
    def fv(self) -> FrozenSet[str]:
        raise NotImplementedError

    def __eq__(self, other):
        return isinstance(other, Term) and self.key == other.key

    def __hash__(self):
        return hash(("term", self.key))

    def __lt__(self, other: "Term") -> bool:
        return self.key < other.key

    def __str__(self) -> str:
        return self.key


@dataclass(frozen=True, eq=False)
class Var(Term):
    name: str

    def __post_init__(self):
        if not self.name:
            raise ValueError("variable name must be nonempty")

    def _key(self, env: Tuple[str, ...]) -> str:
        for depth, bound in enumerate(reversed(env)):
            if bound == self.name:
                return f"#{depth}"
        return self.name

    @cached_property
    def fv(self) -> FrozenSet[str]:
        return frozenset({self.name})


@dataclass(frozen=True, eq=False)
class Fun(Term):
    name: str
    args: Tuple[Term, ...] = ()

    def __post_init__(self):
        if not self.name:
            raise ValueError("function name must be nonempty")
        object.__setattr__(self, "args", tuple(self.args))

    def _key(self, env: Tuple[str, ...]) -> str:
        return f"{self.name}({','.join(a._key(env) for a in self.args)})"

    @cached_property
    def fv(self) -> FrozenSet[str]:
        out: FrozenSet[str] = frozenset()
        for a in self.args:
            out |= a.fv
        return out


# ---- formulas ----

class Formula:
    def _key(self, env: Tuple[str, ...]) -> str:
        raise NotImplementedError

    def _scoped_key(self, env: Tuple[str, ...]) -> str:
        if not env or not (self.fv & set(env)):
            return self.key
        return self._key(env)

    @cached_property
    def key(self) -> str:
        return self._key(())

    @cached_property
    def fv(self) -> FrozenSet[str]:
        raise NotImplementedError

    def __eq__(self, other):
        return isinstance(other, Formula) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __lt__(self, other: "Formula") -> bool:
        return self.key < other.key

    def __str__(self) -> str:
        from app.services.render import formula_text

        return formula_text(self)


@dataclass(frozen=True, eq=False)
class Atom(Formula):
    name: str
    terms: Tuple[Term, ...] = ()
    suffix: ClassVar[str] = ""

    def __post_init__(self):
        if not self.name:
            raise ValueError("atom name must be nonempty")
        object.__setattr__(self, "terms", tuple(self.terms))

    def _key(self, env: Tuple[str, ...]) -> str:
        base = f"{self.name}_{self.suffix}"
        if not self.terms:
            return base
        return f"{base}({','.join(t._key(env) for t in self.terms)})"

    @cached_property
    def fv(self) -> FrozenSet[str]:
        out: FrozenSet[str] = frozenset()
        for t in self.terms:
            out |= t.fv
        return out


@dataclass(frozen=True, eq=False)
class AtomI(Atom):
    suffix: ClassVar[str] = "i"


@dataclass(frozen=True, eq=False)
class AtomC(Atom):
    suffix: ClassVar[str] = "c"


@dataclass(frozen=True, eq=False)
class Bottom(Formula):
    def _key(self, env: Tuple[str, ...]) -> str:
        return "bot"

    @cached_property
    def fv(self) -> FrozenSet[str]:
        return frozenset()


@dataclass(frozen=True, eq=False)
class Top(Formula):
    def _key(self, env: Tuple[str, ...]) -> str:
        return "top"

    @cached_property
    def fv(self) -> FrozenSet[str]:
        return frozenset()


@dataclass(frozen=True, eq=False)
class Binary(Formula):
    left: Formula
    right: Formula
    op: ClassVar[str] = ""

    def _key(self, env: Tuple[str, ...]) -> str:
        return f"({self.left._scoped_key(env)} {self.op} {self.right._scoped_key(env)})"

    @cached_property
    def fv(self) -> FrozenSet[str]:
        return self.left.fv | self.right.fv


@dataclass(frozen=True, eq=False)
class And(Binary):
    op: ClassVar[str] = "/\\"


@dataclass(frozen=True, eq=False)
class OrI(Binary):
    op: ClassVar[str] = "\\/i"


@dataclass(frozen=True, eq=False)
class OrC(Binary):
    op: ClassVar[str] = "\\/c"


@dataclass(frozen=True, eq=False)
class ImpI(Binary):
    op: ClassVar[str] = "->i"


@dataclass(frozen=True, eq=False)
class ImpC(Binary):
    op: ClassVar[str] = "->c"


@dataclass(frozen=True, eq=False)
class Unary(Formula):
    body: Formula
    op: ClassVar[str] = ""

    def _key(self, env: Tuple[str, ...]) -> str:
        return f"{self.op}({self.body._scoped_key(env)})"

    @cached_property
    def fv(self) -> FrozenSet[str]:
        return self.body.fv


@dataclass(frozen=True, eq=False)
class Neg(Unary):
    op: ClassVar[str] = "~"


@dataclass(frozen=True, eq=False)
class Box(Unary):
    op: ClassVar[str] = "box"


@dataclass(frozen=True, eq=False)
class DiaI(Unary):
    op: ClassVar[str] = "diai"


@dataclass(frozen=True, eq=False)
class DiaC(Unary):
    op: ClassVar[str] = "diac"


@dataclass(frozen=True, eq=False)
class Quant(Formula):
    var: str
    body: Formula
    op: ClassVar[str] = ""

    def _key(self, env: Tuple[str, ...]) -> str:
        return f"{self.op}.({self.body._key(env + (self.var,))})"

    @cached_property
    def fv(self) -> FrozenSet[str]:
        return self.body.fv - {self.var}


@dataclass(frozen=True, eq=False)
class ForAll(Quant):
    op: ClassVar[str] = "forall"


@dataclass(frozen=True, eq=False)
class ExistsI(Quant):
    op: ClassVar[str] = "existsi"


@dataclass(frozen=True, eq=False)
class ExistsC(Quant):
    op: ClassVar[str] = "existsc"


BOT = Bottom()
TOP = Top()

BINARY_TYPES = (And, OrI, OrC, ImpI, ImpC)
MODAL_TYPES = (Box, DiaI, DiaC)
QUANT_TYPES = (ForAll, ExistsI, ExistsC)
