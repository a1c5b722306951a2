# app/schemas/sequent.py
"""
Sequent shapes for the four calculi.

Contexts are frozensets: contraction is built into the representation, and
two sequents are equal iff they have the same sets in every slot.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import FrozenSet, Iterable, Iterator, List, Optional, Tuple

from app.schemas.formula import BOT, Bottom, Formula, Polarity


def fset(items: Iterable) -> frozenset:
    return frozenset(items)


def ordered(items: Iterable) -> List:
    return sorted(items, key=lambda f: f.key)


@dataclass(frozen=True)
class LESequent:
    left: FrozenSet[Formula]
    right: Formula

    def __post_init__(self):
        object.__setattr__(self, "left", frozenset(self.left))

    def formulas(self) -> Iterator[Formula]:
        yield from self.left
        yield self.right

    def __str__(self) -> str:
        from app.services.render import sequent_text

        return sequent_text(self)


@dataclass(frozen=True)
class StoupSequent:
    left: FrozenSet[Formula]
    right: FrozenSet[Formula]
    stoup: Optional[Formula] = None

    def __post_init__(self):
        object.__setattr__(self, "left", frozenset(self.left))
        object.__setattr__(self, "right", frozenset(self.right))

    def formulas(self) -> Iterator[Formula]:
        yield from self.left
        yield from self.right
        if self.stoup is not None:
            yield self.stoup

    def __str__(self) -> str:
        from app.services.render import sequent_text

        return sequent_text(self)


# ---- labeled ----

@dataclass(frozen=True)
class RelAtom:
    """xRy. Relational atoms sit on the left only and carry no polarity."""

    src: str
    dst: str

    @property
    def polarity(self) -> Polarity:
        return Polarity.UNPOLARIZED

    @property
    def key(self) -> str:
        return f"R({self.src},{self.dst})"


@dataclass(frozen=True)
class Labeled:
    label: str
    formula: Formula

    def __post_init__(self):
        if not self.label:
            raise ValueError("label must be nonempty")

    @cached_property
    def key(self) -> str:
        return f"{self.label}:{self.formula.key}"


@dataclass(frozen=True)
class LabeledSequent:
    relations: FrozenSet[RelAtom]
    left: FrozenSet[Labeled]
    right: FrozenSet[Labeled]
    stoup: Optional[Labeled] = None

    def __post_init__(self):
        object.__setattr__(self, "relations", frozenset(self.relations))
        object.__setattr__(self, "left", frozenset(self.left))
        object.__setattr__(self, "right", frozenset(self.right))

    def labels(self) -> FrozenSet[str]:
        out = set()
        for r in self.relations:
            out |= {r.src, r.dst}
        for lf in self.left | self.right:
            out.add(lf.label)
        if self.stoup is not None:
            out.add(self.stoup.label)
        return frozenset(out)

    def formulas(self) -> Iterator[Formula]:
        for lf in self.left | self.right:
            yield lf.formula
        if self.stoup is not None:
            yield self.stoup.formula

    def __str__(self) -> str:
        from app.services.render import sequent_text

        return sequent_text(self)


# ---- nested ----

@dataclass(frozen=True)
class Node:
    """
    One node of a nested sequent: left inputs (+), right inputs (-), at most
    one output (!) and bracketed children. Children are kept in canonical
    order so that equality ignores sibling order.
    """

    left: FrozenSet[Formula] = frozenset()
    right: FrozenSet[Formula] = frozenset()
    output: Optional[Formula] = None
    children: Tuple["Node", ...] = ()
    key: str = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "left", frozenset(self.left))
        object.__setattr__(self, "right", frozenset(self.right))
        kids = tuple(sorted(self.children, key=lambda n: n.key))
        object.__setattr__(self, "children", kids)
        parts = [",".join("+" + f.key for f in ordered(self.left)), ",".join("-" + f.key for f in ordered(self.right))]
        if self.output is not None:
            parts.append("!" + self.output.key)
        parts.append("".join(f"[{c.key}]" for c in kids))
        object.__setattr__(self, "key", ";".join(parts))

    def __hash__(self):
        return hash(self.key)

    def __eq__(self, other):
        return isinstance(other, Node) and self.key == other.key

    def is_empty(self) -> bool:
        return not (self.left or self.right or self.output is not None or self.children)

    def walk(self, path: Tuple[int, ...] = ()) -> Iterator[Tuple[Tuple[int, ...], "Node"]]:
        yield path, self
        for i, c in enumerate(self.children):
            yield from c.walk(path + (i,))

    def at(self, path: Tuple[int, ...]) -> "Node":
        node = self
        for i in path:
            if i >= len(node.children):
                raise IndexError(f"no node at path {path}")
            node = node.children[i]
        return node

    def output_path(self) -> Optional[Tuple[int, ...]]:
        for path, node in self.walk():
            if node.output is not None:
                return path
        return None

    def outputs(self) -> int:
        return sum(1 for _, n in self.walk() if n.output is not None)

    def is_full(self) -> bool:
        return self.outputs() == 1

    def has_empty_output(self) -> bool:
        """True when the output slot holds the empty stoup (bot)."""
        return isinstance(self.output, Bottom)

    def formulas(self) -> Iterator[Formula]:
        for _, node in self.walk():
            yield from node.left
            yield from node.right
            if node.output is not None:
                yield node.output

    def depth(self) -> int:
        return 1 + max((c.depth() for c in self.children), default=0)

    def __str__(self) -> str:
        from app.services.render import sequent_text

        return sequent_text(self)


NestedSequent = Node


def replace_at(root: Node, path: Tuple[int, ...], new: Node) -> Node:
    if not path:
        return new
    kids = list(root.children)
    kids[path[0]] = replace_at(kids[path[0]], path[1:], new)
    return Node(root.left, root.right, root.output, tuple(kids))


def canonical_nested(root: Node) -> Node:
    """Move an empty-stoup output (bot) found anywhere to the root."""
    def strip(node: Node) -> Node:
        out = None if isinstance(node.output, Bottom) else node.output
        return Node(node.left, node.right, out, tuple(strip(c) for c in node.children))

    if not any(isinstance(n.output, Bottom) for _, n in root.walk()):
        return root
    stripped = strip(root)
    return Node(stripped.left, stripped.right, BOT, stripped.children)
