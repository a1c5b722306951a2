# app/services/nek.py
"""
The nested ecumenical modal calculus nEK, its pure fragments and the
t/b/4/5 extensions.

A sequent is a tree of ``Node``s. Rule instances address the node of the
principal formula with ``path`` and, for rules that touch a second node,
that node with ``target``. Every sequent handled here is full: a tree
without an output formula is read with the empty output ◦⊥, which always
sits at the root.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, FrozenSet, Iterable, Iterator, List, Optional, Set, Tuple

from app.schemas.errors import MergeError, ModeError, RuleError
from app.schemas.formula import (
    BOT,
    TOP,
    And,
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
from app.schemas.proof import CheckOptions, FragmentMode, RuleInstance, SearchBudget, SearchResult, SearchStatus
from app.schemas.sequent import Labeled, LabeledSequent, Node, RelAtom, canonical_nested, ordered
from app.services import kernel
from app.services.formula import is_negative, is_positive, subformulas
from app.services.labek import fresh_label
from app.services.search import Expansion, ProofProblem, prove_with
from app.utils.logging import get_logger

logger = get_logger(__name__)

NAME = "nek"

Path = Tuple[int, ...]


def as_full(s: Node) -> Node:
    """Normal form: ◦⊥ at the root, added when the tree has no output."""
    s = canonical_nested(s)
    if s.outputs() == 0:
        s = Node(s.left, s.right, BOT, s.children)
    return s


class _Draft:
    """Mutable copy of a tree; child indices match the source Node."""

    __slots__ = ("left", "right", "out", "kids")

    def __init__(self, node: Node):
        self.left: Set[Formula] = set(node.left)
        self.right: Set[Formula] = set(node.right)
        self.out: Optional[Formula] = node.output
        self.kids: List["_Draft"] = [_Draft(c) for c in node.children]

    def at(self, path: Path) -> "_Draft":
        d = self
        for i in path:
            d = d.kids[i]
        return d

    def strip(self) -> "_Draft":
        self.out = None
        for k in self.kids:
            k.strip()
        return self

    def output(self, path: Path, f: Formula) -> "_Draft":
        self.strip()
        if isinstance(f, Bottom):
            self.out = BOT
        else:
            self.at(path).out = f
        return self

    def grow(self, path: Path, child: Node) -> "_Draft":
        self.at(path).kids.append(_Draft(child))
        return self

    def freeze(self) -> Node:
        return Node(frozenset(self.left), frozenset(self.right), self.out, tuple(k.freeze() for k in self.kids))


def _draft(s: Node) -> _Draft:
    return _Draft(s)


def _done(d: _Draft) -> Node:
    return as_full(d.freeze())


def _take(items: Set[Formula], f: Formula, rule: RuleInstance) -> None:
    if not rule.keep:
        items.discard(f)


# ---- positions ----

def _node(s: Node, path: Path, rule: RuleInstance) -> Node:
    try:
        return s.at(path)
    except IndexError:
        raise RuleError(f"{rule.rule}: no node at path {'.'.join(map(str, path)) or 'root'}") from None


def _principal(rule: RuleInstance, kind) -> Formula:
    f = rule.principal
    if not isinstance(f, kind):
        raise RuleError(f"{rule.rule} needs a principal {kind.__name__}")
    return f


def _in_left(s: Node, rule: RuleInstance, kind) -> Tuple[Path, Formula]:
    p = tuple(rule.path)
    f = _principal(rule, kind)
    if f not in _node(s, p, rule).left:
        raise RuleError(f"{rule.rule}: {f} is not a left input at that node")
    return p, f


def _in_right(s: Node, rule: RuleInstance, kind) -> Tuple[Path, Formula]:
    p = tuple(rule.path)
    f = _principal(rule, kind)
    if f not in _node(s, p, rule).right:
        raise RuleError(f"{rule.rule}: {f} is not a right input at that node")
    return p, f


def _in_output(s: Node, rule: RuleInstance, kind) -> Tuple[Path, Formula]:
    p = tuple(rule.path)
    out = _node(s, p, rule).output
    if out is None or isinstance(out, Bottom) or not isinstance(out, kind):
        raise RuleError(f"{rule.rule} needs an output {kind.__name__} at that node")
    return p, out


def _empty_output(s: Node, rule: RuleInstance) -> None:
    if not isinstance(s.output, Bottom):
        raise RuleError(f"{rule.rule} needs the empty output")


def _child(s: Node, rule: RuleInstance, p: Path) -> Path:
    t = rule.target
    if t is None or len(t) != len(p) + 1 or tuple(t[:-1]) != p:
        raise RuleError(f"{rule.rule} needs a target bracket directly below the principal")
    _node(s, tuple(t), rule)
    return tuple(t)


def _parent(rule: RuleInstance, p: Path) -> Path:
    if not p:
        raise RuleError(f"{rule.rule} needs its principal inside a bracket")
    return p[:-1]


def _elsewhere(s: Node, rule: RuleInstance, p: Path) -> Path:
    """Any other node, the root included; the principal sits in a bracket."""
    if not p:
        raise RuleError(f"{rule.rule} needs its principal inside a bracket")
    t = rule.target
    if t is None or tuple(t) == p:
        raise RuleError(f"{rule.rule} needs a distinct target node")
    _node(s, tuple(t), rule)
    return tuple(t)


# ---- rules ----

def _bot_l(rule, s, o):
    _in_left(s, rule, Bottom)
    return []


def _init(rule, s, o):
    p = tuple(rule.path)
    node = _node(s, p, rule)
    f = rule.principal
    if isinstance(f, AtomI) and node.output == f and f in node.left:
        return []
    if isinstance(f, AtomC) and f in node.left and f in node.right:
        return []
    raise RuleError("init needs p_i as left input and output, or p_c as left and right input")


def _ginit(rule, s, o):
    p = tuple(rule.path)
    node = _node(s, p, rule)
    f = rule.principal
    if not isinstance(f, Formula) or node.output != f or f not in node.left:
        raise RuleError("ginit needs the output formula as a left input at its node")
    return []


def _gcinit(rule, s, o):
    _empty_output(s, rule)
    p = tuple(rule.path)
    node = _node(s, p, rule)
    f = rule.principal
    if not isinstance(f, Formula) or f not in node.left or f not in node.right:
        raise RuleError("gcinit needs the formula as left and right input at one node")
    return []


def _and_l(rule, s, o):
    p, f = _in_left(s, rule, And)
    d = _draft(s)
    n = d.at(p)
    _take(n.left, f, rule)
    n.left |= {f.left, f.right}
    return [_done(d)]


def _and_r(rule, s, o):
    p, c = _in_output(s, rule, And)
    return [_done(_draft(s).output(p, c.left)), _done(_draft(s).output(p, c.right))]


def _or_i_l(rule, s, o):
    p, f = _in_left(s, rule, OrI)
    out = []
    for part in (f.left, f.right):
        d = _draft(s)
        _take(d.at(p).left, f, rule)
        d.at(p).left.add(part)
        out.append(_done(d))
    return out


def _or_i_r(rule, s, o):
    p, c = _in_output(s, rule, OrI)
    if rule.index not in (1, 2):
        raise RuleError("oriR needs index 1 or 2")
    return [_done(_draft(s).output(p, c.left if rule.index == 1 else c.right))]


def _imp_i_l(rule, s, o):
    p, f = _in_left(s, rule, ImpI)
    d2 = _draft(s)
    _take(d2.at(p).left, f, rule)
    d2.at(p).left.add(f.right)
    return [_done(_draft(s).output(p, f.left)), _done(d2)]


def _imp_i_r(rule, s, o):
    p, c = _in_output(s, rule, ImpI)
    d = _draft(s)
    d.at(p).left.add(c.left)
    return [_done(d.output(p, c.right))]


def _neg_l(rule, s, o):
    p, f = _in_left(s, rule, Neg)
    _empty_output(s, rule)
    return [_done(_draft(s).output(p, f.body))]


def _neg_r(rule, s, o):
    p, f = _in_right(s, rule, Neg)
    _empty_output(s, rule)
    d = _draft(s)
    _take(d.at(p).right, f, rule)
    d.at(p).left.add(f.body)
    return [_done(d)]


def _imp_c_l(rule, s, o):
    p, f = _in_left(s, rule, ImpC)
    _empty_output(s, rule)
    d2 = _draft(s)
    _take(d2.at(p).left, f, rule)
    d2.at(p).left.add(f.right)
    return [_done(_draft(s).output(p, f.left)), _done(d2)]


def _imp_c_r(rule, s, o):
    p, f = _in_right(s, rule, ImpC)
    _empty_output(s, rule)
    d = _draft(s)
    n = d.at(p)
    _take(n.right, f, rule)
    n.left.add(f.left)
    n.right.add(f.right)
    return [_done(d)]


def _or_c_l(rule, s, o):
    p, f = _in_left(s, rule, OrC)
    _empty_output(s, rule)
    out = []
    for part in (f.left, f.right):
        d = _draft(s)
        _take(d.at(p).left, f, rule)
        d.at(p).left.add(part)
        out.append(_done(d))
    return out


def _or_c_r(rule, s, o):
    p, f = _in_right(s, rule, OrC)
    _empty_output(s, rule)
    d = _draft(s)
    _take(d.at(p).right, f, rule)
    d.at(p).right |= {f.left, f.right}
    return [_done(d)]


def _l_c(rule, s, o):
    p, f = _in_left(s, rule, AtomC)
    _empty_output(s, rule)
    d = _draft(s)
    _take(d.at(p).left, f, rule)
    d.at(p).left.add(AtomI(f.name, f.terms))
    return [_done(d)]


def _r_c(rule, s, o):
    p, f = _in_right(s, rule, AtomC)
    _empty_output(s, rule)
    d = _draft(s)
    _take(d.at(p).right, f, rule)
    d.at(p).right.add(AtomI(f.name, f.terms))
    return [_done(d)]


def _box_l(rule, s, o):
    p, f = _in_left(s, rule, Box)
    t = _child(s, rule, p)
    d = _draft(s)
    d.at(t).left.add(f.body)
    return [_done(d)]


def _box_r(rule, s, o):
    p, c = _in_output(s, rule, Box)
    d = _draft(s).strip()
    return [_done(d.grow(p, Node(output=c.body)))]


def _dia_i_l(rule, s, o):
    p, f = _in_left(s, rule, DiaI)
    d = _draft(s)
    _take(d.at(p).left, f, rule)
    return [_done(d.grow(p, Node(left=frozenset({f.body}))))]


def _dia_i_r(rule, s, o):
    p, c = _in_output(s, rule, DiaI)
    t = _child(s, rule, p)
    return [_done(_draft(s).output(t, c.body))]


def _dia_c_l(rule, s, o):
    p, f = _in_left(s, rule, DiaC)
    _empty_output(s, rule)
    d = _draft(s)
    _take(d.at(p).left, f, rule)
    return [_done(d.grow(p, Node(left=frozenset({f.body}))))]


def _dia_c_r(rule, s, o):
    p, f = _in_right(s, rule, DiaC)
    _empty_output(s, rule)
    t = _child(s, rule, p)
    d = _draft(s)
    d.at(t).right.add(f.body)
    return [_done(d)]


def _dereliction(rule, s, o):
    p, f = _in_right(s, rule, Formula)
    _empty_output(s, rule)
    if not is_positive(f):
        raise RuleError("D requires a positive formula")
    return [_done(_draft(s).output(p, f))]


def _store(rule, s, o):
    p, c = _in_output(s, rule, Formula)
    if not is_negative(c):
        raise RuleError("store requires a negative formula")
    d = _draft(s).strip()
    d.at(p).right.add(c)
    d.out = BOT
    return [_done(d)]


def _weaken(rule, s, o):
    if isinstance(s.output, Bottom):
        raise RuleError("W needs an output formula")
    d = _draft(s).strip()
    d.out = BOT
    return [_done(d)]


def _cut_formula(rule: RuleInstance) -> Formula:
    a = rule.cut
    if not isinstance(a, Formula):
        raise RuleError(f"{rule.rule} needs a cut formula")
    return a


def _icut(rule, s, o):
    a = _cut_formula(rule)
    if not is_positive(a):
        raise RuleError("icut needs a positive cut formula")
    p = tuple(rule.path)
    _node(s, p, rule)
    d2 = _draft(s)
    d2.at(p).left.add(a)
    return [_done(_draft(s).output(p, a)), _done(d2)]


def _ccut(rule, s, o):
    a = _cut_formula(rule)
    if not is_negative(a):
        raise RuleError("ccut needs a negative cut formula")
    p = tuple(rule.path)
    _node(s, p, rule)
    d1 = _draft(s)
    residue = rule.residue
    if residue is None:
        d1.strip().out = BOT
    else:
        t = tuple(rule.target) if rule.target is not None else p
        if not isinstance(residue, Formula) or not is_positive(residue) or residue not in _node(s, t, rule).right:
            raise RuleError("ccut residue must be a positive right input at its node")
        d1.output(t, residue)
    d1.at(p).right.add(a)
    d2 = _draft(s)
    d2.at(p).left.add(a)
    return [_done(d1), _done(d2)]


# ---- extensions ----

def _t_left(rule, s, o):
    p, f = _in_left(s, rule, Box)
    d = _draft(s)
    d.at(p).left.add(f.body)
    return [_done(d)]


def _t_out(rule, s, o):
    p, c = _in_output(s, rule, DiaI)
    return [_done(_draft(s).output(p, c.body))]


def _t_right(rule, s, o):
    p, f = _in_right(s, rule, DiaC)
    _empty_output(s, rule)
    d = _draft(s)
    _take(d.at(p).right, f, rule)
    d.at(p).right.add(f.body)
    return [_done(d)]


def _b_left(rule, s, o):
    p, f = _in_left(s, rule, Box)
    q = _parent(rule, p)
    d = _draft(s)
    d.at(q).left.add(f.body)
    return [_done(d)]


def _b_out(rule, s, o):
    p, c = _in_output(s, rule, DiaI)
    return [_done(_draft(s).output(_parent(rule, p), c.body))]


def _b_right(rule, s, o):
    p, f = _in_right(s, rule, DiaC)
    _empty_output(s, rule)
    q = _parent(rule, p)
    d = _draft(s)
    _take(d.at(p).right, f, rule)
    d.at(q).right.add(f.body)
    return [_done(d)]


def _four_left(rule, s, o):
    p, f = _in_left(s, rule, Box)
    t = _child(s, rule, p)
    d = _draft(s)
    d.at(t).left.add(f)
    return [_done(d)]


def _four_out(rule, s, o):
    p, c = _in_output(s, rule, DiaI)
    return [_done(_draft(s).output(_child(s, rule, p), c))]


def _four_right(rule, s, o):
    p, f = _in_right(s, rule, DiaC)
    _empty_output(s, rule)
    t = _child(s, rule, p)
    d = _draft(s)
    _take(d.at(p).right, f, rule)
    d.at(t).right.add(f)
    return [_done(d)]


def _four_right_printed(rule, s, o):
    if o is None or not o.printed_a4:
        raise RuleError("4_right_printed needs the printed-a4 option")
    p, f = _in_right(s, rule, DiaC)
    _empty_output(s, rule)
    t = _child(s, rule, p)
    d = _draft(s)
    _take(d.at(p).right, f, rule)
    return [_done(d.output(t, DiaI(f.body)))]


def _five_left(rule, s, o):
    p, f = _in_left(s, rule, Box)
    t = _elsewhere(s, rule, p)
    d = _draft(s)
    d.at(t).left.add(f)
    return [_done(d)]


def _five_out(rule, s, o):
    p, c = _in_output(s, rule, DiaI)
    return [_done(_draft(s).output(_elsewhere(s, rule, p), c))]


def _five_right(rule, s, o):
    p, f = _in_right(s, rule, DiaC)
    _empty_output(s, rule)
    t = _elsewhere(s, rule, p)
    d = _draft(s)
    _take(d.at(p).right, f, rule)
    d.at(t).right.add(f)
    return [_done(d)]


Rule = Callable[[RuleInstance, Node, Optional[CheckOptions]], List[Node]]

RULES: Dict[str, Rule] = {
    "init": _init,
    "ginit": _ginit,
    "gcinit": _gcinit,
    "botL": _bot_l,
    "andL": _and_l,
    "andR": _and_r,
    "oriL": _or_i_l,
    "oriR": _or_i_r,
    "impiL": _imp_i_l,
    "impiR": _imp_i_r,
    "negL": _neg_l,
    "negR": _neg_r,
    "impcL": _imp_c_l,
    "impcR": _imp_c_r,
    "orcL": _or_c_l,
    "orcR": _or_c_r,
    "Lc": _l_c,
    "Rc": _r_c,
    "boxL": _box_l,
    "boxR": _box_r,
    "diaiL": _dia_i_l,
    "diaiR": _dia_i_r,
    "cdiaL": _dia_c_l,
    "cdiaR": _dia_c_r,
    "D": _dereliction,
    "store": _store,
    "W": _weaken,
    "icut": _icut,
    "ccut": _ccut,
    "t_left": _t_left,
    "t_out": _t_out,
    "t_right": _t_right,
    "b_left": _b_left,
    "b_out": _b_out,
    "b_right": _b_right,
    "4_left": _four_left,
    "4_out": _four_out,
    "4_right": _four_right,
    "4_right_printed": _four_right_printed,
    "5_left": _five_left,
    "5_out": _five_out,
    "5_right": _five_right,
}

EXTENSION_OF: Dict[str, str] = {name: name[0] for name in RULES if name[0] in "tb45" and "_" in name}

_INT_CORE = {"init", "botL", "andL", "andR", "oriL", "oriR", "impiL", "impiR", "boxL", "boxR", "diaiL", "diaiR"}
_CLS_CORE = {"init", "botL", "andL", "andR", "orcL", "orcR", "impcL", "impcR", "boxL", "boxR", "cdiaL", "cdiaR", "D", "store"}

FRAGMENT_RULES: Dict[FragmentMode, FrozenSet[str]] = {
    FragmentMode.INTUITIONISTIC: frozenset(_INT_CORE | {n for n in EXTENSION_OF if n.endswith(("_left", "_out"))}),
    FragmentMode.CLASSICAL: frozenset(_CLS_CORE | {n for n in EXTENSION_OF if n.endswith(("_left", "_right"))}),
    FragmentMode.FULL: frozenset(RULES),
}


def nek_premises(rule: RuleInstance, s: Node, options: Optional[CheckOptions] = None) -> List[Node]:
    options = options or CheckOptions(allow_cuts=True)
    fn = RULES.get(rule.rule)
    if fn is None:
        raise RuleError(f"unknown nEK rule {rule.rule!r}")
    ext = EXTENSION_OF.get(rule.rule)
    if ext and ext not in options.extensions:
        raise RuleError(f"{rule.rule} needs the {ext} extension")
    if rule.rule not in FRAGMENT_RULES[options.fragment]:
        raise RuleError(f"{rule.rule} is not a rule of the {options.fragment.value} fragment")
    premises = fn(rule, as_full(s), options)
    for p in premises:
        if p.outputs() != 1:
            raise RuleError(f"{rule.rule} produced a premise with {p.outputs()} outputs")
    return premises


# ---- fragments ----

_INT_TYPES = (AtomI, Bottom, And, OrI, ImpI, Box, DiaI)
_CLS_TYPES = (AtomC, Bottom, And, OrC, ImpC, Box, DiaC)


def nek_fragment_of(f: Formula) -> str:
    """'int', 'cls', 'both' (only ⊥, ∧ and □) or 'neither'."""
    parts = list(subformulas(f))
    is_int = all(isinstance(g, _INT_TYPES) for g in parts)
    is_cls = all(isinstance(g, _CLS_TYPES) for g in parts)
    if is_int and is_cls:
        return "both"
    if is_int:
        return "int"
    if is_cls:
        return "cls"
    return "neither"


def _fits(f: Formula, mode: FragmentMode) -> bool:
    kind = nek_fragment_of(f)
    if mode is FragmentMode.INTUITIONISTIC:
        return kind in ("int", "both")
    if mode is FragmentMode.CLASSICAL:
        return kind in ("cls", "both")
    return True


class NEKCalculus:
    name = NAME

    def normalize(self, s):
        return as_full(s) if isinstance(s, Node) else s

    def premises(self, rule: RuleInstance, conclusion, options: CheckOptions) -> List[Node]:
        if not isinstance(conclusion, Node):
            raise RuleError("nEK expects nested sequents")
        return nek_premises(rule, conclusion, options)

    def accepts(self, conclusion, options: CheckOptions) -> Optional[str]:
        if not isinstance(conclusion, Node):
            return "nEK expects nested sequents"
        if conclusion.outputs() > 1:
            return "a nested sequent has at most one output formula"
        formulas = list(conclusion.formulas())
        if any(isinstance(g, Quant) for f in formulas for g in subformulas(f)):
            return "nEK formulas are propositional"
        if options.fragment is not FragmentMode.FULL:
            for f in formulas:
                if not isinstance(f, Bottom) and not _fits(f, options.fragment):
                    return f"{f} lies outside the {options.fragment.value} fragment"
        return None


kernel.register(NEKCalculus())


# ---- contexts and merge ----

def _union(a: Node, b: Node) -> Node:
    outs = [x for x in (a.output, b.output) if x is not None]
    if len(outs) > 1:
        raise MergeError("both contexts carry an output formula at the same node")
    return Node(a.left | b.left, a.right | b.right, outs[0] if outs else None, a.children + b.children)


@dataclass(frozen=True)
class Context:
    """
    A nested context with one hole. ``spine`` lists the nodes from the root
    down to the node holding the hole, each without the spine child.
    """

    spine: Tuple[Node, ...]

    @property
    def depth(self) -> int:
        return len(self.spine) - 1

    @classmethod
    def hole(cls, depth: int = 0) -> "Context":
        return cls(tuple(Node() for _ in range(depth + 1)))

    @classmethod
    def split(cls, s: Node, path: Path) -> Tuple["Context", Node]:
        """``s`` as this context around the subtree at ``path``."""
        levels: List[Node] = []
        node = s
        for i in path:
            rest = node.children[:i] + node.children[i + 1:]
            levels.append(Node(node.left, node.right, node.output, rest))
            node = node.children[i]
        levels.append(Node())
        return cls(tuple(levels)), node

    def plug(self, content: Node) -> Node:
        node = _union(self.spine[-1], content)
        for level in reversed(self.spine[:-1]):
            node = Node(level.left, level.right, level.output, level.children + (node,))
        if node.outputs() > 1:
            raise MergeError("plugging would create a second output formula")
        return node


def merge(c1: Context, c2: Context) -> Context:
    if c1.depth != c2.depth:
        raise MergeError(f"cannot merge contexts of depth {c1.depth} and {c2.depth}")
    return Context(tuple(_union(a, b) for a, b in zip(c1.spine, c2.spine)))


# ---- interpretations ----

def _conj(parts: List[Formula]) -> Formula:
    if not parts:
        return TOP
    out = parts[-1]
    for f in reversed(parts[:-1]):
        out = And(f, out)
    return out


def _imp(ctx: Formula, f: Formula) -> Formula:
    return f if isinstance(ctx, Top) else ImpI(ctx, f)


def _input_parts(node: Node, skip: Optional[Node] = None) -> List[Formula]:
    parts: List[Formula] = list(ordered(node.left))
    parts += [Neg(f) for f in ordered(node.right)]
    for c in node.children:
        if c is not skip:
            parts.append(DiaI(fm(c)))
    return parts


def fm(s: Node) -> Formula:
    """The formula a nested sequent stands for."""
    if s.outputs() == 0:
        return _conj(_input_parts(s))
    if s.output is not None:
        return _imp(_conj(_input_parts(s)), s.output)
    full = next(c for c in s.children if c.outputs())
    return _imp(_conj(_input_parts(s, skip=full)), Box(fm(full)))


def nested_to_labeled(s: Node, root: str = "x") -> LabeledSequent:
    """Labels follow the tree: the root gets ``root``, brackets fresh w0, w1, … in order."""
    rels: Set[RelAtom] = set()
    left: Set[Labeled] = set()
    right: Set[Labeled] = set()
    stoup: List[Labeled] = []
    used = {root}

    def go(node: Node, x: str) -> None:
        left.update(Labeled(x, f) for f in node.left)
        right.update(Labeled(x, f) for f in node.right)
        if node.output is not None and not isinstance(node.output, Bottom):
            stoup.append(Labeled(x, node.output))
        for c in node.children:
            y = fresh_label(used)
            used.add(y)
            rels.add(RelAtom(x, y))
            go(c, y)

    go(s, root)
    return LabeledSequent(frozenset(rels), frozenset(left), frozenset(right), stoup[0] if stoup else None)


# ---- k family ----

def _imp_of(kind: str, a: Formula, b: Formula) -> Formula:
    return ImpI(a, b) if kind == "i" else ImpC(a, b)


def _dia_of(kind: str, a: Formula) -> Formula:
    return DiaI(a) if kind == "i" else DiaC(a)


_A, _B = AtomI("a"), AtomI("b")


def k_axiom_variant(alpha: str, beta: str, gamma: str, a: Formula = _A, b: Formula = _B) -> Formula:
    """□(A →α B) →β (□A →γ □B)."""
    return _imp_of(beta, Box(_imp_of(alpha, a, b)), _imp_of(gamma, Box(a), Box(b)))


def k1_variant(alpha: str = "i", beta: str = "i", gamma: str = "i", dia: str = "i", a: Formula = _A, b: Formula = _B) -> Formula:
    """□(A →α B) →β (◇A →γ ◇B)."""
    return _imp_of(beta, Box(_imp_of(alpha, a, b)), _imp_of(gamma, _dia_of(dia, a), _dia_of(dia, b)))


def k2_variant(dia: str = "i", disj: str = "i", imp: str = "i", a: Formula = _A, b: Formula = _B) -> Formula:
    """◇(A ∨ B) → (◇A ∨ ◇B)."""
    join = OrI if disj == "i" else OrC
    return _imp_of(imp, _dia_of(dia, join(a, b)), join(_dia_of(dia, a), _dia_of(dia, b)))


def k3_variant(alpha: str = "i", beta: str = "i", gamma: str = "i", delta: str = "i", a: Formula = _A, b: Formula = _B) -> Formula:
    """(◇α A →β □B) →γ □(A →δ B)."""
    return _imp_of(gamma, _imp_of(beta, _dia_of(alpha, a), Box(b)), Box(_imp_of(delta, a, b)))


def k4_variant(dia: str = "i", imp: str = "i") -> Formula:
    """◇⊥ → ⊥."""
    return _imp_of(imp, _dia_of(dia, BOT), BOT)


# ---- search ----

def _nodes(s: Node) -> int:
    return sum(1 for _ in s.walk())


def _size(s: Node) -> int:
    return sum(len(n.left) + len(n.right) for _, n in s.walk())


def _within(small: Node, big: Node) -> bool:
    """Every input of ``small`` sits at the matching place in ``big``."""
    return (
        small.left <= big.left
        and small.right <= big.right
        and all(any(_within(c, d) for d in big.children) for c in small.children)
    )


def absorbed(s: Node) -> Node:
    """
    Drop every input-only bracket that fits inside an input-only sibling.
    Weakening and bracket contraction are admissible, so the result is
    provable exactly when ``s`` is.
    """
    kids = sorted((absorbed(c) for c in s.children), key=lambda c: (-_size(c), c.key))
    kept: List[Node] = []
    for c in kids:
        if c.outputs() == 0 and any(d.outputs() == 0 and _within(c, d) for d in kept):
            continue
        kept.append(c)
    if tuple(sorted(kept, key=lambda c: c.key)) == s.children:
        return s
    return Node(s.left, s.right, s.output, tuple(kept))


class NEKProblem(ProofProblem):
    """
    Backward search over nested sequents. Totally invertible rules and the
    guarded copy rules (□ into a bracket, ◇c into a bracket) are eager;
    rules that open a bracket count against ``max_labels`` nodes. In the
    classical fragment the eager rules run in two phases, ∧/□/store first
    and the remaining classical rules once the output is ◦⊥, leaving only
    D and the left classical implication to choose.
    """

    def __init__(self, root: Node, budget: SearchBudget, options: CheckOptions):
        self.budget = budget
        self.options = options
        self.rules = FRAGMENT_RULES[options.fragment]
        self.extensions = options.extensions
        self.pure = options.fragment is not FragmentMode.FULL
        self.complete = True

    def _ok(self, name: str) -> bool:
        ext = EXTENSION_OF.get(name)
        return name in self.rules and (ext is None or ext in self.extensions) and name != "4_right_printed"

    def _apply(self, s: Node, rule: RuleInstance) -> Expansion:
        return Expansion(rule, tuple(nek_premises(rule, s, self.options)))

    def key(self, s: Node) -> Node:
        return absorbed(s)

    def _opening(self, s: Node, rule: RuleInstance) -> Optional[Expansion]:
        if _nodes(absorbed(s)) >= self.budget.max_labels:
            self.complete = False
            return None
        return self._apply(s, rule)

    def closing(self, s: Node) -> Optional[RuleInstance]:
        empty = isinstance(s.output, Bottom)
        for p, node in s.walk():
            if BOT in node.left:
                return RuleInstance("botL", side="L", principal=BOT, path=p)
        for p, node in s.walk():
            if self.pure:
                for f in ordered(node.left):
                    if isinstance(f, AtomI) and node.output == f:
                        return RuleInstance("init", side="S", principal=f, path=p)
                    if isinstance(f, AtomC) and f in node.right:
                        return RuleInstance("init", side="R", principal=f, path=p)
                continue
            if node.output is not None and node.output in node.left:
                return RuleInstance("ginit", side="S", principal=node.output, path=p)
            if empty:
                both = node.left & node.right
                if both:
                    return RuleInstance("gcinit", side="R", principal=ordered(both)[0], path=p)
        return None

    def _copies(self, s: Node, empty: bool) -> Optional[Expansion]:
        for p, node in s.walk():
            for i, child in enumerate(node.children):
                t = p + (i,)
                for f in ordered(node.left):
                    if isinstance(f, Box) and f.body not in child.left and self._ok("boxL"):
                        return self._apply(s, RuleInstance("boxL", side="L", principal=f, path=p, target=t))
                if empty:
                    for f in ordered(node.right):
                        if isinstance(f, DiaC) and f.body not in child.right and self._ok("cdiaR"):
                            return self._apply(s, RuleInstance("cdiaR", side="R", principal=f, path=p, target=t))
        return None

    def eager(self, s: Node) -> Optional[Expansion]:
        empty = isinstance(s.output, Bottom)
        # ∧, □, store
        for p, node in s.walk():
            for f in ordered(node.left):
                if isinstance(f, And) and self._ok("andL"):
                    return self._apply(s, RuleInstance("andL", side="L", principal=f, path=p))
                if isinstance(f, OrI) and self._ok("oriL"):
                    return self._apply(s, RuleInstance("oriL", side="L", principal=f, path=p))
        if not empty:
            q = s.output_path()
            c = s.at(q).output
            if is_negative(c) and self._ok("store"):
                return self._apply(s, RuleInstance("store", side="S", principal=c, path=q))
            match c:
                case And() if self._ok("andR"):
                    return self._apply(s, RuleInstance("andR", side="S", principal=c, path=q))
                case ImpI() if self._ok("impiR"):
                    return self._apply(s, RuleInstance("impiR", side="S", principal=c, path=q))
                case Box() if self._ok("boxR"):
                    exp = self._opening(s, RuleInstance("boxR", side="S", principal=c, path=q))
                    if exp is not None:
                        return exp
        exp = self._copies(s, empty)
        if exp is not None:
            return exp
        for p, node in s.walk():
            for f in ordered(node.left):
                if isinstance(f, DiaI) and self._ok("diaiL"):
                    exp = self._opening(s, RuleInstance("diaiL", side="L", principal=f, path=p))
                    if exp is not None:
                        return exp
        if not empty:
            return None
        # remaining classical rules under ◦⊥
        for p, node in s.walk():
            for f in ordered(node.left):
                name = {OrC: "orcL", AtomC: "Lc"}.get(type(f))
                if name and self._ok(name):
                    return self._apply(s, RuleInstance(name, side="L", principal=f, path=p))
            for f in ordered(node.right):
                name = {OrC: "orcR", ImpC: "impcR", Neg: "negR", AtomC: "Rc"}.get(type(f))
                if name and self._ok(name):
                    return self._apply(s, RuleInstance(name, side="R", principal=f, path=p))
        for p, node in s.walk():
            for f in ordered(node.left):
                if isinstance(f, DiaC) and self._ok("cdiaL"):
                    exp = self._opening(s, RuleInstance("cdiaL", side="L", principal=f, path=p))
                    if exp is not None:
                        return exp
        return None

    def _extension_choices(self, s: Node, empty: bool) -> Iterator[RuleInstance]:
        walk = list(s.walk())
        for p, node in walk:
            kids = [p + (i,) for i in range(len(node.children))]
            others = [q for q, _ in walk if q != p]
            parent = s.at(p[:-1]) if p else None
            for f in ordered(node.left):
                if not isinstance(f, Box):
                    continue
                if f.body not in node.left:
                    yield RuleInstance("t_left", side="L", principal=f, path=p)
                if parent is not None and f.body not in parent.left:
                    yield RuleInstance("b_left", side="L", principal=f, path=p)
                for t in kids:
                    if f not in s.at(t).left:
                        yield RuleInstance("4_left", side="L", principal=f, path=p, target=t)
                if p:
                    for t in others:
                        if f not in s.at(t).left:
                            yield RuleInstance("5_left", side="L", principal=f, path=p, target=t)
            out = node.output
            if isinstance(out, DiaI):
                yield RuleInstance("t_out", side="S", principal=out, path=p)
                if p:
                    yield RuleInstance("b_out", side="S", principal=out, path=p)
                    for t in others:
                        yield RuleInstance("5_out", side="S", principal=out, path=p, target=t)
                for t in kids:
                    yield RuleInstance("4_out", side="S", principal=out, path=p, target=t)
            if not empty:
                continue
            for f in ordered(node.right):
                if not isinstance(f, DiaC):
                    continue
                if f.body not in node.right:
                    yield RuleInstance("t_right", side="R", principal=f, path=p)
                if p:
                    yield RuleInstance("b_right", side="R", principal=f, path=p)
                    for t in others:
                        yield RuleInstance("5_right", side="R", principal=f, path=p, target=t)
                for t in kids:
                    yield RuleInstance("4_right", side="R", principal=f, path=p, target=t)

    def choices(self, s: Node) -> Iterator[Expansion]:
        empty = isinstance(s.output, Bottom)
        if empty:
            for p, node in s.walk():
                for f in ordered(node.right):
                    if is_positive(f) and self._ok("D"):
                        yield self._apply(s, RuleInstance("D", side="R", principal=f, path=p))
        else:
            q = s.output_path()
            c = s.at(q).output
            match c:
                case OrI() if self._ok("oriR"):
                    yield self._apply(s, RuleInstance("oriR", side="S", principal=c, path=q, index=1))
                    yield self._apply(s, RuleInstance("oriR", side="S", principal=c, path=q, index=2))
                case DiaI() if self._ok("diaiR"):
                    for i in range(len(s.at(q).children)):
                        yield self._apply(s, RuleInstance("diaiR", side="S", principal=c, path=q, target=q + (i,)))
        for p, node in s.walk():
            for f in ordered(node.left):
                match f:
                    case Neg() if empty and self._ok("negL"):
                        yield self._apply(s, RuleInstance("negL", side="L", principal=f, path=p))
                    case ImpC() if empty and self._ok("impcL"):
                        yield self._apply(s, RuleInstance("impcL", side="L", principal=f, path=p))
                    case ImpI() if self._ok("impiL"):
                        yield self._apply(s, RuleInstance("impiL", side="L", principal=f, path=p))
        for rule in self._extension_choices(s, empty):
            if self._ok(rule.rule):
                yield self._apply(s, rule)
        if not empty and self._ok("W"):
            yield self._apply(s, RuleInstance("W", side="S", principal=s.at(s.output_path()).output))


def nek_prove(
    s: Node,
    extensions: Iterable[str] = (),
    fragment: FragmentMode = FragmentMode.FULL,
    budget: Optional[SearchBudget] = None,
) -> SearchResult:
    budget = budget or SearchBudget()
    options = CheckOptions(allow_cuts=False, extensions=frozenset(extensions), fragment=fragment)
    s = as_full(s)
    reason = NEKCalculus().accepts(s, options)
    if reason:
        raise ModeError(reason)
    result = prove_with(NEKProblem(s, budget, options), s, budget)
    if result.status is SearchStatus.PROVED:
        kernel.require_valid(NAME, result.proof, options)
    logger.info("nek_prove %s [%s ext=%s] -> %s", s, fragment.value, ",".join(sorted(options.extensions)) or "-", result.status.value)
    return result
