# app/services/parser.py
"""
Concrete syntax for formulas, sequents, proof files and models.

One LALR grammar with several start symbols covers formulas and the four
sequent shapes; proof files and model files have small grammars of their own.
"""
from __future__ import annotations

from typing import Any, Callable, Dict, List, Optional, Tuple

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, UnexpectedToken, VisitError
from pydantic import ValidationError

from app.schemas.errors import ParseError, SourceSpan
from app.schemas.formula import (
    BOT,
    TOP,
    And,
    AtomC,
    AtomI,
    DiaC,
    DiaI,
    Box,
    ExistsC,
    ExistsI,
    ForAll,
    Formula,
    Fun,
    ImpC,
    ImpI,
    Neg,
    OrC,
    OrI,
    Term,
    Var,
)
from app.schemas.model import BirelationalModel
from app.schemas.proof import ProofTree, RuleInstance
from app.schemas.sequent import Labeled, LabeledSequent, LESequent, Node, RelAtom, StoupSequent, canonical_nested
from app.services.formula import check_arities
from app.services.render import render, unquote
from app.utils.logging import get_logger

logger = get_logger(__name__)

GRAMMAR = r"""
    formula_start: formula

    ?formula: imp

    // Quantifiers extend maximally right, so an unparenthesised quantifier
    // may only be the rightmost operand ("open" forms below).
    ?imp: disj
        | disj "->i" imp         -> impi
        | disj "->c" imp         -> impc
        | open_disj

    ?open_disj: open_conj
        | disj "\\/i" open_conj  -> ori
        | disj "\\/c" open_conj  -> orc

    ?open_conj: open_unary
        | conj "/\\" open_unary  -> and_

    ?open_unary: quant
        | "~" open_unary         -> neg
        | "box" open_unary       -> box
        | "diai" open_unary      -> diai
        | "diac" open_unary      -> diac

    ?disj: conj
        | disj "\\/i" conj       -> ori
        | disj "\\/c" conj       -> orc

    ?conj: unary
        | conj "/\\" unary       -> and_

    ?unary: primary
        | "~" unary              -> neg
        | "box" unary            -> box
        | "diai" unary           -> diai
        | "diac" unary           -> diac

    ?primary: atom
        | "bot"                  -> bot
        | "top"                  -> top
        | "(" formula ")"

    ?quant: "forall" NAME "." formula   -> forall
        | "existsi" NAME "." formula    -> existsi
        | "existsc" NAME "." formula    -> existsc

    atom: NAME ("(" [term ("," term)*] ")")?

    ?term: NAME "(" [term ("," term)*] ")"  -> fun
        | NAME                              -> var

    formula_list: [formula ("," formula)*]

    le_sequent: formula_list "|-" formula
    stoup_sequent: formula_list "|-" formula_list ";" stoup
    stoup: formula ("," formula)*
        | "."                    -> empty_stoup

    labeled_sequent: left_items "|-" labeled_list ";" labeled_stoup
    left_items: [left_item ("," left_item)*]
    ?left_item: "R" "(" NAME "," NAME ")"  -> rel
        | labeled
    labeled: NAME ":" formula
    labeled_list: [labeled ("," labeled)*]
    labeled_stoup: labeled ("," labeled)*
        | "."                    -> empty_labeled_stoup

    nested_sequent: nested_items
    nested_items: [nested_item ("," nested_item)*]
    ?nested_item: "+" formula          -> nleft
        | "-" formula                  -> nright
        | "!" formula                  -> nout
        | "[" nested_items "]"         -> nchild

    NAME: /[A-Za-z][A-Za-z0-9_']*/

    %import common.WS
    %ignore WS
"""

_STARTS = ["formula_start", "le_sequent", "stoup_sequent", "labeled_sequent", "nested_sequent"]

_parser = Lark(GRAMMAR, parser="lalr", start=_STARTS, propagate_positions=True, maybe_placeholders=True)


def _span_of(tok: Any, text: str) -> SourceSpan:
    start = getattr(tok, "start_pos", None)
    end = getattr(tok, "end_pos", None)
    if start is None:
        return SourceSpan(0, len(text))
    return SourceSpan(start, end if end is not None else start)


class _Build(Transformer):
    def __init__(self, text: str):
        super().__init__()
        self.text = text

    # ---- formulas ----
    def atom(self, items):
        name_tok: Token = items[0]
        args = [t for t in items[1:] if t is not None]
        name = str(name_tok)
        if name.endswith("_i"):
            return AtomI(name[:-2], tuple(args))
        if name.endswith("_c"):
            return AtomC(name[:-2], tuple(args))
        raise ParseError(f"unknown token {name!r}: atoms end in _i or _c", _span_of(name_tok, self.text))

    def fun(self, items):
        return Fun(str(items[0]), tuple(t for t in items[1:] if t is not None))

    def var(self, items):
        return Var(str(items[0]))

    def bot(self, _):
        return BOT

    def top(self, _):
        return TOP

    def impi(self, items):
        return ImpI(items[0], items[1])

    def impc(self, items):
        return ImpC(items[0], items[1])

    def ori(self, items):
        return OrI(items[0], items[1])

    def orc(self, items):
        return OrC(items[0], items[1])

    def and_(self, items):
        return And(items[0], items[1])

    def neg(self, items):
        return Neg(items[0])

    def box(self, items):
        return Box(items[0])

    def diai(self, items):
        return DiaI(items[0])

    def diac(self, items):
        return DiaC(items[0])

    def forall(self, items):
        return ForAll(str(items[0]), items[1])

    def existsi(self, items):
        return ExistsI(str(items[0]), items[1])

    def existsc(self, items):
        return ExistsC(str(items[0]), items[1])

    def formula_start(self, items):
        return items[0]

    # ---- sequents ----
    def formula_list(self, items):
        return [f for f in items if f is not None]

    def le_sequent(self, items):
        return LESequent(frozenset(items[0]), items[1])

    @v_args(meta=True)
    def stoup(self, meta, items):
        if len(items) > 1:
            raise ParseError("stoup holds at most one formula", SourceSpan(meta.start_pos, meta.end_pos))
        return items[0]

    def empty_stoup(self, _):
        return None

    def stoup_sequent(self, items):
        return StoupSequent(frozenset(items[0]), frozenset(items[1]), items[2])

    def rel(self, items):
        return RelAtom(str(items[0]), str(items[1]))

    def labeled(self, items):
        return Labeled(str(items[0]), items[1])

    def left_items(self, items):
        return [x for x in items if x is not None]

    def labeled_list(self, items):
        return [x for x in items if x is not None]

    @v_args(meta=True)
    def labeled_stoup(self, meta, items):
        if len(items) > 1:
            raise ParseError("stoup holds at most one formula", SourceSpan(meta.start_pos, meta.end_pos))
        return items[0]

    def empty_labeled_stoup(self, _):
        return None

    def labeled_sequent(self, items):
        left, right, stoup = items
        rels = [x for x in left if isinstance(x, RelAtom)]
        forms = [x for x in left if isinstance(x, Labeled)]
        return LabeledSequent(frozenset(rels), frozenset(forms), frozenset(right), stoup)

    def nleft(self, items):
        return ("+", items[0])

    def nright(self, items):
        return ("-", items[0])

    def nout(self, items):
        return ("!", items[0])

    def nchild(self, items):
        return ("[", items[0])

    def nested_items(self, items):
        left, right, outs, kids = [], [], [], []
        for item in items:
            if item is None:
                continue
            mark, value = item
            if mark == "+":
                left.append(value)
            elif mark == "-":
                right.append(value)
            elif mark == "!":
                outs.append(value)
            else:
                kids.append(value)
        if len(outs) > 1:
            raise ParseError("exactly one output formula", SourceSpan(0, len(self.text)))
        return Node(frozenset(left), frozenset(right), outs[0] if outs else None, tuple(kids))

    def nested_sequent(self, items):
        root = items[0]
        if root.outputs() > 1:
            raise ParseError("exactly one output formula", SourceSpan(0, len(self.text)))
        return canonical_nested(root)


def _error_from(e: UnexpectedInput, text: str) -> ParseError:
    at_end = isinstance(e, UnexpectedEOF) or (isinstance(e, UnexpectedToken) and e.token.type == "$END")
    pos = len(text) if at_end else getattr(e, "pos_in_stream", None)
    if pos is None or pos < 0:
        pos = len(text)
    pos = min(pos, len(text))
    if isinstance(e, UnexpectedCharacters):
        return ParseError(f"unknown token {text[pos:pos + 1]!r}", SourceSpan(pos, min(len(text), pos + 1)))
    if text[:pos].rstrip().endswith("."):
        return ParseError("dangling quantifier", SourceSpan(pos, pos))
    if at_end:
        return ParseError("unexpected end of input", SourceSpan(pos, pos))
    tok = getattr(e, "token", None)
    if isinstance(tok, Token) and tok.start_pos is not None:
        end = tok.end_pos if tok.end_pos is not None else tok.start_pos
        return ParseError(f"unexpected {str(tok)!r}", SourceSpan(tok.start_pos, min(end, len(text))))
    return ParseError("malformed input", SourceSpan(pos, pos))


def _run(text: str, start: str) -> Any:
    try:
        tree = _parser.parse(text, start=start)
    except UnexpectedInput as e:
        raise _error_from(e, text) from e
    try:
        value = _Build(text).transform(tree)
    except VisitError as e:
        if isinstance(e.orig_exc, ParseError):
            raise e.orig_exc from None
        raise ParseError(str(e.orig_exc), SourceSpan(0, len(text))) from e
    try:
        check_arities(value.formulas() if hasattr(value, "formulas") else [value])
    except ValueError as e:
        raise ParseError(str(e), SourceSpan(0, len(text))) from e
    return value


def parse_formula(text: str) -> Formula:
    return _run(text, "formula_start")


def parse_le_sequent(text: str) -> LESequent:
    return _run(text, "le_sequent")


def parse_stoup_sequent(text: str) -> StoupSequent:
    return _run(text, "stoup_sequent")


def parse_labeled_sequent(text: str) -> LabeledSequent:
    return _run(text, "labeled_sequent")


def parse_nested_sequent(text: str) -> Node:
    return _run(text, "nested_sequent")


def parse_input_nested(text: str) -> Node:
    seq = parse_nested_sequent(text)
    if seq.outputs():
        raise ParseError("input sequents carry no output formula", SourceSpan(0, len(text)))
    return seq


def parse_full_nested(text: str) -> Node:
    seq = parse_nested_sequent(text)
    if seq.outputs() != 1:
        raise ParseError("exactly one output formula", SourceSpan(0, len(text)))
    return seq


SEQUENT_PARSERS: Dict[str, Callable[[str], Any]] = {
    "le": parse_le_sequent,
    "lce": parse_stoup_sequent,
    "labek": parse_labeled_sequent,
    "nek": parse_nested_sequent,
}


def parse_sequent(calculus: str, text: str) -> Any:
    try:
        fn = SEQUENT_PARSERS[calculus]
    except KeyError:
        raise ParseError(f"unknown calculus {calculus!r}", SourceSpan(0, 0)) from None
    return fn(text)


def parse_term(text: str) -> Term:
    f = parse_formula(f"w_i({text})")
    if len(f.terms) != 1:
        raise ParseError("expected one term", SourceSpan(0, len(text)))
    return f.terms[0]


def parse_labeled_formula(text: str) -> Labeled:
    label, sep, body = text.partition(":")
    if not sep or not label.strip():
        raise ParseError("unlabeled formula", SourceSpan(0, len(text)))
    return Labeled(label.strip(), parse_formula(body))


# ---- proof files ----

PROOF_GRAMMAR = r"""
    start: header option* tree
    header: "calculus" CALC
    option: "option" KEY "=" VALUE
    tree: "(" RULE meta? STRING tree* ")"
    meta: "{" pair* "}"
    pair: KEY "=" STRING

    CALC: /[a-z]+/
    RULE: /[A-Za-z0-9_][A-Za-z0-9_\-]*/
    KEY: /[a-z][a-z0-9\-]*/
    VALUE: /[^\s#]+/
    STRING: /"(\\.|[^"\\])*"/
    COMMENT: /#[^\n]*/

    %import common.WS
    %ignore WS
    %ignore COMMENT
"""

_proof_parser = Lark(PROOF_GRAMMAR, parser="lalr", propagate_positions=True)


def _path(value: str) -> Tuple[int, ...]:
    value = value.strip().strip(".")
    if not value:
        return ()
    return tuple(int(p) for p in value.split("."))


class ProofFile:
    def __init__(self, calculus: str, options: Dict[str, str], tree: ProofTree):
        self.calculus = calculus
        self.options = options
        self.tree = tree


def _meta_value(calculus: str, key: str, raw: str) -> Any:
    if key in ("principal", "cut", "residue"):
        if calculus == "labek" and raw.startswith("R("):
            (rel,) = parse_labeled_sequent(f"{raw} |- ; .").relations
            return rel
        if calculus == "labek" and ":" in raw:
            return parse_labeled_formula(raw)
        return parse_formula(raw)
    if key == "witness":
        return raw if calculus == "labek" else parse_term(raw)
    if key == "index":
        return int(raw)
    if key in ("path", "target"):
        return _path(raw)
    if key == "keep":
        return raw.lower() in ("1", "true", "yes")
    return raw


_META_KEYS = {"side", "principal", "witness", "eigen", "index", "cut", "residue", "path", "target", "keep"}


def _build_tree(node, calculus: str, text: str) -> ProofTree:
    rule_tok = node.children[0]
    rest = node.children[1:]
    fields: Dict[str, Any] = {}
    if rest and getattr(rest[0], "data", None) == "meta":
        for pair in rest[0].children:
            key, raw = str(pair.children[0]), unquote(str(pair.children[1]))
            if key not in _META_KEYS:
                raise ParseError(f"unknown meta key {key!r}", _span_of(pair.children[0], text))
            try:
                fields[key] = _meta_value(calculus, key, raw)
            except ParseError as e:
                raise ParseError(f"bad {key}: {e.message}", _span_of(pair.children[1], text)) from e
        rest = rest[1:]
    concl_tok = rest[0]
    try:
        conclusion = parse_sequent(calculus, unquote(str(concl_tok)))
    except ParseError as e:
        span = _span_of(concl_tok, text)
        raise ParseError(f"bad conclusion: {e.message}", span) from e
    premises = tuple(_build_tree(child, calculus, text) for child in rest[1:])
    return ProofTree(conclusion, RuleInstance(str(rule_tok), **fields), premises)


def parse_proof_file(text: str) -> ProofFile:
    try:
        tree = _proof_parser.parse(text)
    except UnexpectedInput as e:
        raise _error_from(e, text) from e
    header, *opts, body = tree.children
    calculus = str(header.children[0])
    if calculus not in SEQUENT_PARSERS:
        raise ParseError(f"unknown calculus {calculus!r}", _span_of(header.children[0], text))
    options = {str(o.children[0]): str(o.children[1]) for o in opts}
    logger.debug("parsed proof file header calculus=%s options=%s", calculus, options)
    return ProofFile(calculus, options, _build_tree(body, calculus, text))


def proof_file_text(calculus: str, tree: ProofTree, options: Optional[Dict[str, str]] = None) -> str:
    lines: List[str] = [f"calculus {calculus}"]
    for k, v in (options or {}).items():
        lines.append(f"option {k}={v}")
    lines.append(render(tree, "text"))
    return "\n".join(lines) + "\n"


# ---- model files ----

MODEL_GRAMMAR = r"""
    start: worlds line*
    worlds: "worlds" INT
    ?line: le | rel | val
    le: "le" INT INT
    rel: "rel" INT INT
    val: "val" INT NAME

    NAME: /[a-z][A-Za-z0-9_']*/
    COMMENT: /#[^\n]*/

    %import common.INT
    %import common.WS
    %ignore WS
    %ignore COMMENT
"""

_model_parser = Lark(MODEL_GRAMMAR, parser="lalr", propagate_positions=True)


def parse_model(text: str) -> BirelationalModel:
    """Read the ``worlds/le/rel/val`` line format; reflexive ``le`` pairs are implied."""
    try:
        tree = _model_parser.parse(text)
    except UnexpectedInput as e:
        raise _error_from(e, text) from e
    header, *lines = tree.children
    le: List[Tuple[int, int]] = []
    rel: List[Tuple[int, int]] = []
    val: Dict[int, set] = {}
    for line in lines:
        a, b = line.children
        if line.data == "le":
            le.append((int(a), int(b)))
        elif line.data == "rel":
            rel.append((int(a), int(b)))
        else:
            val.setdefault(int(a), set()).add(str(b))
    try:
        return BirelationalModel(
            worlds=int(header.children[0]),
            le=frozenset(le),
            rel=frozenset(rel),
            val={w: frozenset(ps) for w, ps in val.items()},
        )
    except ValidationError as e:
        msg = e.errors()[0]["msg"] if e.errors() else str(e)
        raise ParseError(msg, SourceSpan(0, len(text))) from e


# ---- golden corpora ----

def parse_expect_lines(text: str) -> List[Tuple[bool, str, str]]:
    """Parse ``EXPECT provable|unprovable <calculus> <sequent>`` lines."""
    out: List[Tuple[bool, str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(None, 3)
        if len(parts) != 4 or parts[0] != "EXPECT" or parts[1] not in ("provable", "unprovable"):
            raise ValueError(f"line {lineno}: expected 'EXPECT provable|unprovable <calculus> <sequent>'")
        out.append((parts[1] == "provable", parts[2], parts[3]))
    return out
