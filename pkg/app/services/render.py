# app/services/render.py
"""Text and LaTeX rendering for formulas, sequents and proof trees."""
from __future__ import annotations

from typing import Any, Dict, List

from app.schemas.formula import (
    And,
    Atom,
    Binary,
    Bottom,
    Box,
    DiaC,
    DiaI,
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
    Quant,
    Term,
    Top,
    Unary,
    Var,
)
from app.schemas.proof import ProofTree, RuleInstance, meta_of
from app.schemas.sequent import (
    LabeledSequent,
    Labeled,
    LESequent,
    Node,
    RelAtom,
    StoupSequent,
    ordered,
)

# Binding strength: implication < disjunction < conjunction < prefix.
_IMP, _DISJ, _CONJ, _PREFIX = 1, 2, 3, 4

_TEXT_BINARY = {And: "/\\", OrI: "\\/i", OrC: "\\/c", ImpI: "->i", ImpC: "->c"}
_TEXT_UNARY = {Neg: "~", Box: "box ", DiaI: "diai ", DiaC: "diac "}
_TEXT_QUANT = {ForAll: "forall", ExistsI: "existsi", ExistsC: "existsc"}

_TEX_BINARY = {And: r"\wedge", OrI: r"\vee_i", OrC: r"\vee_c", ImpI: r"\to_i", ImpC: r"\to_c"}
_TEX_UNARY = {Neg: r"\neg ", Box: r"\Box ", DiaI: r"\Diamond_i ", DiaC: r"\Diamond_c "}
_TEX_QUANT = {ForAll: r"\forall", ExistsI: r"\exists_i", ExistsC: r"\exists_c"}


def _level(f: Formula) -> int:
    if isinstance(f, (ImpI, ImpC)):
        return _IMP
    if isinstance(f, (OrI, OrC)):
        return _DISJ
    if isinstance(f, And):
        return _CONJ
    return _PREFIX


def term_text(t: Term) -> str:
    match t:
        case Var(name):
            return name
        case Fun(name, args):
            return f"{name}({', '.join(term_text(a) for a in args)})"
    raise TypeError(f"not a term: {t!r}")


def _atom_text(f: Atom, tex: bool) -> str:
    base = f"{f.name}_{{{f.suffix}}}" if tex else f"{f.name}_{f.suffix}"
    if not f.terms:
        return base
    return f"{base}({', '.join(term_text(t) for t in f.terms)})"


def _render(f: Formula, prec: int, open_ok: bool, tex: bool) -> str:
    """
    ``open_ok`` is true when f is the rightmost operand of its context, where
    a quantifier may extend to the end without parentheses.
    """
    lp, rp = (r"(", r")")
    match f:
        case Atom():
            return _atom_text(f, tex)
        case Bottom():
            return r"\bot" if tex else "bot"
        case Top():
            return r"\top" if tex else "top"
        case Binary(a, b):
            lvl = _level(f)
            wrap = prec > lvl
            inner_open = True if wrap else open_ok
            if lvl == _IMP:
                ls = _render(a, _DISJ, False, tex)
                rs = _render(b, _IMP, inner_open, tex)
            else:
                ls = _render(a, lvl, False, tex)
                rs = _render(b, lvl + 1, inner_open, tex)
            op = (_TEX_BINARY if tex else _TEXT_BINARY)[type(f)]
            s = f"{ls} {op} {rs}"
            return f"{lp}{s}{rp}" if wrap else s
        case Unary(a):
            op = (_TEX_UNARY if tex else _TEXT_UNARY)[type(f)]
            return op + _render(a, _PREFIX, open_ok, tex)
        case Quant(x, body):
            op = (_TEX_QUANT if tex else _TEXT_QUANT)[type(f)]
            s = f"{op} {x}. {_render(body, _IMP, True, tex)}"
            return s if open_ok else f"{lp}{s}{rp}"
    raise TypeError(f"not a formula: {f!r}")


def formula_text(f: Formula) -> str:
    return _render(f, _IMP, True, False)


def formula_latex(f: Formula) -> str:
    return _render(f, _IMP, True, True)


def labeled_text(lf: Labeled, tex: bool = False) -> str:
    body = formula_latex(lf.formula) if tex else formula_text(lf.formula)
    return f"{lf.label}:{body}"


def _rel_text(r: RelAtom, tex: bool) -> str:
    return f"{r.src}R{r.dst}" if tex else f"R({r.src},{r.dst})"


def _join(items: List[str]) -> str:
    return ", ".join(items)


def _two_sided(left: str, right: str, tex: bool) -> str:
    turnstile = r"\vdash" if tex else "|-"
    out = f"{left} {turnstile}" if left else turnstile
    return f"{out} {right}" if right else out


def _nested_items(node: Node, tex: bool) -> List[str]:
    fmt = formula_latex if tex else formula_text
    marks = (r"\bullet ", r"\blacktriangle ", r"\circ ") if tex else ("+", "-", "!")
    items = [marks[0] + fmt(f) for f in ordered(node.left)]
    items += [marks[1] + fmt(f) for f in ordered(node.right)]
    if node.output is not None:
        items.append(marks[2] + fmt(node.output))
    for child in node.children:
        inner = _join(_nested_items(child, tex))
        items.append(f"[{inner}]" if tex else (f"[ {inner} ]" if inner else "[ ]"))
    return items


def sequent_text(s: Any, tex: bool = False) -> str:
    fmt = formula_latex if tex else formula_text
    empty = r"\cdot" if tex else "."
    match s:
        case LESequent(left, right):
            return _two_sided(_join([fmt(f) for f in ordered(left)]), fmt(right), tex)
        case StoupSequent(left, right, stoup):
            lhs = _join([fmt(f) for f in ordered(left)])
            rhs = _join([fmt(f) for f in ordered(right)])
            tail = fmt(stoup) if stoup is not None else empty
            return _two_sided(lhs, f"{rhs} ; {tail}" if rhs else f"; {tail}", tex)
        case LabeledSequent(relations, left, right, stoup):
            lhs = [_rel_text(r, tex) for r in sorted(relations, key=lambda r: (r.src, r.dst))]
            lhs += [labeled_text(lf, tex) for lf in ordered(left)]
            rhs = _join([labeled_text(lf, tex) for lf in ordered(right)])
            tail = labeled_text(stoup, tex) if stoup is not None else empty
            return _two_sided(_join(lhs), f"{rhs} ; {tail}" if rhs else f"; {tail}", tex)
        case Node():
            return _join(_nested_items(s, tex))
    raise TypeError(f"cannot render {type(s).__name__}")


# ---- proof trees ----

def _path_text(path) -> str:
    return ".".join(str(i) for i in path)


def _meta_value(name: str, value: Any) -> str:
    if name in ("path", "target"):
        return _path_text(value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Formula):
        return formula_text(value)
    if isinstance(value, Labeled):
        return labeled_text(value)
    if isinstance(value, RelAtom):
        return _rel_text(value, False)
    if isinstance(value, Term):
        return term_text(value)
    return str(value)


def quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def unquote(s: str) -> str:
    body = s[1:-1] if len(s) >= 2 and s[0] == s[-1] == '"' else s
    out: List[str] = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch == "\\" and i + 1 < len(body):
            out.append(body[i + 1])
            i += 2
            continue
        out.append(ch)
        i += 1
    return "".join(out)


def rule_meta_text(rule: RuleInstance) -> str:
    meta: Dict[str, Any] = meta_of(rule)
    if not meta:
        return ""
    pairs = " ".join(f"{k}={quote(_meta_value(k, v))}" for k, v in meta.items())
    return "{" + pairs + "}"


def proof_text(tree: ProofTree, indent: int = 0) -> str:
    pad = "  " * indent
    head = f"{pad}({tree.rule.rule}"
    meta = rule_meta_text(tree.rule)
    if meta:
        head += " " + meta
    head += " " + quote(sequent_text(tree.conclusion))
    if not tree.premises:
        return head + ")"
    body = "\n".join(proof_text(p, indent + 1) for p in tree.premises)
    return f"{head}\n{body})"


def proof_latex(tree: ProofTree) -> str:
    premises = " & ".join(proof_latex(p) for p in tree.premises)
    name = tree.rule.rule
    if tree.rule.index is not None:
        name += f"_{tree.rule.index}"
    return f"\\infer[\\mathsf{{{name}}}]{{{sequent_text(tree.conclusion, tex=True)}}}{{{premises}}}"


def render(value: Any, fmt: str = "text") -> str:
    tex = fmt == "latex"
    if fmt not in ("text", "latex"):
        raise ValueError(f"unknown format {fmt!r}")
    if isinstance(value, Formula):
        return formula_latex(value) if tex else formula_text(value)
    if isinstance(value, Labeled):
        return labeled_text(value, tex)
    if isinstance(value, ProofTree):
        return proof_latex(value) if tex else proof_text(value)
    return sequent_text(value, tex)
