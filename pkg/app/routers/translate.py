# app/routers/translate.py
from __future__ import annotations

import argparse
from typing import Callable, Dict

from app.deps import ExitStatus, emit, read_file, read_text
from app.schemas.errors import TranslationError
from app.services.labek import modal_to_fo
from app.services.nek import fm, nested_to_labeled
from app.services.parser import parse_formula, parse_nested_sequent, parse_proof_file, parse_stoup_sequent, proof_file_text
from app.services.render import render
from app.services.translate import le_to_lce_proof, lce_to_le_proof, lce_to_le_sequent


def _proof(source: str, want: str, fn, target: str) -> str:
    pf = parse_proof_file(read_file(source))
    if pf.calculus != want:
        raise TranslationError(f"expected a {want} proof file, got {pf.calculus}")
    return proof_file_text(target, fn(pf.tree))


def _lce_to_le_seq(args) -> str:
    return render(lce_to_le_sequent(parse_stoup_sequent(read_text(args.input))))


def _lce_to_le_proof(args) -> str:
    return _proof(args.input or "-", "lce", lce_to_le_proof, "le")


def _le_to_lce_proof(args) -> str:
    return _proof(args.input or "-", "le", le_to_lce_proof, "lce")


def _nested_to_labeled(args) -> str:
    return render(nested_to_labeled(parse_nested_sequent(read_text(args.input)), root=args.world))


def _fm(args) -> str:
    return render(fm(parse_nested_sequent(read_text(args.input))))


def _modal_to_fo(args) -> str:
    return render(modal_to_fo(parse_formula(read_text(args.input)), args.world))


# Proof translations read a file path; the others read sequent or formula text.
TRANSLATIONS: Dict[str, Callable[[argparse.Namespace], str]] = {
    "lce-to-le-seq": _lce_to_le_seq,
    "lce-to-le-proof": _lce_to_le_proof,
    "le-to-lce-proof": _le_to_lce_proof,
    "nested-to-labeled": _nested_to_labeled,
    "fm": _fm,
    "modal-to-fo": _modal_to_fo,
}


def register(sub) -> None:
    p = sub.add_parser("translate", help="translate sequents, proofs and formulas between calculi")
    p.add_argument("--what", required=True, choices=sorted(TRANSLATIONS))
    p.add_argument("input", nargs="?")
    p.add_argument("--world", default="x", help="root label or world variable")
    p.set_defaults(run=run)


def run(args: argparse.Namespace) -> ExitStatus:
    emit(TRANSLATIONS[args.what](args))
    return ExitStatus.OK
