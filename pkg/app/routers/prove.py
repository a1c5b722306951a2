# app/routers/prove.py
from __future__ import annotations

import argparse
from typing import Literal

from pydantic import BaseModel

from app.deps import STATUS_OF_SEARCH, ExitStatus, add_budget_flags, add_mode_flags, budget_from, emit, option_lines, options_from, read_text
from app.schemas.errors import ModeError
from app.schemas.proof import CheckOptions, FragmentMode, SearchBudget, SearchResult, SearchStatus
from app.services import kernel
from app.services.labek import labek_prove
from app.services.lce import lce_prove
from app.services.le import le_prove
from app.services.nek import nek_prove
from app.services.parser import parse_sequent, proof_file_text
from app.services.render import render
from app.utils.logging import get_logger

logger = get_logger(__name__)

CalculusId = Literal["le", "lce", "labek", "nek"]


class ProveIn(BaseModel):
    calculus: CalculusId = "lce"
    sequent: str
    fmt: Literal["text", "latex"] = "text"
    check: bool = False


def register(sub) -> None:
    p = sub.add_parser("prove", help="search for a cut-free proof")
    p.add_argument("sequent", nargs="?", help="sequent text; read from stdin when omitted")
    p.add_argument("--calculus", default="lce")
    add_mode_flags(p)
    add_budget_flags(p)
    p.add_argument("--format", dest="fmt", default="text")
    p.add_argument("--check", action="store_true", help="re-check the proof before printing it")
    p.set_defaults(run=run)


def search(calculus: str, seq, options: CheckOptions, budget: SearchBudget) -> SearchResult:
    if calculus != "nek" and options.fragment is not FragmentMode.FULL:
        raise ModeError("fragments are a nested-calculus mode")
    if calculus != "nek" and options.extensions:
        raise ModeError(f"{calculus} searches without modal extensions")
    if calculus == "le":
        return le_prove(seq, budget)
    if calculus == "lce":
        return lce_prove(seq, budget)
    if calculus == "labek":
        return labek_prove(seq, budget)
    return nek_prove(seq, options.extensions, options.fragment, budget)


def run(args: argparse.Namespace) -> ExitStatus:
    body = ProveIn(calculus=args.calculus, sequent=read_text(args.sequent), fmt=args.fmt, check=args.check)
    options = options_from(args)
    budget = budget_from(args)
    seq = parse_sequent(body.calculus, body.sequent)
    result = search(body.calculus, seq, options, budget)
    stats = result.stats
    logger.info("expanded=%d memo_hits=%d depth_cuts=%d", stats.expanded, stats.memo_hits, stats.depth_cuts)
    if result.status is SearchStatus.PROVED:
        if body.check:
            kernel.require_valid(body.calculus, result.proof, options)
        if body.fmt == "latex":
            emit(render(result.proof, "latex"))
        else:
            emit(proof_file_text(body.calculus, result.proof, option_lines(options)))
    elif result.status is SearchStatus.REFUTED:
        emit(f"refuted {render(seq)}")
    else:
        emit(f"unknown {render(seq)}")
    return STATUS_OF_SEARCH[result.status]
