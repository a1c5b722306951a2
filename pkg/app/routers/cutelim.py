# app/routers/cutelim.py
from __future__ import annotations

import argparse

from app.deps import ExitStatus, emit, read_file
from app.schemas.errors import ModeError
from app.services.cutelim import CutTrace, eliminate_cuts
from app.services.parser import parse_proof_file, proof_file_text
from app.utils.logging import get_logger

logger = get_logger(__name__)


def register(sub) -> None:
    p = sub.add_parser("cutelim", help="eliminate cuts from an lce proof")
    p.add_argument("proof", help="proof file path, or - for stdin")
    p.set_defaults(run=run)


def run(args: argparse.Namespace) -> ExitStatus:
    pf = parse_proof_file(read_file(args.proof))
    if pf.calculus != "lce":
        raise ModeError(f"cut elimination works on lce proofs, not {pf.calculus}")
    trace = CutTrace()
    out = eliminate_cuts(pf.tree, trace)
    for parent, child in trace.steps:
        logger.debug("cut measure %s -> %s", parent, child)
    emit(proof_file_text("lce", out))
    return ExitStatus.OK
