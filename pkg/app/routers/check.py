# app/routers/check.py
from __future__ import annotations

import argparse

from app.deps import ExitStatus, add_mode_flags, emit, options_from, read_file
from app.services import kernel
from app.services.parser import parse_proof_file
from app.utils.logging import get_logger

logger = get_logger(__name__)


def register(sub) -> None:
    p = sub.add_parser("check", help="validate a proof file")
    p.add_argument("proof", help="proof file path, or - for stdin")
    p.add_argument("--allow-cuts", action="store_true")
    add_mode_flags(p)
    p.set_defaults(run=run)


def path_text(path) -> str:
    return ".".join(str(i) for i in path) or "."


def run(args: argparse.Namespace) -> ExitStatus:
    pf = parse_proof_file(read_file(args.proof))
    options = options_from(args, pf.options, allow_cuts=args.allow_cuts)
    result = kernel.check(pf.calculus, pf.tree, options)
    if result.valid:
        emit(f"valid {pf.calculus} {pf.tree.size()} nodes")
        return ExitStatus.OK
    logger.warning("invalid proof at %s: %s", path_text(result.path), result.reason)
    emit(f"invalid {path_text(result.path)} {result.reason}")
    return ExitStatus.NEGATIVE
