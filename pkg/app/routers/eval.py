# app/routers/eval.py
from __future__ import annotations

import argparse

from app.deps import ExitStatus, emit, read_file, read_text
from app.services.parser import parse_formula, parse_model
from app.services.semantics import eval_formula, refuting_worlds


def register(sub) -> None:
    p = sub.add_parser("eval", help="evaluate a formula in a model file")
    p.add_argument("formula", nargs="?")
    p.add_argument("--model", required=True, help="model file path")
    p.add_argument("--world", type=int, default=None, help="world to evaluate at; all worlds when omitted")
    p.set_defaults(run=run)


def run(args: argparse.Namespace) -> ExitStatus:
    m = parse_model(read_file(args.model))
    f = parse_formula(read_text(args.formula))
    if args.world is not None:
        ok = eval_formula(m, args.world, f)
        emit("true" if ok else "false")
        return ExitStatus.OK if ok else ExitStatus.NEGATIVE
    bad = refuting_worlds(m, f)
    emit("true" if not bad else "false at " + " ".join(map(str, bad)))
    return ExitStatus.NEGATIVE if bad else ExitStatus.OK
