# app/routers/countermodel.py
from __future__ import annotations

import argparse
from typing import Optional

from pydantic import BaseModel, Field

from app.config import settings
from app.deps import ExitStatus, emit, frames_from, read_text
from app.services.parser import parse_formula
from app.services.semantics import countermodel_search, format_model, refuting_worlds
from app.utils.logging import get_logger

logger = get_logger(__name__)


class CountermodelIn(BaseModel):
    formula: str
    max_worlds: int = Field(default_factory=lambda: settings.max_worlds, ge=1, le=6)


def register(sub) -> None:
    p = sub.add_parser("countermodel", help="search small birelational models for a refutation")
    p.add_argument("formula", nargs="?")
    p.add_argument("--max-worlds", type=int, default=None)
    p.add_argument("--frame", default=None, help="comma-separated subset of refl,sym,trans,eucl")
    p.set_defaults(run=run)


def _body(formula: str, max_worlds: Optional[int]) -> CountermodelIn:
    if max_worlds is None:
        return CountermodelIn(formula=formula)
    return CountermodelIn(formula=formula, max_worlds=max_worlds)


def run(args: argparse.Namespace) -> ExitStatus:
    body = _body(read_text(args.formula), args.max_worlds)
    f = parse_formula(body.formula)
    m = countermodel_search(f, body.max_worlds, frames_from(args.frame))
    if m is None:
        logger.warning("no countermodel with at most %d worlds", body.max_worlds)
        return ExitStatus.UNKNOWN
    emit(f"# refuted at world(s) {', '.join(map(str, refuting_worlds(m, f)))}\n" + format_model(m))
    return ExitStatus.NEGATIVE
