# app/deps.py
"""Shared plumbing for the command modules under ``app/routers``."""
from __future__ import annotations

import argparse
import sys
from enum import IntEnum
from pathlib import Path
from typing import Dict, List, Optional

from app.schemas.errors import ModeError
from app.schemas.model import FrameCondition
from app.schemas.proof import EXTENSIONS, CheckOptions, FragmentMode, SearchBudget, SearchStatus


class ExitStatus(IntEnum):
    OK = 0
    NEGATIVE = 1
    UNKNOWN = 2
    INPUT_ERROR = 3


STATUS_OF_SEARCH: Dict[SearchStatus, ExitStatus] = {
    SearchStatus.PROVED: ExitStatus.OK,
    SearchStatus.REFUTED: ExitStatus.NEGATIVE,
    SearchStatus.UNKNOWN: ExitStatus.UNKNOWN,
}


def read_text(value: Optional[str]) -> str:
    """The argument itself, or stdin when it is missing or ``-``."""
    if value is None or value == "-":
        return sys.stdin.read().strip()
    return value


def read_file(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def split_csv(value: Optional[str]) -> List[str]:
    return [x.strip() for x in (value or "").split(",") if x.strip()]


def add_budget_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--budget-depth", type=int, default=None)
    p.add_argument("--budget-terms", type=int, default=None)
    p.add_argument("--budget-labels", type=int, default=None)


def add_mode_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--ext", default=None, help="comma-separated subset of t,b,4,5")
    p.add_argument("--fragment", choices=[m.value for m in FragmentMode], default=None)


def budget_from(args: argparse.Namespace) -> SearchBudget:
    # Unset flags fall through to the settings-backed defaults.
    given = {
        "max_depth": args.budget_depth,
        "max_terms": args.budget_terms,
        "max_labels": args.budget_labels,
    }
    return SearchBudget(**{k: v for k, v in given.items() if v is not None})


def options_from(
    args: argparse.Namespace,
    file_options: Optional[Dict[str, str]] = None,
    allow_cuts: bool = False,
) -> CheckOptions:
    """Flags win over ``option`` lines of a proof file."""
    file_options = file_options or {}
    ext = args.ext if getattr(args, "ext", None) is not None else file_options.get("ext", "")
    fragment = getattr(args, "fragment", None) or file_options.get("fragment", FragmentMode.FULL.value)
    printed = file_options.get("printed-a4", "false").lower() in ("1", "true", "yes")
    return CheckOptions(
        allow_cuts=allow_cuts,
        extensions=ext,
        fragment=FragmentMode(fragment),
        printed_a4=printed,
    )


def option_lines(options: CheckOptions) -> Dict[str, str]:
    out: Dict[str, str] = {}
    if options.extensions:
        out["ext"] = ",".join(e for e in EXTENSIONS if e in options.extensions)
    if options.fragment is not FragmentMode.FULL:
        out["fragment"] = options.fragment.value
    return out


def frames_from(value: Optional[str]) -> List[FrameCondition]:
    out = []
    for name in split_csv(value):
        try:
            out.append(FrameCondition(name))
        except ValueError:
            raise ModeError(f"unknown frame condition {name!r}; expected refl, sym, trans or eucl") from None
    return out


def emit(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")
