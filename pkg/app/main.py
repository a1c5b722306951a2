# app/main.py
"""Command-line entry point: ``python -m app.main <command> ...``."""
from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from pydantic import ValidationError

from app.deps import ExitStatus
from app.routers import check, countermodel, cutelim, eval as eval_cmd, prove, translate
from app.schemas.errors import EcumeneError, ParseError
from app.utils.logging import configure_logging, get_logger

logger = get_logger(__name__)

COMMANDS = (prove, check, translate, countermodel, cutelim, eval_cmd)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ecumene", description="Ecumenical sequent calculi toolkit")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")
    sub = parser.add_subparsers(dest="command", required=True)
    # Mount commands
    for module in COMMANDS:
        module.register(sub)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on usage errors; 2 means "unknown" here
        return int(ExitStatus.OK) if e.code == 0 else int(ExitStatus.INPUT_ERROR)
    configure_logging(args.log_level)
    try:
        return int(args.run(args))
    except ParseError as e:
        logger.error("parse error at %d-%d: %s", e.span.start, e.span.end, e.message)
    except ValidationError as e:
        logger.error("invalid arguments: %s", e.errors()[0]["msg"] if e.errors() else e)
    except EcumeneError as e:
        logger.error("%s: %s", type(e).__name__, e)
    except OSError as e:
        logger.error("cannot read input: %s", e)
    return int(ExitStatus.INPUT_ERROR)


if __name__ == "__main__":
    sys.exit(main())
