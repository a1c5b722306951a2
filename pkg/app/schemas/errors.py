# app/schemas/errors.py
from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple


@dataclass(frozen=True)
class SourceSpan:
    start: int
    end: int

    def __post_init__(self):
        if self.start < 0 or self.end < self.start:
            raise ValueError(f"bad span ({self.start}, {self.end})")


class EcumeneError(Exception):
    """Base class for every error raised by the toolkit."""


class ParseError(EcumeneError, ValueError):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(f"{message} at {span.start}..{span.end}")
        self.message = message
        self.span = span


class RuleError(EcumeneError):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class CheckError(EcumeneError):
    def __init__(self, path: Tuple[int, ...], reason: str):
        where = "/".join(str(i) for i in path) or "root"
        super().__init__(f"invalid at {where}: {reason}")
        self.path = path
        self.reason = reason


class ModeError(EcumeneError):
    pass


class TranslationError(EcumeneError):
    pass


class MergeError(EcumeneError):
    pass


class SemanticsError(EcumeneError):
    pass
