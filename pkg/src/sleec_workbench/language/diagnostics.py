"""Structured diagnostics shared by the lexer, parser, and analyzers."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"


class Category(Enum):
    SYNTAX = "syntax"
    NAMING = "naming"
    TYPE = "type"


@dataclass(frozen=True)
class Span:
    """Half-open source region, 1-indexed lines and columns."""

    line: int
    col: int
    end_line: int
    end_col: int

    @classmethod
    def point(cls, line: int, col: int) -> "Span":
        return cls(line, col, line, col + 1)


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    category: Category
    span: Span
    message: str
    suggestion: str | None = None

    def to_json(self) -> dict:
        doc = {
            "severity": self.severity.value,
            "category": self.category.value,
            "line": self.span.line,
            "col": self.span.col,
            "message": self.message,
        }
        if self.suggestion is not None:
            doc["suggestion"] = self.suggestion
        return doc

    def render(self) -> str:
        tail = f" (did you mean '{self.suggestion}'?)" if self.suggestion else ""
        return (
            f"{self.span.line}:{self.span.col}: "
            f"{self.severity.value} [{self.category.value}] {self.message}{tail}"
        )


def has_errors(diagnostics: list[Diagnostic]) -> bool:
    return any(d.severity is Severity.ERROR for d in diagnostics)
