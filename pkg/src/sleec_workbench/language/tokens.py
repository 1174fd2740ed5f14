"""Tokenizer for the SLEEC rule language.

Comments run from ``//`` to end of line. Identifiers are ASCII
letters/digits/underscore starting with a letter; keywords are reserved.
A few constructs from the wider SLEEC literature (``otherwise``,
``exists``, ``meanwhile``) are recognised so the parser can reject them
with a pointed message instead of a generic syntax error.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .diagnostics import Category, Diagnostic, Severity, Span


class TokenType(Enum):
    KEYWORD = "keyword"
    UNSUPPORTED = "unsupported"
    IDENT = "ident"
    INT = "int"
    UNIT = "unit"
    TYPENAME = "typename"
    LPAREN = "("
    RPAREN = ")"
    COMMA = ","
    COLON = ":"
    EQ = "="
    NEQ = "<>"
    LT = "<"
    GT = ">"
    LE = "<="
    GE = ">="
    MINUS = "-"
    EOF = "eof"


KEYWORDS = {
    "def_start",
    "def_end",
    "rule_start",
    "rule_end",
    "event",
    "measure",
    "constant",
    "when",
    "then",
    "not",
    "unless",
    "within",
    "and",
    "or",
}

# Constructs from the broader SLEEC literature that this grammar does not
# cover; kept reserved so they fail loudly rather than parse as identifiers.
UNSUPPORTED_KEYWORDS = {"otherwise", "exists", "meanwhile"}

TYPE_NAMES = {"boolean", "numeric", "scale"}

# Singular and plural spellings normalise to the plural unit name.
TIME_UNITS = {
    "second": "seconds",
    "seconds": "seconds",
    "minute": "minutes",
    "minutes": "minutes",
    "hour": "hours",
    "hours": "hours",
    "day": "days",
    "days": "days",
}


@dataclass(frozen=True)
class Token:
    type: TokenType
    text: str
    span: Span

    def __repr__(self) -> str:
        return f"Token({self.type.name}, {self.text!r}, {self.span.line}:{self.span.col})"


_PUNCT = {
    "(": TokenType.LPAREN,
    ")": TokenType.RPAREN,
    ",": TokenType.COMMA,
    ":": TokenType.COLON,
    "-": TokenType.MINUS,
}


def tokenize(text: str) -> tuple[list[Token], list[Diagnostic]]:
    """Scan ``text`` into tokens.

    Always returns the tokens scanned so far together with any syntax
    diagnostics (unknown characters); scanning continues past errors so a
    single pass reports every bad character.
    """
    tokens: list[Token] = []
    diagnostics: list[Diagnostic] = []
    line, col, pos = 1, 1, 0
    n = len(text)

    def advance(k: int = 1) -> None:
        nonlocal line, col, pos
        for _ in range(k):
            if pos < n and text[pos] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            pos += 1

    while pos < n:
        ch = text[pos]
        if ch in " \t\r\n":
            advance()
            continue
        if ch == "/" and pos + 1 < n and text[pos + 1] == "/":
            while pos < n and text[pos] != "\n":
                advance()
            continue
        start_line, start_col = line, col
        if ch.isalpha():
            begin = pos
            while pos < n and (text[pos].isalnum() or text[pos] == "_"):
                advance()
            word = text[begin:pos]
            span = Span(start_line, start_col, line, col)
            if word in KEYWORDS:
                tokens.append(Token(TokenType.KEYWORD, word, span))
            elif word in UNSUPPORTED_KEYWORDS:
                tokens.append(Token(TokenType.UNSUPPORTED, word, span))
            elif word in TYPE_NAMES:
                tokens.append(Token(TokenType.TYPENAME, word, span))
            elif word in TIME_UNITS:
                tokens.append(Token(TokenType.UNIT, word, span))
            else:
                tokens.append(Token(TokenType.IDENT, word, span))
            continue
        if ch.isdigit():
            begin = pos
            while pos < n and text[pos].isdigit():
                advance()
            tokens.append(Token(TokenType.INT, text[begin:pos], Span(start_line, start_col, line, col)))
            continue
        if ch == "<":
            if pos + 1 < n and text[pos + 1] == ">":
                advance(2)
                tokens.append(Token(TokenType.NEQ, "<>", Span(start_line, start_col, line, col)))
            elif pos + 1 < n and text[pos + 1] == "=":
                advance(2)
                tokens.append(Token(TokenType.LE, "<=", Span(start_line, start_col, line, col)))
            else:
                advance()
                tokens.append(Token(TokenType.LT, "<", Span(start_line, start_col, line, col)))
            continue
        if ch == ">":
            if pos + 1 < n and text[pos + 1] == "=":
                advance(2)
                tokens.append(Token(TokenType.GE, ">=", Span(start_line, start_col, line, col)))
            else:
                advance()
                tokens.append(Token(TokenType.GT, ">", Span(start_line, start_col, line, col)))
            continue
        if ch == "=":
            advance()
            tokens.append(Token(TokenType.EQ, "=", Span(start_line, start_col, line, col)))
            continue
        if ch in _PUNCT:
            advance()
            tokens.append(Token(_PUNCT[ch], ch, Span(start_line, start_col, line, col)))
            continue
        diagnostics.append(
            Diagnostic(
                Severity.ERROR,
                Category.SYNTAX,
                Span.point(start_line, start_col),
                f"unknown character {ch!r}",
            )
        )
        advance()

    tokens.append(Token(TokenType.EOF, "", Span(line, col, line, col)))
    return tokens, diagnostics
