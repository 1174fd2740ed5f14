"""SLEEC DSL front end: tokens, AST, parser, analyzers, formatter."""

from .analysis import analyze_names, suggest_name, typecheck, validate
from .diagnostics import Category, Diagnostic, Severity, Span, has_errors
from .formatter import format_condition, format_rule, format_spec
from .nodes import (
    AndExpr,
    BoolAtom,
    Comparison,
    Condition,
    ConstantDef,
    Defeater,
    EventDef,
    IntLit,
    MeasureDef,
    MeasureKind,
    NameRef,
    NotExpr,
    OrExpr,
    Polarity,
    Response,
    Rule,
    Spec,
    TimeUnit,
    TimeValue,
    condition_measures,
    rule_measures,
    rule_response_events,
)
from .parser import ParseResult, SleecParseError, parse, parse_rule_text, parse_spec
from .tokens import Token, TokenType, tokenize

__all__ = [
    "AndExpr",
    "BoolAtom",
    "Category",
    "Comparison",
    "Condition",
    "ConstantDef",
    "Defeater",
    "Diagnostic",
    "EventDef",
    "IntLit",
    "MeasureDef",
    "MeasureKind",
    "NameRef",
    "NotExpr",
    "OrExpr",
    "ParseResult",
    "Polarity",
    "Response",
    "Rule",
    "Severity",
    "SleecParseError",
    "Span",
    "Spec",
    "TimeUnit",
    "TimeValue",
    "Token",
    "TokenType",
    "analyze_names",
    "condition_measures",
    "format_condition",
    "format_rule",
    "format_spec",
    "has_errors",
    "parse",
    "parse_rule_text",
    "parse_spec",
    "rule_measures",
    "rule_response_events",
    "suggest_name",
    "tokenize",
    "typecheck",
    "validate",
]
