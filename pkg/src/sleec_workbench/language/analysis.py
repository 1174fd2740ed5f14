"""Name resolution and type checking over a parsed Spec.

``analyze_names`` reports duplicate definitions, duplicate rule ids, and
unresolved references, attaching a near-miss suggestion when a defined
name matches case-insensitively or is one edit away. ``typecheck``
assumes names resolve and enforces the comparison typing rules: numeric
measures compare against integers or constants, scale measures against
literals of their own scale, boolean measures appear only as (negated)
atoms.
"""

from __future__ import annotations

from .diagnostics import Category, Diagnostic, Severity, Span
from .nodes import (
    AndExpr,
    BoolAtom,
    Comparison,
    Condition,
    IntLit,
    MeasureDef,
    MeasureKind,
    NameRef,
    NotExpr,
    OrExpr,
    Rule,
    Spec,
)


def edit_distance_at_most_one(a: str, b: str) -> bool:
    if a == b:
        return True
    la, lb = len(a), len(b)
    if abs(la - lb) > 1:
        return False
    if la == lb:
        return sum(1 for x, y in zip(a, b) if x != y) == 1
    if la > lb:
        a, b, la, lb = b, a, lb, la
    # a is shorter by one: b must equal a with one insertion
    i = j = 0
    skipped = False
    while i < la and j < lb:
        if a[i] == b[j]:
            i += 1
            j += 1
        elif skipped:
            return False
        else:
            skipped = True
            j += 1
    return True


def suggest_name(unknown: str, candidates: list[str]) -> str | None:
    """Nearest defined name: exact-but-for-case first, then edit distance 1."""
    for name in candidates:
        if name != unknown and name.lower() == unknown.lower():
            return name
    for name in candidates:
        if name != unknown and edit_distance_at_most_one(unknown, name):
            return name
    return None


def analyze_names(spec: Spec) -> list[Diagnostic]:
    diagnostics: list[Diagnostic] = []

    def naming_error(span: Span, message: str, suggestion: str | None = None) -> None:
        diagnostics.append(Diagnostic(Severity.ERROR, Category.NAMING, span, message, suggestion))

    # Duplicate checks: one namespace across events, measures, and constants.
    seen: dict[str, Span] = {}
    for node in list(spec.events) + list(spec.measures) + list(spec.constants):
        if node.name in seen:
            naming_error(node.span, f"duplicate definition of '{node.name}'")
        else:
            seen[node.name] = node.span
    seen_rules: dict[str, Span] = {}
    for rule in spec.rules:
        if rule.rule_id in seen_rules:
            naming_error(rule.span, f"duplicate rule id '{rule.rule_id}'")
        else:
            seen_rules[rule.rule_id] = rule.span

    event_names = [e.name for e in spec.events]
    measure_names = [m.name for m in spec.measures]
    constant_names = [c.name for c in spec.constants]
    scale_literals: list[str] = []
    for m in spec.measures:
        for lit in m.scale_literals:
            if lit not in scale_literals:
                scale_literals.append(lit)
    operand_names = constant_names + scale_literals

    def check_event_ref(name: str, span: Span, role: str) -> None:
        if name not in event_names:
            naming_error(span, f"{role} '{name}' is not a defined event",
                         suggest_name(name, event_names))

    def check_condition(cond: Condition) -> None:
        if isinstance(cond, (Comparison, BoolAtom)):
            if cond.measure not in measure_names:
                naming_error(cond.span, f"'{cond.measure}' is not a defined measure",
                             suggest_name(cond.measure, measure_names))
            if isinstance(cond, Comparison) and isinstance(cond.operand, NameRef):
                ref = cond.operand
                if ref.name not in operand_names:
                    naming_error(
                        ref.span,
                        f"'{ref.name}' is not a defined constant or scale literal",
                        suggest_name(ref.name, operand_names),
                    )
        elif isinstance(cond, NotExpr):
            check_condition(cond.operand)
        elif isinstance(cond, (AndExpr, OrExpr)):
            check_condition(cond.left)
            check_condition(cond.right)

    for rule in spec.rules:
        check_event_ref(rule.trigger_event, rule.span, "trigger event")
        if rule.trigger_condition is not None:
            check_condition(rule.trigger_condition)
        check_event_ref(rule.response.event, rule.response.span, "response event")
        for d in rule.defeaters:
            check_condition(d.condition)
            if d.response is not None:
                check_event_ref(d.response.event, d.response.span, "response event")

    diagnostics.sort(key=lambda d: (d.span.line, d.span.col, d.message))
    return diagnostics


def typecheck(spec: Spec) -> list[Diagnostic]:
    diagnostics: list[Diagnostic] = []
    measures = {m.name: m for m in spec.measures}
    constants = {c.name for c in spec.constants}
    all_scale_literals = {lit for m in spec.measures for lit in m.scale_literals}

    def type_error(span: Span, message: str) -> None:
        diagnostics.append(Diagnostic(Severity.ERROR, Category.TYPE, span, message))

    def check_comparison(cmp: Comparison) -> None:
        m = measures.get(cmp.measure)
        if m is None:
            return  # naming already reported it
        if m.kind is MeasureKind.BOOLEAN:
            type_error(
                cmp.span,
                f"boolean measure '{m.name}' cannot be compared; use it as a plain atom",
            )
            return
        operand = cmp.operand
        if m.kind is MeasureKind.NUMERIC:
            if isinstance(operand, NameRef) and operand.name not in constants:
                type_error(
                    cmp.span,
                    f"numeric measure '{m.name}' must be compared to an integer or constant, "
                    f"not '{operand.name}'",
                )
            return
        # scale measure
        if isinstance(operand, IntLit):
            type_error(
                cmp.span,
                f"scale measure '{m.name}' cannot be compared to the integer {operand.value}; "
                f"its values are {', '.join(m.scale_literals)}",
            )
        elif isinstance(operand, NameRef) and operand.name not in m.scale_literals:
            if operand.name in all_scale_literals or operand.name in constants:
                type_error(
                    cmp.span,
                    f"'{operand.name}' is not a literal of scale measure '{m.name}' "
                    f"(expected one of {', '.join(m.scale_literals)})",
                )

    def check_condition(cond: Condition) -> None:
        if isinstance(cond, Comparison):
            check_comparison(cond)
        elif isinstance(cond, BoolAtom):
            m = measures.get(cond.measure)
            if m is not None and m.kind is not MeasureKind.BOOLEAN:
                type_error(
                    cond.span,
                    f"measure '{m.name}' is {m.kind.value}; only boolean measures "
                    "stand alone as atoms",
                )
        elif isinstance(cond, NotExpr):
            check_condition(cond.operand)
        elif isinstance(cond, (AndExpr, OrExpr)):
            check_condition(cond.left)
            check_condition(cond.right)

    for rule in spec.rules:
        if rule.trigger_condition is not None:
            check_condition(rule.trigger_condition)
        for d in rule.defeaters:
            check_condition(d.condition)

    diagnostics.sort(key=lambda d: (d.span.line, d.span.col, d.message))
    return diagnostics


def validate(spec: Spec) -> list[Diagnostic]:
    """Names first, then types; type checking is skipped on naming errors."""
    diagnostics = analyze_names(spec)
    if not diagnostics:
        diagnostics = typecheck(spec)
    return diagnostics
