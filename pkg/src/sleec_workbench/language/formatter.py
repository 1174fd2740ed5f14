"""Canonical pretty-printer for SLEEC documents.

Definitions and rules are indented four spaces inside their blocks;
defeaters go on continuation lines indented a further four. Printing is
precedence-aware, inserting parentheses only where the tree requires
them, so ``parse(format(spec))`` is structurally equal to ``spec`` and a
second formatting pass is a no-op.
"""

from __future__ import annotations

from .nodes import (
    AndExpr,
    BoolAtom,
    Comparison,
    Condition,
    IntLit,
    MeasureDef,
    MeasureKind,
    NotExpr,
    OrExpr,
    Response,
    Rule,
    Spec,
)

_INDENT = "    "

# Higher binds tighter: or < and < not < atom.
_PREC_OR, _PREC_AND, _PREC_NOT, _PREC_ATOM = 1, 2, 3, 4


def format_spec(spec: Spec) -> str:
    lines: list[str] = ["def_start"]
    for ev in spec.events:
        lines.append(f"{_INDENT}event {ev.name}")
    for m in spec.measures:
        lines.append(f"{_INDENT}measure {m.name}: {_measure_type(m)}")
    for c in spec.constants:
        lines.append(f"{_INDENT}constant {c.name} = {c.value}")
    lines.append("def_end")
    lines.append("rule_start")
    for rule in spec.rules:
        lines.extend(format_rule_lines(rule))
    lines.append("rule_end")
    return "\n".join(lines) + "\n"


def format_rule(rule: Rule) -> str:
    """One rule as source text (single logical statement, possibly multi-line)."""
    return "\n".join(line.lstrip() if i == 0 else line[len(_INDENT):]
                     for i, line in enumerate(format_rule_lines(rule)))


def format_rule_lines(rule: Rule) -> list[str]:
    head = f"{_INDENT}{rule.rule_id} when {rule.trigger_event}"
    if rule.trigger_condition is not None:
        head += f" and {format_condition(rule.trigger_condition)}"
    head += f" then {_response(rule.response)}"
    lines = [head]
    for d in rule.defeaters:
        line = f"{_INDENT}{_INDENT}unless {format_condition(d.condition)}"
        if d.response is not None:
            line += f" then {_response(d.response)}"
        lines.append(line)
    return lines


def format_condition(cond: Condition) -> str:
    return _condition(cond, _PREC_OR)


def _measure_type(m: MeasureDef) -> str:
    if m.kind is MeasureKind.SCALE:
        return f"scale({', '.join(m.scale_literals)})"
    return m.kind.value


def _response(r: Response) -> str:
    text = f"not {r.event}" if r.polarity.name == "MUST_NOT" else r.event
    if r.deadline is not None:
        unit = r.deadline.unit.value
        if r.deadline.amount == 1:
            unit = unit[:-1]
        text += f" within {r.deadline.amount} {unit}"
    return text


def _condition(cond: Condition, outer: int) -> str:
    if isinstance(cond, BoolAtom):
        return cond.measure
    if isinstance(cond, Comparison):
        operand = cond.operand
        rhs = str(operand.value) if isinstance(operand, IntLit) else operand.name
        return f"{cond.measure} {cond.op} {rhs}"
    if isinstance(cond, NotExpr):
        text = f"not {_condition(cond.operand, _PREC_NOT)}"
        return f"({text})" if outer > _PREC_NOT else text
    if isinstance(cond, AndExpr):
        text = f"{_condition(cond.left, _PREC_AND)} and {_condition(cond.right, _PREC_AND + 1)}"
        return f"({text})" if outer > _PREC_AND else text
    if isinstance(cond, OrExpr):
        text = f"{_condition(cond.left, _PREC_OR)} or {_condition(cond.right, _PREC_OR + 1)}"
        return f"({text})" if outer > _PREC_OR else text
    raise TypeError(f"not a condition node: {cond!r}")
