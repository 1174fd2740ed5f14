"""Abstract syntax tree for SLEEC documents.

Nodes are frozen dataclasses. Source spans are carried on every node but
excluded from equality, so two parses of equivalent text compare equal
structurally (the round-trip guarantee relies on this).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Union

from .diagnostics import Span

_NO_SPAN = Span(0, 0, 0, 0)


def _span_field() -> Span:
    return field(default=_NO_SPAN, compare=False, repr=False)  # type: ignore[return-value]


class MeasureKind(Enum):
    BOOLEAN = "boolean"
    NUMERIC = "numeric"
    SCALE = "scale"


class Polarity(Enum):
    MUST = "must"
    MUST_NOT = "must_not"


class TimeUnit(Enum):
    SECONDS = "seconds"
    MINUTES = "minutes"
    HOURS = "hours"
    DAYS = "days"

    @property
    def seconds(self) -> int:
        return {"seconds": 1, "minutes": 60, "hours": 3600, "days": 86400}[self.value]


@dataclass(frozen=True)
class EventDef:
    name: str
    span: Span = _span_field()


@dataclass(frozen=True)
class MeasureDef:
    name: str
    kind: MeasureKind
    scale_literals: tuple[str, ...] = ()
    span: Span = _span_field()

    def literal_index(self, literal: str) -> int:
        return self.scale_literals.index(literal)


@dataclass(frozen=True)
class ConstantDef:
    name: str
    value: int
    span: Span = _span_field()


@dataclass(frozen=True)
class IntLit:
    value: int
    span: Span = _span_field()


@dataclass(frozen=True)
class NameRef:
    """Identifier operand in a comparison: a constant or a scale literal."""

    name: str
    span: Span = _span_field()


Operand = Union[IntLit, NameRef]


@dataclass(frozen=True)
class Comparison:
    measure: str
    op: str  # one of < > <= >= = <>
    operand: Operand
    span: Span = _span_field()


@dataclass(frozen=True)
class BoolAtom:
    measure: str
    span: Span = _span_field()


@dataclass(frozen=True)
class NotExpr:
    operand: "Condition"
    span: Span = _span_field()


@dataclass(frozen=True)
class AndExpr:
    left: "Condition"
    right: "Condition"
    span: Span = _span_field()


@dataclass(frozen=True)
class OrExpr:
    left: "Condition"
    right: "Condition"
    span: Span = _span_field()


Condition = Union[Comparison, BoolAtom, NotExpr, AndExpr, OrExpr]


@dataclass(frozen=True)
class TimeValue:
    amount: int
    unit: TimeUnit
    span: Span = _span_field()

    @property
    def seconds(self) -> int:
        return self.amount * self.unit.seconds


@dataclass(frozen=True)
class Response:
    polarity: Polarity
    event: str
    deadline: TimeValue | None = None
    span: Span = _span_field()


@dataclass(frozen=True)
class Defeater:
    """An ``unless`` clause; a missing response cancels the obligation."""

    condition: Condition
    response: Response | None = None
    span: Span = _span_field()


@dataclass(frozen=True)
class Rule:
    rule_id: str
    trigger_event: str
    trigger_condition: Condition | None
    response: Response
    defeaters: tuple[Defeater, ...] = ()
    span: Span = _span_field()


@dataclass(frozen=True)
class Spec:
    events: tuple[EventDef, ...] = ()
    measures: tuple[MeasureDef, ...] = ()
    constants: tuple[ConstantDef, ...] = ()
    rules: tuple[Rule, ...] = ()

    @property
    def source_spans(self) -> dict[int, Span]:
        """Stable preorder node-id -> span mapping for tooling."""
        spans: dict[int, Span] = {}
        for i, node in enumerate(self.walk()):
            spans[i] = node.span
        return spans

    def walk(self):
        for ev in self.events:
            yield ev
        for m in self.measures:
            yield m
        for c in self.constants:
            yield c
        for r in self.rules:
            yield r
            if r.trigger_condition is not None:
                yield from walk_condition(r.trigger_condition)
            yield r.response
            for d in r.defeaters:
                yield d
                yield from walk_condition(d.condition)
                if d.response is not None:
                    yield d.response

    def event_names(self) -> list[str]:
        return [e.name for e in self.events]

    def measure(self, name: str) -> MeasureDef | None:
        for m in self.measures:
            if m.name == name:
                return m
        return None

    def constant(self, name: str) -> ConstantDef | None:
        for c in self.constants:
            if c.name == name:
                return c
        return None

    def rule(self, rule_id: str) -> Rule | None:
        for r in self.rules:
            if r.rule_id == rule_id:
                return r
        return None


def walk_condition(cond: Condition):
    yield cond
    if isinstance(cond, NotExpr):
        yield from walk_condition(cond.operand)
    elif isinstance(cond, (AndExpr, OrExpr)):
        yield from walk_condition(cond.left)
        yield from walk_condition(cond.right)
    elif isinstance(cond, Comparison):
        yield cond.operand


def condition_measures(cond: Condition) -> list[str]:
    """Measure names referenced by ``cond``, in first-appearance order."""
    out: list[str] = []
    for node in walk_condition(cond):
        if isinstance(node, (Comparison, BoolAtom)) and node.measure not in out:
            out.append(node.measure)
    return out


def rule_measures(rule: Rule) -> list[str]:
    """Measures consulted when ``rule`` is triggered (condition + defeaters)."""
    out: list[str] = []
    conds = []
    if rule.trigger_condition is not None:
        conds.append(rule.trigger_condition)
    conds.extend(d.condition for d in rule.defeaters)
    for cond in conds:
        for name in condition_measures(cond):
            if name not in out:
                out.append(name)
    return out


def rule_response_events(rule: Rule) -> list[str]:
    """Events the rule can oblige or prohibit (base plus defeater responses)."""
    out = [rule.response.event]
    for d in rule.defeaters:
        if d.response is not None and d.response.event not in out:
            out.append(d.response.event)
    return out
