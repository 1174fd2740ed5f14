"""Discrete-time obligation model compiled from a validated Spec.

Time is a sequence of instants separated by ticks. Deadlines are expressed
as whole tick counts in the smallest time unit any rule mentions (minutes
when no rule carries a deadline). Measures are re-sampled by the
environment at every instant; their domains are made finite here so the
checker can enumerate them exhaustively:

* boolean measures keep {false, true};
* scale measures keep their declared literals, ordered as declared;
* numeric measures keep one representative per interval carved out by the
  comparison constants that actually appear in the spec, so the truth
  value of every comparison in scope is constant on each representative's
  interval.

Activating a rule evaluates its defeaters in order against the instant's
valuation; the last defeater whose condition holds decides the outcome
(its response, or cancellation when it has none). A response without a
``within`` deadline is due at the activation instant itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Union

from .language.nodes import (
    AndExpr,
    BoolAtom,
    Comparison,
    Condition,
    IntLit,
    MeasureKind,
    NameRef,
    NotExpr,
    OrExpr,
    Polarity,
    Rule,
    Spec,
    TimeUnit,
    TimeValue,
    walk_condition,
)

Value = Union[bool, int, str]

MAX_DEADLINE_TICKS = 10**6
NUMERIC_CLAMP = 10**6


class TickOverflowError(Exception):
    """A deadline needs more than ``MAX_DEADLINE_TICKS`` ticks at this base unit."""


@dataclass(frozen=True)
class TickScale:
    base_unit: TimeUnit
    ticks_per_deadline: Mapping[str, int]

    def ticks(self, deadline: TimeValue) -> int:
        return deadline.seconds // self.base_unit.seconds

    def max_deadline_ticks(self) -> int:
        return max(self.ticks_per_deadline.values(), default=0)


def tick_scale(spec: Spec) -> TickScale:
    deadlines: list[tuple[str, TimeValue]] = []
    for rule in spec.rules:
        if rule.response.deadline is not None:
            deadlines.append((rule.rule_id, rule.response.deadline))
        for d in rule.defeaters:
            if d.response is not None and d.response.deadline is not None:
                deadlines.append((rule.rule_id, d.response.deadline))
    if deadlines:
        base = min((tv.unit for _, tv in deadlines), key=lambda u: u.seconds)
    else:
        base = TimeUnit.MINUTES
    scale = TickScale(base, {})
    per_rule: dict[str, int] = {}
    for rule in spec.rules:
        tv = rule.response.deadline
        if tv is not None:
            per_rule[rule.rule_id] = scale.ticks(tv)
    for rule_id, tv in deadlines:
        ticks = scale.ticks(tv)
        if ticks > MAX_DEADLINE_TICKS:
            raise TickOverflowError(
                f"deadline of rule {rule_id} is {ticks} ticks at {base.value} granularity "
                f"(limit {MAX_DEADLINE_TICKS}); use a coarser unit"
            )
    return TickScale(base, per_rule)


@dataclass(frozen=True)
class AbstractDomain:
    values: Mapping[str, tuple[Value, ...]]

    def of(self, measure: str) -> tuple[Value, ...]:
        return self.values[measure]


def abstract_domains(spec: Spec) -> AbstractDomain:
    constants = {c.name: c.value for c in spec.constants}
    thresholds: dict[str, set[int]] = {m.name: set() for m in spec.measures}

    def collect(cond: Condition) -> None:
        for node in walk_condition(cond):
            if isinstance(node, Comparison) and node.measure in thresholds:
                operand = node.operand
                if isinstance(operand, IntLit):
                    thresholds[node.measure].add(operand.value)
                elif isinstance(operand, NameRef) and operand.name in constants:
                    thresholds[node.measure].add(constants[operand.name])

    for rule in spec.rules:
        if rule.trigger_condition is not None:
            collect(rule.trigger_condition)
        for d in rule.defeaters:
            collect(d.condition)

    values: dict[str, tuple[Value, ...]] = {}
    for m in spec.measures:
        if m.kind is MeasureKind.BOOLEAN:
            values[m.name] = (False, True)
        elif m.kind is MeasureKind.SCALE:
            values[m.name] = m.scale_literals
        else:
            points = thresholds[m.name]
            if not points:
                values[m.name] = (0,)
                continue
            reps: set[int] = set()
            for t in sorted(points):
                for v in (t - 1, t, t + 1):
                    reps.add(max(-NUMERIC_CLAMP, min(NUMERIC_CLAMP, v)))
            values[m.name] = tuple(sorted(reps))
    return AbstractDomain(values)


@dataclass(frozen=True)
class Obligation:
    rule_id: str
    polarity: Polarity
    event: str
    activated_at: int
    deadline_at: int

    def __post_init__(self):
        if self.deadline_at < self.activated_at:
            raise ValueError("deadline precedes activation")


@dataclass(frozen=True)
class WorldStep:
    fired_events: frozenset[str]
    valuation: Mapping[str, Value]


@dataclass(frozen=True)
class Configuration:
    clock: int
    active: frozenset[Obligation]
    instantaneous_depth: int = 0


class Evaluator:
    """Condition evaluation with the spec's scale orders and constants baked in."""

    def __init__(self, spec: Spec):
        self.constants = {c.name: c.value for c in spec.constants}
        self.scale_index: dict[str, dict[str, int]] = {}
        self.kinds: dict[str, MeasureKind] = {}
        for m in spec.measures:
            self.kinds[m.name] = m.kind
            if m.kind is MeasureKind.SCALE:
                self.scale_index[m.name] = {lit: i for i, lit in enumerate(m.scale_literals)}

    def condition(self, cond: Condition, valuation: Mapping[str, Value]) -> bool:
        if isinstance(cond, BoolAtom):
            return bool(valuation[cond.measure])
        if isinstance(cond, NotExpr):
            return not self.condition(cond.operand, valuation)
        if isinstance(cond, AndExpr):
            return self.condition(cond.left, valuation) and self.condition(cond.right, valuation)
        if isinstance(cond, OrExpr):
            return self.condition(cond.left, valuation) or self.condition(cond.right, valuation)
        if isinstance(cond, Comparison):
            return self.comparison(cond, valuation)
        raise TypeError(f"not a condition node: {cond!r}")

    def comparison(self, cmp: Comparison, valuation: Mapping[str, Value]) -> bool:
        value = valuation[cmp.measure]
        if cmp.measure in self.scale_index:
            index = self.scale_index[cmp.measure]
            left = index[value]  # type: ignore[index]
            operand = cmp.operand
            right = index[operand.name] if isinstance(operand, NameRef) else operand.value
        else:
            left = value  # type: ignore[assignment]
            operand = cmp.operand
            right = (
                self.constants[operand.name] if isinstance(operand, NameRef) else operand.value
            )
        return {
            "<": left < right,
            ">": left > right,
            "<=": left <= right,
            ">=": left >= right,
            "=": left == right,
            "<>": left != right,
        }[cmp.op]


def evaluate_condition(cond: Condition, valuation: Mapping[str, Value], spec: Spec) -> bool:
    return Evaluator(spec).condition(cond, valuation)


def resolve_response(rule: Rule, valuation: Mapping[str, Value], evaluator: Evaluator):
    """Base response unless a defeater fires; the last matching defeater wins.

    Returns the chosen Response, or None when a response-less defeater
    cancels the obligation.
    """
    chosen = rule.response
    for d in rule.defeaters:
        if evaluator.condition(d.condition, valuation):
            chosen = d.response
    return chosen


def activate(
    rule: Rule,
    step: WorldStep,
    clock: int,
    scale: TickScale,
    evaluator: Evaluator | None = None,
    spec: Spec | None = None,
) -> Obligation | None:
    """Obligation created by ``rule`` at ``clock`` for this step, if any."""
    if rule.trigger_event not in step.fired_events:
        return None
    if evaluator is None:
        if spec is None:
            raise ValueError("activate needs an Evaluator or the Spec to build one")
        evaluator = Evaluator(spec)
    if rule.trigger_condition is not None and not evaluator.condition(
        rule.trigger_condition, step.valuation
    ):
        return None
    response = resolve_response(rule, step.valuation, evaluator)
    if response is None:
        return None
    ticks = scale.ticks(response.deadline) if response.deadline is not None else 0
    return Obligation(rule.rule_id, response.polarity, response.event, clock, clock + ticks)


def valuations(domain: AbstractDomain, measures: Iterable[str]):
    """All assignments over ``measures`` in domain-declaration order."""
    names = list(measures)
    if not names:
        yield {}
        return
    head, rest = names[0], names[1:]
    for value in domain.of(head):
        for tail in valuations(domain, rest):
            assignment = {head: value}
            assignment.update(tail)
            yield assignment
