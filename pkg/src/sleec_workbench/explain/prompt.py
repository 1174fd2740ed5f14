"""Prompt assembly for explanation requests.

The prompt carries four context sections in fixed order: (1) the
relevant SLEEC rules and definitions, (2) a pseudo-CSP rendering of
those rules, (3) the counterexample trace, (4) the natural-language
system description; the published output template follows verbatim.
Context selection is an identifier closure: every rule named by the
verdict, every rule sharing an event or measure with the verdict's
trace, and all definitions those rules mention.

The pseudo-CSP convention, one process line per rule:

    RuleId = trigger -> (guard1 & response1) [] ... [] base-response

with ``(event & condition)`` for conditioned triggers, ``not`` for
prohibitions, ``SKIP`` for cancelling defeaters, and deadlines in ticks
(``within n tock``). Comparisons print without spaces; ``&``, ``or``,
and ``!`` join conditions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..checker.engine import CheckConfig
from ..checker.ops import Verdict
from ..checker.trace import format_trace
from ..language.formatter import format_rule_lines
from ..language.nodes import (
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
    Response,
    Rule,
    Spec,
    condition_measures,
    rule_measures,
    rule_response_events,
)
from ..semantics import TickScale, tick_scale
from .report import output_template

MISSING_DESCRIPTION = (
    "No system description was provided; reason from the rules and trace alone."
)

_PREAMBLE = (
    "You are helping a requirements engineer debug SLEEC normative rules. "
    "Using the context below, explain the reported problem in plain language "
    "and propose two distinct resolutions."
)

_REDUNDANCY_NOTE = (
    "The reported problem is a redundancy: the first rule adds no behaviour "
    "beyond the others. Explain why and suggest how to simplify the ruleset."
)


@dataclass(frozen=True)
class ContextSelection:
    rules: tuple[Rule, ...]
    spec_slice: Spec


@dataclass(frozen=True)
class PromptBundle:
    sections: tuple[str, str, str, str]
    template: str
    preamble: str
    warnings: tuple[str, ...] = field(default=())

    def text(self) -> str:
        titles = (
            "SLEEC rules and definitions",
            "Formal semantics (pseudo-CSP)",
            "Counterexample",
            "System description",
        )
        parts = [self.preamble, ""]
        for i, (title, body) in enumerate(zip(titles, self.sections), start=1):
            parts.append(f"({i}) {title}:")
            parts.append(body)
            parts.append("")
        parts.append("Reply with exactly one JSON object following this template:")
        parts.append(self.template)
        return "\n".join(parts)


def select_context(spec: Spec, verdict: Verdict) -> ContextSelection:
    trace_events: set[str] = set()
    trace_measures: set[str] = set()
    if verdict.trace is not None:
        for entry in verdict.trace.entries:
            name = getattr(entry, "name", None)
            if name is not None:
                trace_events.add(name)
            measure = getattr(entry, "measure", None)
            if measure is not None:
                trace_measures.add(measure)

    chosen: list[Rule] = []
    for rule in spec.rules:
        if rule.rule_id in verdict.rules:
            chosen.append(rule)
            continue
        rule_events = {rule.trigger_event, *rule_response_events(rule)}
        if rule_events & trace_events or set(rule_measures(rule)) & trace_measures:
            chosen.append(rule)

    used_events: set[str] = set()
    used_measures: set[str] = set()
    used_constants: set[str] = set()
    constant_names = {c.name for c in spec.constants}
    for rule in chosen:
        used_events.add(rule.trigger_event)
        used_events.update(rule_response_events(rule))
        used_measures.update(rule_measures(rule))
        conds = ([rule.trigger_condition] if rule.trigger_condition else []) + [
            d.condition for d in rule.defeaters
        ]
        for cond in conds:
            for m in condition_measures(cond):
                used_measures.add(m)
            used_constants.update(_constants_in(cond, constant_names))

    spec_slice = Spec(
        events=tuple(e for e in spec.events if e.name in used_events),
        measures=tuple(m for m in spec.measures if m.name in used_measures),
        constants=tuple(c for c in spec.constants if c.name in used_constants),
        rules=tuple(chosen),
    )
    return ContextSelection(tuple(chosen), spec_slice)


def _constants_in(cond: Condition, constant_names: set[str]) -> set[str]:
    found: set[str] = set()
    if isinstance(cond, Comparison):
        if isinstance(cond.operand, NameRef) and cond.operand.name in constant_names:
            found.add(cond.operand.name)
    elif isinstance(cond, NotExpr):
        found |= _constants_in(cond.operand, constant_names)
    elif isinstance(cond, (AndExpr, OrExpr)):
        found |= _constants_in(cond.left, constant_names)
        found |= _constants_in(cond.right, constant_names)
    return found


def render_pseudo_csp(rules: tuple[Rule, ...], spec: Spec) -> str:
    if not rules:
        return ""
    scale = tick_scale(spec)
    return "\n".join(_csp_line(rule, scale) for rule in rules)


def _csp_line(rule: Rule, scale: TickScale) -> str:
    trigger = rule.trigger_event
    if rule.trigger_condition is not None:
        trigger = f"({rule.trigger_event} & {_csp_condition(rule.trigger_condition)})"
    alternatives = [
        f"({_csp_condition(d.condition)} & {_csp_response(d.response, scale)})"
        for d in rule.defeaters
    ]
    alternatives.append(_csp_response(rule.response, scale))
    return f"{rule.rule_id} = {trigger} -> " + " [] ".join(alternatives)


def _csp_response(response: Response | None, scale: TickScale) -> str:
    if response is None:
        return "SKIP"
    text = f"not {response.event}" if response.polarity is Polarity.MUST_NOT else response.event
    if response.deadline is not None:
        text += f" within {scale.ticks(response.deadline)} tock"
    return text


def _csp_condition(cond: Condition, outer: int = 1) -> str:
    # or=1 < and=2 < not=3, compact comparisons
    if isinstance(cond, BoolAtom):
        return cond.measure
    if isinstance(cond, Comparison):
        rhs = (
            str(cond.operand.value)
            if isinstance(cond.operand, IntLit)
            else cond.operand.name
        )
        return f"{cond.measure}{cond.op}{rhs}"
    if isinstance(cond, NotExpr):
        text = f"!{_csp_condition(cond.operand, 3)}"
        return text
    if isinstance(cond, AndExpr):
        text = f"{_csp_condition(cond.left, 2)} & {_csp_condition(cond.right, 3)}"
        return f"({text})" if outer > 2 else text
    if isinstance(cond, OrExpr):
        text = f"{_csp_condition(cond.left, 1)} or {_csp_condition(cond.right, 2)}"
        return f"({text})" if outer > 1 else text
    raise TypeError(f"not a condition node: {cond!r}")


def build_prompt(
    spec: Spec,
    verdict: Verdict,
    system_description: str = "",
    cfg: CheckConfig = CheckConfig(),
) -> PromptBundle:
    context = select_context(spec, verdict)
    slice_spec = context.spec_slice

    lines: list[str] = []
    for ev in slice_spec.events:
        lines.append(f"event {ev.name}")
    for m in slice_spec.measures:
        if m.kind is MeasureKind.SCALE:
            lines.append(f"measure {m.name}: scale({', '.join(m.scale_literals)})")
        else:
            lines.append(f"measure {m.name}: {m.kind.value}")
    for c in slice_spec.constants:
        lines.append(f"constant {c.name} = {c.value}")
    for rule in context.rules:
        lines.extend(line.strip() for line in format_rule_lines(rule))
    section1 = "\n".join(lines)

    section2 = render_pseudo_csp(context.rules, spec)

    counter_lines = [f"problem: {verdict.kind.value} involving {', '.join(verdict.rules)}"]
    if verdict.trace is not None:
        counter_lines.append(f"trace: {format_trace(verdict.trace, cfg.elide_tocks)}")
    if verdict.scenario:
        scenario = ", ".join(f"{k}={_scenario_value(v)}" for k, v in verdict.scenario.items())
        counter_lines.append(f"scenario: {scenario}")
    counter_lines.append(verdict.message)
    section3 = "\n".join(counter_lines)

    warnings: tuple[str, ...] = ()
    section4 = system_description.strip()
    if not section4:
        section4 = MISSING_DESCRIPTION
        warnings = ("no system description provided; a placeholder was used",)

    preamble = _PREAMBLE
    if verdict.kind.value == "redundancy":
        preamble = f"{_PREAMBLE}\n{_REDUNDANCY_NOTE}"

    return PromptBundle(
        (section1, section2, section3, section4),
        output_template(),
        preamble,
        warnings,
    )


def _scenario_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)
