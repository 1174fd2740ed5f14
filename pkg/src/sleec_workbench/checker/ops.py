"""Checker entry points: deadlock, divergence, redundancy, and replay.

Deadlock semantics are game-theoretic: a verdict is reported exactly when
some environment strategy forces a state where no agent action set can
satisfy every active obligation, whatever the agent does along the way.
Divergence is plain reachability of a forced instantaneous cascade.
Redundancy compares the compliant bounded behaviours of the ruleset with
and without a rule, over the same environment alphabet.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from ..language.analysis import analyze_names, typecheck
from ..language.diagnostics import Diagnostic, Severity, has_errors
from ..language.nodes import Polarity, Spec, rule_response_events
from ..semantics import (
    Evaluator,
    Obligation,
    TickOverflowError,
    WorldStep,
    abstract_domains,
    activate,
    tick_scale,
)
from .engine import CheckConfig, Engine, Target, TimeBudgetExceeded
from .trace import Event, MeasureObs, Tock, Trace, format_trace


class VerdictKind(Enum):
    DEADLOCK = "deadlock"
    DIVERGENCE = "divergence"
    NAMING = "naming"
    REDUNDANCY = "redundancy"


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    rules: tuple[str, ...]
    trace: Optional[Trace]
    scenario: dict
    message: str

    def to_json(self, elide_tocks: bool = True) -> dict:
        return {
            "kind": self.kind.value,
            "rules": list(self.rules),
            "trace": format_trace(self.trace, elide_tocks) if self.trace else None,
            "scenario": dict(self.scenario),
            "message": self.message,
        }


@dataclass
class CheckReport:
    """Combined result of running every analysis over one ruleset."""

    diagnostics: list[Diagnostic] = field(default_factory=list)
    verdicts: list[Verdict] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    partial: bool = False

    @property
    def ok(self) -> bool:
        return not self.verdicts and not has_errors(self.diagnostics)

    def to_json(self, elide_tocks: bool = True) -> dict:
        doc = {
            "diagnostics": [d.to_json() for d in self.diagnostics],
            "verdicts": [v.to_json(elide_tocks) for v in self.verdicts],
            "warnings": list(self.warnings),
        }
        if self.partial:
            doc["partial"] = True
        return doc


def horizon_warnings(spec: Spec, cfg: CheckConfig) -> list[str]:
    scale = tick_scale(spec)
    deadlines = [scale.ticks(r.response.deadline) for r in spec.rules if r.response.deadline]
    for rule in spec.rules:
        for d in rule.defeaters:
            if d.response is not None and d.response.deadline is not None:
                deadlines.append(scale.ticks(d.response.deadline))
    longest = max(deadlines, default=0)
    if longest > cfg.horizon_ticks:
        return [
            f"horizon of {cfg.horizon_ticks} ticks is smaller than the longest deadline "
            f"({longest} ticks); deadline-driven conflicts past the horizon stay unreported"
        ]
    return []


def _conflict_candidates_exist(spec: Spec) -> bool:
    """A deadlock needs some rule able to prohibit an event that another
    rule (or the environment) can produce; scan responses statically."""
    must_events: set[str] = set()
    mustnot_events: set[str] = set()
    trigger_events = {r.trigger_event for r in spec.rules}
    for rule in spec.rules:
        responses = [rule.response] + [d.response for d in rule.defeaters if d.response]
        for resp in responses:
            if resp.polarity is Polarity.MUST_NOT:
                mustnot_events.add(resp.event)
            else:
                must_events.add(resp.event)
    return bool(mustnot_events & (must_events | trigger_events))


def check_consistency(
    spec: Spec, cfg: CheckConfig = CheckConfig(), deadline: Optional[float] = None
) -> list[Verdict]:
    if not _conflict_candidates_exist(spec):
        return []
    engine = Engine(spec, cfg, deadline=deadline)
    targets = engine.forced_targets(frozenset(), 0)
    ordered = sorted(
        targets, key=lambda t: tuple(engine.rule_index.get(r, -1) for r in t)
    )
    verdicts = []
    for target in ordered:
        trace, conflict = engine.witness(target)
        verdicts.append(_deadlock_verdict(target, trace, conflict))
    return verdicts


def _deadlock_verdict(target: Target, trace: Trace, conflict) -> Verdict:
    _, event, how = conflict
    if how == "env":
        message = (
            f"rule {target[0]} prohibits {event}, but the environment can make "
            f"{event} happen inside the prohibition window"
        )
    elif len(target) == 1:
        message = (
            f"rule {target[0]} both requires and prohibits {event} in overlapping windows"
        )
    else:
        message = (
            f"rule {target[0]} requires {event} by its deadline while "
            f"rule {target[1]} prohibits it over the same window"
        )
    return Verdict(VerdictKind.DEADLOCK, target, trace, trace.observations(), message)


def _immediate_cycle_possible(spec: Spec, cfg: CheckConfig) -> bool:
    """A cascade needs a cycle among immediate-response trigger edges; when
    the cap exceeds the rule count, an acyclic graph cannot diverge."""
    if cfg.cascade_cap < len(spec.rules):
        return True  # a long acyclic chain could still trip the cap
    edges: dict[str, set[str]] = {}
    for rule in spec.rules:
        responses = [rule.response] + [d.response for d in rule.defeaters if d.response]
        for resp in responses:
            if resp.polarity is Polarity.MUST and resp.deadline is None:
                for successor in spec.rules:
                    if successor.trigger_event == resp.event:
                        edges.setdefault(rule.rule_id, set()).add(successor.rule_id)

    visiting: set[str] = set()
    done: set[str] = set()

    def cyclic(node: str) -> bool:
        if node in done:
            return False
        if node in visiting:
            return True
        visiting.add(node)
        for nxt in edges.get(node, ()):
            if cyclic(nxt):
                return True
        visiting.discard(node)
        done.add(node)
        return False

    return any(cyclic(rule.rule_id) for rule in spec.rules)


def detect_divergence(
    spec: Spec, cfg: CheckConfig = CheckConfig(), deadline: Optional[float] = None
) -> list[Verdict]:
    if not _immediate_cycle_possible(spec, cfg):
        return []
    engine = Engine(spec, cfg, deadline=deadline)
    seen = {((), cfg.horizon_ticks)}
    queue: deque = deque([((), cfg.horizon_ticks, ())])
    found: dict[tuple[str, ...], tuple] = {}
    while queue:
        rel, remaining, prefix = queue.popleft()
        for env_events, valuation in engine.env_moves_rel(rel):
            outcomes, _failures, divergences = engine.resolve_rel(rel, env_events, valuation)
            for div in divergences:
                if div.rules not in found:
                    found[div.rules] = (prefix + div.entries, div.cycle)
            if remaining == 0:
                continue
            for entries, _here, nxt, _rounds in outcomes:
                key = (nxt, remaining - 1)
                if key not in seen:
                    seen.add(key)
                    queue.append((nxt, remaining - 1, prefix + entries + (Tock(),)))
    verdicts = []
    for rules, (entries, cycle) in found.items():
        trace = Trace(tuple(entries))
        cycle_text = " -> ".join(cycle) if cycle else "?"
        verdicts.append(
            Verdict(
                VerdictKind.DIVERGENCE,
                rules,
                trace,
                trace.observations(),
                f"rules {', '.join(rules)} re-trigger each other without time passing "
                f"(cascade {cycle_text} repeats in one instant)",
            )
        )
    verdicts.sort(key=lambda v: tuple(engine.rule_index.get(r, -1) for r in v.rules))
    return verdicts


def detect_redundancy(
    spec: Spec, cfg: CheckConfig = CheckConfig(), deadline: Optional[float] = None
) -> list[Verdict]:
    all_ids = [r.rule_id for r in spec.rules]
    inert = _inert_rules(spec)
    working = list(all_ids)
    verdicts = []
    for rid in all_ids:
        if rid in inert:
            # A rule that can never activate is disabled by design (the
            # standard way to retire a rule in place), not redundant.
            continue
        if _behaviors_equal(spec, cfg, working, [r for r in working if r != rid], deadline):
            remaining = [r for r in working if r != rid]
            subsumers = [
                s
                for s in remaining
                if not _behaviors_equal(
                    spec,
                    cfg,
                    [r for r in working if r != s],
                    [r for r in working if r not in (s, rid)],
                    deadline,
                )
            ]
            if len(subsumers) == 1:
                rules = (rid, subsumers[0])
                message = (
                    f"rule {rid} is redundant: rule {subsumers[0]} already enforces "
                    "the same bounded behaviour"
                )
            else:
                rules = (rid,)
                message = (
                    f"rule {rid} is redundant: removing it leaves the set of compliant "
                    "bounded behaviours unchanged"
                )
            trace = None
            verdicts.append(Verdict(VerdictKind.REDUNDANCY, rules, trace, {}, message))
            working.remove(rid)
    return verdicts


def _inert_rules(spec: Spec) -> set[str]:
    """Rules that no valuation can activate (unsatisfiable or always-cancelled)."""
    from ..language.nodes import rule_measures
    from ..semantics import resolve_response, valuations as domain_valuations

    evaluator = Evaluator(spec)
    domain = abstract_domains(spec)
    inert: set[str] = set()
    for rule in spec.rules:
        for valuation in domain_valuations(domain, rule_measures(rule)):
            if rule.trigger_condition is not None and not evaluator.condition(
                rule.trigger_condition, valuation
            ):
                continue
            if resolve_response(rule, valuation, evaluator) is not None:
                break
        else:
            inert.add(rule.rule_id)
    return inert


def _behaviors_equal(
    spec: Spec,
    cfg: CheckConfig,
    ids_a: list[str],
    ids_b: list[str],
    deadline: Optional[float],
) -> bool:
    """Compliant bounded behaviours of rule sets A and B coincide (A ⊇ B).

    The agent's first round may voluntarily fire the response events of the
    rules unique to A; a live prohibition in A then shows up as a play B
    allows and A forbids.
    """
    eng_a = Engine(spec, cfg, rule_ids=set(ids_a), deadline=deadline)
    eng_b = Engine(spec, cfg, rule_ids=set(ids_b), deadline=deadline)
    removed = [r for r in spec.rules if r.rule_id in set(ids_a) - set(ids_b)]
    voluntary: list[str] = []
    for rule in removed:
        for event in rule_response_events(rule):
            if event not in voluntary:
                voluntary.append(event)
    voluntary_events = tuple(voluntary)
    seen = {((), (), cfg.horizon_ticks)}
    queue: deque = deque([((), (), cfg.horizon_ticks)])
    while queue:
        rel_a, rel_b, remaining = queue.popleft()
        for env_events, valuation in eng_a.env_moves_rel(rel_a, voluntary_events):
            out_a, _fa, _da = eng_a.resolve_rel(rel_a, env_events, valuation, voluntary_events)
            out_b, _fb, _db = eng_b.resolve_rel(rel_b, env_events, valuation, voluntary_events)
            sig_a = {rounds: nxt for _e, _h, nxt, rounds in out_a}
            sig_b = {rounds: nxt for _e, _h, nxt, rounds in out_b}
            if set(sig_a) != set(sig_b):
                return False
            if remaining == 0:
                continue
            for sig, nxt_a in sig_a.items():
                key = (nxt_a, sig_b[sig], remaining - 1)
                if key not in seen:
                    seen.add(key)
                    queue.append(key)
    return True


def naming_verdicts(spec: Spec, diagnostics: list[Diagnostic]) -> list[Verdict]:
    """Rule-scoped naming diagnostics as verdicts, so they can be explained."""
    verdicts = []
    spans_to_rules = [(r.span, r.rule_id) for r in spec.rules]
    for diag in diagnostics:
        if diag.category.value != "naming" or diag.severity is not Severity.ERROR:
            continue
        owner = None
        for span, rid in spans_to_rules:
            if span.line <= diag.span.line <= span.end_line:
                owner = rid
                break
        if owner is None:
            continue
        message = diag.message
        if diag.suggestion:
            message += f" (did you mean '{diag.suggestion}'?)"
        verdicts.append(Verdict(VerdictKind.NAMING, (owner,), None, {}, message))
    return verdicts


def run_all(
    spec: Spec, cfg: CheckConfig = CheckConfig(), budget_secs: Optional[float] = None
) -> CheckReport:
    """Names, types, then deadlock/divergence/redundancy in that order.

    Consistency runs only on a name- and type-clean spec; redundancy only on
    a conflict-free one. A time budget turns an overrun into partial results
    instead of an error.
    """
    report = CheckReport()
    report.diagnostics = analyze_names(spec)
    if has_errors(report.diagnostics):
        report.verdicts = naming_verdicts(spec, report.diagnostics)
        return report
    report.diagnostics = typecheck(spec)
    if has_errors(report.diagnostics):
        return report
    try:
        report.warnings = horizon_warnings(spec, cfg)
    except TickOverflowError as exc:
        report.warnings = [str(exc)]
        return report
    deadline = time.monotonic() + budget_secs if budget_secs is not None else None
    try:
        deadlocks = check_consistency(spec, cfg, deadline)
        report.verdicts.extend(deadlocks)
        report.verdicts.extend(detect_divergence(spec, cfg, deadline))
        # Redundancy needs the horizon to cover every deadline; otherwise a
        # slow rule looks inert inside the bound and is falsely flagged.
        if not deadlocks and not report.warnings:
            report.verdicts.extend(detect_redundancy(spec, cfg, deadline))
    except TimeBudgetExceeded:
        report.partial = True
        report.warnings.append(
            f"analysis stopped after {budget_secs:.0f}s; verdicts may be incomplete"
        )
    return report


def replay_deadlock(spec: Spec, trace: Trace) -> bool:
    """Replay a witness through the semantics; True iff the final instant is
    a jointly unsatisfiable obligation state."""
    scale = tick_scale(spec)
    evaluator = Evaluator(spec)
    domain = abstract_domains(spec)
    pending: set[Obligation] = set()
    mustnots: set[Obligation] = set()
    instants = trace.instants()
    for clock, group in enumerate(instants):
        final = clock == len(instants) - 1
        pending = {ob for ob in pending if ob.deadline_at >= clock}
        mustnots = {ob for ob in mustnots if ob.deadline_at >= clock}
        valuation = {m.name: domain.of(m.name)[0] for m in spec.measures}
        for entry in group:
            if isinstance(entry, MeasureObs):
                valuation[entry.measure] = entry.value
        violated = False
        for entry in group:
            if not isinstance(entry, Event):
                continue
            name = entry.name
            if any(ob.event == name for ob in mustnots):
                violated = True
            pending = {ob for ob in pending if ob.event != name}
            busy = {ob.rule_id for ob in pending} | {ob.rule_id for ob in mustnots}
            step = WorldStep(frozenset({name}), valuation)
            for rule in spec.rules:
                if rule.rule_id in busy:
                    continue
                ob = activate(rule, step, clock, scale, evaluator)
                if ob is None:
                    continue
                if ob.polarity is Polarity.MUST_NOT:
                    mustnots.add(ob)
                else:
                    pending.add(ob)
        if final:
            prohibited = {ob.event for ob in mustnots}
            due_blocked = any(
                ob.deadline_at == clock and ob.event in prohibited for ob in pending
            )
            return due_blocked or violated
    return False
