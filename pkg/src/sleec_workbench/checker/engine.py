"""Bounded exploration of the timed obligation game.

One instant unfolds in rounds. Round 0 belongs to the environment: it
samples every relevant measure and fires up to
``max_env_events_per_instant`` trigger events. Each later round belongs
to the agent, which fires a set of events simultaneously; an event fired
in round k satisfies obligations created in earlier rounds, violates
prohibitions created in earlier rounds, and triggers rules whose new
obligations take effect from round k+1. Obligations due at the current
instant (immediate, or at their deadline) must all be fired before the
agent may stop. Occurrences are global: an event fired by either side
counts for satisfaction, violation, and triggering alike.

A rule with an outstanding obligation (a pending requirement or an
unexpired prohibition) does not stack a second one on re-trigger; it can
activate again once the obligation is discharged, including within the
same round when that round's own occurrences satisfy it.

A play is *stuck* when a due obligation's event is prohibited by an
active prohibition, or when the environment itself fires a prohibited
event; the involved rules form a conflict target. The environment
*forces* a target when some move leaves the agent no compliant
resolution manifesting that target, or leads only to states from which
the target stays forced. Forced targets become deadlock verdicts.

A *forced cascade* (rounds entered with due obligations pending) running
past ``cascade_cap`` within a single instant is a divergence.

Exploration order is canonical everywhere: event sets by ascending
cardinality then definition order, valuations in domain-declaration
order, agent sets by ascending cardinality then definition order, with
the stop move first. Verdicts and witnesses are therefore deterministic.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterator, Mapping, Optional

from ..language.nodes import Polarity, Rule, Spec, rule_measures, rule_response_events
from ..semantics import (
    AbstractDomain,
    Evaluator,
    Obligation,
    TickScale,
    Value,
    abstract_domains,
    resolve_response,
    tick_scale,
    valuations,
)
from .trace import Event, MeasureObs, Tock, Trace, TraceEntry

INF = float("inf")

Target = tuple[str, ...]
# Involved rules (definition order), the contested event, and how the play
# got stuck: "due" (a due obligation's event is prohibited) or "env" (the
# environment fired a prohibited event).
Conflict = tuple[Target, str, str]


class TimeBudgetExceeded(Exception):
    """Raised inside exploration when the configured wall-clock budget runs out."""


@dataclass(frozen=True)
class CheckConfig:
    horizon_ticks: int = 8
    max_env_events_per_instant: int = 1
    cascade_cap: int = 16
    elide_tocks: bool = True


@dataclass(frozen=True)
class PlayOutcome:
    entries: tuple[TraceEntry, ...]
    next_obligations: frozenset[Obligation]
    agent_rounds: tuple[tuple[str, ...], ...] = ()

    def signature(self):
        """Observable behaviour of the instant: what the agent fired, by round."""
        return self.agent_rounds


@dataclass(frozen=True)
class PlayFailure:
    conflicts: frozenset[Conflict]
    entries: tuple[TraceEntry, ...]

    def targets(self) -> set[Target]:
        return {t for t, _, _ in self.conflicts}


@dataclass(frozen=True)
class PlayDivergence:
    rules: tuple[str, ...]
    cycle: tuple[str, ...]
    entries: tuple[TraceEntry, ...]


@dataclass
class InstantResult:
    outcomes: list[PlayOutcome] = field(default_factory=list)
    failures: list[PlayFailure] = field(default_factory=list)
    divergences: list[PlayDivergence] = field(default_factory=list)


class Engine:
    def __init__(
        self,
        spec: Spec,
        cfg: CheckConfig,
        rule_ids: Optional[set[str]] = None,
        deadline: Optional[float] = None,
    ):
        self.spec = spec
        self.cfg = cfg
        self.deadline = deadline
        self.rules: list[Rule] = [
            r for r in spec.rules if rule_ids is None or r.rule_id in rule_ids
        ]
        self.rule_index = {r.rule_id: i for i, r in enumerate(spec.rules)}
        self.evaluator = Evaluator(spec)
        self.scale: TickScale = tick_scale(spec)
        self.domain: AbstractDomain = abstract_domains(spec)
        self.event_order = {e.name: i for i, e in enumerate(spec.events)}
        self.measure_order = {m.name: i for i, m in enumerate(spec.measures)}
        self.rules_by_trigger: dict[str, list[Rule]] = {}
        trigger_events: list[str] = []
        for r in self.rules:
            self.rules_by_trigger.setdefault(r.trigger_event, []).append(r)
            if r.trigger_event not in trigger_events:
                trigger_events.append(r.trigger_event)
        trigger_events.sort(key=lambda e: self.event_order.get(e, len(self.event_order)))
        self.trigger_events = trigger_events
        self._event_subsets: list[tuple[str, ...]] = []
        for size in range(min(cfg.max_env_events_per_instant, len(trigger_events)) + 1):
            for combo in combinations(range(len(trigger_events)), size):
                self._event_subsets.append(tuple(trigger_events[i] for i in combo))
        self._rule_measures = {r.rule_id: tuple(rule_measures(r)) for r in self.rules}
        self._cone_cache: dict = {}
        self._forced_cache: dict = {}
        self._fdepth_cache: dict = {}
        # Instant resolutions depend only on deadline offsets, so results are
        # cached against the clock-relative state and rebuilt per clock.
        self._resolve_cache: dict = {}

    # --- plumbing --------------------------------------------------------

    def check_budget(self) -> None:
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise TimeBudgetExceeded()

    def _ob_key(self, ob: Obligation):
        return (
            self.rule_index.get(ob.rule_id, -1),
            ob.polarity is Polarity.MUST_NOT,
            self.event_order.get(ob.event, -1),
            ob.deadline_at,
            ob.activated_at,
        )

    def _target(self, a: str, b: Optional[str] = None) -> Target:
        if b is None or a == b:
            return (a,)
        return tuple(sorted({a, b}, key=lambda rid: self.rule_index.get(rid, -1)))

    # --- environment moves ------------------------------------------------

    def cone_measures(
        self,
        env_events: tuple[str, ...],
        must_events: frozenset[str],
        extra_events: tuple[str, ...] = (),
    ) -> tuple[str, ...]:
        """Measures any rule might consult this instant, in definition order."""
        key = (env_events, must_events, extra_events)
        cached = self._cone_cache.get(key)
        if cached is not None:
            return cached
        occurring = set(env_events) | set(must_events) | set(extra_events)
        hit: list[Rule] = []
        changed = True
        while changed:
            changed = False
            for rule in self.rules:
                if rule not in hit and rule.trigger_event in occurring:
                    hit.append(rule)
                    changed = True
                    occurring.update(rule_response_events(rule))
        measures: list[str] = []
        for rule in hit:
            for m in self._rule_measures[rule.rule_id]:
                if m not in measures:
                    measures.append(m)
        measures.sort(key=lambda m: self.measure_order[m])
        result = tuple(measures)
        self._cone_cache[key] = result
        return result

    def env_moves_rel(
        self, rel: tuple, extra_events: tuple[str, ...] = ()
    ) -> Iterator[tuple[tuple[str, ...], dict[str, Value]]]:
        must_events = frozenset(
            event for _rid, pol, event, _dl in rel if pol is Polarity.MUST
        )
        for env_events in self._event_subsets:
            cone = self.cone_measures(env_events, must_events, extra_events)
            for valuation in valuations(self.domain, cone):
                yield env_events, valuation

    def env_moves(
        self, obligations: frozenset[Obligation], extra_events: tuple[str, ...] = ()
    ) -> Iterator[tuple[tuple[str, ...], dict[str, Value]]]:
        yield from self.env_moves_rel(self.rel_state(obligations, 0), extra_events)

    # --- one instant -------------------------------------------------------

    def _activations(self, fired, valuation, clock, consulted: frozenset, suppressed):
        """Obligations created by firing ``fired`` (in order) under ``valuation``.

        ``suppressed`` holds rule ids with an obligation outstanding at the
        start of the round; those rules do not re-activate.
        """
        created: list[Obligation] = []
        for event in fired:
            for rule in self.rules_by_trigger.get(event, ()):  # definition order
                consulted = consulted | frozenset(self._rule_measures[rule.rule_id])
                if rule.rule_id in suppressed:
                    continue
                if rule.trigger_condition is not None and not self.evaluator.condition(
                    rule.trigger_condition, valuation
                ):
                    continue
                response = resolve_response(rule, valuation, self.evaluator)
                if response is None:
                    continue
                ticks = self.scale.ticks(response.deadline) if response.deadline else 0
                created.append(
                    Obligation(rule.rule_id, response.polarity, response.event, clock, clock + ticks)
                )
        return created, consulted

    def rel_state(self, obligations: frozenset[Obligation], clock: int) -> tuple:
        """Clock-independent state: sorted (rule, polarity, event, ticks left)."""
        return tuple(
            sorted(
                (ob.rule_id, ob.polarity, ob.event, ob.deadline_at - clock)
                for ob in obligations
            )
        )

    def _materialize(self, rel: tuple, clock: int) -> frozenset[Obligation]:
        return frozenset(
            Obligation(rid, pol, event, min(clock, clock + rel_dl), clock + rel_dl)
            for rid, pol, event, rel_dl in rel
        )

    def resolve_rel(
        self,
        rel: tuple,
        env_events: tuple[str, ...],
        valuation: Mapping[str, Value],
        voluntary: tuple[str, ...] = (),
    ):
        """Cached instant resolution on a relative state.

        Returns (outcomes, failures, divergences) where each outcome is
        (entries, rel-state-at-resolution-instant, next-rel-state, rounds).
        """
        key = (rel, env_events, tuple(sorted(valuation.items())), voluntary)
        cached = self._resolve_cache.get(key)
        if cached is not None:
            return cached
        raw = self._resolve_uncached(0, self._materialize(rel, 0), env_events, valuation, voluntary)
        outcomes = []
        for o in raw.outcomes:
            here = tuple(
                sorted(
                    (ob.rule_id, ob.polarity, ob.event, ob.deadline_at)
                    for ob in o.next_obligations
                )
            )
            nxt = tuple((rid, pol, event, rel_dl - 1) for rid, pol, event, rel_dl in here)
            outcomes.append((o.entries, here, nxt, o.agent_rounds))
        cached = (outcomes, raw.failures, raw.divergences)
        self._resolve_cache[key] = cached
        return cached

    def resolve_instant(
        self,
        clock: int,
        obligations: frozenset[Obligation],
        env_events: tuple[str, ...],
        valuation: Mapping[str, Value],
        voluntary: tuple[str, ...] = (),
    ) -> InstantResult:
        """Resolve one instant.

        ``voluntary`` widens the agent's first round beyond obliged events;
        behaviour-set comparisons use it so that prohibitions on otherwise
        unobliged events still distinguish rule sets.
        """
        rel = self.rel_state(obligations, clock)
        outcomes, failures, divergences = self.resolve_rel(rel, env_events, valuation, voluntary)
        return InstantResult(
            [
                PlayOutcome(entries, self._materialize(here, clock), rounds)
                for entries, here, _nxt, rounds in outcomes
            ],
            list(failures),
            list(divergences),
        )

    def _resolve_uncached(
        self,
        clock: int,
        obligations: frozenset[Obligation],
        env_events: tuple[str, ...],
        valuation: Mapping[str, Value],
        voluntary: tuple[str, ...] = (),
    ) -> InstantResult:
        self.check_budget()
        result = InstantResult()
        seen_outcomes: set[frozenset[Obligation]] = set()

        musts: dict[Obligation, int] = {}
        mustnots: dict[Obligation, int] = {}
        for ob in sorted(obligations, key=self._ob_key):
            (mustnots if ob.polarity is Polarity.MUST_NOT else musts)[ob] = -1

        env_entries = tuple(Event(e) for e in env_events)
        fired_env = set(env_events)

        env_violations = [ob for ob in mustnots if ob.event in fired_env]
        for ob in [m for m in musts if m.event in fired_env]:
            del musts[ob]
        suppressed0 = {ob.rule_id for ob in musts} | {ob.rule_id for ob in mustnots}
        created, consulted = self._activations(
            env_events, valuation, clock, frozenset(), suppressed0
        )
        for ob in created:
            bucket = mustnots if ob.polarity is Polarity.MUST_NOT else musts
            if ob not in bucket:
                bucket[ob] = 0

        obs_cache: dict[frozenset, tuple] = {}

        def entries_for(consulted_set: frozenset, agent_fired: list[str]):
            obs = obs_cache.get(consulted_set)
            if obs is None:
                obs = env_entries + tuple(
                    MeasureObs(m, valuation[m])
                    for m in sorted(consulted_set, key=lambda m: self.measure_order[m])
                )
                obs_cache[consulted_set] = obs
            return obs + tuple(Event(e) for e in agent_fired)

        def conflicts_at(musts_now, mustnots_now) -> frozenset[Conflict]:
            found = []
            for must in musts_now:
                if must.deadline_at != clock:
                    continue
                for mustnot in mustnots_now:
                    if mustnot.event == must.event:
                        found.append(
                            (self._target(must.rule_id, mustnot.rule_id), must.event, "due")
                        )
            return frozenset(found)

        if env_violations:
            conflicts = frozenset(
                ((self._target(ob.rule_id), ob.event, "env") for ob in env_violations)
            ) | conflicts_at(musts, mustnots)
            result.failures.append(PlayFailure(conflicts, entries_for(consulted, [])))
            return result

        def explore(musts, mustnots, round_no, consulted_set, agent_fired, cascade_rules, rounds):
            self.check_budget()
            due = conflicts_at(musts, mustnots)
            if due:
                result.failures.append(PlayFailure(due, entries_for(consulted_set, agent_fired)))
                return
            prohibited = {ob.event for ob in mustnots}
            immediate = sorted(
                {ob for ob in musts if ob.deadline_at == clock}, key=self._ob_key
            )
            immediate_events = []
            for ob in immediate:
                if ob.event not in immediate_events:
                    immediate_events.append(ob.event)
            fireable = []
            for ob in sorted(musts, key=self._ob_key):
                if ob.event not in prohibited and ob.event not in fireable:
                    fireable.append(ob.event)
            if round_no == 1:
                for event in voluntary:
                    if event not in prohibited and event not in fireable:
                        fireable.append(event)
            fireable.sort(key=lambda e: self.event_order.get(e, -1))
            immediate_events.sort(key=lambda e: self.event_order.get(e, -1))
            optional = [e for e in fireable if e not in immediate_events]

            if not immediate_events:
                # Stop move first: the instant ends, time may pass.
                survivors = frozenset(
                    ob for ob in musts if ob.deadline_at > clock
                ) | frozenset(ob for ob in mustnots if ob.deadline_at > clock)
                if (survivors, rounds) not in seen_outcomes:
                    seen_outcomes.add((survivors, rounds))
                    result.outcomes.append(
                        PlayOutcome(
                            entries_for(consulted_set, agent_fired), survivors, rounds
                        )
                    )

            if round_no > self.cfg.cascade_cap:
                if immediate_events:
                    rules = tuple(
                        sorted(set(cascade_rules), key=lambda rid: self.rule_index.get(rid, -1))
                    )
                    cycle = _cycle_of(agent_fired)
                    shown = agent_fired[: _cycle_display_len(agent_fired, cycle)]
                    result.divergences.append(
                        PlayDivergence(rules, cycle, entries_for(consulted_set, shown))
                    )
                return

            for extra in _subsets(optional):
                fired = immediate_events + [e for e in optional if e in extra]
                if not fired:
                    continue  # stopping already handled; agent must act to go on
                fired.sort(key=lambda e: self.event_order.get(e, -1))
                new_musts = {
                    ob: r for ob, r in musts.items() if not (ob.event in fired and r < round_no)
                }
                # Satisfaction in this round frees the rule to re-arm at once.
                suppressed = {ob.rule_id for ob in new_musts} | {
                    ob.rule_id for ob in mustnots
                }
                created, consulted2 = self._activations(
                    fired, valuation, clock, consulted_set, suppressed
                )
                new_mustnots = dict(mustnots)
                cascade2 = cascade_rules + [ob.rule_id for ob in immediate]
                for ob in created:
                    bucket = new_mustnots if ob.polarity is Polarity.MUST_NOT else new_musts
                    if ob not in bucket:
                        bucket[ob] = round_no
                explore(
                    new_musts,
                    new_mustnots,
                    round_no + 1,
                    consulted2,
                    agent_fired + fired,
                    cascade2,
                    rounds + (tuple(fired),),
                )

        explore(musts, mustnots, 1, consulted, [], [], ())
        return result

    # --- forced-deadlock search ---------------------------------------------

    def forced_targets(self, obligations: frozenset[Obligation], clock: int) -> frozenset[Target]:
        return self._forced_rel(self.rel_state(obligations, clock), self.cfg.horizon_ticks - clock)

    def _forced_rel(self, rel: tuple, remaining: int) -> frozenset[Target]:
        if remaining < 0:
            return frozenset()
        key = (rel, remaining)
        cached = self._forced_cache.get(key)
        if cached is not None:
            return cached
        found: set[Target] = set()
        for env_events, valuation in self.env_moves_rel(rel):
            outcomes, failures, _ = self.resolve_rel(rel, env_events, valuation)
            if not outcomes:
                for failure in failures:
                    found |= failure.targets()
                continue
            common: Optional[frozenset[Target]] = None
            for _entries, _here, nxt, _rounds in outcomes:
                sub = self._forced_rel(nxt, remaining - 1)
                common = sub if common is None else (common & sub)
                if not common:
                    break
            if common:
                found |= common
        result = frozenset(found)
        self._forced_cache[key] = result
        return result

    def fdepth(self, target: Target, obligations: frozenset[Obligation], clock: int):
        """Minimal tick count within which the environment forces ``target``."""
        return self._fdepth_rel(
            target, self.rel_state(obligations, clock), self.cfg.horizon_ticks - clock
        )

    def _fdepth_rel(self, target: Target, rel: tuple, remaining: int):
        if remaining < 0:
            return INF
        key = (target, rel, remaining)
        cached = self._fdepth_cache.get(key)
        if cached is not None:
            return cached
        best = INF
        for env_events, valuation in self.env_moves_rel(rel):
            outcomes, failures, _ = self.resolve_rel(rel, env_events, valuation)
            if not outcomes:
                if any(target in f.targets() for f in failures):
                    best = 0
                    break
                continue
            depth = 0
            feasible = True
            for _entries, _here, nxt, _rounds in outcomes:
                sub = self._fdepth_rel(target, nxt, remaining - 1)
                if sub == INF or target not in self._forced_rel(nxt, remaining - 1):
                    feasible = False
                    break
                depth = max(depth, sub)
            if feasible:
                best = min(best, 1 + depth)
        self._fdepth_cache[key] = best
        return best

    def witness(self, target: Target) -> tuple[Trace, Conflict]:
        """Canonical minimal play manifesting ``target``; assumes it is forced."""
        entries: list[TraceEntry] = []
        rel: tuple = ()
        remaining = self.cfg.horizon_ticks
        while remaining >= 0:
            best = None
            for env_events, valuation in self.env_moves_rel(rel):
                outcomes, failures, _ = self.resolve_rel(rel, env_events, valuation)
                if not outcomes:
                    if any(target in f.targets() for f in failures):
                        best = (0, outcomes, failures)
                        break
                    continue
                depth = 0
                feasible = True
                for _e, _here, nxt, _r in outcomes:
                    if target not in self._forced_rel(nxt, remaining - 1):
                        feasible = False
                        break
                    depth = max(depth, self._fdepth_rel(target, nxt, remaining - 1))
                if feasible and depth != INF and (best is None or 1 + depth < best[0]):
                    best = (1 + depth, outcomes, failures)
            if best is None:
                raise RuntimeError(f"no forcing strategy for {target}; witness out of sync")
            depth, outcomes, failures = best
            if depth == 0:
                for failure in failures:
                    if target in failure.targets():
                        entries.extend(failure.entries)
                        conflict = sorted(c for c in failure.conflicts if c[0] == target)[0]
                        return Trace(tuple(entries)), conflict
            first_entries, _here, nxt, _rounds = outcomes[0]
            entries.extend(first_entries)
            entries.append(Tock())
            rel = nxt
            remaining -= 1
        raise RuntimeError(f"horizon exhausted while extracting witness for {target}")


def _subsets(items: list[str]) -> Iterator[tuple[str, ...]]:
    for size in range(len(items) + 1):
        yield from combinations(items, size)


def _cycle_of(fired: list[str]) -> tuple[str, ...]:
    """Shortest suffix period of the fired-event sequence."""
    n = len(fired)
    for period in range(1, n // 2 + 1):
        if fired[n - period:] == fired[n - 2 * period : n - period]:
            return tuple(fired[n - period :])
    return tuple(fired)


def _cycle_display_len(fired: list[str], cycle: tuple[str, ...]) -> int:
    """Prefix length that shows exactly one unrolled cycle."""
    period = len(cycle)
    if period == 0:
        return len(fired)
    for start in range(len(fired)):
        if tuple(fired[start : start + period]) == cycle:
            return start + period
    return len(fired)
