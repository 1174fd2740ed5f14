"""Brute-force enumeration oracle for small rule sets.

Everything here is written from scratch against the instant/round
semantics (see engine.py's module docstring for the shared definition):
its own condition evaluator, its own defeater resolution, its own unit
conversion, its own measure domains, and a plain recursive enumeration of
every environment and agent choice sequence with no memoization, pruning,
or outcome deduplication. It exists to cross-check check_consistency on
guard-sized inputs, so it refuses anything bigger than 4 events, 2
measures, or a 6-tick horizon.

Verdicts carry kind and involved rules only; witnesses are the main
checker's job.
"""

from __future__ import annotations

from itertools import combinations, product

from ..language.nodes import (
    AndExpr,
    BoolAtom,
    Comparison,
    IntLit,
    MeasureKind,
    NameRef,
    NotExpr,
    OrExpr,
    Polarity,
    Spec,
    walk_condition,
)
from .engine import CheckConfig
from .ops import Verdict, VerdictKind

MAX_EVENTS = 4
MAX_MEASURES = 2
MAX_HORIZON = 6

_UNIT_SECONDS = {"seconds": 1, "minutes": 60, "hours": 3600, "days": 86400}


class OracleGuardError(Exception):
    """The instance is too large for exhaustive enumeration."""


def brute_force_oracle(spec: Spec, cfg: CheckConfig = CheckConfig()) -> list[Verdict]:
    if len(spec.events) > MAX_EVENTS:
        raise OracleGuardError(f"{len(spec.events)} events exceed the oracle guard ({MAX_EVENTS})")
    if len(spec.measures) > MAX_MEASURES:
        raise OracleGuardError(
            f"{len(spec.measures)} measures exceed the oracle guard ({MAX_MEASURES})"
        )
    if cfg.horizon_ticks > MAX_HORIZON:
        raise OracleGuardError(
            f"horizon {cfg.horizon_ticks} exceeds the oracle guard ({MAX_HORIZON})"
        )

    rule_order = {r.rule_id: i for i, r in enumerate(spec.rules)}
    constants = {c.name: c.value for c in spec.constants}
    scale_pos: dict[str, dict[str, int]] = {}
    for m in spec.measures:
        if m.kind is MeasureKind.SCALE:
            scale_pos[m.name] = {lit: i for i, lit in enumerate(m.scale_literals)}

    def eval_cond(cond, vals):
        if isinstance(cond, BoolAtom):
            return bool(vals[cond.measure])
        if isinstance(cond, NotExpr):
            return not eval_cond(cond.operand, vals)
        if isinstance(cond, AndExpr):
            return eval_cond(cond.left, vals) and eval_cond(cond.right, vals)
        if isinstance(cond, OrExpr):
            return eval_cond(cond.left, vals) or eval_cond(cond.right, vals)
        assert isinstance(cond, Comparison)
        if cond.measure in scale_pos:
            lhs = scale_pos[cond.measure][vals[cond.measure]]
            rhs = (
                scale_pos[cond.measure][cond.operand.name]
                if isinstance(cond.operand, NameRef)
                else cond.operand.value
            )
        else:
            lhs = vals[cond.measure]
            rhs = (
                constants[cond.operand.name]
                if isinstance(cond.operand, NameRef)
                else cond.operand.value
            )
        if cond.op == "<":
            return lhs < rhs
        if cond.op == ">":
            return lhs > rhs
        if cond.op == "<=":
            return lhs <= rhs
        if cond.op == ">=":
            return lhs >= rhs
        if cond.op == "=":
            return lhs == rhs
        return lhs != rhs

    # Unit conversion, redone by hand.
    unit_list = []
    for r in spec.rules:
        responses = [r.response] + [d.response for d in r.defeaters if d.response]
        for resp in responses:
            if resp.deadline is not None:
                unit_list.append(resp.deadline.unit.value)
    base_secs = min((_UNIT_SECONDS[u] for u in unit_list), default=_UNIT_SECONDS["minutes"])

    def deadline_ticks(resp):
        if resp.deadline is None:
            return 0
        return resp.deadline.amount * _UNIT_SECONDS[resp.deadline.unit.value] // base_secs

    # Finite domains, redone by hand.
    domains: dict[str, list] = {}
    for m in spec.measures:
        if m.kind is MeasureKind.BOOLEAN:
            domains[m.name] = [False, True]
        elif m.kind is MeasureKind.SCALE:
            domains[m.name] = list(m.scale_literals)
        else:
            points = set()
            for r in spec.rules:
                conds = ([r.trigger_condition] if r.trigger_condition else []) + [
                    d.condition for d in r.defeaters
                ]
                for cond in conds:
                    for node in walk_condition(cond):
                        if isinstance(node, Comparison) and node.measure == m.name:
                            if isinstance(node.operand, IntLit):
                                points.add(node.operand.value)
                            elif node.operand.name in constants:
                                points.add(constants[node.operand.name])
            if points:
                reps = set()
                for t in points:
                    reps.update((t - 1, t, t + 1))
                domains[m.name] = sorted(reps)
            else:
                domains[m.name] = [0]

    measure_names = [m.name for m in spec.measures]
    all_valuations = [
        dict(zip(measure_names, combo))
        for combo in product(*(domains[name] for name in measure_names))
    ] or [{}]

    trigger_events = []
    for r in spec.rules:
        if r.trigger_event not in trigger_events:
            trigger_events.append(r.trigger_event)
    trigger_events.sort(key=lambda e: [ev.name for ev in spec.events].index(e)
                        if e in [ev.name for ev in spec.events] else -1)
    env_choices = []
    for size in range(min(cfg.max_env_events_per_instant, len(trigger_events)) + 1):
        env_choices.extend(combinations(trigger_events, size))

    def make_target(rid_a, rid_b=None):
        if rid_b is None or rid_a == rid_b:
            return (rid_a,)
        return tuple(sorted({rid_a, rid_b}, key=lambda rid: rule_order[rid]))

    # Obligations are plain tuples: (rule_id, polarity, event, deadline_at).
    # A rule whose obligation is still outstanding does not re-activate.
    def activations(fired, vals, clock, busy_rules):
        out = []
        for event in fired:
            for rule in spec.rules:
                if rule.trigger_event != event:
                    continue
                if rule.rule_id in busy_rules:
                    continue
                if rule.trigger_condition is not None and not eval_cond(
                    rule.trigger_condition, vals
                ):
                    continue
                response = rule.response
                for d in rule.defeaters:
                    if eval_cond(d.condition, vals):
                        response = d.response
                if response is None:
                    continue
                out.append(
                    (
                        rule.rule_id,
                        "mustnot" if response.polarity is Polarity.MUST_NOT else "must",
                        response.event,
                        clock + deadline_ticks(response),
                    )
                )
        return out

    def resolve(obligations, clock, env_events, vals):
        """All agent resolutions: (compliant next states, stuck conflict sets)."""
        musts = {}
        nots = {}
        for ob in obligations:
            if ob[1] == "must":
                musts[ob] = -1
            else:
                nots[ob] = -1
        env_broken = [ob for ob in nots if ob[2] in env_events]
        for ob in [ob for ob in musts if ob[2] in env_events]:
            del musts[ob]
        busy = {ob[0] for ob in musts} | {ob[0] for ob in nots}
        for ob in activations(env_events, vals, clock, busy):
            group = musts if ob[1] == "must" else nots
            if ob not in group:
                group[ob] = 0

        def due_conflicts(musts_now, nots_now):
            pairs = set()
            for mob in musts_now:
                if mob[3] != clock:
                    continue
                for nob in nots_now:
                    if nob[2] == mob[2]:
                        pairs.add(make_target(mob[0], nob[0]))
            return pairs

        if env_broken:
            conflicts = {make_target(ob[0]) for ob in env_broken}
            conflicts |= due_conflicts(musts, nots)
            return [], [conflicts]

        next_states = []
        stuck_sets = []

        def rounds(musts_now, nots_now, depth):
            due = due_conflicts(musts_now, nots_now)
            if due:
                stuck_sets.append(due)
                return
            banned = {ob[2] for ob in nots_now}
            due_events = sorted({ob[2] for ob in musts_now if ob[3] == clock})
            open_events = sorted(
                {ob[2] for ob in musts_now if ob[2] not in banned and ob[2] not in due_events}
            )
            if not due_events:
                survivors = frozenset(
                    [ob for ob in musts_now if ob[3] > clock]
                    + [ob for ob in nots_now if ob[3] > clock]
                )
                next_states.append(survivors)
            if depth > cfg.cascade_cap:
                return  # divergent cascade; not a deadlock matter
            for k in range(len(open_events) + 1):
                for extra in combinations(open_events, k):
                    fired = sorted(set(due_events) | set(extra))
                    if not fired:
                        continue
                    musts2 = {
                        ob: r
                        for ob, r in musts_now.items()
                        if not (ob[2] in fired and r < depth)
                    }
                    nots2 = dict(nots_now)
                    busy_now = {ob[0] for ob in musts2} | {ob[0] for ob in nots2}
                    for ob in activations(fired, vals, clock, busy_now):
                        group = musts2 if ob[1] == "must" else nots2
                        if ob not in group:
                            group[ob] = depth
                    rounds(musts2, nots2, depth + 1)

        rounds(musts, nots, 1)
        return next_states, stuck_sets

    def forced(obligations, clock):
        """Conflict targets the environment can force from here on."""
        if clock > cfg.horizon_ticks:
            return set()
        total = set()
        for env_events in env_choices:
            for vals in all_valuations:
                next_states, stuck_sets = resolve(obligations, clock, env_events, vals)
                if next_states:
                    shared = None
                    for state in next_states:
                        sub = forced(state, clock + 1)
                        shared = sub if shared is None else shared & sub
                        if not shared:
                            break
                    if shared:
                        total |= shared
                else:
                    for conflicts in stuck_sets:
                        total |= conflicts
        return total

    targets = forced(frozenset(), 0)
    verdicts = []
    for target in sorted(targets, key=lambda t: tuple(rule_order[r] for r in t)):
        if len(target) == 1:
            message = f"enumeration: obligations of rule {target[0]} cannot always be met"
        else:
            message = (
                f"enumeration: rules {target[0]} and {target[1]} impose "
                "incompatible obligations"
            )
        verdicts.append(Verdict(VerdictKind.DEADLOCK, target, None, {}, message))
    return verdicts
