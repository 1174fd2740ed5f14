"""Seeded random SLEEC specs sized for the brute-force oracle guard.

Shapes stay inside the enumeration guard (at most 4 events, 2 measures,
3 rules, horizon 6) and are additionally tuned so the unmemoized oracle
finishes quickly: response events only loop back into trigger events in
measure-free shapes (cascades explode the oracle's play tree otherwise),
and long horizons come with minimal per-instant branching. Specs are
generated as source text so the parser is part of the loop, and are
name- and type-clean by construction.
"""

import random

from sleec_workbench.checker import CheckConfig
from sleec_workbench.language import parse_spec


class SpecShape:
    def __init__(
        self,
        max_events=3,
        max_rules=2,
        horizon=3,
        cascade_cap=3,
        measure_kinds=("boolean",),
        max_measures=1,
        loopiness=0.0,
    ):
        self.max_events = max_events
        self.max_rules = max_rules
        self.horizon = horizon
        self.cascade_cap = cascade_cap
        self.measure_kinds = measure_kinds
        self.max_measures = max_measures
        self.loopiness = loopiness


SMALL = SpecShape(
    max_events=3, max_rules=2, horizon=3,
    measure_kinds=("boolean", "scale", "numeric"), max_measures=1,
)
GUARD_EDGE = SpecShape(
    max_events=4, max_rules=3, horizon=3,
    measure_kinds=("boolean", "scale", "numeric"), max_measures=2,
)
CASCADE = SpecShape(max_events=2, max_rules=3, horizon=3, max_measures=0, loopiness=1.0)
DEEP = SpecShape(max_events=2, max_rules=2, horizon=6, max_measures=0)


def corpus_config(shape: SpecShape) -> CheckConfig:
    return CheckConfig(horizon_ticks=shape.horizon, cascade_cap=shape.cascade_cap)


def random_spec_text(rng: random.Random, shape: SpecShape = SMALL) -> str:
    n_events = rng.randint(2, shape.max_events)
    events = [f"Ev{i}" for i in range(n_events)]
    measures = []
    kinds = list(shape.measure_kinds)
    for i in range(rng.randint(0, shape.max_measures)):
        kind = rng.choice(kinds)
        if kind == "boolean":
            measures.append((f"flag{i}", "boolean", None))
        elif kind == "scale":
            measures.append((f"grade{i}", "scale", ("lo", "mid", "hi")))
            kinds = ["boolean"]  # one multi-valued measure keeps products small
        else:
            measures.append((f"load{i}", "numeric", None))
            kinds = ["boolean"]

    n_rules = rng.randint(1, shape.max_rules)
    triggers = [rng.choice(events) for _ in range(n_rules)]
    quiet_events = [e for e in events if e not in triggers]

    def a_condition():
        name, kind, lits = rng.choice(measures)
        if kind == "boolean":
            return rng.choice([name, f"not {name}"])
        if kind == "scale":
            op = rng.choice(["<", ">", "=", "<="])
            return f"{name} {op} {rng.choice(lits)}"
        return f"{name} {rng.choice(['<', '>', '>='])} {rng.randint(1, 3)}"

    def a_response():
        if quiet_events and rng.random() >= shape.loopiness:
            event = rng.choice(quiet_events)
        else:
            event = rng.choice(events)
        if rng.random() < 0.3:
            return f"not {event} within {rng.randint(1, 2)} minutes"
        if rng.random() < 0.4:
            return event  # immediate
        return f"{event} within {rng.randint(1, min(3, shape.horizon))} minutes"

    rules = []
    for i in range(n_rules):
        parts = [f"R{i + 1} when {triggers[i]}"]
        if measures and rng.random() < 0.5:
            parts.append(f"and {a_condition()}")
        parts.append(f"then {a_response()}")
        if measures and rng.random() < 0.25:
            parts.append(f"unless {a_condition()}")
            if rng.random() < 0.6:
                parts.append(f"then {a_response()}")
        rules.append(" ".join(parts))

    lines = ["def_start"]
    lines.extend(f"    event {e}" for e in events)
    for name, kind, lits in measures:
        if kind == "scale":
            lines.append(f"    measure {name}: scale({', '.join(lits)})")
        else:
            lines.append(f"    measure {name}: {kind}")
    lines.append("def_end")
    lines.append("rule_start")
    lines.extend(f"    {r}" for r in rules)
    lines.append("rule_end")
    return "\n".join(lines) + "\n"


def corpus(seed: int, count: int, shape: SpecShape = SMALL):
    """Yield (text, spec, config) triples; parsing must always succeed."""
    rng = random.Random(seed)
    for _ in range(count):
        text = random_spec_text(rng, shape)
        yield text, parse_spec(text), corpus_config(shape)


def acceptance_corpus():
    """The 200-instance mix used by the oracle-equivalence criterion."""
    plan = [(1, 80, SMALL), (2, 60, GUARD_EDGE), (3, 40, CASCADE), (4, 20, DEEP)]
    for seed, count, shape in plan:
        yield from corpus(seed, count, shape)
