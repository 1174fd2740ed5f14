"""Counterexample traces and their angle-bracket rendering.

A trace interleaves event occurrences, measure observations
(``measure.Value``), and ``tock`` time steps, printed as
``<entry, entry, ...>``. With tock elision on, a run of more than three
consecutive tocks prints as ``tock, ..., tock``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union


@dataclass(frozen=True)
class Event:
    name: str


@dataclass(frozen=True)
class MeasureObs:
    measure: str
    value: Union[bool, int, str]

    def render(self) -> str:
        if isinstance(self.value, bool):
            text = "true" if self.value else "false"
        else:
            text = str(self.value)
        return f"{self.measure}.{text}"


@dataclass(frozen=True)
class Tock:
    pass


TraceEntry = Union[Event, MeasureObs, Tock]


@dataclass(frozen=True)
class Trace:
    entries: tuple[TraceEntry, ...] = ()

    def __len__(self) -> int:
        return len(self.entries)

    def tock_count(self) -> int:
        return sum(1 for e in self.entries if isinstance(e, Tock))

    def observations(self) -> dict[str, Union[bool, int, str]]:
        """Scenario valuation along the witness; later observations win."""
        out: dict[str, Union[bool, int, str]] = {}
        for entry in self.entries:
            if isinstance(entry, MeasureObs):
                out[entry.measure] = entry.value
        return out

    def instants(self) -> list[list[TraceEntry]]:
        """Non-tock entries grouped by instant (tocks are the separators)."""
        groups: list[list[TraceEntry]] = [[]]
        for entry in self.entries:
            if isinstance(entry, Tock):
                groups.append([])
            else:
                groups[-1].append(entry)
        return groups


def format_trace(trace: Trace, elide_tocks: bool = True) -> str:
    parts: list[str] = []
    run = 0

    def flush() -> None:
        nonlocal run
        if run == 0:
            return
        if elide_tocks and run > 3:
            parts.extend(["tock", "...", "tock"])
        else:
            parts.extend(["tock"] * run)
        run = 0

    for entry in trace.entries:
        if isinstance(entry, Tock):
            run += 1
            continue
        flush()
        if isinstance(entry, Event):
            parts.append(entry.name)
        else:
            parts.append(entry.render())
    flush()
    return "<" + ", ".join(parts) + ">"
