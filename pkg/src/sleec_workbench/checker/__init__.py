"""Bounded consistency checking: deadlock, divergence, redundancy."""

from .engine import CheckConfig, Engine, TimeBudgetExceeded
from .ops import (
    CheckReport,
    Verdict,
    VerdictKind,
    check_consistency,
    detect_divergence,
    detect_redundancy,
    horizon_warnings,
    naming_verdicts,
    replay_deadlock,
    run_all,
)
from .oracle import OracleGuardError, brute_force_oracle
from .trace import Event, MeasureObs, Tock, Trace, format_trace

__all__ = [
    "CheckConfig",
    "CheckReport",
    "Engine",
    "Event",
    "MeasureObs",
    "OracleGuardError",
    "TimeBudgetExceeded",
    "Tock",
    "Trace",
    "Verdict",
    "VerdictKind",
    "brute_force_oracle",
    "check_consistency",
    "detect_divergence",
    "detect_redundancy",
    "format_trace",
    "horizon_warnings",
    "naming_verdicts",
    "replay_deadlock",
    "run_all",
]
