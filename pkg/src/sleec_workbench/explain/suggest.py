"""Applying and re-checking resolution suggestions.

Suggestions never mutate the input spec: application builds a candidate
ruleset, re-runs name/type analysis and the full checker, and either
returns the new spec with its verdicts or the diagnostics that reject
the suggested SLEEC text. ``combine rule`` removes the targeted rule and
replaces the rule whose id the new text carries.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..checker.engine import CheckConfig
from ..checker.ops import CheckReport, run_all
from ..language.analysis import validate
from ..language.diagnostics import Category, Diagnostic, Severity, Span
from ..language.nodes import Rule, Spec
from ..language.parser import parse_rule_text
from .report import RESOLUTION_KINDS, ExplanationReport


@dataclass(frozen=True)
class Suggestion:
    kind: str
    sleec_text: str = ""
    target_rule_id: Optional[str] = None

    def to_json(self) -> dict:
        doc: dict = {"kind": self.kind, "sleec_text": self.sleec_text}
        if self.target_rule_id is not None:
            doc["target_rule_id"] = self.target_rule_id
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "Suggestion":
        return cls(
            kind=doc.get("kind", ""),
            sleec_text=doc.get("sleec_text", "") or "",
            target_rule_id=doc.get("target_rule_id"),
        )


@dataclass
class SuggestionResult:
    new_spec: Optional[Spec] = None
    report: Optional[CheckReport] = None
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @property
    def applied(self) -> bool:
        return self.new_spec is not None


def _reject(message: str) -> SuggestionResult:
    return SuggestionResult(
        diagnostics=[
            Diagnostic(Severity.ERROR, Category.SYNTAX, Span.point(1, 1), message)
        ]
    )


def suggestions_from_report(report: ExplanationReport, spec: Spec) -> list[Suggestion]:
    """The report's two suggestions as applicable edits."""
    out = []
    known = {r.rule_id for r in spec.rules}
    for text in (report.resolution.suggestion1, report.resolution.suggestion2):
        kind = report.resolution.kind
        target = report.error.rule2 if kind == "combine rule" else None
        if kind == "remove rule":
            target = report.error.rule2 or report.error.rule1
            out.append(Suggestion(kind, "", target))
            continue
        if kind == "modify rule":
            head = text.sleec_text.split(None, 1)
            if head and head[0] in known:
                target = head[0]
        out.append(Suggestion(kind, text.sleec_text, target))
    return out


def validate_suggestion(
    spec: Spec, suggestion: Suggestion, cfg: CheckConfig = CheckConfig()
) -> SuggestionResult:
    if suggestion.kind not in RESOLUTION_KINDS:
        return _reject(
            f"unknown suggestion kind {suggestion.kind!r}; "
            f"expected one of {', '.join(RESOLUTION_KINDS)}"
        )

    if suggestion.kind == "remove rule":
        if suggestion.sleec_text.strip():
            return _reject("a remove-rule suggestion must not carry SLEEC text")
        if not suggestion.target_rule_id:
            return _reject("a remove-rule suggestion needs target_rule_id")
        if spec.rule(suggestion.target_rule_id) is None:
            return _reject(f"rule {suggestion.target_rule_id!r} is not in the ruleset")
        rules = tuple(r for r in spec.rules if r.rule_id != suggestion.target_rule_id)
        return _recheck(spec, rules, cfg)

    rule, diagnostics = parse_rule_text(suggestion.sleec_text)
    if rule is None:
        return SuggestionResult(diagnostics=diagnostics)

    if suggestion.kind == "add rule":
        if spec.rule(rule.rule_id) is not None:
            return _reject(f"rule id {rule.rule_id!r} already exists; cannot add it")
        rules = spec.rules + (rule,)
        return _recheck(spec, rules, cfg)

    if suggestion.kind == "modify rule":
        target = suggestion.target_rule_id or rule.rule_id
        if spec.rule(target) is None:
            return _reject(f"rule {target!r} is not in the ruleset")
        rules = tuple(rule if r.rule_id == target else r for r in spec.rules)
        return _recheck(spec, rules, cfg)

    # combine rule: drop the target, replace the rule the new text names.
    if not suggestion.target_rule_id:
        return _reject("a combine-rule suggestion needs target_rule_id (the rule absorbed)")
    if spec.rule(suggestion.target_rule_id) is None:
        return _reject(f"rule {suggestion.target_rule_id!r} is not in the ruleset")
    if spec.rule(rule.rule_id) is None:
        return _reject(
            f"combined rule id {rule.rule_id!r} must reuse one of the merged rules' ids"
        )
    rules = tuple(
        rule if r.rule_id == rule.rule_id else r
        for r in spec.rules
        if r.rule_id != suggestion.target_rule_id
    )
    return _recheck(spec, rules, cfg)


def _recheck(spec: Spec, rules: tuple[Rule, ...], cfg: CheckConfig) -> SuggestionResult:
    candidate = Spec(spec.events, spec.measures, spec.constants, rules)
    diagnostics = validate(candidate)
    if any(d.severity is Severity.ERROR for d in diagnostics):
        return SuggestionResult(diagnostics=diagnostics)
    report = run_all(candidate, cfg)
    return SuggestionResult(new_spec=candidate, report=report, diagnostics=report.diagnostics)
