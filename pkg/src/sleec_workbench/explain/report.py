"""Structured explanation reports and their validation.

The model's reply must contain one JSON object shaped like
``report_schema.json``: a ``"Conflicting Rules"`` block holding an
``Error`` (two rule ids, scenario, category, justification) and a
``Resolution`` (kind plus exactly two suggestions). Category accepts
exactly deadlock/divergence/naming and resolution kinds exactly
add/combine/remove/modify rule; anything else is an enumeration error.
Replies may wrap the JSON in markdown fences or prose; extraction takes
the first parseable object.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Optional

from ..language.nodes import Spec

CATEGORIES = ("deadlock", "divergence", "naming")
RESOLUTION_KINDS = ("add rule", "combine rule", "remove rule", "modify rule")

_EXCERPT_LEN = 200


def output_template() -> str:
    """The published output template, byte-identical to the schema file."""
    return (
        resources.files(__package__).joinpath("report_schema.json").read_text(encoding="utf-8")
    )


class ReportError(ValueError):
    """Invalid model reply; carries the offending excerpt for retry prompts."""

    def __init__(self, message: str, excerpt: str):
        super().__init__(message)
        self.excerpt = excerpt[:_EXCERPT_LEN]


class ReportFormatError(ReportError):
    pass


class ReportEnumerationError(ReportError):
    pass


@dataclass(frozen=True)
class ErrorBlock:
    rule1: str
    rule2: Optional[str]
    scenario: str
    category: str
    justification: str


@dataclass(frozen=True)
class SuggestionText:
    sleec_text: str
    justification: str


@dataclass(frozen=True)
class Resolution:
    kind: str
    suggestion1: SuggestionText
    suggestion2: SuggestionText


@dataclass(frozen=True)
class ExplanationReport:
    error: ErrorBlock
    resolution: Resolution

    def to_json(self) -> dict:
        return {
            "Conflicting Rules": {
                "Error": {
                    "Rule1": self.error.rule1,
                    "Rule2": self.error.rule2,
                    "Scenario": self.error.scenario,
                    "Category": self.error.category,
                    "Justification": self.error.justification,
                },
                "Resolution": {
                    "Kind": self.resolution.kind,
                    "Suggestion1": {
                        "SLEEC": self.resolution.suggestion1.sleec_text,
                        "Justification": self.resolution.suggestion1.justification,
                    },
                    "Suggestion2": {
                        "SLEEC": self.resolution.suggestion2.sleec_text,
                        "Justification": self.resolution.suggestion2.justification,
                    },
                },
            }
        }


def _extract_json(raw: str) -> dict:
    decoder = json.JSONDecoder()
    start = raw.find("{")
    while start != -1:
        try:
            value, _ = decoder.raw_decode(raw, start)
        except json.JSONDecodeError:
            start = raw.find("{", start + 1)
            continue
        if isinstance(value, dict):
            return value
        start = raw.find("{", start + 1)
    raise ReportFormatError("no JSON object found in the reply", raw)


def _require(mapping: dict, key: str, context: str, raw: str):
    if key not in mapping:
        raise ReportError(f"missing field {key!r} in {context}", raw)
    return mapping[key]


def _text_field(mapping: dict, key: str, context: str, raw: str) -> str:
    value = _require(mapping, key, context, raw)
    if not isinstance(value, str) or not value.strip():
        raise ReportError(f"field {key!r} in {context} must be nonempty text", raw)
    return value


def _suggestion(mapping: dict, key: str, raw: str) -> SuggestionText:
    block = _require(mapping, key, "Resolution", raw)
    if not isinstance(block, dict):
        raise ReportError(f"{key} must be an object with SLEEC and Justification", raw)
    sleec = _require(block, "SLEEC", key, raw)
    if not isinstance(sleec, str):
        raise ReportError(f"{key}.SLEEC must be a string", raw)
    return SuggestionText(sleec.strip(), _text_field(block, "Justification", key, raw))


def parse_report(raw: str, spec: Optional[Spec] = None) -> ExplanationReport:
    """Extract and validate the first JSON report object in ``raw``.

    With ``spec`` given, the error block's rule ids must name rules of
    that spec.
    """
    doc = _extract_json(raw)
    top = _require(doc, "Conflicting Rules", "the reply", raw)
    if not isinstance(top, dict):
        raise ReportError('"Conflicting Rules" must be an object', raw)
    error_doc = _require(top, "Error", '"Conflicting Rules"', raw)
    resolution_doc = _require(top, "Resolution", '"Conflicting Rules"', raw)

    rule1 = _text_field(error_doc, "Rule1", "Error", raw)
    rule2_raw = error_doc.get("Rule2")
    rule2: Optional[str] = None
    if rule2_raw not in (None, ""):
        if not isinstance(rule2_raw, str):
            raise ReportError("Rule2 must be a rule id or null", raw)
        rule2 = rule2_raw
    category = _text_field(error_doc, "Category", "Error", raw)
    if category not in CATEGORIES:
        raise ReportEnumerationError(
            f"category {category!r} is not one of {', '.join(CATEGORIES)}", raw
        )
    kind = _text_field(resolution_doc, "Kind", "Resolution", raw)
    if kind not in RESOLUTION_KINDS:
        raise ReportEnumerationError(
            f"resolution kind {kind!r} is not one of {', '.join(RESOLUTION_KINDS)}", raw
        )

    report = ExplanationReport(
        ErrorBlock(
            rule1,
            rule2,
            _text_field(error_doc, "Scenario", "Error", raw),
            category,
            _text_field(error_doc, "Justification", "Error", raw),
        ),
        Resolution(
            kind,
            _suggestion(resolution_doc, "Suggestion1", raw),
            _suggestion(resolution_doc, "Suggestion2", raw),
        ),
    )
    if spec is not None:
        known = {r.rule_id for r in spec.rules}
        for rid in filter(None, (report.error.rule1, report.error.rule2)):
            if rid not in known:
                raise ReportError(f"report names unknown rule {rid!r}", raw)
    return report
