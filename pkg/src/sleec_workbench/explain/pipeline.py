"""End-to-end explanation: prompt, provider call, validation, one repair retry."""

from __future__ import annotations

from ..checker.engine import CheckConfig
from ..checker.ops import Verdict
from ..language.nodes import Spec
from .prompt import PromptBundle, build_prompt
from .providers import LlmConfig, request_explanation
from .report import ExplanationReport, ReportError, parse_report

_RETRY_SUFFIX = (
    "\n\nYour previous reply could not be used: {reason}\n"
    "Offending excerpt: {excerpt}\n"
    "Reply again with exactly one JSON object following the template."
)


def explain_verdict(
    spec: Spec,
    verdict: Verdict,
    system_description: str = "",
    llm: LlmConfig | None = None,
    cfg: CheckConfig = CheckConfig(),
) -> tuple[ExplanationReport, PromptBundle]:
    """Explain one verdict, retrying once when the reply fails validation."""
    llm = llm or LlmConfig.from_env()
    bundle = build_prompt(spec, verdict, system_description, cfg)
    raw = request_explanation(bundle, llm)
    try:
        return parse_report(raw, spec), bundle
    except ReportError as first_error:
        retry_prompt = bundle.text() + _RETRY_SUFFIX.format(
            reason=first_error, excerpt=first_error.excerpt
        )
        raw = request_explanation(retry_prompt, llm)
        return parse_report(raw, spec), bundle
