"""Counterexample explanation via a structured LLM pipeline."""

from .pipeline import explain_verdict
from .prompt import (
    MISSING_DESCRIPTION,
    ContextSelection,
    PromptBundle,
    build_prompt,
    render_pseudo_csp,
    select_context,
)
from .providers import LlmConfig, ProviderError, prompt_hash, request_explanation
from .report import (
    CATEGORIES,
    RESOLUTION_KINDS,
    ErrorBlock,
    ExplanationReport,
    ReportEnumerationError,
    ReportError,
    ReportFormatError,
    Resolution,
    SuggestionText,
    output_template,
    parse_report,
)
from .suggest import Suggestion, SuggestionResult, suggestions_from_report, validate_suggestion

__all__ = [
    "CATEGORIES",
    "ContextSelection",
    "ErrorBlock",
    "ExplanationReport",
    "LlmConfig",
    "MISSING_DESCRIPTION",
    "PromptBundle",
    "ProviderError",
    "RESOLUTION_KINDS",
    "ReportEnumerationError",
    "ReportError",
    "ReportFormatError",
    "Resolution",
    "Suggestion",
    "SuggestionResult",
    "SuggestionText",
    "build_prompt",
    "explain_verdict",
    "output_template",
    "parse_report",
    "prompt_hash",
    "render_pseudo_csp",
    "request_explanation",
    "select_context",
    "suggestions_from_report",
    "validate_suggestion",
]
