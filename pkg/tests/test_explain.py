"""Context selection, pseudo-CSP, prompts, report parsing, suggestions."""

import json

import pytest

from sleec_workbench.checker import CheckConfig, check_consistency, run_all
from sleec_workbench.explain import (
    LlmConfig,
    MISSING_DESCRIPTION,
    ProviderError,
    ReportEnumerationError,
    ReportError,
    ReportFormatError,
    Suggestion,
    build_prompt,
    explain_verdict,
    output_template,
    parse_report,
    render_pseudo_csp,
    request_explanation,
    select_context,
    suggestions_from_report,
    validate_suggestion,
)
from sleec_workbench.fixtures import fixture_text
from sleec_workbench.language import parse_spec

R1R2 = parse_spec(fixture_text("r1r2.sleec"))
ALMI = parse_spec(fixture_text("almi.sleec"))

VALID_REPORT = json.loads(fixture_text("mock_responses/default.json"))


def r1r2_verdict():
    (verdict,) = check_consistency(R1R2)
    return verdict


class TestSelectContext:
    def test_r1r2_closure(self):
        context = select_context(R1R2, r1r2_verdict())
        assert [r.rule_id for r in context.rules] == ["R1", "R2"]
        assert [e.name for e in context.spec_slice.events] == [
            "DetectUserFallen",
            "CallEmergencySupport",
        ]
        assert [m.name for m in context.spec_slice.measures] == ["emergencyLevel"]

    def test_single_rule_spec_is_whole_spec(self):
        spec = parse_spec(
            "def_start event A event B def_end rule_start "
            "R1 when A then not A within 1 minute rule_end"
        )
        (verdict,) = check_consistency(spec)
        context = select_context(spec, verdict)
        assert [r.rule_id for r in context.rules] == ["R1"]

    def test_almi_includes_rules_sharing_trace_identifiers(self):
        (verdict,) = check_consistency(ALMI)
        context = select_context(ALMI, verdict)
        ids = [r.rule_id for r in context.rules]
        assert "Rule2" in ids and "Rule4" in ids
        # Rule5 triggers on the same DetectUserFallen event seen in the trace.
        assert "Rule5" in ids
        # Rule1/Rule6/Rule7 share nothing with the witness.
        assert "Rule1" not in ids and "Rule6" not in ids and "Rule7" not in ids

    def test_deterministic(self):
        a = select_context(ALMI, check_consistency(ALMI)[0])
        b = select_context(ALMI, check_consistency(ALMI)[0])
        assert a == b


class TestPseudoCsp:
    def test_r1_line(self):
        line = render_pseudo_csp((R1R2.rule("R1"),), R1R2)
        assert line == (
            "R1 = DetectUserFallen -> (emergencyLevel>L4 & CallEmergencySupport) "
            "[] CallEmergencySupport within 2 tock"
        )

    def test_conditioned_trigger_and_prohibition(self):
        line = render_pseudo_csp((R1R2.rule("R2"),), R1R2)
        assert line == (
            "R2 = (DetectUserFallen & emergencyLevel<L2) -> "
            "not CallEmergencySupport within 2 tock"
        )

    def test_no_deadline_means_no_within(self):
        spec = parse_spec(
            "def_start event A event B def_end rule_start R1 when A then B rule_end"
        )
        assert render_pseudo_csp(tuple(spec.rules), spec) == "R1 = A -> B"

    def test_cancelling_defeater_is_skip(self):
        spec = parse_spec(
            "def_start event A event B measure p: boolean def_end rule_start "
            "R1 when A then B unless p rule_end"
        )
        assert render_pseudo_csp(tuple(spec.rules), spec) == "R1 = A -> (p & SKIP) [] B"

    def test_empty_subset(self):
        assert render_pseudo_csp((), R1R2) == ""


class TestBuildPrompt:
    def test_section_order_and_template(self):
        bundle = build_prompt(R1R2, r1r2_verdict(), "A care robot assists elderly users.")
        assert len(bundle.sections) == 4
        assert "R1 when DetectUserFallen" in bundle.sections[0]
        assert "R1 = DetectUserFallen" in bundle.sections[1]
        assert "<DetectUserFallen, emergencyLevel.L1, tock, tock>" in bundle.sections[2]
        assert bundle.sections[3] == "A care robot assists elderly users."
        assert bundle.template == output_template()
        text = bundle.text()
        assert text.index("(1)") < text.index("(2)") < text.index("(3)") < text.index("(4)")
        assert text.rstrip().endswith(output_template().rstrip())

    def test_missing_description_placeholder(self):
        bundle = build_prompt(R1R2, r1r2_verdict(), "")
        assert bundle.sections[3] == MISSING_DESCRIPTION
        assert bundle.warnings

    def test_prompt_determinism(self):
        one = build_prompt(R1R2, r1r2_verdict(), "desc")
        two = build_prompt(R1R2, r1r2_verdict(), "desc")
        assert one.text() == two.text()


class TestParseReport:
    def test_valid_report(self):
        report = parse_report(json.dumps(VALID_REPORT), R1R2)
        assert report.error.category == "deadlock"
        assert report.error.rule1 == "R1"
        assert report.resolution.kind == "modify rule"

    def test_unknown_category_rejected(self):
        doc = json.loads(json.dumps(VALID_REPORT))
        doc["Conflicting Rules"]["Error"]["Category"] = "livelock"
        with pytest.raises(ReportEnumerationError, match="livelock"):
            parse_report(json.dumps(doc))

    @pytest.mark.parametrize("category", ["deadlock", "divergence", "naming"])
    def test_all_published_categories_accepted(self, category):
        doc = json.loads(json.dumps(VALID_REPORT))
        doc["Conflicting Rules"]["Error"]["Category"] = category
        parse_report(json.dumps(doc))

    @pytest.mark.parametrize(
        "kind", ["add rule", "combine rule", "remove rule", "modify rule"]
    )
    def test_all_resolution_kinds_accepted(self, kind):
        doc = json.loads(json.dumps(VALID_REPORT))
        doc["Conflicting Rules"]["Resolution"]["Kind"] = kind
        parse_report(json.dumps(doc))

    def test_unknown_resolution_kind_rejected(self):
        doc = json.loads(json.dumps(VALID_REPORT))
        doc["Conflicting Rules"]["Resolution"]["Kind"] = "rewrite everything"
        with pytest.raises(ReportEnumerationError):
            parse_report(json.dumps(doc))

    def test_unknown_rule_id_rejected(self):
        doc = json.loads(json.dumps(VALID_REPORT))
        doc["Conflicting Rules"]["Error"]["Rule1"] = "R99"
        with pytest.raises(ReportError, match="R99"):
            parse_report(json.dumps(doc), R1R2)

    def test_missing_suggestion_rejected(self):
        doc = json.loads(json.dumps(VALID_REPORT))
        del doc["Conflicting Rules"]["Resolution"]["Suggestion2"]
        with pytest.raises(ReportError, match="Suggestion2"):
            parse_report(json.dumps(doc))

    def test_no_json_is_format_error(self):
        with pytest.raises(ReportFormatError):
            parse_report("I could not produce a report, sorry.")

    @pytest.mark.parametrize(
        "wrap",
        [
            "```json\n{body}\n```",
            "```\n{body}\n```",
            "Here is the analysis you asked for:\n{body}",
            "{body}\nLet me know if this helps!",
            "Report:\n\n```json\n{body}\n```\n\nDone.",
            "> quoting the result\n{body}",
            "****\n{body}\n****",
            "The conflict {{a deadlock}} is explained below.\n{body}",
            "```JSON\n{body}```",
            "prose, then JSON: {body} trailing prose",
        ],
    )
    def test_fence_and_prose_stripping(self, wrap):
        raw = wrap.format(body=json.dumps(VALID_REPORT))
        report = parse_report(raw, R1R2)
        assert report.error.rule1 == "R1"

    def test_validation_idempotent(self):
        report = parse_report(json.dumps(VALID_REPORT), R1R2)
        again = parse_report(json.dumps(report.to_json()), R1R2)
        assert again == report


class TestProviders:
    def test_mock_default_fixture(self):
        raw = request_explanation("any prompt at all", LlmConfig(provider="mock"))
        assert json.loads(raw)["Conflicting Rules"]["Error"]["Rule1"] == "R1"

    def test_mock_hash_fixture_wins(self, tmp_path):
        from sleec_workbench.explain import prompt_hash

        prompt = "specific prompt"
        (tmp_path / f"{prompt_hash(prompt)}.json").write_text('{"canned": true}')
        raw = request_explanation(prompt, LlmConfig(provider="mock", fixtures_dir=tmp_path))
        assert raw == '{"canned": true}'

    def test_mock_without_fixture_errors(self, tmp_path):
        with pytest.raises(ProviderError, match="no fixture"):
            request_explanation("prompt", LlmConfig(provider="mock", fixtures_dir=tmp_path))

    def test_cache_round_trip(self, tmp_path):
        cfg = LlmConfig(provider="mock", cache_dir=tmp_path / "cache")
        first = request_explanation("prompt", cfg)
        cached_files = list((tmp_path / "cache").iterdir())
        assert len(cached_files) == 1
        cached_files[0].write_text("from-cache", encoding="utf-8")
        assert request_explanation("prompt", cfg) == "from-cache"

    def test_remote_unreachable(self):
        cfg = LlmConfig(
            provider="remote",
            endpoint="http://127.0.0.1:1/nothing",
            retry_count=1,
            timeout_secs=0.2,
        )
        with pytest.raises(ProviderError, match="unreachable"):
            request_explanation("prompt", cfg)

    def test_env_config(self, monkeypatch):
        monkeypatch.setenv("SLEEC_LLM_PROVIDER", "remote")
        monkeypatch.setenv("SLEEC_LLM_ENDPOINT", "http://example.invalid/v1")
        monkeypatch.setenv("SLEEC_LLM_MODEL", "some-model")
        monkeypatch.setenv("SLEEC_LLM_TIMEOUT_SECS", "5")
        cfg = LlmConfig.from_env()
        assert (cfg.provider, cfg.model, cfg.timeout_secs) == ("remote", "some-model", 5.0)


class TestPipeline:
    def test_mock_explanation(self):
        report, bundle = explain_verdict(R1R2, r1r2_verdict(), "desc", LlmConfig())
        assert report.error.category == "deadlock"
        assert bundle.template == output_template()

    def test_retry_then_success(self, tmp_path):
        from sleec_workbench.explain import prompt_hash

        bundle = build_prompt(R1R2, r1r2_verdict(), "desc")
        bad = "not json at all"
        (tmp_path / f"{prompt_hash(bundle.text())}.json").write_text(bad)
        (tmp_path / "default.json").write_text(json.dumps(VALID_REPORT))
        report, _ = explain_verdict(
            R1R2, r1r2_verdict(), "desc", LlmConfig(provider="mock", fixtures_dir=tmp_path)
        )
        assert report.error.rule1 == "R1"

    def test_retry_exhaustion_surfaces_error(self, tmp_path):
        (tmp_path / "default.json").write_text("still not json")
        with pytest.raises(ReportFormatError):
            explain_verdict(
                R1R2, r1r2_verdict(), "desc", LlmConfig(provider="mock", fixtures_dir=tmp_path)
            )


class TestValidateSuggestion:
    def test_remove_rule_clears_conflict(self):
        result = validate_suggestion(R1R2, Suggestion("remove rule", "", "R2"))
        assert result.applied
        assert result.report.verdicts == []
        assert [r.rule_id for r in result.new_spec.rules] == ["R1"]

    def test_modify_with_unsatisfiable_guard_clears_conflict(self):
        result = validate_suggestion(
            R1R2,
            Suggestion(
                "modify rule",
                "R2 when DetectUserFallen and emergencyLevel < L2 and emergencyLevel > L4 "
                "then not CallEmergencySupport within 2 minutes",
                "R2",
            ),
        )
        assert result.applied
        assert result.report.verdicts == []

    def test_truncated_suggestion_rejected(self):
        result = validate_suggestion(
            R1R2, Suggestion("modify rule", "when DetectUserFallen then", "R2")
        )
        assert not result.applied
        assert result.diagnostics

    def test_add_rule(self):
        spec = parse_spec(
            "def_start event A event B event C def_end rule_start "
            "R1 when A then B within 2 minutes rule_end"
        )
        result = validate_suggestion(
            spec, Suggestion("add rule", "R2 when C then B within 2 minutes")
        )
        assert result.applied
        assert [r.rule_id for r in result.new_spec.rules] == ["R1", "R2"]

    def test_add_existing_id_rejected(self):
        result = validate_suggestion(
            R1R2, Suggestion("add rule", "R1 when DetectUserFallen then CallEmergencySupport")
        )
        assert not result.applied

    def test_combine_rules(self):
        result = validate_suggestion(
            R1R2,
            Suggestion(
                "combine rule",
                "R1 when DetectUserFallen and emergencyLevel >= L2 then "
                "CallEmergencySupport within 2 minutes",
                "R2",
            ),
        )
        assert result.applied
        assert [r.rule_id for r in result.new_spec.rules] == ["R1"]
        assert result.report.verdicts == []

    def test_input_spec_untouched(self):
        before = R1R2
        validate_suggestion(R1R2, Suggestion("remove rule", "", "R2"))
        assert R1R2 == before and len(R1R2.rules) == 2

    def test_unknown_reference_in_suggestion(self):
        result = validate_suggestion(
            R1R2, Suggestion("modify rule", "R2 when Teleport then not CallEmergencySupport "
                                           "within 1 minute", "R2")
        )
        assert not result.applied
        assert any("Teleport" in d.message for d in result.diagnostics)

    def test_report_suggestions_apply(self):
        report = parse_report(json.dumps(VALID_REPORT), R1R2)
        for suggestion in suggestions_from_report(report, R1R2):
            result = validate_suggestion(R1R2, suggestion)
            assert result.applied
            assert result.report.verdicts == []


class TestBundledFixes:
    def test_three_canned_r1r2_suggestions(self):
        canned = json.loads(fixture_text("r1r2_suggestions.json"))
        assert len(canned) == 3
        for doc in canned:
            result = validate_suggestion(R1R2, Suggestion.from_json(doc))
            assert result.applied, doc
            assert result.report.verdicts == []

    def test_almi_fix(self):
        doc = json.loads(fixture_text("almi_fix.json"))
        result = validate_suggestion(ALMI, Suggestion.from_json(doc))
        assert result.applied
        assert result.report.verdicts == []
