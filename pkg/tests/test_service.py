"""Session workflow, persistence, metrics, and HTTP surface."""

import json
import threading
import urllib.request

import pytest

from sleec_workbench.checker import CheckConfig
from sleec_workbench.explain import LlmConfig, Suggestion
from sleec_workbench.fixtures import fixture_text
from sleec_workbench.service import (
    Service,
    SessionNotFound,
    SessionStore,
    make_server,
)

R1R2_TEXT = fixture_text("r1r2.sleec")
ALMI_TEXT = fixture_text("almi.sleec")
CLEAN_TEXT = (
    "def_start\n    event Ping\n    event Pong\ndef_end\n"
    "rule_start\n    R1 when Ping then Pong within 2 minutes\nrule_end\n"
)


class FakeClock:
    def __init__(self, start=1000.0):
        self.now = start

    def __call__(self):
        return self.now

    def advance(self, secs):
        self.now += secs


@pytest.fixture
def service(tmp_path):
    return Service(
        SessionStore(tmp_path),
        CheckConfig(),
        LlmConfig(provider="mock", cache_dir=tmp_path / "llm_cache"),
        clock=FakeClock(),
    )


class TestSessions:
    def test_create_returns_distinct_ids(self, service):
        assert service.create_session() != service.create_session()

    def test_id_uniqueness_at_scale(self, tmp_path):
        store = SessionStore(tmp_path)
        ids = {store.create(0.0) for _ in range(10_000)}
        assert len(ids) == 10_000

    def test_persisted_across_store_instances(self, service, tmp_path):
        sid = service.create_session()
        service.submit_ruleset(sid, R1R2_TEXT)
        reloaded = Service(SessionStore(tmp_path), CheckConfig()).get_session(sid)
        assert len(reloaded.revisions) == 1
        assert reloaded.revisions[0].verdicts[0]["rules"] == ["R1", "R2"]

    def test_unknown_session(self, service):
        with pytest.raises(SessionNotFound):
            service.get_session("missing")


class TestSubmit:
    def test_conflicting_ruleset(self, service):
        sid = service.create_session()
        doc = service.submit_ruleset(sid, R1R2_TEXT)
        assert doc["revision"] == 0
        assert [v["kind"] for v in doc["verdicts"]] == ["deadlock"]
        assert doc["verdicts"][0]["trace"] == (
            "<DetectUserFallen, emergencyLevel.L1, tock, tock>"
        )

    def test_clean_ruleset_resolves_session(self, service):
        sid = service.create_session()
        service.submit_ruleset(sid, R1R2_TEXT)
        service.submit_ruleset(sid, CLEAN_TEXT)
        session = service.get_session(sid)
        assert session.resolved_index == 1

    def test_empty_body_appends_nothing(self, service):
        sid = service.create_session()
        doc = service.submit_ruleset(sid, "")
        assert doc["revision"] is None
        assert doc["diagnostics"]
        assert service.get_session(sid).revisions == []

    def test_naming_errors_still_append(self, service):
        sid = service.create_session()
        text = CLEAN_TEXT.replace("then Pong", "then Pongg")
        doc = service.submit_ruleset(sid, text)
        assert doc["revision"] == 0
        assert any(d["category"] == "naming" for d in doc["diagnostics"])

    def test_replay_determinism(self, service):
        sid = service.create_session()
        first = service.submit_ruleset(sid, R1R2_TEXT)
        second = service.submit_ruleset(sid, R1R2_TEXT)
        assert first["verdicts"] == second["verdicts"]

    def test_zero_budget_returns_partial(self, tmp_path):
        service = Service(SessionStore(tmp_path), CheckConfig(), budget_secs=0.0)
        sid = service.create_session()
        doc = service.submit_ruleset(sid, ALMI_TEXT)
        assert doc["partial"] is True


class TestExplainAndApply:
    def test_mock_explanation_stored(self, service):
        sid = service.create_session()
        service.submit_ruleset(sid, R1R2_TEXT)
        report = service.request_explanation(sid, 0, 0, "care robot")
        assert report["Conflicting Rules"]["Error"]["Category"] == "deadlock"
        session = service.get_session(sid)
        assert session.explanations[0]["revision"] == 0

    def test_out_of_range_verdict(self, service):
        sid = service.create_session()
        service.submit_ruleset(sid, R1R2_TEXT)
        with pytest.raises(SessionNotFound):
            service.request_explanation(sid, 0, 9)

    def test_repeated_explanation_is_cached_byte_identical(self, service, tmp_path):
        sid = service.create_session()
        service.submit_ruleset(sid, R1R2_TEXT)
        first = service.request_explanation(sid, 0, 0, "desc")
        cache_files = list((tmp_path / "llm_cache").iterdir())
        assert cache_files, "expected a cached response"
        second = service.request_explanation(sid, 0, 0, "desc")
        assert json.dumps(first) == json.dumps(second)

    def test_apply_remove_clears_conflict(self, service):
        sid = service.create_session()
        service.submit_ruleset(sid, R1R2_TEXT)
        doc = service.apply_suggestion(sid, 0, Suggestion("remove rule", "", "R2"))
        assert doc["revision"] == 1
        assert doc["verdicts"] == []
        assert "R2" not in doc["text"]

    def test_apply_malformed_appends_nothing(self, service):
        sid = service.create_session()
        service.submit_ruleset(sid, R1R2_TEXT)
        doc = service.apply_suggestion(
            sid, 0, Suggestion("modify rule", "when DetectUserFallen then", "R2")
        )
        assert doc["revision"] is None
        assert doc["diagnostics"]
        assert len(service.get_session(sid).revisions) == 1

    def test_apply_bundled_almi_fix(self, service):
        sid = service.create_session()
        service.submit_ruleset(sid, ALMI_TEXT)
        fix = Suggestion.from_json(json.loads(fixture_text("almi_fix.json")))
        doc = service.apply_suggestion(sid, 0, fix)
        assert doc["verdicts"] == []


class TestMetrics:
    def test_unresolved_session(self, service):
        sid = service.create_session()
        service.submit_ruleset(sid, R1R2_TEXT)
        metrics = service.get_metrics(sid)
        assert metrics == {
            "resolved": False,
            "iterations": None,
            "elapsed_secs": None,
            "resolved_rules": 0,
        }

    def test_scripted_replay(self, tmp_path):
        # Four-revision replay: conflict, still conflict, syntax slip
        # (no revision), fix. Hand computation: iterations = 3 (third
        # stored revision resolves), elapsed = 30 + 45 = 75 s from the
        # first conflicting revision, one distinct verdict cleared.
        clock = FakeClock()
        service = Service(
            SessionStore(tmp_path),
            CheckConfig(),
            LlmConfig(provider="mock"),
            clock=clock,
        )
        sid = service.create_session()
        service.submit_ruleset(sid, R1R2_TEXT)
        clock.advance(30)
        service.submit_ruleset(sid, R1R2_TEXT)
        clock.advance(10)
        service.submit_ruleset(sid, "def_start event rule_start")
        clock.advance(35)
        fixed = R1R2_TEXT.replace(
            "    R2 when DetectUserFallen and emergencyLevel < L2 "
            "then not CallEmergencySupport within 2 minutes\n",
            "",
        )
        service.submit_ruleset(sid, fixed)
        metrics = service.get_metrics(sid)
        assert metrics["resolved"] is True
        assert metrics["iterations"] == 3
        assert metrics["elapsed_secs"] == pytest.approx(75.0)
        assert metrics["resolved_rules"] == 1

    def test_resolved_on_first_submission(self, service):
        sid = service.create_session()
        service.submit_ruleset(sid, CLEAN_TEXT)
        metrics = service.get_metrics(sid)
        assert metrics["resolved"] is True
        assert metrics["iterations"] == 1
        assert metrics["elapsed_secs"] is None


class TestHttpSurface:
    @pytest.fixture
    def server(self, service):
        httpd = make_server(service, port=0)
        thread = threading.Thread(target=httpd.serve_forever, daemon=True)
        thread.start()
        yield f"http://127.0.0.1:{httpd.server_address[1]}"
        httpd.shutdown()
        httpd.server_close()

    def call(self, base, method, path, body=None):
        data = json.dumps(body).encode() if body is not None else None
        request = urllib.request.Request(
            base + path, data=data, method=method,
            headers={"Content-Type": "application/json"},
        )
        try:
            with urllib.request.urlopen(request) as response:
                return response.status, json.loads(response.read().decode())
        except urllib.error.HTTPError as exc:
            return exc.code, json.loads(exc.read().decode())

    def test_full_loop(self, server):
        status, doc = self.call(server, "GET", "/api/health")
        assert (status, doc) == (200, {"status": "ok"})

        status, doc = self.call(server, "POST", "/api/sessions")
        sid = doc["id"]

        status, doc = self.call(
            server, "POST", f"/api/sessions/{sid}/ruleset", {"text": R1R2_TEXT}
        )
        assert status == 200 and doc["revision"] == 0
        assert doc["verdicts"][0]["rules"] == ["R1", "R2"]

        status, report = self.call(
            server, "POST", f"/api/sessions/{sid}/explain",
            {"revision": 0, "verdict": 0, "system_description": "robot"},
        )
        assert status == 200
        assert report["Conflicting Rules"]["Error"]["Rule1"] == "R1"

        status, doc = self.call(
            server, "POST", f"/api/sessions/{sid}/apply",
            {"revision": 0, "kind": "remove rule", "target_rule_id": "R2", "sleec_text": ""},
        )
        assert status == 200 and doc["verdicts"] == []

        status, metrics = self.call(server, "GET", f"/api/sessions/{sid}/metrics")
        assert metrics["resolved"] is True and metrics["iterations"] == 2

        status, session = self.call(server, "GET", f"/api/sessions/{sid}")
        assert len(session["revisions"]) == 2

    def test_unknown_session_404(self, server):
        status, doc = self.call(server, "GET", "/api/sessions/nope")
        assert status == 404

    def test_bad_body_400(self, server):
        status, doc = self.call(server, "POST", "/api/sessions")
        sid = doc["id"]
        status, doc = self.call(server, "POST", f"/api/sessions/{sid}/ruleset", {})
        assert status == 400
