"""HTTP API and session persistence for the iterative debugging loop.

Sessions are append-only JSON-lines logs, one file per session under the
data directory; restart recovery is a replay of the log. Submitting a
ruleset runs the full analysis pipeline and appends a revision unless the
text fails to parse. Applying a suggestion re-checks the edited ruleset
and appends the new revision on success. The metrics mirror the
instrumented quantities of the debugging workflow: iteration count until
the first conflict-free revision and elapsed time from the first
conflicting one.

Checks run under a server-side time budget (default 30 s); an overrun
returns whatever was computed with a ``partial`` flag rather than an
error.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Callable, Optional

from .checker import CheckConfig, run_all
from .explain import (
    LlmConfig,
    ProviderError,
    ReportError,
    Suggestion,
    explain_verdict,
    validate_suggestion,
)
from .language import format_spec, parse

DEFAULT_PORT = 8080
CHECK_BUDGET_SECS = 30.0


class SessionNotFound(KeyError):
    pass


@dataclass
class Revision:
    text: str
    submitted_at: float
    diagnostics: list = field(default_factory=list)
    verdicts: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    partial: bool = False

    def to_json(self, index: int) -> dict:
        return {
            "revision": index,
            "text": self.text,
            "submitted_at": self.submitted_at,
            "diagnostics": self.diagnostics,
            "verdicts": self.verdicts,
            "warnings": self.warnings,
            "partial": self.partial,
        }


@dataclass
class Session:
    session_id: str
    created_at: float
    revisions: list[Revision] = field(default_factory=list)
    explanations: list[dict] = field(default_factory=list)

    @property
    def resolved_index(self) -> Optional[int]:
        """0-based index of the first revision with an empty verdict list."""
        for i, rev in enumerate(self.revisions):
            if not rev.verdicts:
                return i
        return None

    def to_json(self) -> dict:
        return {
            "id": self.session_id,
            "created_at": self.created_at,
            "revisions": [rev.to_json(i) for i, rev in enumerate(self.revisions)],
            "explanations": self.explanations,
            "resolved_at": (
                self.revisions[self.resolved_index].submitted_at
                if self.resolved_index is not None
                else None
            ),
        }

    def metrics(self) -> dict:
        resolved = self.resolved_index
        first_conflict_at: Optional[float] = None
        cleared: set = set()
        upto = resolved if resolved is not None else len(self.revisions)
        for rev in self.revisions[:upto]:
            if rev.verdicts and first_conflict_at is None:
                first_conflict_at = rev.submitted_at
            for verdict in rev.verdicts:
                cleared.add((verdict["kind"], tuple(verdict["rules"])))
        elapsed = None
        if resolved is not None and first_conflict_at is not None:
            elapsed = self.revisions[resolved].submitted_at - first_conflict_at
        return {
            "resolved": resolved is not None,
            "iterations": resolved + 1 if resolved is not None else None,
            "elapsed_secs": elapsed,
            "resolved_rules": len(cleared) if resolved is not None else 0,
        }


class SessionStore:
    """One append-only JSON-lines file per session."""

    def __init__(self, data_dir: Path):
        self.data_dir = Path(data_dir)
        (self.data_dir / "sessions").mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def lock(self, session_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(session_id, threading.Lock())

    def _path(self, session_id: str) -> Path:
        return self.data_dir / "sessions" / f"{session_id}.jsonl"

    def create(self, created_at: float) -> str:
        session_id = uuid.uuid4().hex
        self._append(session_id, {"type": "created", "at": created_at})
        return session_id

    def _append(self, session_id: str, event: dict) -> None:
        with self._path(session_id).open("a", encoding="utf-8") as handle:
            handle.write(json.dumps(event) + "\n")
            handle.flush()

    def append_revision(self, session_id: str, revision: Revision) -> None:
        self._append(
            session_id,
            {
                "type": "revision",
                "at": revision.submitted_at,
                "text": revision.text,
                "diagnostics": revision.diagnostics,
                "verdicts": revision.verdicts,
                "warnings": revision.warnings,
                "partial": revision.partial,
            },
        )

    def append_explanation(self, session_id: str, record: dict) -> None:
        self._append(session_id, {"type": "explanation", **record})

    def load(self, session_id: str) -> Session:
        path = self._path(session_id)
        if not path.exists():
            raise SessionNotFound(session_id)
        session: Optional[Session] = None
        for line in path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            event = json.loads(line)
            if event["type"] == "created":
                session = Session(session_id, event["at"])
            elif session is not None and event["type"] == "revision":
                session.revisions.append(
                    Revision(
                        event["text"],
                        event["at"],
                        event.get("diagnostics", []),
                        event.get("verdicts", []),
                        event.get("warnings", []),
                        event.get("partial", False),
                    )
                )
            elif session is not None and event["type"] == "explanation":
                session.explanations.append(
                    {k: v for k, v in event.items() if k != "type"}
                )
        if session is None:
            raise SessionNotFound(session_id)
        return session


class Service:
    """Session workflow behind the HTTP endpoints; usable directly in tests."""

    def __init__(
        self,
        store: SessionStore,
        check_cfg: CheckConfig = CheckConfig(),
        llm_cfg: Optional[LlmConfig] = None,
        budget_secs: float = CHECK_BUDGET_SECS,
        clock: Callable[[], float] = time.time,
    ):
        self.store = store
        self.check_cfg = check_cfg
        self.llm_cfg = llm_cfg or LlmConfig.from_env()
        if self.llm_cfg.cache_dir is None:
            self.llm_cfg.cache_dir = store.data_dir / "llm_cache"
        self.budget_secs = budget_secs
        self.clock = clock

    def create_session(self) -> str:
        return self.store.create(self.clock())

    def get_session(self, session_id: str) -> Session:
        return self.store.load(session_id)

    def submit_ruleset(self, session_id: str, text: str) -> dict:
        with self.store.lock(session_id):
            session = self.store.load(session_id)
            result = parse(text)
            syntax_errors = [d for d in result.diagnostics if d.category.value == "syntax"]
            if syntax_errors or result.spec is None:
                return {
                    "revision": None,
                    "diagnostics": [d.to_json() for d in result.diagnostics],
                    "verdicts": [],
                    "warnings": [],
                }
            report = run_all(result.spec, self.check_cfg, budget_secs=self.budget_secs)
            revision = Revision(
                text,
                self.clock(),
                [d.to_json() for d in report.diagnostics],
                [v.to_json(self.check_cfg.elide_tocks) for v in report.verdicts],
                report.warnings,
                report.partial,
            )
            self.store.append_revision(session_id, revision)
            doc = revision.to_json(len(session.revisions))
            doc.pop("text")
            return doc

    def request_explanation(
        self, session_id: str, revision_index: int, verdict_index: int, system_description: str = ""
    ) -> dict:
        with self.store.lock(session_id):
            session = self.store.load(session_id)
            if not 0 <= revision_index < len(session.revisions):
                raise SessionNotFound(f"revision {revision_index}")
            revision = session.revisions[revision_index]
            if not 0 <= verdict_index < len(revision.verdicts):
                raise SessionNotFound(f"verdict {verdict_index}")
            spec = parse(revision.text).spec
            report_verdicts = run_all(spec, self.check_cfg, budget_secs=self.budget_secs)
            verdict = report_verdicts.verdicts[verdict_index]
            report, _bundle = explain_verdict(
                spec, verdict, system_description, self.llm_cfg, self.check_cfg
            )
            record = {
                "revision": revision_index,
                "verdict": verdict_index,
                "requested_at": self.clock(),
                "report": report.to_json(),
            }
            self.store.append_explanation(session_id, record)
            return record["report"]

    def apply_suggestion(self, session_id: str, revision_index: int, suggestion: Suggestion) -> dict:
        with self.store.lock(session_id):
            session = self.store.load(session_id)
            if not 0 <= revision_index < len(session.revisions):
                raise SessionNotFound(f"revision {revision_index}")
            base = parse(session.revisions[revision_index].text).spec
            result = validate_suggestion(base, suggestion, self.check_cfg)
            if not result.applied:
                return {
                    "revision": None,
                    "diagnostics": [d.to_json() for d in result.diagnostics],
                    "verdicts": [],
                    "warnings": [],
                }
            report = result.report
            revision = Revision(
                format_spec(result.new_spec),
                self.clock(),
                [d.to_json() for d in report.diagnostics],
                [v.to_json(self.check_cfg.elide_tocks) for v in report.verdicts],
                report.warnings,
                report.partial,
            )
            self.store.append_revision(session_id, revision)
            doc = revision.to_json(len(session.revisions))
            doc["text"] = revision.text  # the editor needs the rewritten ruleset
            return doc

    def get_metrics(self, session_id: str) -> dict:
        return self.store.load(session_id).metrics()


class _Handler(BaseHTTPRequestHandler):
    service: Service
    webui_dir: Optional[Path] = None

    # Quieter default logging: one line per request on stderr.
    def log_message(self, fmt, *args):  # noqa: N802 (stdlib signature)
        import sys

        sys.stderr.write("%s - %s\n" % (self.address_string(), fmt % args))

    def _send_json(self, doc, status: int = 200) -> None:
        body = json.dumps(doc).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _read_body(self) -> dict:
        length = int(self.headers.get("Content-Length", "0"))
        if length == 0:
            return {}
        try:
            return json.loads(self.rfile.read(length).decode("utf-8"))
        except json.JSONDecodeError:
            return {}

    def _serve_static(self, path: str) -> None:
        if self.webui_dir is None:
            self._send_json({"error": "no web UI bundled; use the JSON API"}, 404)
            return
        name = "index.html" if path in ("/", "") else path.lstrip("/")
        target = (self.webui_dir / name).resolve()
        if not str(target).startswith(str(self.webui_dir.resolve())) or not target.is_file():
            self._send_json({"error": "not found"}, 404)
            return
        body = target.read_bytes()
        ctype = {
            ".html": "text/html; charset=utf-8",
            ".js": "text/javascript",
            ".css": "text/css",
            ".json": "application/json",
        }.get(target.suffix, "application/octet-stream")
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_GET(self) -> None:  # noqa: N802
        try:
            parts = [p for p in self.path.split("?")[0].split("/") if p]
            if parts == ["api", "health"]:
                self._send_json({"status": "ok"})
            elif len(parts) == 3 and parts[:2] == ["api", "sessions"]:
                self._send_json(self.service.get_session(parts[2]).to_json())
            elif len(parts) == 4 and parts[:2] == ["api", "sessions"] and parts[3] == "metrics":
                self._send_json(self.service.get_metrics(parts[2]))
            elif parts and parts[0] == "api":
                self._send_json({"error": "not found"}, 404)
            else:
                self._serve_static(self.path.split("?")[0])
        except SessionNotFound as exc:
            self._send_json({"error": f"not found: {exc}"}, 404)
        except Exception as exc:  # pragma: no cover - defensive
            self._send_json({"error": str(exc)}, 500)

    def do_POST(self) -> None:  # noqa: N802
        try:
            parts = [p for p in self.path.split("?")[0].split("/") if p]
            body = self._read_body()
            if parts == ["api", "sessions"]:
                self._send_json({"id": self.service.create_session()})
            elif len(parts) == 4 and parts[:2] == ["api", "sessions"] and parts[3] == "ruleset":
                if "text" not in body:
                    self._send_json({"error": "body must carry {text}"}, 400)
                    return
                self._send_json(self.service.submit_ruleset(parts[2], body["text"]))
            elif len(parts) == 4 and parts[:2] == ["api", "sessions"] and parts[3] == "explain":
                report = self.service.request_explanation(
                    parts[2],
                    int(body.get("revision", 0)),
                    int(body.get("verdict", 0)),
                    body.get("system_description", ""),
                )
                self._send_json(report)
            elif len(parts) == 4 and parts[:2] == ["api", "sessions"] and parts[3] == "apply":
                suggestion = Suggestion.from_json(body)
                self._send_json(
                    self.service.apply_suggestion(
                        parts[2], int(body.get("revision", 0)), suggestion
                    )
                )
            else:
                self._send_json({"error": "not found"}, 404)
        except SessionNotFound as exc:
            self._send_json({"error": f"not found: {exc}"}, 404)
        except (ReportError, ProviderError) as exc:
            self._send_json({"error": str(exc), "category": type(exc).__name__}, 502)
        except ValueError as exc:
            self._send_json({"error": str(exc)}, 400)
        except Exception as exc:  # pragma: no cover - defensive
            self._send_json({"error": str(exc)}, 500)


def make_server(
    service: Service, port: int = DEFAULT_PORT, webui_dir: Optional[Path] = None
) -> ThreadingHTTPServer:
    handler = type("BoundHandler", (_Handler,), {"service": service, "webui_dir": webui_dir})
    return ThreadingHTTPServer(("127.0.0.1", port), handler)


def serve_forever(
    data_dir: Path,
    port: int = DEFAULT_PORT,
    check_cfg: CheckConfig = CheckConfig(),
    llm_cfg: Optional[LlmConfig] = None,
    webui_dir: Optional[Path] = None,
) -> None:
    service = Service(SessionStore(data_dir), check_cfg, llm_cfg)
    server = make_server(service, port, webui_dir)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
