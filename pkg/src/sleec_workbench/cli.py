"""Command line entry points: check, explain, fmt, serve.

Exit codes are stable: 0 clean, 1 conflicts (or differences for
``fmt --check``), 2 syntax/naming/type errors, 64 unreadable input,
65 bad selection (e.g. ``--verdict`` out of range). In ``--json`` mode
stdout carries exactly one JSON document; everything else goes to
stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .checker import CheckConfig, run_all
from .explain import LlmConfig, ProviderError, ReportError, explain_verdict
from .language import Severity, format_spec, parse
from .service import DEFAULT_PORT, serve_forever

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_INVALID = 2
EXIT_UNREADABLE = 64
EXIT_BAD_SELECTION = 65


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sleec",
        description="Check, explain, and format SLEEC normative rulesets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_check_flags(p):
        p.add_argument("--horizon", type=int, default=8, metavar="N",
                       help="exploration depth in ticks (default 8)")
        p.add_argument("--max-env-events", type=int, default=1, metavar="N",
                       help="trigger events the environment may fire per instant")
        p.add_argument("--no-elide-tocks", action="store_true",
                       help="print every tock instead of eliding long runs")

    p_check = sub.add_parser("check", help="analyze a ruleset for conflicts")
    p_check.add_argument("path", help="path to a .sleec file")
    p_check.add_argument("--json", action="store_true", help="emit one JSON report on stdout")
    add_check_flags(p_check)

    p_explain = sub.add_parser("explain", help="explain a detected problem via the LLM pipeline")
    p_explain.add_argument("path", help="path to a .sleec file")
    p_explain.add_argument("--verdict", type=int, default=0, metavar="N",
                           help="which verdict to explain (default 0)")
    p_explain.add_argument("--mock", action="store_true", help="force the canned mock provider")
    p_explain.add_argument("--system-description", metavar="FILE",
                           help="file with a natural-language system description")
    add_check_flags(p_explain)

    p_fmt = sub.add_parser("fmt", help="canonically format a ruleset")
    p_fmt.add_argument("path", help="path to a .sleec file")
    p_fmt.add_argument("--check", action="store_true",
                       help="exit 1 if the file is not already formatted")
    p_fmt.add_argument("--write", action="store_true", help="rewrite the file in place")

    p_serve = sub.add_parser("serve", help="run the HTTP API (and web UI when built)")
    p_serve.add_argument("--port", type=int,
                         default=int(os.environ.get("SLEEC_PORT", DEFAULT_PORT)))
    p_serve.add_argument("--data-dir", default=os.environ.get("SLEEC_DATA_DIR", ".sleec-data"))
    p_serve.add_argument("--webui-dir", default=None,
                         help="directory of built web UI assets to serve under /")
    add_check_flags(p_serve)
    return parser


def check_config(args) -> CheckConfig:
    return CheckConfig(
        horizon_ticks=args.horizon,
        max_env_events_per_instant=args.max_env_events,
        elide_tocks=not args.no_elide_tocks,
    )


def _load(path: str) -> str | None:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"cannot read {path}: {exc}", file=sys.stderr)
        return None


def cmd_check(args) -> int:
    text = _load(args.path)
    if text is None:
        return EXIT_UNREADABLE
    cfg = check_config(args)
    result = parse(text)
    if result.spec is None or any(d.severity is Severity.ERROR for d in result.diagnostics):
        report_doc = {
            "diagnostics": [d.to_json() for d in result.diagnostics],
            "verdicts": [],
            "warnings": [],
        }
        _emit_check(args, report_doc, result.diagnostics, [])
        return EXIT_INVALID
    report = run_all(result.spec, cfg)
    _emit_check(args, report.to_json(cfg.elide_tocks), report.diagnostics, report.verdicts,
                report.warnings)
    if any(d.severity is Severity.ERROR for d in report.diagnostics):
        return EXIT_INVALID
    if report.verdicts:
        return EXIT_FINDINGS
    return EXIT_OK


def _emit_check(args, doc: dict, diagnostics, verdicts, warnings=()) -> None:
    if args.json:
        print(json.dumps(doc, indent=2))
        return
    for diag in diagnostics:
        print(f"{args.path}:{diag.render()}")
    for warning in warnings:
        print(f"warning: {warning}", file=sys.stderr)
    if not verdicts and not diagnostics:
        print("consistent: no conflicts, divergences, or redundancies found")
    for verdict in verdicts:
        doc_v = verdict.to_json() if hasattr(verdict, "to_json") else verdict
        print(f"{doc_v['kind']}: rules {', '.join(doc_v['rules'])}")
        if doc_v.get("trace"):
            print(f"  trace: {doc_v['trace']}")
        print(f"  {doc_v['message']}")


def cmd_explain(args) -> int:
    text = _load(args.path)
    if text is None:
        return EXIT_UNREADABLE
    cfg = check_config(args)
    result = parse(text)
    if result.spec is None or any(d.severity is Severity.ERROR for d in result.diagnostics):
        for diag in result.diagnostics:
            print(f"{args.path}:{diag.render()}", file=sys.stderr)
        return EXIT_INVALID
    report = run_all(result.spec, cfg)
    if any(d.severity is Severity.ERROR for d in report.diagnostics):
        for diag in report.diagnostics:
            print(f"{args.path}:{diag.render()}", file=sys.stderr)
        return EXIT_INVALID
    if not report.verdicts:
        print("nothing to explain: the ruleset is conflict-free", file=sys.stderr)
        return EXIT_OK
    if not 0 <= args.verdict < len(report.verdicts):
        print(
            f"--verdict {args.verdict} out of range; found {len(report.verdicts)} verdict(s)",
            file=sys.stderr,
        )
        return EXIT_BAD_SELECTION
    description = ""
    if args.system_description:
        desc_text = _load(args.system_description)
        if desc_text is None:
            return EXIT_UNREADABLE
        description = desc_text
    llm = LlmConfig.from_env()
    if args.mock:
        llm.provider = "mock"
    try:
        explanation, _bundle = explain_verdict(
            result.spec, report.verdicts[args.verdict], description, llm, cfg
        )
    except (ReportError, ProviderError) as exc:
        print(f"explanation failed: {exc}", file=sys.stderr)
        return EXIT_FINDINGS
    print(json.dumps(explanation.to_json(), indent=2))
    return EXIT_OK


def cmd_fmt(args) -> int:
    text = _load(args.path)
    if text is None:
        return EXIT_UNREADABLE
    result = parse(text)
    if not result.ok:
        for diag in result.diagnostics:
            print(f"{args.path}:{diag.render()}", file=sys.stderr)
        return EXIT_INVALID
    formatted = format_spec(result.spec)
    if args.check:
        if formatted != text:
            print(f"{args.path} is not canonically formatted", file=sys.stderr)
            return EXIT_FINDINGS
        return EXIT_OK
    if args.write:
        Path(args.path).write_text(formatted, encoding="utf-8")
        return EXIT_OK
    sys.stdout.write(formatted)
    return EXIT_OK


def cmd_serve(args) -> int:
    webui = Path(args.webui_dir) if args.webui_dir else _default_webui_dir()
    print(
        f"serving on http://127.0.0.1:{args.port} (data: {args.data_dir}, "
        f"webui: {webui or 'none'})",
        file=sys.stderr,
    )
    serve_forever(
        Path(args.data_dir),
        args.port,
        check_config(args),
        webui_dir=webui,
    )
    return EXIT_OK


def _default_webui_dir() -> Path | None:
    candidate = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    if candidate.is_dir():
        return candidate
    env = os.environ.get("SLEEC_WEBUI_DIR")
    if env and Path(env).is_dir():
        return Path(env)
    return None


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "check": cmd_check,
        "explain": cmd_explain,
        "fmt": cmd_fmt,
        "serve": cmd_serve,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
