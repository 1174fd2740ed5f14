"""Model providers: a canned-fixture mock and a JSON-over-HTTP remote.

Requests are a single chat completion (system + user message). Responses
are cached by prompt hash when a cache directory is configured, which
together with temperature 0 makes the pipeline reproducible. The mock
provider resolves ``<sha256-prefix>.json`` files in its fixtures
directory and falls back to ``default.json``; it never touches the
network.
"""

from __future__ import annotations

import hashlib
import json
import os
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

SYSTEM_MESSAGE = (
    "You are an assistant that explains conflicts in SLEEC normative rule "
    "sets to non-technical stakeholders and proposes rule edits."
)

HASH_PREFIX_LEN = 16


class ProviderError(Exception):
    """Transport, authentication, or fixture-resolution failure."""

    def __init__(self, message: str, status: Optional[int] = None):
        super().__init__(message)
        self.status = status


@dataclass
class LlmConfig:
    provider: str = "mock"  # "mock" | "remote"
    endpoint: str = ""
    model: str = ""
    api_key: str = ""
    temperature: float = 0.0
    max_output_tokens: int = 1024
    retry_count: int = 1
    timeout_secs: float = 60.0
    fixtures_dir: Optional[Path] = None
    cache_dir: Optional[Path] = None

    @classmethod
    def from_env(cls, environ=os.environ) -> "LlmConfig":
        cfg = cls()
        cfg.provider = environ.get("SLEEC_LLM_PROVIDER", "mock")
        cfg.endpoint = environ.get("SLEEC_LLM_ENDPOINT", "")
        cfg.model = environ.get("SLEEC_LLM_MODEL", "")
        cfg.api_key = environ.get("SLEEC_LLM_API_KEY", "")
        cfg.timeout_secs = float(environ.get("SLEEC_LLM_TIMEOUT_SECS", "60"))
        fixtures = environ.get("SLEEC_LLM_FIXTURES_DIR")
        if fixtures:
            cfg.fixtures_dir = Path(fixtures)
        return cfg


def prompt_hash(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()[:HASH_PREFIX_LEN]


def request_explanation(bundle, cfg: LlmConfig) -> str:
    """Raw provider text for a prompt bundle (or a plain prompt string)."""
    prompt = bundle if isinstance(bundle, str) else bundle.text()
    key = prompt_hash(prompt)

    if cfg.cache_dir is not None:
        cached = Path(cfg.cache_dir) / f"{key}.json"
        if cached.exists():
            return cached.read_text(encoding="utf-8")

    if cfg.provider == "mock":
        reply = _mock_reply(key, cfg)
    else:
        reply = _remote_reply(prompt, cfg)

    if cfg.cache_dir is not None:
        Path(cfg.cache_dir).mkdir(parents=True, exist_ok=True)
        (Path(cfg.cache_dir) / f"{key}.json").write_text(reply, encoding="utf-8")
    return reply


def _mock_reply(key: str, cfg: LlmConfig) -> str:
    if cfg.fixtures_dir is not None:
        base = Path(cfg.fixtures_dir)
        for name in (f"{key}.json", "default.json"):
            path = base / name
            if path.exists():
                return path.read_text(encoding="utf-8")
        raise ProviderError(f"mock provider has no fixture for prompt hash {key}")
    package_fixtures = resources.files("sleec_workbench.fixtures") / "mock_responses"
    for name in (f"{key}.json", "default.json"):
        candidate = package_fixtures / name
        if candidate.is_file():
            return candidate.read_text(encoding="utf-8")
    raise ProviderError(f"mock provider has no fixture for prompt hash {key}")


def _remote_reply(prompt: str, cfg: LlmConfig) -> str:
    if not cfg.endpoint:
        raise ProviderError("remote provider needs SLEEC_LLM_ENDPOINT")
    payload = json.dumps(
        {
            "model": cfg.model,
            "temperature": cfg.temperature,
            "max_tokens": cfg.max_output_tokens,
            "messages": [
                {"role": "system", "content": SYSTEM_MESSAGE},
                {"role": "user", "content": prompt},
            ],
        }
    ).encode("utf-8")
    headers = {"Content-Type": "application/json"}
    if cfg.api_key:
        headers["Authorization"] = f"Bearer {cfg.api_key}"

    last_error: Optional[Exception] = None
    for _ in range(cfg.retry_count + 1):
        request = urllib.request.Request(cfg.endpoint, data=payload, headers=headers)
        try:
            with urllib.request.urlopen(request, timeout=cfg.timeout_secs) as response:
                body = json.loads(response.read().decode("utf-8"))
            return body["choices"][0]["message"]["content"]
        except urllib.error.HTTPError as exc:
            last_error = ProviderError(f"provider returned HTTP {exc.code}", exc.code)
        except (urllib.error.URLError, TimeoutError, OSError) as exc:
            last_error = ProviderError(f"provider unreachable: {exc}")
        except (KeyError, IndexError, json.JSONDecodeError) as exc:
            last_error = ProviderError(f"malformed provider response: {exc}")
    assert last_error is not None
    raise last_error
