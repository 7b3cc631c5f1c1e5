"""Optional direct access to a chat-completion endpoint.

The default workflow is the manual clipboard round trip; this client exists
so ``chat`` can automate it against any JSON-over-HTTP endpoint speaking the
de-facto chat-completions wire format. The assistant text is returned
verbatim - no trimming, no reflow - and the API key is never written to disk
or logs.
"""

from __future__ import annotations

import json
import os
import socket
import time
import urllib.error
import urllib.parse
import urllib.request
from dataclasses import dataclass, field
from typing import NamedTuple

from .errors import (
    AuthFailed,
    EmptyInput,
    GatewayError,
    GatewayTimeout,
    MalformedResponse,
    RateLimited,
)

ENV_BASE = "RA_API_BASE"
ENV_KEY = "RA_API_KEY"
ENV_MODEL = "RA_MODEL"

_COMPLETIONS_PATH = "/chat/completions"


@dataclass
class GatewayConfig:
    base_url: str
    api_key: str = field(default="", repr=False)
    model: str = ""
    timeout: float = 60.0
    max_retries: int = 3
    temperature: float = 0.0
    backoff_base: float = 0.5

    def validate(self) -> None:
        parts = urllib.parse.urlparse(self.base_url)
        if parts.scheme not in ("http", "https") or not parts.netloc:
            raise GatewayError(f"base_url is not a well-formed http(s) URL: {self.base_url!r}")
        if not self.model:
            raise GatewayError(f"no model configured (set {ENV_MODEL})")
        if self.timeout <= 0:
            raise GatewayError("timeout must be positive")
        if self.max_retries < 0:
            raise GatewayError("max_retries must be >= 0")

    @property
    def endpoint(self) -> str:
        base = self.base_url.rstrip("/")
        if base.endswith(_COMPLETIONS_PATH):
            return base
        return base + _COMPLETIONS_PATH

    @classmethod
    def from_env(cls, env: dict | None = None) -> "GatewayConfig":
        env = os.environ if env is None else env
        base = env.get(ENV_BASE, "")
        if not base:
            raise GatewayError(f"no endpoint configured (set {ENV_BASE})")
        return cls(
            base_url=base,
            api_key=env.get(ENV_KEY, ""),
            model=env.get(ENV_MODEL, ""),
        )


class CompletionResult(NamedTuple):
    text: str
    usage: dict


def complete(prompt: str, config: GatewayConfig) -> CompletionResult:
    """Send one user message; return the assistant text verbatim.

    Transport failures (connect errors, timeouts, 429, 5xx) are retried up to
    ``max_retries`` times with exponential backoff; auth failures and client
    errors are not retried.
    """
    if not prompt.strip():
        raise EmptyInput("prompt")
    config.validate()
    body = json.dumps(
        {
            "model": config.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": config.temperature,
        }
    ).encode("utf-8")
    headers = {"Content-Type": "application/json"}
    if config.api_key:
        headers["Authorization"] = f"Bearer {config.api_key}"

    attempts = config.max_retries + 1
    last_error: GatewayError | None = None
    for attempt in range(attempts):
        if attempt:
            time.sleep(_backoff_delay(config, attempt, last_error))
        try:
            request = urllib.request.Request(
                config.endpoint, data=body, headers=headers, method="POST"
            )
            with urllib.request.urlopen(request, timeout=config.timeout) as response:
                return _parse_body(response.read())
        except urllib.error.HTTPError as exc:
            status = exc.code
            detail = _error_detail(exc)
            if status in (401, 403):
                raise AuthFailed(f"endpoint rejected the API key (HTTP {status}){detail}")
            if status == 429:
                last_error = RateLimited(
                    f"rate limited (HTTP 429){detail}",
                    retry_after=_retry_after(exc),
                )
                continue
            if status >= 500:
                last_error = GatewayError(f"upstream failure (HTTP {status}){detail}")
                continue
            raise GatewayError(f"endpoint rejected the request (HTTP {status}){detail}")
        except (TimeoutError, socket.timeout):
            last_error = GatewayTimeout(
                f"no response within {config.timeout:g}s from {config.endpoint}"
            )
            continue
        except urllib.error.URLError as exc:
            if isinstance(exc.reason, (TimeoutError, socket.timeout)):
                last_error = GatewayTimeout(
                    f"no response within {config.timeout:g}s from {config.endpoint}"
                )
            else:
                last_error = GatewayError(f"could not reach {config.endpoint}: {exc.reason}")
            continue
    assert last_error is not None
    raise last_error


def _backoff_delay(config: GatewayConfig, attempt: int, last_error: GatewayError | None) -> float:
    if isinstance(last_error, RateLimited) and last_error.retry_after is not None:
        return last_error.retry_after
    return config.backoff_base * (2 ** (attempt - 1))


def _retry_after(exc: urllib.error.HTTPError) -> float | None:
    value = exc.headers.get("Retry-After") if exc.headers else None
    if value is None:
        return None
    try:
        return float(value)
    except ValueError:
        return None


def _error_detail(exc: urllib.error.HTTPError) -> str:
    try:
        payload = json.loads(exc.read().decode("utf-8", "replace"))
        message = payload.get("error", {}).get("message")
        return f": {message}" if message else ""
    except Exception:
        return ""


def _parse_body(raw: bytes) -> CompletionResult:
    try:
        payload = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MalformedResponse(f"response body is not valid JSON: {exc}") from exc
    try:
        text = payload["choices"][0]["message"]["content"]
    except (KeyError, IndexError, TypeError) as exc:
        raise MalformedResponse("response lacks choices[0].message.content") from exc
    if not isinstance(text, str):
        raise MalformedResponse("assistant message content is not text")
    usage = payload.get("usage")
    return CompletionResult(text=text, usage=usage if isinstance(usage, dict) else {})
