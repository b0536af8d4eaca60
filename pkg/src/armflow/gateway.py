"""Provider-agnostic chat-completion client with record/replay fixtures.

Three modes share one entry point: ``live`` posts to a chat-completions
endpoint, ``record`` does the same and persists the response under a
content-addressed key, ``replay`` serves recorded responses with zero
network activity. Keys hash the model id plus the canonicalized
messages (trailing whitespace of each message is ignored), so a
recorded conversation replays byte-identically as long as the prompts
do not change.

Credentials are never stored: a live endpoint names the environment
variable holding the bearer token.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

__all__ = [
    "ChatMessage",
    "ChatRequest",
    "ChatResponse",
    "GatewayMode",
    "GatewayError",
    "TransportError",
    "ProviderError",
    "FixtureMissingError",
    "Gateway",
    "fixture_key",
    "complete",
]

MAX_RETRIES = 3
BASE_DELAY_S = 0.5
BACKOFF_FACTOR = 2.0
DEFAULT_TEMPERATURE = 0.2
DEFAULT_MAX_TOKENS = 4096


class GatewayError(Exception):
    """Base class for gateway failures."""


class TransportError(GatewayError):
    """Network-level failure (retryable)."""


class ProviderError(GatewayError):
    """HTTP status >= 400; carries status and body."""

    def __init__(self, status: int, body: str):
        super().__init__(f"provider returned {status}: {body[:200]}")
        self.status = status
        self.body = body


class FixtureMissingError(GatewayError):
    """Replay had no stored response for the request key."""

    def __init__(self, key: str):
        super().__init__(f"no replay fixture for key {key}")
        self.key = key


@dataclass(frozen=True)
class ChatMessage:
    role: str
    content: str

    def __post_init__(self) -> None:
        if self.role not in ("system", "user", "assistant"):
            raise ValueError(f"role must be system/user/assistant, got {self.role!r}")


@dataclass(frozen=True)
class ChatRequest:
    model_id: str
    messages: tuple[ChatMessage, ...]
    temperature: float = DEFAULT_TEMPERATURE
    max_tokens: int = DEFAULT_MAX_TOKENS

    def __post_init__(self) -> None:
        if not self.messages:
            raise ValueError("messages: empty")
        if self.messages[0].role not in ("system", "user"):
            raise ValueError("first message must be system or user")
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError("temperature: must be in [0, 2]")
        if self.max_tokens < 1:
            raise ValueError("max_tokens: must be >= 1")


@dataclass(frozen=True)
class ChatResponse:
    content: str
    model_id: str
    prompt_tokens: int
    completion_tokens: int
    latency_ms: float


@dataclass(frozen=True)
class GatewayMode:
    """Where responses come from; construct via the classmethods."""

    kind: str  # "live" | "record" | "replay"
    endpoint: str = ""
    credential_env: str = ""
    fixture_dir: Path | None = None

    @classmethod
    def live(cls, endpoint: str, credential_env: str = "") -> "GatewayMode":
        return cls(kind="live", endpoint=endpoint, credential_env=credential_env)

    @classmethod
    def record(
        cls, endpoint: str, fixture_dir: "Path | str", credential_env: str = ""
    ) -> "GatewayMode":
        return cls(
            kind="record",
            endpoint=endpoint,
            credential_env=credential_env,
            fixture_dir=Path(fixture_dir),
        )

    @classmethod
    def replay(cls, fixture_dir: "Path | str") -> "GatewayMode":
        path = Path(fixture_dir)
        if not path.is_dir():
            raise ValueError(f"replay fixture directory does not exist: {path}")
        return cls(kind="replay", fixture_dir=path)


def fixture_key(request: ChatRequest) -> str:
    """Content-addressed key: model id, roles, order, trimmed contents."""
    canon = {
        "model": request.model_id,
        "messages": [
            {"role": m.role, "content": m.content.rstrip()} for m in request.messages
        ],
    }
    payload = json.dumps(canon, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return hashlib.sha256(payload).hexdigest()


# transport(url, headers, body, timeout) -> (status, response body)
Transport = Callable[[str, dict, bytes, float], tuple[int, bytes]]


def _urllib_transport(url: str, headers: dict, body: bytes, timeout: float) -> tuple[int, bytes]:
    req = urllib.request.Request(url, data=body, headers=headers, method="POST")
    try:
        with urllib.request.urlopen(req, timeout=timeout) as resp:
            return resp.status, resp.read()
    except urllib.error.HTTPError as exc:
        return exc.code, exc.read()
    except (urllib.error.URLError, TimeoutError, ConnectionError, OSError) as exc:
        raise TransportError(str(exc)) from exc


def _forbidden_transport(url: str, headers: dict, body: bytes, timeout: float):
    raise AssertionError("replay mode attempted a network call")


@dataclass
class Gateway:
    """Chat-completion client; safe for concurrent use."""

    mode: GatewayMode
    transport: Transport = field(default=None)  # type: ignore[assignment]
    sleep: Callable[[float], None] = time.sleep
    timeout: float = 60.0

    def __post_init__(self) -> None:
        if self.transport is None:
            self.transport = (
                _forbidden_transport if self.mode.kind == "replay" else _urllib_transport
            )
        self._write_lock = threading.Lock()

    def complete(self, request: ChatRequest) -> ChatResponse:
        key = fixture_key(request)
        if self.mode.kind == "replay":
            return self._load_fixture(key)
        response = self._post_with_retries(request)
        if self.mode.kind == "record":
            self._store_fixture(key, request, response)
        return response

    # -- live path ----------------------------------------------------------

    def _post_with_retries(self, request: ChatRequest) -> ChatResponse:
        body = json.dumps(
            {
                "model": request.model_id,
                "messages": [
                    {"role": m.role, "content": m.content} for m in request.messages
                ],
                "temperature": request.temperature,
                "max_tokens": request.max_tokens,
            }
        ).encode("utf-8")
        headers = {"Content-Type": "application/json"}
        token = os.environ.get(self.mode.credential_env, "") if self.mode.credential_env else ""
        if token:
            headers["Authorization"] = f"Bearer {token}"

        delay = BASE_DELAY_S
        last_exc: TransportError | None = None
        for attempt in range(MAX_RETRIES + 1):
            if attempt > 0:
                self.sleep(delay)
                delay *= BACKOFF_FACTOR
            start = time.perf_counter()
            try:
                status, raw = self.transport(self.mode.endpoint, headers, body, self.timeout)
            except TransportError as exc:
                last_exc = exc
                continue
            latency = (time.perf_counter() - start) * 1000.0
            if status >= 400:
                raise ProviderError(status, raw.decode("utf-8", "replace"))
            return _parse_wire_response(raw, request.model_id, latency)
        raise TransportError(
            f"transport failed after {MAX_RETRIES} retries: {last_exc}"
        ) from last_exc

    # -- fixture store ------------------------------------------------------

    def _fixture_path(self, key: str) -> Path:
        assert self.mode.fixture_dir is not None
        return self.mode.fixture_dir / key

    def _store_fixture(self, key: str, request: ChatRequest, response: ChatResponse) -> None:
        doc = {
            "key": key,
            "model_id": response.model_id,
            "prompt_tokens": response.prompt_tokens,
            "completion_tokens": response.completion_tokens,
            "content": response.content,
        }
        with self._write_lock:
            self.mode.fixture_dir.mkdir(parents=True, exist_ok=True)
            self._fixture_path(key).write_text(
                json.dumps(doc, indent=2, sort_keys=True), encoding="utf-8"
            )

    def _load_fixture(self, key: str) -> ChatResponse:
        path = self._fixture_path(key)
        if not path.is_file():
            raise FixtureMissingError(key)
        doc = json.loads(path.read_text(encoding="utf-8"))
        return ChatResponse(
            content=doc["content"],
            model_id=doc.get("model_id", ""),
            prompt_tokens=int(doc.get("prompt_tokens", 0)),
            completion_tokens=int(doc.get("completion_tokens", 0)),
            latency_ms=0.0,
        )


def _parse_wire_response(raw: bytes, model_id: str, latency_ms: float) -> ChatResponse:
    try:
        doc = json.loads(raw.decode("utf-8"))
        content = doc["choices"][0]["message"]["content"]
    except (ValueError, KeyError, IndexError, TypeError) as exc:
        raise ProviderError(200, f"malformed completion body: {raw[:200]!r}") from exc
    usage = doc.get("usage", {}) or {}
    return ChatResponse(
        content=content or "",
        model_id=doc.get("model", model_id),
        prompt_tokens=int(usage.get("prompt_tokens", 0)),
        completion_tokens=int(usage.get("completion_tokens", 0)),
        latency_ms=latency_ms,
    )


def complete(request: ChatRequest, mode: GatewayMode) -> ChatResponse:
    """One-shot helper; batch code should hold a Gateway instead."""
    return Gateway(mode).complete(request)
