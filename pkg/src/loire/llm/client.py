"""Chat-completion requests and pluggable clients (HTTP, replay, callable)."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import random
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Optional, Sequence, Union

log = logging.getLogger(__name__)

ROLES = ("system", "user", "assistant")


class ClientError(RuntimeError):
    """A completion could not be obtained."""


class TransientClientError(ClientError):
    """A failure worth retrying (rate limit, timeout, 5xx)."""


class MissingFixtureError(ClientError):
    pass


@dataclass(frozen=True)
class CompletionRequest:
    model_name: str
    messages: tuple[tuple[str, str], ...]
    temperature: float = 0.7
    max_tokens: int = 512
    logit_bias: Optional[Mapping[str, float]] = field(default=None, hash=False)

    def __post_init__(self) -> None:
        msgs = tuple((role, content) for role, content in self.messages)
        object.__setattr__(self, "messages", msgs)
        if not msgs:
            raise ValueError("messages must be non-empty")
        for role, _ in msgs:
            if role not in ROLES:
                raise ValueError(f"unknown role {role!r}")
        first = next((role for role, _ in msgs if role != "system"), None)
        if first != "user":
            raise ValueError("first non-system message must come from the user")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.max_tokens <= 0:
            raise ValueError("max_tokens must be positive")

    @classmethod
    def from_prompt(cls, model_name: str, prompt: str, **kwargs) -> "CompletionRequest":
        return cls(model_name, (("user", prompt),), **kwargs)

    @property
    def prompt(self) -> str:
        """Content of the last user message."""
        return next(c for r, c in reversed(self.messages) if r == "user")

    def to_payload(self) -> dict:
        payload = {
            "model": self.model_name,
            "messages": [{"role": r, "content": c} for r, c in self.messages],
            "temperature": self.temperature,
            "max_tokens": self.max_tokens,
        }
        if self.logit_bias:
            payload["logit_bias"] = dict(self.logit_bias)
        return payload

    def fingerprint(self) -> str:
        blob = json.dumps(self.to_payload(), sort_keys=True, separators=(",", ":"), ensure_ascii=False)
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()


class ModelClient:
    """Interface: ``complete(request) -> str``."""

    supports_logit_bias: bool = False

    def complete(self, request: CompletionRequest) -> str:
        raise NotImplementedError


class RetryingClient(ModelClient):
    """Retry transient failures with exponential backoff and jitter."""

    def __init__(
        self,
        inner: ModelClient,
        max_attempts: int = 5,
        base_delay: float = 1.0,
        max_delay: float = 60.0,
        seed: int = 0,
        sleep: Callable[[float], None] = time.sleep,
    ):
        if max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")
        self.inner = inner
        self.max_attempts = max_attempts
        self.base_delay = base_delay
        self.max_delay = max_delay
        self._rng = random.Random(seed)
        self._sleep = sleep

    @property
    def supports_logit_bias(self) -> bool:  # type: ignore[override]
        return self.inner.supports_logit_bias

    def complete(self, request: CompletionRequest) -> str:
        last: Optional[Exception] = None
        for attempt in range(self.max_attempts):
            try:
                return self.inner.complete(request)
            except TransientClientError as exc:
                last = exc
                if attempt + 1 == self.max_attempts:
                    break
                delay = min(self.max_delay, self.base_delay * 2 ** attempt)
                delay += self._rng.uniform(0, self.base_delay)
                log.warning("transient failure (attempt %d/%d): %s; retrying in %.2fs",
                            attempt + 1, self.max_attempts, exc, delay)
                self._sleep(delay)
        raise ClientError(f"gave up after {self.max_attempts} attempts: {last}") from last


class HttpChatClient(ModelClient):
    """OpenAI-style ``/chat/completions`` endpoint over HTTP."""

    supports_logit_bias = True

    def __init__(
        self,
        base_url: str = "https://api.openai.com/v1",
        api_key_env: str = "OPENAI_API_KEY",
        timeout: float = 60.0,
        transport=None,
    ):
        import httpx

        self._httpx = httpx
        self.url = base_url.rstrip("/") + "/chat/completions"
        self.api_key_env = api_key_env
        self._client = httpx.Client(timeout=timeout, transport=transport)

    def complete(self, request: CompletionRequest) -> str:
        key = os.environ.get(self.api_key_env)
        if not key:
            raise ClientError(f"environment variable {self.api_key_env} is not set")
        try:
            resp = self._client.post(
                self.url,
                json=request.to_payload(),
                headers={"Authorization": f"Bearer {key}"},
            )
        except self._httpx.TransportError as exc:
            raise TransientClientError(str(exc)) from exc
        if resp.status_code == 429 or resp.status_code >= 500:
            raise TransientClientError(f"HTTP {resp.status_code}")
        if resp.status_code >= 400:
            raise ClientError(f"HTTP {resp.status_code}: {resp.text[:200]}")
        try:
            return resp.json()["choices"][0]["message"]["content"] or ""
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise ClientError(f"malformed response: {exc}") from exc


class ReplayClient(ModelClient):
    """Serve canned responses from a fixtures directory.

    Lookup order for a request: ``<fingerprint>.txt`` in the directory, then
    entries of ``responses.jsonl`` (``{"hash": ..., "response": ...}`` or
    ``{"contains": ..., "response": ...}`` matched against the last user
    message, first hit wins; ``contains`` may be a list of substrings that
    must all occur, and ``endswith`` anchors on the end of the prompt), then
    ``default``.
    """

    def __init__(
        self,
        fixtures: Union[str, Path, None] = None,
        entries: Sequence[Mapping] = (),
        default: Optional[str] = None,
        supports_logit_bias: bool = True,
    ):
        self.dir = Path(fixtures) if fixtures is not None else None
        self.entries = list(entries)
        self.default = default
        self.supports_logit_bias = supports_logit_bias
        self.requests: list[CompletionRequest] = []
        if self.dir is not None:
            index = self.dir / "responses.jsonl"
            if index.exists():
                with index.open(encoding="utf-8") as fh:
                    self.entries.extend(json.loads(line) for line in fh if line.strip())

    @staticmethod
    def _matches(entry: Mapping, prompt: str) -> bool:
        needle = entry.get("contains")
        suffix = entry.get("endswith")
        if needle is None and suffix is None:
            return False
        needles = [] if needle is None else [needle] if isinstance(needle, str) else needle
        if suffix is not None and not prompt.endswith(suffix):
            return False
        return all(n in prompt for n in needles)

    def complete(self, request: CompletionRequest) -> str:
        self.requests.append(request)
        digest = request.fingerprint()
        if self.dir is not None:
            path = self.dir / f"{digest}.txt"
            if path.exists():
                return path.read_text(encoding="utf-8")
        prompt = request.prompt
        for entry in self.entries:
            if entry.get("hash") == digest:
                return entry["response"]
            if self._matches(entry, prompt):
                return entry["response"]
        if self.default is not None:
            return self.default
        raise MissingFixtureError(f"no fixture for request {digest[:12]}")


def record_fixture(directory: Union[str, Path], request: CompletionRequest, response: str) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"{request.fingerprint()}.txt"
    path.write_text(response, encoding="utf-8")
    return path


class CallableClient(ModelClient):
    """Wrap a plain function of the request; handy for scripted mocks."""

    def __init__(self, fn: Callable[[CompletionRequest], str], supports_logit_bias: bool = True):
        self.fn = fn
        self.supports_logit_bias = supports_logit_bias
        self.requests: list[CompletionRequest] = []

    def complete(self, request: CompletionRequest) -> str:
        self.requests.append(request)
        return self.fn(request)
