"""Chat-completion providers: a remote HTTP provider and a scriptable mock.

The mock is keyed by prompt_id plus the ordinal of the call with that
prompt_id, so a test can script an entire conversation without matching on
prompt text.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Callable, Protocol, Sequence

import httpx

from .errors import ConfigurationError, TransportError

DEFAULT_TIMEOUT_SECONDS = 30.0


@dataclass(frozen=True)
class Decoding:
    temperature: float = 0.0
    nucleus_mass: float = 1.0
    max_output_tokens: int = 512

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if not (0 < self.nucleus_mass <= 1):
            raise ValueError("nucleus_mass must be in (0, 1]")


@dataclass(frozen=True)
class ProviderRequest:
    prompt_id: str
    rendered_prompt: str
    context_messages: tuple[tuple[str, str], ...]  # (role, text) after the system prompt
    model: str
    decoding: Decoding
    timeout_seconds: float
    correlation_id: str
    # Raw slot bindings; remote providers ignore these, scripted mocks use them.
    variables: dict[str, str] = field(default_factory=dict)


class Provider(Protocol):
    def complete(self, request: ProviderRequest) -> str: ...


class HttpChatProvider:
    """OpenAI-style chat-completions endpoint.

    Configured from the environment:
      PARLEY_PROVIDER_ENDPOINT  e.g. https://api.example.com/v1/chat/completions
      PARLEY_PROVIDER_KEY       bearer credential
    """

    def __init__(self, endpoint: str | None = None, api_key: str | None = None):
        self.endpoint = endpoint or os.environ.get("PARLEY_PROVIDER_ENDPOINT")
        self.api_key = api_key or os.environ.get("PARLEY_PROVIDER_KEY")

    def complete(self, request: ProviderRequest) -> str:
        if not self.endpoint:
            raise ConfigurationError(
                "no provider endpoint configured (set PARLEY_PROVIDER_ENDPOINT)"
            )
        messages = [{"role": "system", "content": request.rendered_prompt}]
        messages += [{"role": r, "content": t} for r, t in request.context_messages]
        body = {
            "model": request.model,
            "messages": messages,
            "temperature": request.decoding.temperature,
            "top_p": request.decoding.nucleus_mass,
            "max_tokens": request.decoding.max_output_tokens,
        }
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        try:
            response = httpx.post(
                self.endpoint,
                content=json.dumps(body),
                headers=headers,
                timeout=request.timeout_seconds,
            )
        except httpx.HTTPError as exc:
            raise TransportError(f"provider transport failure: {exc}") from exc
        if response.status_code != 200:
            raise TransportError(
                f"provider returned HTTP {response.status_code}: {response.text[:200]}"
            )
        try:
            return response.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, ValueError) as exc:
            raise TransportError(f"malformed provider response: {exc}") from exc


ResponseSource = str | Callable[[ProviderRequest, int], str]


@dataclass
class MockProvider:
    """Deterministic scripted provider for tests.

    ``script[prompt_id]`` is a sequence of responses consumed in call order
    for that prompt_id; a callable entry receives (request, ordinal). When a
    sequence runs out, ``default`` for that prompt_id (or the global default)
    answers instead. Entries equal to the RAISE sentinel raise TransportError.
    """

    RAISE = "\x00RAISE\x00"

    script: dict[str, Sequence[ResponseSource]] = field(default_factory=dict)
    defaults: dict[str, ResponseSource] = field(default_factory=dict)
    default: ResponseSource | None = None
    calls: list[ProviderRequest] = field(default_factory=list)
    counts: dict[str, int] = field(default_factory=dict)

    def complete(self, request: ProviderRequest) -> str:
        ordinal = self.counts.get(request.prompt_id, 0)
        self.counts[request.prompt_id] = ordinal + 1
        self.calls.append(request)
        entries = self.script.get(request.prompt_id)
        source: ResponseSource | None = None
        if entries is not None and ordinal < len(entries):
            source = entries[ordinal]
        elif request.prompt_id in self.defaults:
            source = self.defaults[request.prompt_id]
        elif self.default is not None:
            source = self.default
        if source is None:
            raise TransportError(
                f"mock has no scripted response for '{request.prompt_id}' call {ordinal}"
            )
        text = source(request, ordinal) if callable(source) else source
        if text == self.RAISE:
            raise TransportError(f"scripted failure for '{request.prompt_id}'")
        return text

    def total_calls(self, prompt_id: str | None = None) -> int:
        if prompt_id is None:
            return len(self.calls)
        return self.counts.get(prompt_id, 0)


class FailingProvider:
    """Always raises; exercises every fallback path."""

    def complete(self, request: ProviderRequest) -> str:
        raise TransportError("provider unavailable")
