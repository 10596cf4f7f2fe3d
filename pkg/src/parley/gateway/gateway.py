"""Single choke point for model calls: render, complete, parse, retry."""

from __future__ import annotations

import logging
import os
import uuid
from dataclasses import dataclass, field

from .catalog import PromptCatalog, load_core_catalog
from .errors import AttemptsExhausted, ExtractionError, GatewayError, TransportError
from .providers import (
    DEFAULT_TIMEOUT_SECONDS,
    Decoding,
    Provider,
    ProviderRequest,
)
from .schemas import StructuredPayload, extract_structured

logger = logging.getLogger(__name__)

MODEL_TIERS = ("interactive", "audit", "judge")

# Deterministic decoding for auditors and the judge; the judge tier is
# required to run at temperature 0 / full nucleus mass.
TIER_DECODING: dict[str, Decoding] = {
    "interactive": Decoding(temperature=0.7, nucleus_mass=1.0, max_output_tokens=512),
    "audit": Decoding(temperature=0.0, nucleus_mass=1.0, max_output_tokens=512),
    "judge": Decoding(temperature=0.0, nucleus_mass=1.0, max_output_tokens=256),
}

_DEFAULT_TIER_MODELS = {
    "interactive": "gpt-4.1",
    "audit": "gpt-4o-mini",
    "judge": "gpt-5-thinking",
}


def tier_model(tier: str) -> str:
    env = os.environ.get(f"PARLEY_MODEL_{tier.upper()}")
    return env or _DEFAULT_TIER_MODELS[tier]


@dataclass(frozen=True)
class ChatRequest:
    prompt_id: str
    variables: dict[str, str] = field(default_factory=dict)
    model_tier: str = "audit"
    decoding: Decoding | None = None
    context_messages: tuple[tuple[str, str], ...] = ()
    correlation_id: str = ""

    def __post_init__(self):
        if self.model_tier not in MODEL_TIERS:
            raise ValueError(f"unknown model tier '{self.model_tier}'")

    def effective_decoding(self) -> Decoding:
        return self.decoding or TIER_DECODING[self.model_tier]


class Gateway:
    """Renders catalog prompts, calls the provider, and parses structured output."""

    def __init__(
        self,
        provider: Provider,
        catalog: PromptCatalog | None = None,
        timeout_seconds: float | None = None,
        log_text: bool | None = None,
    ):
        self.provider = provider
        self.catalog = catalog or load_core_catalog()
        self.timeout_seconds = (
            timeout_seconds
            if timeout_seconds is not None
            else float(os.environ.get("PARLEY_TIMEOUT_SECONDS", DEFAULT_TIMEOUT_SECONDS))
        )
        # Prompt/response text stays out of logs unless explicitly enabled.
        self.log_text = (
            log_text
            if log_text is not None
            else os.environ.get("PARLEY_LOG_TEXT", "") == "1"
        )

    def complete(self, request: ChatRequest) -> str:
        template = self.catalog.get(request.prompt_id)
        rendered = template.render(request.variables)
        correlation_id = request.correlation_id or uuid.uuid4().hex[:12]
        provider_request = ProviderRequest(
            prompt_id=request.prompt_id,
            rendered_prompt=rendered,
            context_messages=request.context_messages,
            model=tier_model(request.model_tier),
            decoding=request.effective_decoding(),
            timeout_seconds=self.timeout_seconds,
            correlation_id=correlation_id,
            variables=dict(request.variables),
        )
        logger.debug(
            "llm call prompt=%s tier=%s corr=%s chars=%d%s",
            request.prompt_id,
            request.model_tier,
            correlation_id,
            len(rendered),
            f" prompt={rendered!r}" if self.log_text else "",
        )
        text = self.provider.complete(provider_request)
        logger.debug(
            "llm done prompt=%s corr=%s chars=%d%s",
            request.prompt_id,
            correlation_id,
            len(text),
            f" response={text!r}" if self.log_text else "",
        )
        return text

    def complete_validated(
        self, request: ChatRequest, schema_id: str, max_attempts: int = 2
    ) -> StructuredPayload:
        """Return the first payload that passes schema validation.

        Never makes more than max_attempts provider calls; on exhaustion
        raises AttemptsExhausted carrying every raw attempt.
        """
        if max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")
        attempts: list[str] = []
        reasons: list[str] = []
        for _ in range(max_attempts):
            try:
                raw = self.complete(request)
            except TransportError as exc:
                attempts.append("")
                reasons.append(f"transport: {exc}")
                continue
            attempts.append(raw)
            try:
                return extract_structured(raw, schema_id)
            except ExtractionError as exc:
                reasons.append(str(exc))
        raise AttemptsExhausted(request.prompt_id, attempts, reasons)


__all__ = [
    "ChatRequest",
    "Gateway",
    "GatewayError",
    "MODEL_TIERS",
    "TIER_DECODING",
    "tier_model",
]
