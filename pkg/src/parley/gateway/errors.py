"""Gateway error types."""

from __future__ import annotations


class GatewayError(Exception):
    """Base class for all gateway failures."""


class ConfigurationError(GatewayError):
    """Provider or catalog misconfiguration (missing endpoint, unknown prompt id...)."""


class TransportError(GatewayError):
    """Network failure, provider-side error, or timeout."""


class ExtractionError(GatewayError):
    """Raw model output could not be parsed into the requested structure."""


class SchemaViolation(ExtractionError):
    """Parsed payload does not conform to the registered schema."""

    def __init__(self, schema_id: str, key: str, message: str):
        super().__init__(f"{schema_id}: key '{key}': {message}")
        self.schema_id = schema_id
        self.key = key


class AttemptsExhausted(GatewayError):
    """All validation attempts failed; carries every raw attempt for diagnosis."""

    def __init__(self, prompt_id: str, attempts: list[str], reasons: list[str]):
        super().__init__(
            f"prompt '{prompt_id}': {len(attempts)} attempt(s) failed validation"
        )
        self.prompt_id = prompt_id
        self.attempts = attempts
        self.reasons = reasons
