from .catalog import (
    CORE_PROMPT_IDS,
    JUDGE_PROMPT_IDS,
    PromptCatalog,
    PromptTemplate,
    load_core_catalog,
    load_judge_catalog,
)
from .errors import (
    AttemptsExhausted,
    ConfigurationError,
    ExtractionError,
    GatewayError,
    SchemaViolation,
    TransportError,
)
from .gateway import ChatRequest, Gateway, TIER_DECODING, tier_model
from .providers import (
    Decoding,
    FailingProvider,
    HttpChatProvider,
    MockProvider,
    ProviderRequest,
)
from .schemas import (
    EXECUTOR_ACTIONS,
    PII_CATEGORIES,
    StructuredPayload,
    extract_structured,
    get_schema,
)

__all__ = [
    "AttemptsExhausted",
    "ChatRequest",
    "ConfigurationError",
    "CORE_PROMPT_IDS",
    "Decoding",
    "EXECUTOR_ACTIONS",
    "ExtractionError",
    "FailingProvider",
    "Gateway",
    "GatewayError",
    "HttpChatProvider",
    "JUDGE_PROMPT_IDS",
    "MockProvider",
    "PII_CATEGORIES",
    "PromptCatalog",
    "PromptTemplate",
    "ProviderRequest",
    "SchemaViolation",
    "StructuredPayload",
    "TIER_DECODING",
    "TransportError",
    "extract_structured",
    "get_schema",
    "load_core_catalog",
    "load_judge_catalog",
    "tier_model",
]
