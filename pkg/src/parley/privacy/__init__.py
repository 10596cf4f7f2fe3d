from .pipeline import (
    ApplyResult,
    DetectionResult,
    abstract_findings,
    apply_decision,
    detect_pii,
    finalize_message,
    find_occurrence,
    scan_transcript,
    word_diff_spans,
)
from .types import (
    DECISION_ABSTRACTION,
    DECISION_IGNORED,
    DECISION_PENDING,
    DECISION_PLACEHOLDER,
    DECISIONS,
    FALLBACK_ABSTRACTIONS,
    DecisionError,
    EditRecord,
    MessageSuggestions,
    PiiFinding,
    PlaceholderLedger,
    SanitizationSuggestion,
)

__all__ = [
    "ApplyResult",
    "DECISION_ABSTRACTION",
    "DECISION_IGNORED",
    "DECISION_PENDING",
    "DECISION_PLACEHOLDER",
    "DECISIONS",
    "DecisionError",
    "DetectionResult",
    "EditRecord",
    "FALLBACK_ABSTRACTIONS",
    "MessageSuggestions",
    "PiiFinding",
    "PlaceholderLedger",
    "SanitizationSuggestion",
    "abstract_findings",
    "apply_decision",
    "detect_pii",
    "finalize_message",
    "find_occurrence",
    "scan_transcript",
    "word_diff_spans",
]
