from .engine import CLOSING_TEXT, OPENING_PREFIX, Orchestrator, uncovered_followups
from .types import (
    KIND_ANSWER,
    KIND_CLARIFY,
    KIND_CLOSING,
    KIND_FOLLOWUP,
    KIND_MAIN,
    PHASE_AWAITING,
    PHASE_COMPLETE,
    VERDICT_ALLOW,
    VERDICT_REQUIRE_MORE,
    AnswerabilityLabel,
    BotTurn,
    CoverageEntry,
    CoverageVerdict,
    ExecutorDirective,
    OrchestratorState,
    PresenceVerdict,
    Turn,
)

__all__ = [
    "AnswerabilityLabel",
    "BotTurn",
    "CLOSING_TEXT",
    "CoverageEntry",
    "CoverageVerdict",
    "ExecutorDirective",
    "KIND_ANSWER",
    "KIND_CLARIFY",
    "KIND_CLOSING",
    "KIND_FOLLOWUP",
    "KIND_MAIN",
    "OPENING_PREFIX",
    "Orchestrator",
    "OrchestratorState",
    "PHASE_AWAITING",
    "PHASE_COMPLETE",
    "PresenceVerdict",
    "Turn",
    "VERDICT_ALLOW",
    "VERDICT_REQUIRE_MORE",
    "uncovered_followups",
]
