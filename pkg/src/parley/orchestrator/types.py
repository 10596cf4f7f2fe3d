"""State and verdict types for the interview loop."""

from __future__ import annotations

from dataclasses import dataclass, field

PHASE_AWAITING = "awaiting_answer"
PHASE_COMPLETE = "interview_complete"

VERDICT_ALLOW = "ALLOW_NEXT_QUESTION"
VERDICT_REQUIRE_MORE = "REQUIRE_MORE"

KIND_MAIN = "main_question"
KIND_FOLLOWUP = "followup"
KIND_CLARIFY = "clarify"
KIND_CLOSING = "closing"
KIND_ANSWER = "answer"


@dataclass
class CoverageEntry:
    followup_id: str
    covered: bool = False
    evidence: str = ""
    skipped: bool = False
    # Set when the engine itself emitted this follow-up verbatim; used for
    # local coverage bookkeeping when the auditor is unavailable.
    asked: bool = False

    @property
    def resolved(self) -> bool:
        return self.covered or self.skipped

    def to_dict(self) -> dict:
        return {
            "followup_id": self.followup_id,
            "covered": self.covered,
            "evidence": self.evidence,
            "skipped": self.skipped,
            "asked": self.asked,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CoverageEntry":
        return cls(
            followup_id=d["followup_id"],
            covered=bool(d.get("covered", False)),
            evidence=str(d.get("evidence", "")),
            skipped=bool(d.get("skipped", False)),
            asked=bool(d.get("asked", False)),
        )


@dataclass
class CoverageVerdict:
    question_id: str
    coverage_map: list[CoverageEntry]
    verdict: str
    next_followup_id: str | None = None
    next_followup_prompt: str | None = None
    confidence: float = 0.0
    from_fallback: bool = False


@dataclass
class PresenceVerdict:
    has_question: bool
    should_regenerate: bool
    reason: str = ""
    confidence: float = 0.0


@dataclass
class AnswerabilityLabel:
    label: str  # NO_ABLE_ANSWER | HAS_ANSWER
    reason_type: str = ""  # no_experience | refusal, meaningful only on NO_ABLE_ANSWER
    evidence: list[str] = field(default_factory=list)


@dataclass
class ExecutorDirective:
    action: str
    question_id: str = ""
    utterance: str = ""
    notes: list[str] = field(default_factory=list)


@dataclass
class Turn:
    role: str  # "bot" | "user"
    text: str
    group_id: str
    kind: str
    followup_id: str | None = None
    turn_id: str = ""
    ts: float = 0.0

    def to_dict(self) -> dict:
        return {
            "role": self.role,
            "text": self.text,
            "group_id": self.group_id,
            "kind": self.kind,
            "followup_id": self.followup_id,
            "turn_id": self.turn_id,
            "ts": self.ts,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Turn":
        return cls(
            role=d["role"],
            text=d["text"],
            group_id=d.get("group_id", ""),
            kind=d.get("kind", ""),
            followup_id=d.get("followup_id"),
            turn_id=d.get("turn_id", ""),
            ts=float(d.get("ts", 0.0)),
        )


@dataclass
class BotTurn:
    text: str
    group_id: str
    kind: str
    followup_id: str | None = None
    used_fallback: bool = False


@dataclass
class OrchestratorState:
    current_group_index: int = 0
    phase: str = PHASE_AWAITING
    # group id -> followup id -> entry; insertion order mirrors script order
    coverage: dict[str, dict[str, CoverageEntry]] = field(default_factory=dict)
    clarify_streak: int = 0

    def group_entries(self, group_id: str) -> dict[str, CoverageEntry]:
        return self.coverage[group_id]

    def to_dict(self) -> dict:
        return {
            "current_group_index": self.current_group_index,
            "phase": self.phase,
            "clarify_streak": self.clarify_streak,
            "coverage": {
                gid: {fid: e.to_dict() for fid, e in entries.items()}
                for gid, entries in self.coverage.items()
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> "OrchestratorState":
        return cls(
            current_group_index=int(d["current_group_index"]),
            phase=d["phase"],
            clarify_streak=int(d.get("clarify_streak", 0)),
            coverage={
                gid: {fid: CoverageEntry.from_dict(e) for fid, e in entries.items()}
                for gid, entries in d.get("coverage", {}).items()
            },
        )
