"""Session and submission data models with snapshot-grade serialization."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any

from ..orchestrator import OrchestratorState, Turn
from ..privacy import EditRecord, MessageSuggestions, PlaceholderLedger

CONDITION_CONTROL = "control"
CONDITION_FREE = "free_edit"
CONDITION_AI = "ai_edit"
CONDITIONS = (CONDITION_CONTROL, CONDITION_FREE, CONDITION_AI)

STAGE_ONBOARDING = "onboarding"
STAGE_SCREENING = "screening"
STAGE_INTERVIEWING = "interviewing"
STAGE_EDITING = "editing"
STAGE_SURVEY = "survey"
STAGE_SUBMITTED = "submitted"
STAGE_SCREENED_OUT = "screened_out"
STAGES = (
    STAGE_ONBOARDING,
    STAGE_SCREENING,
    STAGE_INTERVIEWING,
    STAGE_EDITING,
    STAGE_SURVEY,
    STAGE_SUBMITTED,
    STAGE_SCREENED_OUT,
)

# Legal stage transitions; editing is reachable only outside control, which
# the manager enforces on top of this map.
ALLOWED_TRANSITIONS: set[tuple[str, str]] = {
    (STAGE_ONBOARDING, STAGE_SCREENING),
    (STAGE_SCREENING, STAGE_SCREENED_OUT),
    (STAGE_SCREENING, STAGE_INTERVIEWING),
    (STAGE_INTERVIEWING, STAGE_EDITING),
    (STAGE_INTERVIEWING, STAGE_SURVEY),
    (STAGE_EDITING, STAGE_SURVEY),
    (STAGE_SURVEY, STAGE_SUBMITTED),
}


class ServiceError(Exception):
    pass


class UnknownSession(ServiceError):
    pass


class WrongStage(ServiceError):
    def __init__(self, expected, actual: str):
        super().__init__(f"operation requires stage {expected}, session is in '{actual}'")
        self.expected = expected
        self.actual = actual


class ModeViolation(ServiceError):
    pass


class InvalidInput(ServiceError):
    pass


class IllegalTransition(ServiceError):
    pass


class ServiceUnavailable(ServiceError):
    """Durable store rejected a write; the operation can be retried."""


@dataclass
class SessionState:
    session_id: str
    condition: str
    stage: str = STAGE_ONBOARDING
    orchestrator_state: OrchestratorState = field(default_factory=OrchestratorState)
    transcript: list[Turn] = field(default_factory=list)
    suggestion_sets: list[MessageSuggestions] = field(default_factory=list)
    ledger: PlaceholderLedger = field(default_factory=PlaceholderLedger)
    manual_finals: dict[str, str] = field(default_factory=dict)
    survey_answers: dict[str, Any] = field(default_factory=dict)
    study_consent: bool | None = None
    share_original_logs: bool | None = None
    screening_answers: dict[str, Any] = field(default_factory=dict)
    stage_history: list[str] = field(default_factory=list)
    created_at: float = 0.0
    interview_completed_at: float | None = None
    submitted_at: float | None = None
    last_snapshot_at: float | None = None
    snapshot_seq: int = 0
    turn_counter: int = 0
    # sha256 of the transcript at the moment editing began; edits must never move it
    original_transcript_hash: str | None = None

    def next_turn_id(self) -> str:
        self.turn_counter += 1
        return f"t{self.turn_counter:03d}"

    def transcript_hash(self) -> str:
        payload = json.dumps(
            [[t.turn_id, t.role, t.text] for t in self.transcript], sort_keys=True
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def suggestions_for(self, message_id: str) -> MessageSuggestions:
        for ms in self.suggestion_sets:
            if ms.message_id == message_id:
                return ms
        raise KeyError(message_id)

    def to_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "condition": self.condition,
            "stage": self.stage,
            "orchestrator_state": self.orchestrator_state.to_dict(),
            "transcript": [t.to_dict() for t in self.transcript],
            "suggestion_sets": [ms.to_dict() for ms in self.suggestion_sets],
            "ledger": self.ledger.to_dict(),
            "manual_finals": dict(self.manual_finals),
            "survey_answers": dict(self.survey_answers),
            "study_consent": self.study_consent,
            "share_original_logs": self.share_original_logs,
            "screening_answers": dict(self.screening_answers),
            "stage_history": list(self.stage_history),
            "created_at": self.created_at,
            "interview_completed_at": self.interview_completed_at,
            "submitted_at": self.submitted_at,
            "last_snapshot_at": self.last_snapshot_at,
            "snapshot_seq": self.snapshot_seq,
            "turn_counter": self.turn_counter,
            "original_transcript_hash": self.original_transcript_hash,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SessionState":
        return cls(
            session_id=d["session_id"],
            condition=d["condition"],
            stage=d["stage"],
            orchestrator_state=OrchestratorState.from_dict(d["orchestrator_state"]),
            transcript=[Turn.from_dict(t) for t in d.get("transcript", [])],
            suggestion_sets=[
                MessageSuggestions.from_dict(ms) for ms in d.get("suggestion_sets", [])
            ],
            ledger=PlaceholderLedger.from_dict(d.get("ledger", {})),
            manual_finals=dict(d.get("manual_finals", {})),
            survey_answers=dict(d.get("survey_answers", {})),
            study_consent=d.get("study_consent"),
            share_original_logs=d.get("share_original_logs"),
            screening_answers=dict(d.get("screening_answers", {})),
            stage_history=list(d.get("stage_history", [])),
            created_at=float(d.get("created_at", 0.0)),
            interview_completed_at=d.get("interview_completed_at"),
            submitted_at=d.get("submitted_at"),
            last_snapshot_at=d.get("last_snapshot_at"),
            snapshot_seq=int(d.get("snapshot_seq", 0)),
            turn_counter=int(d.get("turn_counter", 0)),
            original_transcript_hash=d.get("original_transcript_hash"),
        )


def serialize_session(session: SessionState) -> bytes:
    """Canonical snapshot bytes; restore -> serialize round-trips byte-equal."""
    return json.dumps(session.to_dict(), sort_keys=True).encode("utf-8")


def restore_session(data: bytes) -> SessionState:
    return SessionState.from_dict(json.loads(data.decode("utf-8")))


@dataclass
class Submission:
    session_id: str
    condition: str
    final_transcript: list[dict]
    edit_records: list[EditRecord]
    survey_answers: dict[str, Any]
    timings: dict[str, Any]
    share_original_logs: bool
    original_transcript: list[dict] | None = None

    def to_dict(self) -> dict:
        out = {
            "session_id": self.session_id,
            "condition": self.condition,
            "final_transcript": list(self.final_transcript),
            "edit_records": [r.to_dict() for r in self.edit_records],
            "survey_answers": dict(self.survey_answers),
            "timings": dict(self.timings),
            "share_original_logs": self.share_original_logs,
        }
        if self.original_transcript is not None:
            out["original_transcript"] = list(self.original_transcript)
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "Submission":
        return cls(
            session_id=d["session_id"],
            condition=d["condition"],
            final_transcript=list(d["final_transcript"]),
            edit_records=[EditRecord.from_dict(r) for r in d.get("edit_records", [])],
            survey_answers=dict(d.get("survey_answers", {})),
            timings=dict(d.get("timings", {})),
            share_original_logs=bool(d.get("share_original_logs", False)),
            original_transcript=d.get("original_transcript"),
        )


def serialize_submission(submission: Submission) -> bytes:
    return json.dumps(submission.to_dict(), sort_keys=True).encode("utf-8")
