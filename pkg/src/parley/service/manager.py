"""Session lifecycle: registry, stage machine, snapshots, and submission.

One lock per session serializes all mutations; snapshots are debounced and
written off the request path (or inline when configured for tests). A session
missing from memory is restored from its latest snapshot, so restarts are
survivable.
"""

from __future__ import annotations

import json
import logging
import queue
import random
import secrets
import threading
import time
from typing import Any, Callable

from ..gateway import Gateway
from ..orchestrator import PHASE_COMPLETE, Orchestrator
from ..privacy import DecisionError, EditRecord, finalize_message, scan_transcript
from ..protocol import InterviewScript, load_default_script
from .blobstore import BlobStore, BlobStoreError, MemoryBlobStore
from .models import (
    ALLOWED_TRANSITIONS,
    CONDITION_AI,
    CONDITION_CONTROL,
    CONDITION_FREE,
    CONDITIONS,
    STAGE_EDITING,
    STAGE_INTERVIEWING,
    STAGE_ONBOARDING,
    STAGE_SCREENING,
    STAGE_SCREENED_OUT,
    STAGE_SUBMITTED,
    STAGE_SURVEY,
    IllegalTransition,
    InvalidInput,
    ModeViolation,
    ServiceUnavailable,
    SessionState,
    Submission,
    UnknownSession,
    WrongStage,
    restore_session,
    serialize_session,
    serialize_submission,
)
from .surveys import screen_qualifies, validate_survey

logger = logging.getLogger(__name__)

DEFAULT_SNAPSHOT_DEBOUNCE_SECONDS = 5.0

EDITING_NOTICE = (
    "The interview is finished. Before you submit, you can review and edit "
    "your transcript. Nothing is shared until you submit."
)


class SnapshotWriter:
    """Writes snapshot blobs inline or on a daemon thread (never blocking)."""

    def __init__(self, store: BlobStore, mode: str = "inline"):
        if mode not in ("inline", "thread"):
            raise ValueError("snapshot mode must be 'inline' or 'thread'")
        self.store = store
        self.mode = mode
        self._queue: queue.Queue | None = None
        if mode == "thread":
            self._queue = queue.Queue()
            worker = threading.Thread(target=self._drain, daemon=True)
            worker.start()

    def write(self, key: str, data: bytes, on_success: Callable[[], None]) -> None:
        if self.mode == "inline":
            try:
                self.store.put(key, data)
                on_success()
            except BlobStoreError as exc:
                logger.warning("snapshot write failed (%s); will retry on next trigger", exc)
            return
        assert self._queue is not None
        self._queue.put((key, data, on_success))

    def _drain(self) -> None:
        assert self._queue is not None
        while True:
            key, data, on_success = self._queue.get()
            try:
                self.store.put(key, data)
                on_success()
            except BlobStoreError as exc:
                logger.warning("snapshot write failed (%s); will retry on next trigger", exc)
            finally:
                self._queue.task_done()

    def flush(self) -> None:
        if self._queue is not None:
            self._queue.join()


class SessionManager:
    def __init__(
        self,
        gateway: Gateway,
        script: InterviewScript | None = None,
        store: BlobStore | None = None,
        seed: int | None = None,
        clock: Callable[[], float] = time.time,
        snapshot_debounce_seconds: float = DEFAULT_SNAPSHOT_DEBOUNCE_SECONDS,
        snapshot_mode: str = "inline",
        editing_notice: str = EDITING_NOTICE,
    ):
        self.script = script or load_default_script()
        self.orchestrator = Orchestrator(gateway, self.script)
        self.gateway = gateway
        self.store = store or MemoryBlobStore()
        self.clock = clock
        self.snapshot_debounce_seconds = snapshot_debounce_seconds
        self.editing_notice = editing_notice
        self._rng = random.Random(seed)
        self._sessions: dict[str, SessionState] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()
        self._writer = SnapshotWriter(self.store, snapshot_mode)

    # -- registry ------------------------------------------------------------

    def create_session(self) -> SessionState:
        session = SessionState(
            session_id=secrets.token_urlsafe(24),  # 192 bits of entropy
            condition=self._rng.choice(CONDITIONS),
            created_at=self.clock(),
        )
        session.stage_history.append(session.stage)
        with self._registry_lock:
            self._sessions[session.session_id] = session
            self._locks[session.session_id] = threading.Lock()
        self._after_mutation(session)
        return session

    def get_session(self, session_id: str) -> SessionState:
        with self._registry_lock:
            session = self._sessions.get(session_id)
            if session is not None:
                return session
        session = self._restore_latest(session_id)
        if session is None:
            raise UnknownSession(f"no session '{session_id}'")
        with self._registry_lock:
            self._sessions.setdefault(session_id, session)
            self._locks.setdefault(session_id, threading.Lock())
            return self._sessions[session_id]

    def _lock(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            if session_id not in self._locks:
                raise UnknownSession(f"no session '{session_id}'")
            return self._locks[session_id]

    def _restore_latest(self, session_id: str) -> SessionState | None:
        keys = self.store.list_keys(f"snapshots/{session_id}/")
        if not keys:
            return None
        try:
            return restore_session(self.store.get(keys[-1]))
        except (BlobStoreError, KeyError, ValueError) as exc:
            logger.error("failed to restore session %s: %s", session_id, exc)
            return None

    # -- stage machine ---------------------------------------------------------

    def _transition(self, session: SessionState, new_stage: str) -> None:
        if (session.stage, new_stage) not in ALLOWED_TRANSITIONS:
            raise IllegalTransition(f"{session.stage} -> {new_stage}")
        if new_stage == STAGE_EDITING and session.condition == CONDITION_CONTROL:
            raise IllegalTransition("editing stage is unreachable in the control condition")
        session.stage = new_stage
        session.stage_history.append(new_stage)

    @staticmethod
    def _require_stage(session: SessionState, *stages: str) -> None:
        if session.stage not in stages:
            raise WrongStage(stages, session.stage)

    # -- lifecycle operations ----------------------------------------------------

    def record_consent(self, session_id: str, study_consent: bool) -> SessionState:
        session = self.get_session(session_id)
        with self._lock(session_id):
            self._require_stage(session, STAGE_ONBOARDING)
            session.study_consent = bool(study_consent)
            if session.study_consent:
                self._transition(session, STAGE_SCREENING)
            self._after_mutation(session)
            return session

    def screen(self, session_id: str, answers: dict[str, Any]) -> bool:
        session = self.get_session(session_id)
        with self._lock(session_id):
            self._require_stage(session, STAGE_SCREENING)
            qualified = screen_qualifies(answers)
            session.screening_answers = dict(answers)
            if qualified:
                self._transition(session, STAGE_INTERVIEWING)
                session.orchestrator_state = self.orchestrator.new_state()
                self.orchestrator.begin(session.orchestrator_state, session.transcript)
                self._stamp_new_turns(session)
            else:
                self._transition(session, STAGE_SCREENED_OUT)
            self._after_mutation(session)
            return qualified

    def post_message(self, session_id: str, text: str) -> dict[str, Any]:
        session = self.get_session(session_id)
        with self._lock(session_id):
            self._require_stage(session, STAGE_INTERVIEWING)
            if not text or not text.strip():
                raise InvalidInput("message text is empty")
            bot_turn = self.orchestrator.handle_user_message(
                session.orchestrator_state, session.transcript, text
            )
            self._stamp_new_turns(session)
            response: dict[str, Any] = {
                "utterance": bot_turn.text,
                "kind": bot_turn.kind,
                "group_id": bot_turn.group_id,
                "interview_complete": session.orchestrator_state.phase == PHASE_COMPLETE,
            }
            if session.orchestrator_state.phase == PHASE_COMPLETE:
                session.interview_completed_at = self.clock()
                if session.condition == CONDITION_CONTROL:
                    self._transition(session, STAGE_SURVEY)
                else:
                    session.original_transcript_hash = session.transcript_hash()
                    self._transition(session, STAGE_EDITING)
                    response["notice"] = self.editing_notice
                    if session.condition == CONDITION_AI:
                        session.suggestion_sets = scan_transcript(
                            self.gateway,
                            [(t.turn_id, t.text) for t in session.transcript],
                            session.ledger,
                        )
                        response["suggestions"] = [
                            ms.to_dict() for ms in session.suggestion_sets
                        ]
            self._after_mutation(session)
            return response

    def submit_edit(
        self,
        session_id: str,
        message_id: str,
        decision: dict[str, str] | None = None,
        manual_final: str | None = None,
    ) -> dict[str, Any]:
        session = self.get_session(session_id)
        with self._lock(session_id):
            self._require_stage(session, STAGE_EDITING)
            if (decision is None) == (manual_final is None):
                raise InvalidInput("provide exactly one of decision or manual_final")
            if not any(t.turn_id == message_id for t in session.transcript):
                raise InvalidInput(f"unknown message_id '{message_id}'")

            stale = False
            if decision is not None:
                if session.condition != CONDITION_AI:
                    raise ModeViolation(
                        "suggestion decisions are only available in the AI-aided condition"
                    )
                try:
                    suggestion_set = session.suggestions_for(message_id)
                    suggestion = suggestion_set.suggestion_by_id(decision["finding_id"])
                except KeyError as exc:
                    raise InvalidInput(f"unknown finding {exc}") from exc
                try:
                    suggestion.set_decision(decision["decision"])
                except DecisionError as exc:
                    raise InvalidInput(str(exc)) from exc
            else:
                session.manual_finals[message_id] = manual_final  # type: ignore[assignment]

            final_preview, record = self._finalize_one(session, message_id)
            stale = bool(record.stale_finding_ids)
            self._after_mutation(session)
            return {"accepted": True, "final_preview": final_preview, "stale": stale}

    def post_survey(self, session_id: str, answers: dict[str, Any]) -> SessionState:
        session = self.get_session(session_id)
        with self._lock(session_id):
            self._require_stage(session, STAGE_EDITING, STAGE_SURVEY)
            validate_survey(session.condition, answers)
            session.survey_answers = dict(answers)
            if session.stage == STAGE_EDITING:
                self._transition(session, STAGE_SURVEY)
            self._after_mutation(session)
            return session

    def finalize_submission(self, session_id: str, share_original: bool) -> Submission:
        session = self.get_session(session_id)
        with self._lock(session_id):
            if session.stage == STAGE_SUBMITTED:
                return self._load_submission(session_id)  # idempotent
            self._require_stage(session, STAGE_SURVEY)
            if not session.survey_answers:
                raise InvalidInput("survey answers are required before submission")
            session.share_original_logs = bool(share_original)
            submission = self._build_submission(session)
            data = serialize_submission(submission)
            try:
                self.store.put(f"submissions/{session_id}.json", data)
            except BlobStoreError as exc:
                # session stays finalizable; the client can retry
                raise ServiceUnavailable(str(exc)) from exc
            session.submitted_at = self.clock()
            self._transition(session, STAGE_SUBMITTED)
            self._after_mutation(session)
            return submission

    def get_transcript(self, session_id: str) -> SessionState:
        return self.get_session(session_id)

    # -- submission assembly ---------------------------------------------------

    def _finalize_one(self, session: SessionState, message_id: str) -> tuple[str, EditRecord]:
        turn = next(t for t in session.transcript if t.turn_id == message_id)
        suggestions = []
        if session.condition == CONDITION_AI:
            try:
                suggestions = session.suggestions_for(message_id).suggestions
            except KeyError:
                suggestions = []
        final, record = finalize_message(
            turn.text, suggestions, session.manual_finals.get(message_id)
        )
        record.message_id = message_id
        return final, record

    def _build_submission(self, session: SessionState) -> Submission:
        final_rows = []
        original_rows = []
        edit_records = []
        for turn in session.transcript:
            final_text, record = self._finalize_one(session, turn.turn_id)
            base = {
                "message_id": turn.turn_id,
                "role": turn.role,
                "group_id": turn.group_id,
                "kind": turn.kind,
                "followup_id": turn.followup_id,
            }
            final_rows.append({**base, "text": final_text})
            original_rows.append({**base, "text": turn.text, "ts": turn.ts})
            edit_records.append(record)
        timings = {
            "created_at": session.created_at,
            "interview_completed_at": session.interview_completed_at,
            "submitted_at": self.clock(),
            "message_timestamps": {t.turn_id: t.ts for t in session.transcript},
        }
        return Submission(
            session_id=session.session_id,
            condition=session.condition,
            final_transcript=final_rows,
            edit_records=edit_records,
            survey_answers=dict(session.survey_answers),
            timings=timings,
            share_original_logs=bool(session.share_original_logs),
            original_transcript=original_rows if session.share_original_logs else None,
        )

    def _load_submission(self, session_id: str) -> Submission:
        data = self.store.get(f"submissions/{session_id}.json")
        return Submission.from_dict(json.loads(data.decode("utf-8")))

    # -- snapshots ----------------------------------------------------------

    def _stamp_new_turns(self, session: SessionState) -> None:
        now = self.clock()
        for turn in session.transcript:
            if not turn.turn_id:
                turn.turn_id = session.next_turn_id()
                turn.ts = now

    def _after_mutation(self, session: SessionState) -> None:
        last = session.last_snapshot_at
        now = self.clock()
        if last is not None and (now - last) < self.snapshot_debounce_seconds:
            return
        session.snapshot_seq += 1
        key = f"snapshots/{session.session_id}/{session.snapshot_seq:08d}.json"
        data = serialize_session(session)

        def mark_done(session=session, when=now):
            session.last_snapshot_at = when

        self._writer.write(key, data, mark_done)

    def persist_snapshot(self, session_id: str) -> str:
        """Force an immediate snapshot; returns the blob key."""
        session = self.get_session(session_id)
        with self._lock(session_id):
            session.snapshot_seq += 1
            key = f"snapshots/{session.session_id}/{session.snapshot_seq:08d}.json"
            self.store.put(key, serialize_session(session))
            session.last_snapshot_at = self.clock()
            return key

    def drop_from_memory(self, session_id: str) -> None:
        """Simulate a restart for this session (tests and ops tooling)."""
        with self._registry_lock:
            self._sessions.pop(session_id, None)

    def flush_snapshots(self) -> None:
        self._writer.flush()
