"""HTTP+JSON API over the session manager."""

from __future__ import annotations

import os
from typing import Any

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from ..gateway import Gateway, HttpChatProvider
from .blobstore import store_from_env
from .manager import SessionManager
from .models import (
    CONDITION_AI,
    STAGE_EDITING,
    IllegalTransition,
    InvalidInput,
    ModeViolation,
    ServiceError,
    ServiceUnavailable,
    UnknownSession,
    WrongStage,
)
from .surveys import load_instruments, survey_items_for


class ConsentBody(BaseModel):
    study_consent: bool


class ScreeningBody(BaseModel):
    age_18_plus: bool
    fluent_english: bool
    ai_use: str


class MessageBody(BaseModel):
    text: str


class DecisionBody(BaseModel):
    finding_id: str
    decision: str


class EditBody(BaseModel):
    message_id: str
    decision: DecisionBody | None = None
    manual_final: str | None = None


class SurveyBody(BaseModel):
    answers: dict[str, Any] = Field(default_factory=dict)


class SubmitBody(BaseModel):
    share_original: bool


def _http_error(exc: ServiceError) -> HTTPException:
    if isinstance(exc, UnknownSession):
        return HTTPException(status_code=404, detail=str(exc))
    if isinstance(exc, WrongStage):
        return HTTPException(status_code=409, detail=str(exc))
    if isinstance(exc, (ModeViolation, IllegalTransition)):
        return HTTPException(status_code=403, detail=str(exc))
    if isinstance(exc, ServiceUnavailable):
        return HTTPException(status_code=503, detail=str(exc))
    return HTTPException(status_code=400, detail=str(exc))


def create_app(manager: SessionManager | None = None) -> FastAPI:
    if manager is None:
        gateway = Gateway(HttpChatProvider())
        manager = SessionManager(
            gateway,
            store=store_from_env(),
            snapshot_debounce_seconds=float(os.environ.get("PARLEY_SNAPSHOT_DEBOUNCE", 5.0)),
            snapshot_mode="thread",
        )
    app = FastAPI(title="parley session service")
    app.state.manager = manager

    # Optionally serve the built web client from the same origin.
    web_root = os.environ.get("PARLEY_WEB_ROOT")
    if web_root and os.path.isdir(web_root):
        from fastapi.staticfiles import StaticFiles

        app.mount("/app", StaticFiles(directory=web_root, html=True), name="web")

    def run(fn, *args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ServiceError as exc:
            raise _http_error(exc) from exc

    @app.post("/sessions")
    def create_session():
        session = manager.create_session()
        return {"session_id": session.session_id, "condition": session.condition}

    @app.post("/sessions/{session_id}/consent")
    def consent(session_id: str, body: ConsentBody):
        session = run(manager.record_consent, session_id, body.study_consent)
        return {"stage": session.stage}

    @app.post("/sessions/{session_id}/screening")
    def screening(session_id: str, body: ScreeningBody):
        qualified = run(manager.screen, session_id, body.model_dump())
        session = run(manager.get_session, session_id)
        return {"qualified": qualified, "stage": session.stage}

    @app.post("/sessions/{session_id}/messages")
    def post_message(session_id: str, body: MessageBody):
        return run(manager.post_message, session_id, body.text)

    @app.get("/sessions/{session_id}/transcript")
    def transcript(session_id: str):
        session = run(manager.get_transcript, session_id)
        payload = {
            "session_id": session.session_id,
            "condition": session.condition,
            "stage": session.stage,
            "turns": [t.to_dict() for t in session.transcript],
        }
        if session.stage == STAGE_EDITING:
            payload["manual_finals"] = dict(session.manual_finals)
            if session.condition == CONDITION_AI:
                payload["suggestions"] = [ms.to_dict() for ms in session.suggestion_sets]
        return payload

    @app.post("/sessions/{session_id}/edits")
    def edits(session_id: str, body: EditBody):
        if body.decision is not None and body.manual_final is not None:
            raise HTTPException(400, "provide exactly one of decision or manual_final")
        try:
            return run(
                manager.submit_edit,
                session_id,
                body.message_id,
                decision=body.decision.model_dump() if body.decision else None,
                manual_final=body.manual_final,
            )
        except KeyError as exc:
            raise HTTPException(400, f"unknown reference: {exc}") from exc

    @app.post("/sessions/{session_id}/survey")
    def survey(session_id: str, body: SurveyBody):
        session = run(manager.post_survey, session_id, body.answers)
        return {"stage": session.stage}

    @app.post("/sessions/{session_id}/submit")
    def submit(session_id: str, body: SubmitBody):
        submission = run(manager.finalize_submission, session_id, body.share_original)
        return {
            "submitted": True,
            "session_id": submission.session_id,
            "condition": submission.condition,
            "share_original_logs": submission.share_original_logs,
        }

    @app.get("/sessions/{session_id}/survey-items")
    def survey_items(session_id: str):
        session = run(manager.get_session, session_id)
        return {
            "items": survey_items_for(session.condition),
            "likert_scale": load_instruments()["likert_scale"],
        }

    @app.get("/meta/screening-items")
    def screening_items():
        return {"items": load_instruments()["screening"]}

    return app
