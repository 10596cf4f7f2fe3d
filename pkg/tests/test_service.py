import itertools
import json
import random

import pytest
from fastapi.testclient import TestClient
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import cooperative_provider, planted_provider
from parley.gateway import Gateway
from parley.protocol import load_default_script, load_script, serialize_script
from parley.service import (
    ALLOWED_TRANSITIONS,
    CONDITION_AI,
    CONDITION_CONTROL,
    CONDITION_FREE,
    CONDITIONS,
    InvalidInput,
    MemoryBlobStore,
    ModeViolation,
    SessionManager,
    WrongStage,
    create_app,
    restore_session,
    serialize_session,
    validate_survey,
)
from parley.service.models import STAGE_SUBMITTED, STAGE_SURVEY
from parley.service.surveys import survey_items_for


def _tiny_script():
    """Two-group script for fast session simulations."""
    doc = serialize_script(load_default_script())
    doc["groups"] = doc["groups"][:2]
    for group in doc["groups"]:
        group["followups"] = group["followups"][:2]
    return load_script(json.dumps(doc))


class FakeClock:
    def __init__(self, start: float = 1000.0):
        self.now = start

    def __call__(self) -> float:
        return self.now

    def advance(self, seconds: float) -> None:
        self.now += seconds


def make_manager(condition=None, plants=None, clock=None, store=None, seed=0, script=None):
    provider = planted_provider(plants) if plants else cooperative_provider()
    manager = SessionManager(
        Gateway(provider),
        script=script or _tiny_script(),
        store=store or MemoryBlobStore(),
        seed=seed,
        clock=clock or FakeClock(),
        snapshot_debounce_seconds=5.0,
    )
    if condition is not None:
        # deterministic condition for targeted tests
        manager._rng = _ForcedRng(condition)
    return manager


class _ForcedRng:
    def __init__(self, condition: str):
        self.condition = condition

    def choice(self, options):
        return self.condition


def survey_answers(condition: str) -> dict:
    answers = {}
    for item in survey_items_for(condition):
        if item["type"] == "likert":
            answers[item["id"]] = 4
        elif item["type"] == "choice":
            answers[item["id"]] = item["options"][0]
        else:
            answers[item["id"]] = "no concerns"
    return answers


def drive_to_interview(manager) -> str:
    session = manager.create_session()
    manager.record_consent(session.session_id, True)
    manager.screen(
        session.session_id,
        {"age_18_plus": True, "fluent_english": True, "ai_use": "both"},
    )
    return session.session_id


def drive_interview_to_completion(manager, session_id, text="I studied at CMU in March 2021."):
    response = None
    for _ in range(100):
        response = manager.post_message(session_id, text)
        if response["interview_complete"]:
            return response
    raise AssertionError("interview did not complete")


# -- condition assignment ------------------------------------------------------


def test_assignment_uniform_within_two_percent():
    rng = random.Random(123)
    draws = [rng.choice(CONDITIONS) for _ in range(30_000)]
    for condition in CONDITIONS:
        share = draws.count(condition) / len(draws)
        assert abs(share - 1 / 3) < 0.02
    # chi-square against uniform as the independent check
    import scipy.stats

    observed = [draws.count(c) for c in CONDITIONS]
    stat, p = scipy.stats.chisquare(observed)
    assert p > 0.001


def test_assignment_reproducible_with_seed():
    a = SessionManager(Gateway(cooperative_provider()), script=_tiny_script(), seed=42)
    b = SessionManager(Gateway(cooperative_provider()), script=_tiny_script(), seed=42)
    conditions_a = [a.create_session().condition for _ in range(20)]
    conditions_b = [b.create_session().condition for _ in range(20)]
    assert conditions_a == conditions_b


def test_session_ids_distinct_and_long():
    manager = make_manager()
    first = manager.create_session()
    second = manager.create_session()
    assert first.session_id != second.session_id
    assert len(first.session_id) >= 32  # >=128 bits of entropy, urlsafe-encoded


# -- screening -----------------------------------------------------------------


@pytest.mark.parametrize(
    "answers,expected",
    [
        ({"age_18_plus": True, "fluent_english": True, "ai_use": "both"}, True),
        ({"age_18_plus": True, "fluent_english": True, "ai_use": "used_during"}, True),
        ({"age_18_plus": True, "fluent_english": True, "ai_use": "used_to_prepare"}, True),
        ({"age_18_plus": True, "fluent_english": True, "ai_use": "not_used"}, False),
        ({"age_18_plus": False, "fluent_english": True, "ai_use": "both"}, False),
        ({"age_18_plus": True, "fluent_english": False, "ai_use": "both"}, False),
        ({"age_18_plus": True, "fluent_english": True, "ai_use": "other"}, False),
    ],
)
def test_screening_rule(answers, expected):
    manager = make_manager()
    session = manager.create_session()
    manager.record_consent(session.session_id, True)
    assert manager.screen(session.session_id, answers) is expected
    expected_stage = "interviewing" if expected else "screened_out"
    assert session.stage == expected_stage


def test_screening_incomplete_answers_rejected():
    manager = make_manager()
    session = manager.create_session()
    manager.record_consent(session.session_id, True)
    with pytest.raises(InvalidInput):
        manager.screen(session.session_id, {"age_18_plus": True})


def test_screened_out_is_terminal():
    manager = make_manager()
    session = manager.create_session()
    manager.record_consent(session.session_id, True)
    manager.screen(
        session.session_id,
        {"age_18_plus": True, "fluent_english": True, "ai_use": "not_used"},
    )
    with pytest.raises(WrongStage):
        manager.post_message(session.session_id, "hello")


# -- interview stage -------------------------------------------------------------


def test_control_goes_straight_to_survey():
    manager = make_manager(condition=CONDITION_CONTROL)
    sid = drive_to_interview(manager)
    response = drive_interview_to_completion(manager, sid)
    assert manager.get_session(sid).stage == STAGE_SURVEY
    assert "suggestions" not in response and "notice" not in response


def test_ai_edit_completion_carries_suggestions_and_notice():
    manager = make_manager(
        condition=CONDITION_AI, plants={"CMU": "AFFILIATION", "March 2021": "TIME"}
    )
    sid = drive_to_interview(manager)
    response = drive_interview_to_completion(manager, sid)
    assert manager.get_session(sid).stage == "editing"
    assert response["notice"]
    total = sum(len(ms["suggestions"]) for ms in response["suggestions"])
    assert total > 0


def test_free_edit_completion_has_notice_but_no_suggestions():
    manager = make_manager(condition=CONDITION_FREE)
    sid = drive_to_interview(manager)
    response = drive_interview_to_completion(manager, sid)
    assert response["notice"]
    assert "suggestions" not in response


def test_message_in_editing_stage_is_wrong_stage():
    manager = make_manager(condition=CONDITION_FREE)
    sid = drive_to_interview(manager)
    drive_interview_to_completion(manager, sid)
    with pytest.raises(WrongStage):
        manager.post_message(sid, "one more")


def test_empty_message_rejected():
    manager = make_manager()
    sid = drive_to_interview(manager)
    with pytest.raises(InvalidInput):
        manager.post_message(sid, "   ")


# -- editing gates ------------------------------------------------------------


def _editing_session(condition, plants=None):
    manager = make_manager(condition=condition, plants=plants)
    sid = drive_to_interview(manager)
    drive_interview_to_completion(manager, sid)
    return manager, sid


def test_decision_payload_rejected_in_free_edit():
    manager, sid = _editing_session(CONDITION_FREE)
    session = manager.get_session(sid)
    message_id = next(t.turn_id for t in session.transcript if t.role == "user")
    with pytest.raises(ModeViolation):
        manager.submit_edit(
            sid, message_id, decision={"finding_id": "x", "decision": "accepted_placeholder"}
        )


def test_manual_final_accepted_in_free_edit():
    manager, sid = _editing_session(CONDITION_FREE)
    session = manager.get_session(sid)
    message_id = next(t.turn_id for t in session.transcript if t.role == "user")
    result = manager.submit_edit(sid, message_id, manual_final="A whole new answer.")
    assert result["final_preview"] == "A whole new answer."


def test_ai_edit_decision_recorded_and_previewed():
    manager, sid = _editing_session(CONDITION_AI, plants={"CMU": "AFFILIATION"})
    session = manager.get_session(sid)
    target = next(ms for ms in session.suggestion_sets if ms.suggestions)
    suggestion = target.suggestions[0]
    result = manager.submit_edit(
        sid,
        target.message_id,
        decision={"finding_id": suggestion.finding.finding_id, "decision": "accepted_placeholder"},
    )
    assert f"[{suggestion.finding.placeholder}]" in result["final_preview"]
    assert suggestion.decision == "accepted_placeholder"


def test_unknown_message_id_rejected():
    manager, sid = _editing_session(CONDITION_FREE)
    with pytest.raises(InvalidInput):
        manager.submit_edit(sid, "t999", manual_final="x")


def test_edits_rejected_for_control():
    manager = make_manager(condition=CONDITION_CONTROL)
    sid = drive_to_interview(manager)
    drive_interview_to_completion(manager, sid)
    with pytest.raises(WrongStage):
        manager.submit_edit(sid, "t001", manual_final="x")


def test_original_transcript_hash_never_moves_during_editing():
    manager, sid = _editing_session(CONDITION_FREE)
    session = manager.get_session(sid)
    baseline = session.original_transcript_hash
    assert baseline == session.transcript_hash()
    message_id = next(t.turn_id for t in session.transcript if t.role == "user")
    manager.submit_edit(sid, message_id, manual_final="rewritten")
    manager.submit_edit(sid, message_id, manual_final="rewritten twice")
    assert session.transcript_hash() == baseline


# -- survey and submission -------------------------------------------------------


def test_survey_validation_rules():
    answers = survey_answers(CONDITION_FREE)
    validate_survey(CONDITION_FREE, answers)
    with pytest.raises(InvalidInput):
        validate_survey(CONDITION_FREE, {**answers, "Q7": 6})  # out of scale
    with pytest.raises(InvalidInput):
        validate_survey(CONDITION_FREE, {**answers, "Q12": 4})  # other condition's item
    missing = dict(answers)
    missing.pop("Q9")
    with pytest.raises(InvalidInput):
        validate_survey(CONDITION_FREE, missing)


def test_submission_includes_original_iff_consented():
    for share in (True, False):
        manager, sid = _editing_session(CONDITION_AI, plants={"CMU": "AFFILIATION"})
        manager.post_survey(sid, survey_answers(CONDITION_AI))
        submission = manager.finalize_submission(sid, share_original=share)
        assert (submission.original_transcript is not None) is share
        raw = manager.store.get(f"submissions/{sid}.json")
        assert (b"original_transcript" in raw) is share


def test_control_submission_final_equals_raw_transcript():
    manager = make_manager(condition=CONDITION_CONTROL)
    sid = drive_to_interview(manager)
    drive_interview_to_completion(manager, sid)
    manager.post_survey(sid, survey_answers(CONDITION_CONTROL))
    submission = manager.finalize_submission(sid, share_original=False)
    session = manager.get_session(sid)
    finals = {row["message_id"]: row["text"] for row in submission.final_transcript}
    for turn in session.transcript:
        assert finals[turn.turn_id] == turn.text


def test_duplicate_finalize_is_idempotent():
    manager, sid = _editing_session(CONDITION_FREE)
    manager.post_survey(sid, survey_answers(CONDITION_FREE))
    first = manager.finalize_submission(sid, share_original=True)
    second = manager.finalize_submission(sid, share_original=False)
    assert second.to_dict() == first.to_dict()
    assert manager.get_session(sid).stage == STAGE_SUBMITTED


def test_submission_survives_store_outage():
    store = MemoryBlobStore()
    manager = make_manager(condition=CONDITION_FREE, store=store)
    sid = drive_to_interview(manager)
    drive_interview_to_completion(manager, sid)
    manager.post_survey(sid, survey_answers(CONDITION_FREE))
    store.fail_puts = True
    from parley.service import ServiceUnavailable

    with pytest.raises(ServiceUnavailable):
        manager.finalize_submission(sid, share_original=True)
    assert manager.get_session(sid).stage == STAGE_SURVEY  # still finalizable
    store.fail_puts = False
    submission = manager.finalize_submission(sid, share_original=True)
    assert submission.original_transcript is not None


def test_survey_before_interview_is_wrong_stage():
    manager = make_manager()
    sid = drive_to_interview(manager)
    with pytest.raises(WrongStage):
        manager.post_survey(sid, {})


# -- snapshots -----------------------------------------------------------------


def test_snapshot_roundtrip_byte_equal():
    manager, sid = _editing_session(CONDITION_AI, plants={"CMU": "AFFILIATION"})
    session = manager.get_session(sid)
    blob = serialize_session(session)
    assert serialize_session(restore_session(blob)) == blob


def test_snapshot_debounce_under_simulated_clock():
    clock = FakeClock()
    store = MemoryBlobStore()
    manager = make_manager(clock=clock, store=store)
    session = manager.create_session()
    prefix = f"snapshots/{session.session_id}/"
    assert len(store.list_keys(prefix)) == 1  # first mutation snapshots immediately

    manager.record_consent(session.session_id, True)  #-- 0s later: debounced
    assert len(store.list_keys(prefix)) == 1
    clock.advance(2.0)
    manager.screen(
        session.session_id,
        {"age_18_plus": True, "fluent_english": True, "ai_use": "both"},
    )  # 2s: still debounced
    assert len(store.list_keys(prefix)) == 1
    clock.advance(5.0)
    manager.post_message(session.session_id, "An answer after the debounce window.")
    assert len(store.list_keys(prefix)) == 2  # >=5s elapsed, snapshot fires again


def test_restore_on_miss_resumes_mid_interview():
    manager = make_manager(condition=CONDITION_FREE)
    sid = drive_to_interview(manager)
    manager.post_message(sid, "First answer about my degree.")
    manager.persist_snapshot(sid)
    before = manager.get_session(sid)
    group_index = before.orchestrator_state.current_group_index
    coverage = before.orchestrator_state.to_dict()["coverage"]
    turn_count = len(before.transcript)

    manager.drop_from_memory(sid)
    restored = manager.get_session(sid)
    assert restored.orchestrator_state.current_group_index == group_index
    assert restored.orchestrator_state.to_dict()["coverage"] == coverage
    assert len(restored.transcript) == turn_count
    # and the interview continues from where it stopped
    manager.post_message(sid, "Another answer.")
    assert len(manager.get_session(sid).transcript) == turn_count + 2


def test_snapshot_write_failure_never_blocks():
    store = MemoryBlobStore()
    store.fail_puts = True
    manager = make_manager(store=store)
    sid = drive_to_interview(manager)  # would raise if snapshot failures propagated
    assert manager.get_session(sid).stage == "interviewing"


# -- stage machine property ----------------------------------------------------


_CALLS = ("consent", "screen_ok", "screen_out", "message", "edit", "survey", "submit")


@settings(max_examples=60, deadline=None)
@given(st.lists(st.sampled_from(_CALLS), min_size=1, max_size=25), st.integers(0, 2))
def test_stage_machine_rejects_everything_illegal(calls, condition_index):
    condition = CONDITIONS[condition_index]
    manager = make_manager(condition=condition)
    session = manager.create_session()
    sid = session.session_id
    for call in calls:
        try:
            if call == "consent":
                manager.record_consent(sid, True)
            elif call == "screen_ok":
                manager.screen(
                    sid, {"age_18_plus": True, "fluent_english": True, "ai_use": "both"}
                )
            elif call == "screen_out":
                manager.screen(
                    sid, {"age_18_plus": True, "fluent_english": True, "ai_use": "not_used"}
                )
            elif call == "message":
                manager.post_message(sid, "A fine answer with detail.")
            elif call == "edit":
                target = next(
                    (t.turn_id for t in session.transcript if t.role == "user"), "t001"
                )
                manager.submit_edit(sid, target, manual_final="edited")
            elif call == "survey":
                manager.post_survey(sid, survey_answers(condition))
            elif call == "submit":
                manager.finalize_submission(sid, share_original=True)
        except (WrongStage, ModeViolation, InvalidInput):
            continue
    observed = list(itertools.pairwise(session.stage_history))
    for pair in observed:
        assert pair in ALLOWED_TRANSITIONS, pair
    if condition == CONDITION_CONTROL:
        assert "editing" not in session.stage_history


# -- HTTP surface ----------------------------------------------------------------


@pytest.fixture()
def client():
    manager = make_manager(condition=CONDITION_AI, plants={"CMU": "AFFILIATION"})
    return TestClient(create_app(manager))


def test_http_full_flow(client):
    created = client.post("/sessions").json()
    sid = created["session_id"]
    assert created["condition"] == CONDITION_AI

    assert client.post(f"/sessions/{sid}/consent", json={"study_consent": True}).status_code == 200
    screening = client.post(
        f"/sessions/{sid}/screening",
        json={"age_18_plus": True, "fluent_english": True, "ai_use": "both"},
    ).json()
    assert screening["qualified"] is True

    transcript = client.get(f"/sessions/{sid}/transcript").json()
    assert transcript["turns"][0]["role"] == "bot"

    response = None
    for _ in range(50):
        response = client.post(
            f"/sessions/{sid}/messages", json={"text": "I studied at CMU for years."}
        ).json()
        if response["interview_complete"]:
            break
    assert response["interview_complete"]
    assert "suggestions" in response

    sets_with_findings = [ms for ms in response["suggestions"] if ms["suggestions"]]
    target = sets_with_findings[0]
    finding_id = target["suggestions"][0]["finding"]["finding_id"]
    edit = client.post(
        f"/sessions/{sid}/edits",
        json={
            "message_id": target["message_id"],
            "decision": {"finding_id": finding_id, "decision": "accepted_placeholder"},
        },
    ).json()
    assert edit["accepted"] and "[AFFILIATION1]" in edit["final_preview"]

    items = client.get(f"/sessions/{sid}/survey-items").json()["items"]
    answers = {}
    for item in items:
        answers[item["id"]] = (
            4 if item["type"] == "likert" else item["options"][0] if item["type"] == "choice" else ""
        )
    assert client.post(f"/sessions/{sid}/survey", json={"answers": answers}).status_code == 200
    submitted = client.post(f"/sessions/{sid}/submit", json={"share_original": False}).json()
    assert submitted["submitted"] is True


def test_http_error_codes(client):
    assert client.get("/sessions/nope/transcript").status_code == 404
    created = client.post("/sessions").json()
    sid = created["session_id"]
    # message before interviewing stage
    assert (
        client.post(f"/sessions/{sid}/messages", json={"text": "hi"}).status_code == 409
    )
    client.post(f"/sessions/{sid}/consent", json={"study_consent": True})
    assert (
        client.post(
            f"/sessions/{sid}/screening",
            json={"age_18_plus": True, "fluent_english": True, "ai_use": "nonsense"},
        ).status_code
        == 400
    )


def test_http_mode_violation_is_403():
    manager = make_manager(condition=CONDITION_FREE)
    client = TestClient(create_app(manager))
    sid = client.post("/sessions").json()["session_id"]
    client.post(f"/sessions/{sid}/consent", json={"study_consent": True})
    client.post(
        f"/sessions/{sid}/screening",
        json={"age_18_plus": True, "fluent_english": True, "ai_use": "both"},
    )
    for _ in range(50):
        if client.post(f"/sessions/{sid}/messages", json={"text": "answer"}).json()[
            "interview_complete"
        ]:
            break
    message_id = client.get(f"/sessions/{sid}/transcript").json()["turns"][1]["turn_id"]
    response = client.post(
        f"/sessions/{sid}/edits",
        json={
            "message_id": message_id,
            "decision": {"finding_id": "f", "decision": "accepted_placeholder"},
        },
    )
    assert response.status_code == 403
