import hashlib
import json
from pathlib import Path

import pytest

from parley.gateway import (
    AttemptsExhausted,
    ChatRequest,
    ConfigurationError,
    Decoding,
    ExtractionError,
    Gateway,
    HttpChatProvider,
    MockProvider,
    SchemaViolation,
    CORE_PROMPT_IDS,
    PII_CATEGORIES,
    extract_structured,
    load_core_catalog,
    load_judge_catalog,
    TIER_DECODING,
)

GOLDEN_DIR = Path(__file__).parent / "golden"


# -- prompt catalog ---------------------------------------------------------


def test_core_catalog_ships_exactly_ten_prompts():
    catalog = load_core_catalog()
    assert sorted(catalog.ids()) == sorted(CORE_PROMPT_IDS)
    assert len(catalog.ids()) == 10


def test_core_templates_byte_match_golden_copies():
    catalog = load_core_catalog()
    for prompt_id in CORE_PROMPT_IDS:
        golden = (GOLDEN_DIR / f"{prompt_id}.txt").read_bytes()
        shipped = catalog.get(prompt_id).text.encode("utf-8")
        assert shipped == golden, f"{prompt_id} drifted from its golden copy"
        # and puzzle-proof the copies themselves via content hash
        assert hashlib.sha256(golden).hexdigest() == hashlib.sha256(shipped).hexdigest()


def test_judge_templates_byte_match_golden_copies():
    for name in ("rqi_relevance", "rqi_specificity", "rqi_clarity"):
        golden = (GOLDEN_DIR / f"{name}.txt").read_bytes()
        shipped = (
            Path(__file__).parents[1] / "src" / "parley" / "prompts" / "judge" / f"{name}.txt"
        ).read_bytes()
        assert shipped == golden


def test_render_binds_every_slot():
    catalog = load_core_catalog()
    rendered = catalog.get("executor").render(
        {
            "current_question": "What did you study?",
            "remaining_questions": json.dumps(["Next?"]),
            "allowed_actions": "[ASK_FOLLOWUP]",
        }
    )
    assert 'CURRENT QUESTION: "What did you study?"' in rendered
    assert "ALLOWED_ACTIONS: [ASK_FOLLOWUP]" in rendered
    assert "<current or N/A>" not in rendered


def test_render_rejects_unbound_and_unknown_slots():
    catalog = load_core_catalog()
    with pytest.raises(ConfigurationError, match="unbound"):
        catalog.get("executor").render({"current_question": "Q?"})
    with pytest.raises(ConfigurationError, match="unknown"):
        catalog.get("connector_polish").render({"bogus": "x"})


def test_judge_catalog_composes_rubric_and_renders():
    catalog = load_judge_catalog()
    rendered = catalog.get("rqi_relevance").render(
        {"question": "Where is it located?", "answer": "New Jersey"}
    )
    assert "RELEVANCE (0-2 scale)" in rendered
    assert "Question: Where is it located?" in rendered
    assert '{\n    "Relevance": <0, 1, or 2>\n}' in rendered


def test_taxonomy_is_the_closed_twenty_name_list():
    assert len(PII_CATEGORIES) == 20
    assert PII_CATEGORIES[0] == "ADDRESS"
    assert "EDUCATIONAL_RECORD" in PII_CATEGORIES


# -- structured extraction ---------------------------------------------------


def test_extract_executor_payload():
    raw = '{"action":"ASK_FOLLOWUP","question_id":"Q1","utterance":"When?","notes":[]}'
    payload = extract_structured(raw, "executor_directive")
    assert payload["action"] == "ASK_FOLLOWUP"
    assert payload["utterance"] == "When?"


def test_extract_strips_markdown_fences():
    raw = '```json\n{"action":"ASK_FOLLOWUP","question_id":"Q1","utterance":"When?","notes":[]}\n```'
    assert extract_structured(raw, "executor_directive")["action"] == "ASK_FOLLOWUP"


def test_extract_strips_surrounding_prose():
    raw = 'Sure, here is the JSON you asked for:\n{"ok": true, "reason": "fine"}\nHope that helps!'
    assert extract_structured(raw, "concise_presence")["ok"] is True


def test_enum_violation_names_the_key():
    with pytest.raises(SchemaViolation, match="verdict"):
        extract_structured('{"coverage_map": [], "verdict": "MAYBE"}', "completion_audit")


def test_missing_key_names_the_key():
    with pytest.raises(SchemaViolation, match="coverage_map"):
        extract_structured('{"verdict": "REQUIRE_MORE"}', "completion_audit")


def test_unparseable_output_is_extraction_error():
    with pytest.raises(ExtractionError):
        extract_structured("no json here at all", "concise_presence")


# -- gateway ---------------------------------------------------------------


def _gateway(provider) -> Gateway:
    return Gateway(provider)


def test_mock_echo_roundtrip():
    provider = MockProvider(script={"connector_polish": ['{"prefix":"Hi.","suffix":""}']})
    gateway = _gateway(provider)
    raw = gateway.complete(ChatRequest(prompt_id="connector_polish"))
    assert raw == '{"prefix":"Hi.","suffix":""}'


def test_unconfigured_http_provider_is_configuration_error(monkeypatch):
    monkeypatch.delenv("PARLEY_PROVIDER_ENDPOINT", raising=False)
    gateway = _gateway(HttpChatProvider())
    with pytest.raises(ConfigurationError):
        gateway.complete(ChatRequest(prompt_id="connector_polish"))


def test_judge_tier_uses_deterministic_decoding():
    provider = MockProvider(default='{"Relevance": 2}')
    gateway = Gateway(provider, catalog=load_judge_catalog())
    request = ChatRequest(
        prompt_id="rqi_relevance",
        model_tier="judge",
        variables={"question": "q", "answer": "a"},
    )
    gateway.complete(request)
    sent = provider.calls[0]
    assert sent.decoding.temperature == 0
    assert sent.decoding.nucleus_mass == 1


def test_decoding_invariants():
    with pytest.raises(ValueError):
        Decoding(temperature=-0.1)
    with pytest.raises(ValueError):
        Decoding(nucleus_mass=0.0)
    with pytest.raises(ValueError):
        Decoding(nucleus_mass=1.2)
    assert TIER_DECODING["judge"].temperature == 0


def test_complete_validated_returns_first_valid_attempt():
    provider = MockProvider(
        script={"concise_presence": ["garbage {", '{"ok": true, "reason": ""}']}
    )
    gateway = _gateway(provider)
    payload = gateway.complete_validated(
        ChatRequest(
            prompt_id="concise_presence",
            variables={
                "current_question": "Q?",
                "topic_hints": "a",
                "avoid_hints": "b",
                "candidate": "Where?",
            },
        ),
        "concise_presence",
        max_attempts=2,
    )
    assert payload["ok"] is True
    assert provider.total_calls("concise_presence") == 2


def test_complete_validated_exhaustion_carries_all_attempts():
    provider = MockProvider(script={"connector_polish": ["bad", "also bad"]})
    gateway = _gateway(provider)
    with pytest.raises(AttemptsExhausted) as info:
        gateway.complete_validated(
            ChatRequest(prompt_id="connector_polish"), "connector_polish", max_attempts=2
        )
    assert info.value.attempts == ["bad", "also bad"]
    assert provider.total_calls("connector_polish") == 2


def test_complete_validated_never_exceeds_budget():
    provider = MockProvider(default='{"ok": true, "reason": ""}')
    gateway = _gateway(provider)
    gateway.complete_validated(
        ChatRequest(
            prompt_id="concise_presence",
            variables={
                "current_question": "Q?",
                "topic_hints": "a",
                "avoid_hints": "b",
                "candidate": "Where?",
            },
        ),
        "concise_presence",
        max_attempts=5,
    )
    assert provider.total_calls("concise_presence") == 1  # valid on attempt one


def test_mock_is_keyed_by_prompt_id_and_ordinal():
    provider = MockProvider(
        script={
            "connector_polish": ['{"prefix":"first","suffix":""}', '{"prefix":"second","suffix":""}']
        },
        default="{}",
    )
    gateway = _gateway(provider)
    first = gateway.complete(ChatRequest(prompt_id="connector_polish"))
    gateway.complete(ChatRequest(prompt_id="answerability"))  # different id, own counter
    second = gateway.complete(ChatRequest(prompt_id="connector_polish"))
    assert "first" in first and "second" in second
