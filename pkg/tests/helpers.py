"""Shared test scaffolding: scripted providers and interview drivers.

The "cooperative" provider answers every prompt the way a well-behaved model
would: the coverage auditor marks a follow-up covered once it was explicitly
asked (verbatim prompt in an assistant turn) and answered, the presence
auditor counts question marks, and the executor picks the first allowed
action. Noise wrappers degrade individual calls to exercise retry, repair,
and fallback paths.
"""

from __future__ import annotations

import json
import random
import re

from parley.gateway import Gateway, MockProvider
from parley.orchestrator import PHASE_COMPLETE, Orchestrator, Turn
from parley.protocol import InterviewScript

ANSWER_POOL = [
    "I studied computer science and took a lot of systems courses.",
    "That happened around the time I was switching jobs.",
    "I mostly used a chatbot to practice my answers before the call.",
    "It helped me organize my notes into clear talking points.",
    "I remember feeling uneasy about leaning on it so much.",
    "I kept that to myself because people judge it quickly.",
]


def _latest_candidate(request) -> tuple[str, bool]:
    """Pull the audited assistant message and followUpMode flag from context."""
    for role, text in reversed(request.context_messages):
        if role == "user" and "LATEST ASSISTANT MESSAGE:" in text:
            mode = "followUpMode=true" in text
            match = re.search(r'LATEST ASSISTANT MESSAGE: "(.*)"$', text, re.DOTALL)
            return (match.group(1) if match else "", mode)
    return "", False


def cooperative_completion_audit(request, ordinal: int) -> str:
    followups = json.loads(request.variables["followups_json"])
    messages = request.context_messages
    coverage = []
    uncovered = []
    for f in followups:
        covered = False
        for i, (role, text) in enumerate(messages):
            if role == "assistant" and f["prompt"] in text:
                if any(r == "user" for r, _ in messages[i + 1 :]):
                    covered = True
                    break
        coverage.append(
            {"id": f["id"], "covered": covered, "evidence": "asked and answered" if covered else ""}
        )
        if not covered:
            uncovered.append(f)
    if uncovered:
        return json.dumps(
            {
                "question_id": request.variables["current_question"][:20],
                "coverage_map": coverage,
                "next_followup_id": uncovered[0]["id"],
                "next_followup_prompt": uncovered[0]["prompt"],
                "verdict": "REQUIRE_MORE",
                "confidence": 0.9,
                "notes": "",
            }
        )
    return json.dumps(
        {
            "question_id": request.variables["current_question"][:20],
            "coverage_map": coverage,
            "next_followup_id": None,
            "next_followup_prompt": None,
            "verdict": "ALLOW_NEXT_QUESTION",
            "confidence": 0.95,
            "notes": "",
        }
    )


def cooperative_presence_audit(request, ordinal: int) -> str:
    candidate, followup_mode = _latest_candidate(request)
    if followup_mode:
        ok = candidate.count("?") == 1
    else:
        ok = True
    return json.dumps(
        {
            "hasQuestion": "?" in candidate,
            "reason": "ok" if ok else "not exactly one question",
            "confidence": 0.9,
            "shouldRegenerate": not ok,
        }
    )


def cooperative_executor(request, ordinal: int) -> str:
    allowed = request.variables["allowed_actions"].strip("[]").split(", ")
    action = allowed[0]
    if action in ("SUMMARIZE_QUESTION", "NEXT_QUESTION", "END"):
        utterance = "Thanks, that gives me a clear picture."
    else:
        utterance = "Could you tell me a bit more about that?"
    return json.dumps(
        {"action": action, "question_id": "current", "utterance": utterance, "notes": []}
    )


HAS_ANSWER = json.dumps(
    {"label": "HAS_ANSWER", "reason": "concrete detail", "reason_type": "", "evidence": []}
)
NO_ANSWER_REFUSAL = json.dumps(
    {
        "label": "NO_ABLE_ANSWER",
        "reason": "declines to share",
        "reason_type": "refusal",
        "evidence": ["I'd rather not say"],
    }
)
CONNECTOR = json.dumps({"prefix": "Thanks for sharing that.", "suffix": ""})
CONCISE_OK = json.dumps({"ok": True, "reason": "single question"})
NO_PII = json.dumps(
    {
        "privacy_issue": False,
        "detected_pii": [],
        "text_with_placeholders": "",
        "affected_text": None,
    }
)


def cooperative_provider() -> MockProvider:
    return MockProvider(
        defaults={
            "executor": cooperative_executor,
            "completion_audit": cooperative_completion_audit,
            "presence_audit": cooperative_presence_audit,
            "concise_presence": CONCISE_OK,
            "answerability": HAS_ANSWER,
            "connector_polish": CONNECTOR,
            "regenerate_question": "Could you share one concrete example of that?",
            "audit_polish": "Could you share one concrete example of that?",
            "pii_detection": NO_PII,
            "pii_abstraction": json.dumps({"results": []}),
        }
    )


def noisy(source, rng: random.Random, p_garbage: float):
    """Wrap a response source so some calls return unparseable output."""

    def wrapped(request, ordinal):
        if rng.random() < p_garbage:
            return rng.choice(["oops not json {", "```\nstill not json\n```", ""])
        return source(request, ordinal) if callable(source) else source

    return wrapped


def randomized_provider(rng: random.Random, p_garbage: float = 0.15) -> MockProvider:
    """Cooperative behavior with random degradation on every prompt kind."""

    def executor(request, ordinal):
        allowed = request.variables["allowed_actions"].strip("[]").split(", ")
        roll = rng.random()
        if "REQUEST_CLARIFY" in allowed and roll < 0.15:
            utter = (
                "Could you walk me through that again? And what happened next?"
                if rng.random() < 0.5
                else "Could you say a little more about what you mean?"
            )
            return json.dumps(
                {"action": "REQUEST_CLARIFY", "question_id": "c", "utterance": utter, "notes": []}
            )
        if roll < 0.25:
            return json.dumps(
                {"action": "NOT_AN_ACTION", "question_id": "x", "utterance": "?", "notes": []}
            )
        return cooperative_executor(request, ordinal)

    def completion(request, ordinal):
        verdict = json.loads(cooperative_completion_audit(request, ordinal))
        roll = rng.random()
        if roll < 0.1 and verdict["verdict"] == "REQUIRE_MORE":
            # inconsistent: claims ALLOW while entries stay uncovered
            verdict["verdict"] = "ALLOW_NEXT_QUESTION"
            verdict["next_followup_id"] = None
            verdict["next_followup_prompt"] = None
        elif roll < 0.2 and verdict["verdict"] == "REQUIRE_MORE":
            verdict["next_followup_id"] = "Q9_F9"  # dangling target; repair retargets
        return json.dumps(verdict)

    def connector(request, ordinal):
        roll = rng.random()
        if roll < 0.1:
            return json.dumps({"prefix": "Really? That's interesting.", "suffix": ""})
        if roll < 0.15:
            return json.dumps({"prefix": "T" * 160, "suffix": ""})
        return CONNECTOR

    def answerability(request, ordinal):
        return NO_ANSWER_REFUSAL if rng.random() < 0.08 else HAS_ANSWER

    return MockProvider(
        defaults={
            "executor": noisy(executor, rng, p_garbage),
            "completion_audit": noisy(completion, rng, p_garbage),
            "presence_audit": noisy(cooperative_presence_audit, rng, p_garbage),
            "concise_presence": noisy(CONCISE_OK, rng, p_garbage),
            "answerability": noisy(answerability, rng, p_garbage),
            "connector_polish": noisy(connector, rng, p_garbage),
            "regenerate_question": noisy(
                "Could you share one concrete example of that?", rng, p_garbage
            ),
            "audit_polish": noisy(
                "Could you share one concrete example of that?", rng, p_garbage
            ),
            "pii_detection": NO_PII,
            "pii_abstraction": json.dumps({"results": []}),
        }
    )


def run_interview(
    orchestrator: Orchestrator,
    answers=None,
    max_turns: int = 200,
):
    """Drive a full interview; returns (bot_turns, transcript, state).

    ``answers`` may be a callable (bot_turn, index) -> str or None for a
    rotating canned answer. Raises if the interview fails to complete within
    max_turns bot turns.
    """
    state = orchestrator.new_state()
    transcript: list[Turn] = []
    bot_turns = [orchestrator.begin(state, transcript)]
    i = 0
    while state.phase != PHASE_COMPLETE:
        if len(bot_turns) > max_turns:
            raise AssertionError("interview did not terminate within max_turns")
        if callable(answers):
            reply = answers(bot_turns[-1], i)
        else:
            reply = ANSWER_POOL[i % len(ANSWER_POOL)]
        bot_turns.append(orchestrator.handle_user_message(state, transcript, reply))
        i += 1
    return bot_turns, transcript, state


def make_orchestrator(script: InterviewScript, provider) -> tuple[Orchestrator, Gateway]:
    gateway = Gateway(provider)
    return Orchestrator(gateway, script), gateway


def planted_detection_response(message: str, plants: dict[str, str]) -> str:
    """Detection payload finding exactly the planted strings in a message.

    One entry per exact-match occurrence, longest plants first so nested
    strings bind the way the pipeline's consumption rule expects.
    """
    entries = []
    consumed: list[tuple[int, int]] = []
    for text in sorted(plants, key=len, reverse=True):
        start = 0
        while True:
            pos = message.find(text, start)
            if pos == -1:
                break
            span = (pos, pos + len(text))
            if all(span[1] <= c0 or span[0] >= c1 for c0, c1 in consumed):
                consumed.append(span)
                entries.append(
                    {
                        "type": plants[text],
                        "original_text": text,
                        "placeholder": f"{plants[text]}0",  # discarded by the pipeline
                        "explanation": "planted",
                    }
                )
            start = pos + 1
    entries.sort(key=lambda e: message.find(e["original_text"]))
    return json.dumps(
        {
            "privacy_issue": bool(entries),
            "detected_pii": entries,
            "text_with_placeholders": message,
            "affected_text": ",".join(e["original_text"] for e in entries) or None,
        }
    )


def planted_provider(plants: dict[str, str], abstractions: dict[str, str] | None = None) -> MockProvider:
    """Provider whose detector finds exactly the planted strings."""

    def detect(request, ordinal):
        return planted_detection_response(request.variables["message"], plants)

    def abstract(request, ordinal):
        originals = request.variables["affected_text"].split(",")
        rows = []
        for text in originals:
            if abstractions and text in abstractions:
                rows.append({"protected": text, "abstracted": abstractions[text]})
        return json.dumps({"results": rows})

    provider = cooperative_provider()
    provider.defaults["pii_detection"] = detect
    provider.defaults["pii_abstraction"] = abstract
    return provider
