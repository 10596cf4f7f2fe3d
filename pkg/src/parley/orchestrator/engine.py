"""Executor-auditor interview loop.

Each user message runs through: answerability classification (skip path),
the follow-up coverage audit (advance vs. ask-more), utterance generation,
and a presence audit with bounded regeneration. Every LLM failure has a
deterministic fallback so the interview never stalls; the worst case emits
script prompts verbatim.
"""

from __future__ import annotations

import json
import logging
import re

from ..gateway import AttemptsExhausted, ChatRequest, Gateway
from ..protocol import InterviewScript, QuestionGroup
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

logger = logging.getLogger(__name__)

OPENING_PREFIX = "Thanks for joining me today. I'd like to start here:"
CLOSING_TEXT = (
    "That covers everything I wanted to ask. Thank you for sharing your "
    "experiences with me today."
)

MAX_QUESTION_CHARS = 220
MAX_CONNECTOR_CHARS = 120

_PREFACE_RE = re.compile(
    r"^(sure|okay|ok|great|thanks|certainly|absolutely|of course)[!.,:]\s+",
    re.IGNORECASE,
)


def _is_single_question(text: str) -> bool:
    stripped = text.strip()
    return bool(stripped) and stripped.endswith("?") and stripped.count("?") == 1


def _strip_preface(text: str) -> str:
    """Drop a short leading interjection so only the question remains."""
    stripped = text.strip().strip('"').strip()
    return _PREFACE_RE.sub("", stripped)


def _keywords(words) -> str:
    return "[" + ", ".join(words) + "]"


class Orchestrator:
    def __init__(
        self,
        gateway: Gateway,
        script: InterviewScript,
        executor_attempts: int = 3,
        audit_attempts: int = 2,
        presence_retry_budget: int = 2,
    ):
        self.gateway = gateway
        self.script = script
        self.executor_attempts = executor_attempts
        self.audit_attempts = audit_attempts
        self.presence_retry_budget = presence_retry_budget

    # -- state -------------------------------------------------------------

    def new_state(self) -> OrchestratorState:
        coverage = {
            g.id: {f.id: CoverageEntry(followup_id=f.id) for f in g.followups}
            for g in self.script.groups
        }
        return OrchestratorState(coverage=coverage)

    def _group(self, state: OrchestratorState) -> QuestionGroup:
        return self.script.groups[state.current_group_index]

    def begin(self, state: OrchestratorState, transcript: list[Turn]) -> BotTurn:
        """Emit the opening turn with the first main question."""
        if transcript:
            raise ValueError("begin() expects an empty transcript")
        group = self.script.groups[0]
        turn = BotTurn(
            text=f"{OPENING_PREFIX} {group.main_prompt}",
            group_id=group.id,
            kind=KIND_MAIN,
        )
        transcript.append(Turn("bot", turn.text, group.id, KIND_MAIN))
        return turn

    # -- main entry point ----------------------------------------------------

    def handle_user_message(
        self, state: OrchestratorState, transcript: list[Turn], text: str
    ) -> BotTurn:
        if state.phase != PHASE_AWAITING:
            raise ValueError("interview is already complete")
        if not text.strip():
            raise ValueError("user message is empty")

        group = self._group(state)
        transcript.append(Turn("user", text, group.id, KIND_ANSWER))

        label = self.classify_answerability(group.main_prompt, text)
        if label.label == "NO_ABLE_ANSWER":
            for entry in state.group_entries(group.id).values():
                if not entry.resolved:
                    entry.skipped = True
            return self._advance(state, transcript)

        verdict = self.audit_completion(state, transcript)
        if verdict.verdict == VERDICT_ALLOW:
            return self._advance(state, transcript)
        return self._ask_more(state, transcript, group, verdict)

    # -- pipeline stages -----------------------------------------------------

    def classify_answerability(self, question: str, answer: str) -> AnswerabilityLabel:
        request = ChatRequest(
            prompt_id="answerability",
            model_tier="audit",
            context_messages=(
                ("user", f'CURRENT QUESTION: "{question}"\nUser reply: "{answer}"'),
            ),
        )
        try:
            payload = self.gateway.complete_validated(
                request, "answerability", self.audit_attempts
            )
        except AttemptsExhausted:
            # Never skip content on infrastructure failure.
            return AnswerabilityLabel(label="HAS_ANSWER")
        return AnswerabilityLabel(
            label=payload["label"],
            reason_type=payload.get("reason_type") or "",
            evidence=list(payload.get("evidence") or []),
        )

    def audit_completion(
        self, state: OrchestratorState, transcript: list[Turn]
    ) -> CoverageVerdict:
        group = self._group(state)
        entries = state.group_entries(group.id)
        followups_json = json.dumps(
            [
                {"id": f.id, "prompt": f.prompt, "keywords": list(f.keywords)}
                for f in group.followups
            ],
            indent=2,
        )
        request = ChatRequest(
            prompt_id="completion_audit",
            model_tier="audit",
            variables={
                "current_question": group.main_prompt,
                "followups_json": followups_json,
            },
            context_messages=self._recent_turns(state, transcript),
        )
        try:
            payload = self.gateway.complete_validated(
                request, "completion_audit", self.audit_attempts
            )
        except AttemptsExhausted:
            return self._fallback_completion_verdict(group, entries)

        # Merge the auditor's map into state; coverage is monotone so a noisy
        # auditor cannot un-cover a follow-up it confirmed earlier.
        reported: dict[str, CoverageEntry] = {}
        for item in payload["coverage_map"]:
            if item["id"] in entries:
                reported[item["id"]] = CoverageEntry(
                    followup_id=item["id"],
                    covered=bool(item["covered"]),
                    evidence=str(item.get("evidence", "")),
                )
        for fid, entry in entries.items():
            report = reported.get(fid)
            if report is not None and report.covered and not entry.covered:
                entry.covered = True
                entry.evidence = report.evidence

        return self._repair_verdict(group, entries, payload)

    def _repair_verdict(
        self, group: QuestionGroup, entries: dict[str, CoverageEntry], payload
    ) -> CoverageVerdict:
        """Enforce verdict consistency; the state machine owns correctness."""
        uncovered = [fid for fid, e in entries.items() if not e.resolved]
        coverage_map = list(entries.values())
        if not uncovered:
            return CoverageVerdict(
                question_id=group.id,
                coverage_map=coverage_map,
                verdict=VERDICT_ALLOW,
                confidence=float(payload.get("confidence") or 0.0),
            )
        # Earlier follow-ups always win; a later (or dangling) auditor target
        # is retargeted so the next-question choice stays deterministic.
        target = uncovered[0]
        return CoverageVerdict(
            question_id=group.id,
            coverage_map=coverage_map,
            verdict=VERDICT_REQUIRE_MORE,
            next_followup_id=target,
            next_followup_prompt=self._followup_prompt(group, target),
            confidence=float(payload.get("confidence") or 0.0),
        )

    def _fallback_completion_verdict(
        self, group: QuestionGroup, entries: dict[str, CoverageEntry]
    ) -> CoverageVerdict:
        # Local bookkeeping: a follow-up the engine asked verbatim and the
        # participant answered counts as covered, so an unavailable auditor
        # cannot wedge the interview.
        for entry in entries.values():
            if entry.asked and not entry.resolved:
                entry.covered = True
        uncovered = [fid for fid, e in entries.items() if not e.resolved]
        if not uncovered:
            return CoverageVerdict(
                question_id=group.id,
                coverage_map=list(entries.values()),
                verdict=VERDICT_ALLOW,
                from_fallback=True,
            )
        return CoverageVerdict(
            question_id=group.id,
            coverage_map=list(entries.values()),
            verdict=VERDICT_REQUIRE_MORE,
            next_followup_id=uncovered[0],
            next_followup_prompt=self._followup_prompt(group, uncovered[0]),
            from_fallback=True,
        )

    @staticmethod
    def _followup_prompt(group: QuestionGroup, followup_id: str) -> str:
        for f in group.followups:
            if f.id == followup_id:
                return f.prompt
        raise KeyError(followup_id)

    def audit_presence(
        self,
        candidate: str,
        state: OrchestratorState,
        transcript: list[Turn],
        followup_mode: bool,
    ) -> PresenceVerdict:
        if not candidate.strip():
            raise ValueError("candidate utterance is empty")
        group = self._group(state)
        request = ChatRequest(
            prompt_id="presence_audit",
            model_tier="audit",
            variables={
                "current_question": group.main_prompt,
                "topic_keywords": _keywords(group.topic_keywords),
                "avoid_keywords": _keywords(group.avoid_keywords),
            },
            context_messages=self._recent_turns(state, transcript)
            + (
                (
                    "user",
                    f"followUpMode={str(followup_mode).lower()}\n"
                    f'LATEST ASSISTANT MESSAGE: "{candidate}"',
                ),
            ),
        )
        try:
            payload = self.gateway.complete_validated(
                request, "presence_audit", self.audit_attempts
            )
        except AttemptsExhausted:
            # Local syntactic fallback: exactly one question mark passes.
            if followup_mode:
                ok = candidate.count("?") == 1
                return PresenceVerdict(has_question=ok, should_regenerate=not ok)
            return PresenceVerdict(has_question="?" in candidate, should_regenerate=False)
        return PresenceVerdict(
            has_question=bool(payload["hasQuestion"]),
            should_regenerate=bool(payload["shouldRegenerate"]),
            reason=str(payload.get("reason", "")),
            confidence=float(payload.get("confidence") or 0.0),
        )

    def polish_connector(
        self, followup_prompt: str, state: OrchestratorState, transcript: list[Turn]
    ) -> tuple[str, str]:
        """Declarative prefix/suffix around a verbatim follow-up prompt."""
        request = ChatRequest(
            prompt_id="connector_polish",
            model_tier="audit",
            context_messages=self._recent_turns(state, transcript)
            + (("user", f'QUESTION: "{followup_prompt}"'),),
        )
        try:
            payload = self.gateway.complete_validated(
                request, "connector_polish", self.audit_attempts
            )
        except AttemptsExhausted:
            return "", ""
        prefix, suffix = payload["prefix"].strip(), payload["suffix"].strip()
        for part in (prefix, suffix):
            if "?" in part or len(part) > MAX_CONNECTOR_CHARS:
                return "", ""
        return prefix, suffix

    def regenerate_single_question(
        self,
        state: OrchestratorState,
        transcript: list[Turn],
        user_message: str,
        original_response: str,
        verdict: CoverageVerdict | None,
        fallback_prompt: str,
        attempts: int | None = None,
    ) -> tuple[str, bool]:
        """Rewrite a malformed bot message into one interrogative sentence.

        Returns (utterance, used_fallback). The fallback is the verbatim
        script follow-up prompt.
        """
        group = self._group(state)
        budget = attempts if attempts is not None else self.presence_retry_budget
        for _ in range(budget):
            if verdict is not None and verdict.next_followup_id:
                request = ChatRequest(
                    prompt_id="audit_polish",
                    model_tier="audit",
                    variables={
                        "topic_hints": ", ".join(group.topic_keywords),
                        "current_question": group.main_prompt,
                        "topic_keywords": _keywords(group.topic_keywords),
                        "user_message": user_message,
                        "original_response": original_response,
                        "audit_summary": (
                            f"verdict={verdict.verdict}; "
                            f"missing={verdict.next_followup_id}; "
                            f'suggested="{verdict.next_followup_prompt}"'
                        ),
                    },
                )
            else:
                request = ChatRequest(
                    prompt_id="regenerate_question",
                    model_tier="audit",
                    variables={
                        "current_question": group.main_prompt,
                        "topic_keywords": _keywords(group.topic_keywords),
                        "user_message": user_message,
                        "original_response": original_response,
                    },
                )
            try:
                raw = self.gateway.complete(request)
            except Exception:
                continue
            candidate = _strip_preface(raw)
            if len(candidate) <= MAX_QUESTION_CHARS and _is_single_question(candidate):
                if self._concise_check(candidate, group):
                    return candidate, False
        return fallback_prompt, True

    def _concise_check(self, candidate: str, group: QuestionGroup) -> bool:
        request = ChatRequest(
            prompt_id="concise_presence",
            model_tier="audit",
            variables={
                "current_question": group.main_prompt,
                "topic_hints": ", ".join(group.topic_keywords) or "(none)",
                "avoid_hints": ", ".join(group.avoid_keywords) or "(none)",
                "candidate": candidate,
            },
        )
        try:
            payload = self.gateway.complete_validated(request, "concise_presence", 1)
        except AttemptsExhausted:
            return True  # local validation already passed
        return bool(payload["ok"])

    # -- turn construction -----------------------------------------------------

    def _run_executor(
        self,
        state: OrchestratorState,
        transcript: list[Turn],
        allowed: list[str],
    ) -> ExecutorDirective:
        group = self._group(state)
        remaining = [
            g.main_prompt
            for g in self.script.groups[state.current_group_index + 1 :]
        ]
        request = ChatRequest(
            prompt_id="executor",
            model_tier="interactive",
            variables={
                "current_question": group.main_prompt,
                "remaining_questions": json.dumps(remaining),
                "allowed_actions": "[" + ", ".join(allowed) + "]",
            },
            context_messages=self._recent_turns(state, transcript),
        )
        try:
            payload = self.gateway.complete_validated(
                request, "executor_directive", self.executor_attempts
            )
        except AttemptsExhausted:
            return ExecutorDirective(action=allowed[0], question_id=group.id)
        action = payload["action"]
        if action not in allowed:
            action = allowed[0]
        return ExecutorDirective(
            action=action,
            question_id=str(payload.get("question_id", "")),
            utterance=str(payload.get("utterance", "")),
            notes=list(payload.get("notes") or []),
        )

    def _ask_more(
        self,
        state: OrchestratorState,
        transcript: list[Turn],
        group: QuestionGroup,
        verdict: CoverageVerdict,
    ) -> BotTurn:
        directive = self._run_executor(state, transcript, ["ASK_FOLLOWUP", "REQUEST_CLARIFY"])
        user_message = transcript[-1].text
        if (
            directive.action == "REQUEST_CLARIFY"
            and state.clarify_streak < 1
            and directive.utterance.strip()
        ):
            turn = self._clarify_turn(state, transcript, group, directive, verdict, user_message)
            if turn is not None:
                return turn
        return self._followup_turn(state, transcript, group, verdict)

    def _clarify_turn(
        self,
        state: OrchestratorState,
        transcript: list[Turn],
        group: QuestionGroup,
        directive: ExecutorDirective,
        verdict: CoverageVerdict,
        user_message: str,
    ) -> BotTurn | None:
        candidate = _strip_preface(directive.utterance)
        used_fallback = False
        ok = len(candidate) <= MAX_QUESTION_CHARS and _is_single_question(candidate)
        if ok:
            presence = self.audit_presence(candidate, state, transcript, followup_mode=True)
            ok = presence.has_question and not presence.should_regenerate
        if not ok:
            candidate, used_fallback = self.regenerate_single_question(
                state,
                transcript,
                user_message,
                directive.utterance,
                verdict,
                fallback_prompt="",
            )
            if used_fallback or not candidate:
                return None  # give up on clarifying; ask the follow-up instead
        state.clarify_streak += 1
        turn = BotTurn(
            text=candidate,
            group_id=group.id,
            kind=KIND_CLARIFY,
            used_fallback=used_fallback,
        )
        transcript.append(Turn("bot", turn.text, group.id, KIND_CLARIFY))
        return turn

    def _followup_turn(
        self,
        state: OrchestratorState,
        transcript: list[Turn],
        group: QuestionGroup,
        verdict: CoverageVerdict,
    ) -> BotTurn:
        followup_id = verdict.next_followup_id
        assert followup_id is not None
        prompt = self._followup_prompt(group, followup_id)
        used_fallback = False

        assembled = ""
        for _ in range(self.presence_retry_budget):
            prefix, suffix = self.polish_connector(prompt, state, transcript)
            assembled = " ".join(p for p in (prefix, prompt, suffix) if p)
            if assembled.count("?") != prompt.count("?"):
                continue  # connector smuggled in a question; try again
            presence = self.audit_presence(assembled, state, transcript, followup_mode=True)
            if presence.has_question and not presence.should_regenerate:
                break
        else:
            assembled = prompt
            used_fallback = True

        state.clarify_streak = 0
        entry = state.group_entries(group.id)[followup_id]
        entry.asked = True
        turn = BotTurn(
            text=assembled,
            group_id=group.id,
            kind=KIND_FOLLOWUP,
            followup_id=followup_id,
            used_fallback=used_fallback,
        )
        transcript.append(
            Turn("bot", turn.text, group.id, KIND_FOLLOWUP, followup_id=followup_id)
        )
        return turn

    def _advance(self, state: OrchestratorState, transcript: list[Turn]) -> BotTurn:
        state.clarify_streak = 0
        state.current_group_index += 1
        if state.current_group_index >= len(self.script.groups):
            state.phase = PHASE_COMPLETE
            turn = BotTurn(
                text=CLOSING_TEXT,
                group_id=self.script.groups[-1].id,
                kind=KIND_CLOSING,
            )
            transcript.append(Turn("bot", turn.text, turn.group_id, KIND_CLOSING))
            return turn

        next_group = self._group(state)
        last_group = state.current_group_index == len(self.script.groups) - 1
        allowed = ["SUMMARIZE_QUESTION", "END" if last_group else "NEXT_QUESTION"]
        directive = self._run_executor(state, transcript, allowed)
        transition = directive.utterance.strip()
        if "?" in transition or len(transition) > MAX_CONNECTOR_CHARS * 2:
            transition = ""  # keep transitions declarative; the script asks the question
        text = f"{transition} {next_group.main_prompt}".strip()
        turn = BotTurn(text=text, group_id=next_group.id, kind=KIND_MAIN)
        transcript.append(Turn("bot", turn.text, next_group.id, KIND_MAIN))
        return turn

    # -- context -----------------------------------------------------------

    def _recent_turns(
        self, state: OrchestratorState, transcript: list[Turn]
    ) -> tuple[tuple[str, str], ...]:
        """All turns of the current group plus the last turn of the previous one."""
        group_id = self._group(state).id
        current = [t for t in transcript if t.group_id == group_id]
        previous = [t for t in transcript if t.group_id != group_id]
        window = ([previous[-1]] if previous else []) + current
        return tuple(
            ("assistant" if t.role == "bot" else "user", t.text) for t in window
        )


def uncovered_followups(state: OrchestratorState, group_id: str) -> list[str]:
    return [
        fid for fid, e in state.group_entries(group_id).items() if not e.resolved
    ]
