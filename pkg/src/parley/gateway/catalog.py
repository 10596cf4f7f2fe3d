"""Prompt catalog: template files with named substitution slots.

Template text is stored verbatim in one file per prompt. Slots are bound to
literal marker strings inside the template (some markers are whole lines so
that identical placeholder text in two spots stays unambiguous). Rendering
replaces each marker exactly once and refuses unbound slots.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

from .errors import ConfigurationError

# The interview-time catalog ships with exactly these ten prompts.
CORE_PROMPT_IDS = (
    "executor",
    "completion_audit",
    "presence_audit",
    "concise_presence",
    "answerability",
    "connector_polish",
    "regenerate_question",
    "audit_polish",
    "pii_detection",
    "pii_abstraction",
)

JUDGE_PROMPT_IDS = ("rqi_relevance", "rqi_specificity", "rqi_clarity")

_FOLLOWUPS_BLOCK = (
    '[\n  {"id":"Qx_Fy","prompt":"...","keywords":[...]},\n  ...\n]'
)

# prompt_id -> {slot name: literal marker in the template}
_CORE_SLOTS: dict[str, dict[str, str]] = {
    "executor": {
        "current_question": "<current or N/A>",
        "remaining_questions": '["..."; "..."]',
        "allowed_actions": "[ASK_FOLLOWUP, REQUEST_CLARIFY, SUMMARIZE_QUESTION]",
    },
    "completion_audit": {
        "current_question": "<question>",
        "followups_json": _FOLLOWUPS_BLOCK,
    },
    "presence_audit": {
        "current_question": "<question>",
        "topic_keywords": "CURRENT TOPIC KEYWORDS: [kw...]",
        "avoid_keywords": "OTHER TOPICS KEYWORDS (avoid): [kw...]",
    },
    "concise_presence": {
        "current_question": "<question>",
        "topic_hints": "TOPICAL HINTS: <comma-separated keywords or (none)>",
        "avoid_hints": "OTHER TOPICS (avoid drifting): <comma-separated keywords or (none)>",
        "candidate": "<assistant text>",
    },
    "answerability": {},
    "connector_polish": {},
    "regenerate_question": {
        "current_question": "<question>",
        "topic_keywords": "[kw...]",
        "user_message": "<userMessage>",
        "original_response": "<originalResponse>",
    },
    "audit_polish": {
        "topic_hints": "<comma-separated keywords>",
        "current_question": "<question>",
        "topic_keywords": "[kw...]",
        "user_message": "<userMessage>",
        "original_response": "<originalResponse>",
        "audit_summary": 'verdict=<...>; missing=<Qx_Fy>; suggested="<prompt text>"',
    },
    "pii_detection": {
        "message": "<message>",
        "context": "<optional context>",
    },
    "pii_abstraction": {
        "text_with_placeholders": "<text_with_placeholders>",
        "placeholders": "P1,P2,...",
        "affected_text": "<comma-separated originals if any>",
    },
}

# Line markers above render as "LABEL: value"; record the label to keep.
_LINE_MARKERS = {
    "CURRENT TOPIC KEYWORDS: [kw...]": "CURRENT TOPIC KEYWORDS: ",
    "OTHER TOPICS KEYWORDS (avoid): [kw...]": "OTHER TOPICS KEYWORDS (avoid): ",
    "TOPICAL HINTS: <comma-separated keywords or (none)>": "TOPICAL HINTS: ",
    "OTHER TOPICS (avoid drifting): <comma-separated keywords or (none)>": (
        "OTHER TOPICS (avoid drifting): "
    ),
}


@dataclass(frozen=True)
class PromptTemplate:
    prompt_id: str
    text: str
    slots: dict[str, str]

    def render(self, variables: dict[str, str]) -> str:
        missing = set(self.slots) - set(variables)
        if missing:
            raise ConfigurationError(
                f"prompt '{self.prompt_id}': unbound slots {sorted(missing)}"
            )
        unknown = set(variables) - set(self.slots)
        if unknown:
            raise ConfigurationError(
                f"prompt '{self.prompt_id}': unknown slots {sorted(unknown)}"
            )
        rendered = self.text
        for slot, marker in self.slots.items():
            if rendered.count(marker) != 1:
                raise ConfigurationError(
                    f"prompt '{self.prompt_id}': marker for slot '{slot}' not unique"
                )
            value = variables[slot]
            if marker in _LINE_MARKERS:
                value = _LINE_MARKERS[marker] + value
            rendered = rendered.replace(marker, value)
        return rendered


class PromptCatalog:
    """Immutable map of prompt_id -> PromptTemplate."""

    def __init__(self, entries: dict[str, PromptTemplate]):
        self._entries = dict(entries)

    def get(self, prompt_id: str) -> PromptTemplate:
        try:
            return self._entries[prompt_id]
        except KeyError:
            raise ConfigurationError(f"unknown prompt id '{prompt_id}'") from None

    def ids(self) -> tuple[str, ...]:
        return tuple(self._entries)

    def __contains__(self, prompt_id: str) -> bool:
        return prompt_id in self._entries


def _read_prompt(subdir: str, name: str) -> str:
    return (
        resources.files("parley")
        .joinpath(f"prompts/{subdir}/{name}.txt")
        .read_text(encoding="utf-8")
    )


def load_core_catalog() -> PromptCatalog:
    entries = {
        pid: PromptTemplate(pid, _read_prompt("core", pid), dict(_CORE_SLOTS[pid]))
        for pid in CORE_PROMPT_IDS
    }
    return PromptCatalog(entries)


def load_judge_catalog() -> PromptCatalog:
    """Response-quality scoring prompts: rubric text composed into the template.

    The templates use brace-style slots, so rendering goes through str.format
    (doubled braces in the template collapse to literal braces).
    """
    entries = {}
    for pid in JUDGE_PROMPT_IDS:
        definition = _read_prompt("judge", f"{pid}_definition").rstrip("\n")
        template = _read_prompt("judge", pid)
        definition_slot = pid.split("_")[1].upper() + "_DEFINITION"
        text = template.replace("{" + definition_slot + "}", definition)
        entries[pid] = PromptTemplate(
            pid, text, {"question": "{question}", "answer": "{answer}"}
        )
    return PromptCatalog(
        {
            pid: PromptTemplate(
                pid,
                _format_braces(entry.text),
                entry.slots,
            )
            for pid, entry in entries.items()
        }
    )


def _format_braces(text: str) -> str:
    # Collapse {{ }} once at load time; {question}/{answer} markers survive.
    return (
        text.replace("{question}", "\x00Q\x00")
        .replace("{answer}", "\x00A\x00")
        .replace("{{", "{")
        .replace("}}", "}")
        .replace("\x00Q\x00", "{question}")
        .replace("\x00A\x00", "{answer}")
    )
