"""Findings, suggestions, the placeholder ledger, and edit records."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..gateway.schemas import PII_CATEGORIES

DECISION_PENDING = "pending"
DECISION_PLACEHOLDER = "accepted_placeholder"
DECISION_ABSTRACTION = "accepted_abstraction"
DECISION_IGNORED = "ignored"

DECISIONS = (
    DECISION_PENDING,
    DECISION_PLACEHOLDER,
    DECISION_ABSTRACTION,
    DECISION_IGNORED,
)

# Generic stand-ins used when abstraction generation is unavailable.
FALLBACK_ABSTRACTIONS: dict[str, str] = {
    "ADDRESS": "a nearby address",
    "IP_ADDRESS": "a network address",
    "URL": "a website",
    "SSN": "an identification number",
    "PHONE_NUMBER": "a phone number",
    "EMAIL": "an email address",
    "DRIVERS_LICENSE": "a license number",
    "PASSPORT_NUMBER": "a travel document number",
    "TAXPAYER_IDENTIFICATION_NUMBER": "a tax identifier",
    "ID_NUMBER": "an identification number",
    "NAME": "a person",
    "USERNAME": "an online handle",
    "KEYS": "a security credential",
    "GEOLOCATION": "a place",
    "AFFILIATION": "an organization",
    "DEMOGRAPHIC_ATTRIBUTE": "a personal attribute",
    "TIME": "some time ago",
    "HEALTH_INFORMATION": "a health matter",
    "FINANCIAL_INFORMATION": "a financial detail",
    "EDUCATIONAL_RECORD": "an educational detail",
}

assert set(FALLBACK_ABSTRACTIONS) == set(PII_CATEGORIES)


class DecisionError(ValueError):
    """Illegal suggestion decision transition."""


@dataclass
class PiiFinding:
    finding_id: str
    message_id: str
    category: str
    original_text: str
    placeholder: str  # bare label, e.g. "NAME1"; rendered bracketed in text
    explanation: str = ""
    occurrence_ordinal: int = 1  # 1-based occurrence of original_text in the message

    def to_dict(self) -> dict:
        return {
            "finding_id": self.finding_id,
            "message_id": self.message_id,
            "category": self.category,
            "original_text": self.original_text,
            "placeholder": self.placeholder,
            "explanation": self.explanation,
            "occurrence_ordinal": self.occurrence_ordinal,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PiiFinding":
        return cls(
            finding_id=d["finding_id"],
            message_id=d["message_id"],
            category=d["category"],
            original_text=d["original_text"],
            placeholder=d["placeholder"],
            explanation=d.get("explanation", ""),
            occurrence_ordinal=int(d.get("occurrence_ordinal", 1)),
        )


class PlaceholderLedger:
    """Session-scoped placeholder numbering with duplicate-entity reuse.

    Numbering is 1-based and gapless per category in issue order; the same
    (category, original_text) pair always maps back to the same label.
    Matching is case-sensitive exact text.
    """

    def __init__(self):
        self.counters: dict[str, int] = {}
        self.entities: dict[tuple[str, str], str] = {}

    def issue(self, category: str, original_text: str) -> str:
        key = (category, original_text)
        if key in self.entities:
            return self.entities[key]
        index = self.counters.get(category, 0) + 1
        self.counters[category] = index
        label = f"{category}{index}"
        self.entities[key] = label
        return label

    def to_dict(self) -> dict:
        return {
            "counters": dict(self.counters),
            "entities": [
                {"category": c, "original_text": t, "placeholder": p}
                for (c, t), p in self.entities.items()
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PlaceholderLedger":
        ledger = cls()
        ledger.counters = {k: int(v) for k, v in d.get("counters", {}).items()}
        for row in d.get("entities", []):
            ledger.entities[(row["category"], row["original_text"])] = row["placeholder"]
        return ledger


@dataclass
class SanitizationSuggestion:
    finding: PiiFinding
    replacement_text: str  # "[NAME1]"
    abstraction_text: str
    decision: str = DECISION_PENDING

    def set_decision(self, decision: str) -> None:
        if decision not in DECISIONS:
            raise DecisionError(f"unknown decision '{decision}'")
        if decision == self.decision:
            return
        # pending -> any decided state; any decided state -> pending (revert)
        if self.decision == DECISION_PENDING or decision == DECISION_PENDING:
            self.decision = decision
            return
        raise DecisionError(
            f"illegal transition {self.decision} -> {decision}; revert to pending first"
        )

    def to_dict(self) -> dict:
        return {
            "finding": self.finding.to_dict(),
            "replacement_text": self.replacement_text,
            "abstraction_text": self.abstraction_text,
            "decision": self.decision,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SanitizationSuggestion":
        return cls(
            finding=PiiFinding.from_dict(d["finding"]),
            replacement_text=d["replacement_text"],
            abstraction_text=d["abstraction_text"],
            decision=d.get("decision", DECISION_PENDING),
        )


@dataclass
class MessageSuggestions:
    """Everything the editing UI needs for one transcript message."""

    message_id: str
    original_text: str
    text_with_placeholders: str
    suggestions: list[SanitizationSuggestion] = field(default_factory=list)
    detection_failed: bool = False

    def suggestion_by_id(self, finding_id: str) -> SanitizationSuggestion:
        for s in self.suggestions:
            if s.finding.finding_id == finding_id:
                return s
        raise KeyError(finding_id)

    def to_dict(self) -> dict:
        return {
            "message_id": self.message_id,
            "original_text": self.original_text,
            "text_with_placeholders": self.text_with_placeholders,
            "detection_failed": self.detection_failed,
            "suggestions": [s.to_dict() for s in self.suggestions],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MessageSuggestions":
        return cls(
            message_id=d["message_id"],
            original_text=d["original_text"],
            text_with_placeholders=d.get("text_with_placeholders", d["original_text"]),
            suggestions=[SanitizationSuggestion.from_dict(s) for s in d.get("suggestions", [])],
            detection_failed=bool(d.get("detection_failed", False)),
        )


@dataclass
class EditRecord:
    """Original/final pair for one message plus how it got there."""

    message_id: str
    original: str
    final: str
    applied_decisions: list[dict] = field(default_factory=list)  # {finding_id, decision}
    span_pairs: list[tuple[str, str]] = field(default_factory=list)
    stale_finding_ids: list[str] = field(default_factory=list)
    manual_edit: bool = False

    @property
    def edited(self) -> bool:
        return self.original != self.final

    def to_dict(self) -> dict:
        return {
            "message_id": self.message_id,
            "original": self.original,
            "final": self.final,
            "applied_decisions": list(self.applied_decisions),
            "span_pairs": [list(p) for p in self.span_pairs],
            "stale_finding_ids": list(self.stale_finding_ids),
            "manual_edit": self.manual_edit,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EditRecord":
        return cls(
            message_id=d["message_id"],
            original=d["original"],
            final=d["final"],
            applied_decisions=list(d.get("applied_decisions", [])),
            span_pairs=[tuple(p) for p in d.get("span_pairs", [])],
            stale_finding_ids=list(d.get("stale_finding_ids", [])),
            manual_edit=bool(d.get("manual_edit", False)),
        )
