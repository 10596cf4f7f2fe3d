"""Post-interview PII detection, abstraction, and decision application.

Span binding uses (exact surface string, occurrence ordinal): detection
assigns each finding the next unconsumed exact-match occurrence of its text,
left to right. Replacements re-resolve the same binding, so repeated
substrings map distinct findings to distinct occurrences and hand-edited
text simply fails to bind (flagged stale) instead of corrupting the message.
"""

from __future__ import annotations

import difflib
import logging
from dataclasses import dataclass

from ..gateway import AttemptsExhausted, ChatRequest, Gateway
from .types import (
    DECISION_ABSTRACTION,
    DECISION_IGNORED,
    DECISION_PENDING,
    DECISION_PLACEHOLDER,
    FALLBACK_ABSTRACTIONS,
    EditRecord,
    MessageSuggestions,
    PiiFinding,
    PlaceholderLedger,
    SanitizationSuggestion,
)

logger = logging.getLogger(__name__)

DETECTION_ATTEMPTS = 2
_CONTEXT_TURN_LIMIT = 12


def find_occurrence(text: str, needle: str, ordinal: int) -> int:
    """Start index of the ordinal-th (1-based) occurrence of needle, or -1."""
    if not needle:
        return -1
    start = -1
    for _ in range(ordinal):
        start = text.find(needle, start + 1)
        if start == -1:
            return -1
    return start


def _bind_new_occurrence(
    message: str, needle: str, consumed: list[tuple[int, int]]
) -> tuple[int, int] | None:
    """Next exact-match occurrence of needle not overlapping a consumed range."""
    search_from = 0
    while True:
        start = message.find(needle, search_from)
        if start == -1:
            return None
        end = start + len(needle)
        if all(end <= c0 or start >= c1 for c0, c1 in consumed):
            return start, end
        search_from = start + 1


def _ordinal_at(message: str, needle: str, start: int) -> int:
    """1-based occurrence number of the needle instance beginning at start."""
    count = 0
    pos = -1
    while pos < start:
        pos = message.find(needle, pos + 1)
        if pos == -1:
            raise ValueError("start does not point at an occurrence")
        count += 1
    return count


@dataclass
class DetectionResult:
    findings: list[PiiFinding]
    text_with_placeholders: str
    detection_failed: bool = False
    ledger: PlaceholderLedger | None = None


def _render_with_placeholders(message: str, bound: list[tuple[PiiFinding, int, int]]) -> str:
    out = message
    for finding, start, end in sorted(bound, key=lambda b: b[1], reverse=True):
        out = out[:start] + f"[{finding.placeholder}]" + out[end:]
    return out


def detect_pii(
    gateway: Gateway,
    message: str,
    ledger: PlaceholderLedger,
    context: tuple[str, ...] = (),
    message_id: str = "m",
) -> DetectionResult:
    """Run taxonomy detection over one message.

    Placeholders come from the ledger (dedupe plus sequential numbering); the
    model's own substituted text is discarded and recomputed locally from the
    bound findings. Detection failure returns no findings and a flag rather
    than blocking anything downstream.
    """
    if not message.strip():
        return DetectionResult([], message, ledger=ledger)
    context_block = ""
    if context:
        recent = context[-_CONTEXT_TURN_LIMIT:]
        context_block = "\nPrior conversation:\n" + "\n".join(recent)
    request = ChatRequest(
        prompt_id="pii_detection",
        model_tier="audit",
        variables={"message": message, "context": context_block},
    )
    try:
        payload = gateway.complete_validated(request, "pii_detection", DETECTION_ATTEMPTS)
    except AttemptsExhausted:
        logger.warning("pii detection failed for message %s; continuing without suggestions", message_id)
        return DetectionResult([], message, detection_failed=True, ledger=ledger)

    findings: list[PiiFinding] = []
    bound: list[tuple[PiiFinding, int, int]] = []
    consumed: list[tuple[int, int]] = []
    for item in payload["detected_pii"]:
        original_text = item["original_text"]
        span = _bind_new_occurrence(message, original_text, consumed)
        if span is None:
            logger.debug("dropping unbindable finding %r in %s", original_text, message_id)
            continue
        placeholder = ledger.issue(item["type"], original_text)
        finding = PiiFinding(
            finding_id=f"{message_id}-f{len(findings) + 1}",
            message_id=message_id,
            category=item["type"],
            original_text=original_text,
            placeholder=placeholder,
            explanation=str(item.get("explanation", "")),
            occurrence_ordinal=_ordinal_at(message, original_text, span[0]),
        )
        findings.append(finding)
        bound.append((finding, span[0], span[1]))
        consumed.append(span)
    return DetectionResult(
        findings=findings,
        text_with_placeholders=_render_with_placeholders(message, bound),
        ledger=ledger,
    )


def abstract_findings(
    gateway: Gateway,
    text_with_placeholders: str,
    findings: list[PiiFinding],
) -> dict[str, str]:
    """Map each finding's placeholder to a generic rewording of its text."""
    if not findings:
        return {}
    for finding in findings:
        if f"[{finding.placeholder}]" not in text_with_placeholders:
            raise ValueError(
                f"placeholder {finding.placeholder} not present in substituted text"
            )
    request = ChatRequest(
        prompt_id="pii_abstraction",
        model_tier="audit",
        variables={
            "text_with_placeholders": text_with_placeholders,
            "placeholders": ",".join(f.placeholder for f in findings),
            "affected_text": ",".join(f.original_text for f in findings),
        },
    )
    by_key: dict[str, PiiFinding] = {}
    for f in findings:
        by_key.setdefault(f.placeholder, f)
        by_key.setdefault(f.original_text, f)
    out: dict[str, str] = {}
    try:
        payload = gateway.complete_validated(request, "pii_abstraction", DETECTION_ATTEMPTS)
    except AttemptsExhausted:
        payload = None
    if payload is not None:
        for row in payload["results"]:
            finding = by_key.get(row["protected"])
            if finding is not None and row["abstracted"].strip():
                out.setdefault(finding.placeholder, row["abstracted"].strip())
    for finding in findings:
        out.setdefault(finding.placeholder, FALLBACK_ABSTRACTIONS[finding.category])
    return out


@dataclass
class ApplyResult:
    text: str
    stale: bool = False


def apply_decision(message: str, suggestion: SanitizationSuggestion) -> ApplyResult:
    """Apply one decided suggestion to message text.

    Exactly one maximal region changes; an unbindable occurrence (the text
    was hand-edited away) is a no-op flagged stale for the UI.
    """
    decision = suggestion.decision
    if decision == DECISION_PENDING:
        raise ValueError("cannot apply a pending suggestion")
    if decision == DECISION_IGNORED:
        return ApplyResult(message)
    finding = suggestion.finding
    start = find_occurrence(message, finding.original_text, finding.occurrence_ordinal)
    if start == -1:
        return ApplyResult(message, stale=True)
    replacement = (
        suggestion.replacement_text
        if decision == DECISION_PLACEHOLDER
        else suggestion.abstraction_text
    )
    end = start + len(finding.original_text)
    return ApplyResult(message[:start] + replacement + message[end:])


def word_diff_spans(original: str, final: str) -> list[tuple[str, str]]:
    """Changed-region pairs from a word-granularity subsequence diff."""
    a, b = original.split(), final.split()
    matcher = difflib.SequenceMatcher(a=a, b=b, autojunk=False)
    spans = []
    for tag, i1, i2, j1, j2 in matcher.get_opcodes():
        if tag != "equal":
            spans.append((" ".join(a[i1:i2]), " ".join(b[j1:j2])))
    return spans


def finalize_message(
    original: str,
    suggestions: list[SanitizationSuggestion],
    manual_final: str | None = None,
) -> tuple[str, EditRecord]:
    """Apply decided suggestions, then let any manual edit win.

    Pending suggestions are treated as ignored. Decisions are resolved
    against the original text (right-to-left application keeps earlier
    offsets valid), and the record carries both the decisions and a word
    diff of the overall change.
    """
    decided = [
        s
        for s in suggestions
        if s.decision in (DECISION_PLACEHOLDER, DECISION_ABSTRACTION)
    ]
    bindings: list[tuple[SanitizationSuggestion, int]] = []
    stale: list[str] = []
    for s in decided:
        start = find_occurrence(original, s.finding.original_text, s.finding.occurrence_ordinal)
        if start == -1:
            stale.append(s.finding.finding_id)
        else:
            bindings.append((s, start))
    # Overlapping bindings cannot both apply; keep the leftmost, flag the rest.
    bindings.sort(key=lambda pair: pair[1])
    kept: list[tuple[SanitizationSuggestion, int]] = []
    last_end = -1
    for s, start in bindings:
        if start < last_end:
            stale.append(s.finding.finding_id)
            continue
        kept.append((s, start))
        last_end = start + len(s.finding.original_text)
    bindings = sorted(kept, key=lambda pair: pair[1], reverse=True)
    decided_text = original
    applied: list[dict] = []
    for s, start in bindings:
        end = start + len(s.finding.original_text)
        replacement = (
            s.replacement_text
            if s.decision == DECISION_PLACEHOLDER
            else s.abstraction_text
        )
        decided_text = decided_text[:start] + replacement + decided_text[end:]
        applied.append({"finding_id": s.finding.finding_id, "decision": s.decision})
    applied.reverse()  # report in left-to-right message order

    final = manual_final if manual_final is not None else decided_text
    message_id = suggestions[0].finding.message_id if suggestions else ""
    record = EditRecord(
        message_id=message_id,
        original=original,
        final=final,
        applied_decisions=applied,
        span_pairs=word_diff_spans(original, final),
        stale_finding_ids=stale,
        manual_edit=manual_final is not None and manual_final != decided_text,
    )
    return final, record


def scan_transcript(
    gateway: Gateway,
    messages: list[tuple[str, str]],
    ledger: PlaceholderLedger,
) -> list[MessageSuggestions]:
    """Detect and prepare suggestions for every (message_id, text) in order.

    Scanning order fixes ledger numbering, so the same transcript always
    yields the same placeholders. Per-message failures are isolated.
    """
    results: list[MessageSuggestions] = []
    prior: list[str] = []
    for message_id, text in messages:
        detection = detect_pii(gateway, text, ledger, context=tuple(prior), message_id=message_id)
        abstractions = (
            abstract_findings(gateway, detection.text_with_placeholders, detection.findings)
            if detection.findings
            else {}
        )
        suggestions = [
            SanitizationSuggestion(
                finding=f,
                replacement_text=f"[{f.placeholder}]",
                abstraction_text=abstractions.get(
                    f.placeholder, FALLBACK_ABSTRACTIONS[f.category]
                ),
            )
            for f in detection.findings
        ]
        results.append(
            MessageSuggestions(
                message_id=message_id,
                original_text=text,
                text_with_placeholders=detection.text_with_placeholders,
                suggestions=suggestions,
                detection_failed=detection.detection_failed,
            )
        )
        prior.append(text)
    return results
