"""Interview script data model: question groups with required follow-ups.

Scripts are loaded from a JSON document (top-level ``version`` and ``groups``)
and validated eagerly. The shipped six-group protocol lives at
``parley/fixtures/interview_script.json``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import IO, Any


class ScriptError(Exception):
    """Raised when a script document cannot be parsed or violates invariants."""


@dataclass(frozen=True)
class FollowUp:
    id: str
    prompt: str
    keywords: tuple[str, ...] = ()


@dataclass(frozen=True)
class QuestionGroup:
    id: str
    main_prompt: str
    followups: tuple[FollowUp, ...]
    topic_keywords: tuple[str, ...] = ()
    # Union of every other group's topic keywords, filled in at load time.
    avoid_keywords: tuple[str, ...] = ()


@dataclass(frozen=True)
class InterviewScript:
    groups: tuple[QuestionGroup, ...]
    version: str = "1.0"

    def group_by_id(self, group_id: str) -> QuestionGroup:
        for group in self.groups:
            if group.id == group_id:
                return group
        raise KeyError(group_id)


@dataclass
class Violation:
    """One invariant violation, naming the offending element."""

    element: str
    message: str

    def __str__(self) -> str:
        return f"{self.element}: {self.message}"


def validate_script(script: InterviewScript) -> list[Violation]:
    """Return all invariant violations; empty list means the script is valid."""
    violations: list[Violation] = []
    seen_group_ids: set[str] = set()
    seen_followup_ids: set[str] = set()

    if not script.groups:
        violations.append(Violation("script", "script has no groups"))
    for group in script.groups:
        if group.id in seen_group_ids:
            violations.append(Violation(group.id, "duplicate group id"))
        seen_group_ids.add(group.id)
        if not group.main_prompt.strip():
            violations.append(Violation(group.id, "main_prompt is empty"))
        if not group.topic_keywords:
            violations.append(Violation(group.id, "topic_keywords is empty"))
        if not group.followups:
            violations.append(Violation(group.id, "group has no followups"))
        for fu in group.followups:
            if fu.id in seen_followup_ids:
                violations.append(Violation(fu.id, "duplicate follow-up id"))
            seen_followup_ids.add(fu.id)
            if not fu.prompt.strip():
                violations.append(Violation(fu.id, "prompt is empty"))
            elif not fu.prompt.rstrip().endswith("?"):
                violations.append(Violation(fu.id, "prompt does not end with '?'"))
    return violations


def _parse_followup(raw: Any, group_id: str) -> FollowUp:
    if not isinstance(raw, dict):
        raise ScriptError(f"{group_id}: follow-up entry is not an object")
    try:
        return FollowUp(
            id=str(raw["id"]),
            prompt=str(raw["prompt"]),
            keywords=tuple(str(k) for k in raw.get("keywords", [])),
        )
    except KeyError as exc:
        raise ScriptError(f"{group_id}: follow-up missing key {exc}") from exc


def _parse_group(raw: Any) -> QuestionGroup:
    if not isinstance(raw, dict):
        raise ScriptError("group entry is not an object")
    group_id = str(raw.get("id", "<missing id>"))
    try:
        return QuestionGroup(
            id=group_id,
            main_prompt=str(raw["main_prompt"]),
            followups=tuple(_parse_followup(f, group_id) for f in raw.get("followups", [])),
            topic_keywords=tuple(str(k) for k in raw.get("topic_keywords", [])),
        )
    except KeyError as exc:
        raise ScriptError(f"{group_id}: group missing key {exc}") from exc


def _with_avoid_keywords(groups: list[QuestionGroup]) -> tuple[QuestionGroup, ...]:
    out = []
    for group in groups:
        avoid: list[str] = []
        for other in groups:
            if other.id == group.id:
                continue
            for kw in other.topic_keywords:
                if kw not in avoid and kw not in group.topic_keywords:
                    avoid.append(kw)
        out.append(
            QuestionGroup(
                id=group.id,
                main_prompt=group.main_prompt,
                followups=group.followups,
                topic_keywords=group.topic_keywords,
                avoid_keywords=tuple(avoid),
            )
        )
    return tuple(out)


def load_script(source: bytes | str | IO[bytes] | IO[str]) -> InterviewScript:
    """Parse and validate a script document.

    Raises ScriptError on malformed JSON or any invariant violation; the
    error message names the offending group/follow-up id.
    """
    if hasattr(source, "read"):
        source = source.read()  # type: ignore[union-attr]
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    try:
        doc = json.loads(source)
    except json.JSONDecodeError as exc:
        raise ScriptError(f"script document is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "groups" not in doc:
        raise ScriptError("script document must be an object with a 'groups' list")

    groups = [_parse_group(g) for g in doc["groups"]]
    script = InterviewScript(
        groups=_with_avoid_keywords(groups),
        version=str(doc.get("version", "1.0")),
    )
    violations = validate_script(script)
    if violations:
        raise ScriptError("; ".join(str(v) for v in violations))
    return script


def serialize_script(script: InterviewScript) -> dict:
    """Inverse of load_script, minus the derived avoid_keywords."""
    return {
        "version": script.version,
        "groups": [
            {
                "id": g.id,
                "main_prompt": g.main_prompt,
                "topic_keywords": list(g.topic_keywords),
                "followups": [
                    {"id": f.id, "prompt": f.prompt, "keywords": list(f.keywords)}
                    for f in g.followups
                ],
            }
            for g in script.groups
        ],
    }


def default_script_path() -> str:
    """Filesystem path of the shipped six-group interview protocol."""
    return str(resources.files("parley").joinpath("fixtures/interview_script.json"))


def load_default_script() -> InterviewScript:
    raw = resources.files("parley").joinpath("fixtures/interview_script.json").read_bytes()
    return load_script(raw)
