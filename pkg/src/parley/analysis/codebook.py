"""Edit-action codebook: tag file loading, validation, and distributions.

Assigning codes to edits is human analyst work; this module only defines the
closed code set, reads a tagging file, and recounts per-condition shares.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

EDIT_ACTION_CODES = (
    "redact_to_type_placeholder",
    "abstract_to_general_information",
    "remove_content",
    "add_new_content",
    "redact_to_unrecognizable_placeholder",
    "fix_format_typo",
    "change_answer",
)


class TaggingError(ValueError):
    pass


@dataclass(frozen=True)
class CodeTag:
    submission_id: str
    message_id: str
    codes: tuple[str, ...]


def parse_tags(doc) -> list[CodeTag]:
    if not isinstance(doc, list):
        raise TaggingError("tagging file must be a JSON list")
    tags = []
    for i, row in enumerate(doc):
        if not isinstance(row, dict):
            raise TaggingError(f"entry {i} is not an object")
        for key in ("submission_id", "message_id", "codes"):
            if key not in row:
                raise TaggingError(f"entry {i} is missing '{key}'")
        codes = row["codes"]
        if not isinstance(codes, list) or not codes:
            raise TaggingError(f"entry {i}: codes must be a non-empty list")
        for code in codes:
            if code not in EDIT_ACTION_CODES:
                raise TaggingError(f"entry {i}: unknown code '{code}'")
        tags.append(
            CodeTag(
                submission_id=str(row["submission_id"]),
                message_id=str(row["message_id"]),
                codes=tuple(codes),
            )
        )
    return tags


def load_tagging_file(path: str | Path) -> list[CodeTag]:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise TaggingError(f"cannot read tagging file {path}: {exc}") from exc
    return parse_tags(doc)


def code_distribution(
    tags: list[CodeTag], condition_of: dict[str, str]
) -> dict[str, dict[str, dict[str, float]]]:
    """Counts and within-condition shares of code assignments.

    Returns {condition: {code: {count, share}}}; shares are over all code
    assignments in that condition.
    """
    counts: dict[str, dict[str, int]] = {}
    for tag in tags:
        condition = condition_of.get(tag.submission_id)
        if condition is None:
            raise TaggingError(f"tag references unknown submission '{tag.submission_id}'")
        bucket = counts.setdefault(condition, {code: 0 for code in EDIT_ACTION_CODES})
        for code in tag.codes:
            bucket[code] += 1
    out: dict[str, dict[str, dict[str, float]]] = {}
    for condition, bucket in sorted(counts.items()):
        total = sum(bucket.values())
        out[condition] = {
            code: {
                "count": n,
                "share": (n / total) if total else 0.0,
            }
            for code, n in bucket.items()
        }
    return out
