"""Structured-output schemas and the strict-but-repairing JSON extractor."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Any, Callable

from .errors import ExtractionError, SchemaViolation

PII_CATEGORIES = (
    "ADDRESS",
    "IP_ADDRESS",
    "URL",
    "SSN",
    "PHONE_NUMBER",
    "EMAIL",
    "DRIVERS_LICENSE",
    "PASSPORT_NUMBER",
    "TAXPAYER_IDENTIFICATION_NUMBER",
    "ID_NUMBER",
    "NAME",
    "USERNAME",
    "KEYS",
    "GEOLOCATION",
    "AFFILIATION",
    "DEMOGRAPHIC_ATTRIBUTE",
    "TIME",
    "HEALTH_INFORMATION",
    "FINANCIAL_INFORMATION",
    "EDUCATIONAL_RECORD",
)

EXECUTOR_ACTIONS = (
    "ASK_FOLLOWUP",
    "REQUEST_CLARIFY",
    "SUMMARIZE_QUESTION",
    "NEXT_QUESTION",
    "END",
)


@dataclass(frozen=True)
class Field:
    name: str
    kind: str  # str | bool | number | int | list | object | null-or-str
    required: bool = True
    enum: tuple | None = None
    item_check: Callable[[str, Any], None] | None = None


@dataclass(frozen=True)
class StructuredPayload:
    schema_id: str
    fields: dict[str, Any]

    def __getitem__(self, key: str) -> Any:
        return self.fields[key]

    def get(self, key: str, default: Any = None) -> Any:
        return self.fields.get(key, default)


def _check_kind(schema_id: str, field: Field, value: Any) -> Any:
    kind = field.kind
    if kind == "str":
        if not isinstance(value, str):
            raise SchemaViolation(schema_id, field.name, f"expected string, got {type(value).__name__}")
    elif kind == "null-or-str":
        if value is not None and not isinstance(value, str):
            raise SchemaViolation(schema_id, field.name, "expected string or null")
    elif kind == "bool":
        if not isinstance(value, bool):
            raise SchemaViolation(schema_id, field.name, "expected boolean")
    elif kind == "number":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise SchemaViolation(schema_id, field.name, "expected number")
    elif kind == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            raise SchemaViolation(schema_id, field.name, "expected integer")
    elif kind == "list":
        if not isinstance(value, list):
            raise SchemaViolation(schema_id, field.name, "expected list")
        if field.item_check is not None:
            for item in value:
                field.item_check(field.name, item)
    else:
        raise AssertionError(f"unknown field kind {kind}")
    if field.enum is not None and value not in field.enum:
        raise SchemaViolation(
            schema_id, field.name, f"value {value!r} not in {list(field.enum)}"
        )
    return value


class Schema:
    def __init__(self, schema_id: str, fields: list[Field], defaults: dict[str, Any] | None = None):
        self.schema_id = schema_id
        self.fields = fields
        self.defaults = defaults or {}

    def validate(self, obj: Any) -> StructuredPayload:
        if not isinstance(obj, dict):
            raise SchemaViolation(self.schema_id, "<root>", "payload is not an object")
        out: dict[str, Any] = {}
        for field in self.fields:
            if field.name not in obj:
                if field.required and field.name not in self.defaults:
                    raise SchemaViolation(self.schema_id, field.name, "missing required key")
                out[field.name] = self.defaults.get(field.name)
                continue
            out[field.name] = _check_kind(self.schema_id, field, obj[field.name])
        return StructuredPayload(self.schema_id, out)


def _coverage_entry(name: str, item: Any) -> None:
    if not isinstance(item, dict):
        raise SchemaViolation("completion_audit", name, "entry is not an object")
    for key, kinds in (("id", str), ("covered", bool)):
        if key not in item:
            raise SchemaViolation("completion_audit", f"{name}.{key}", "missing required key")
        if not isinstance(item[key], kinds):
            raise SchemaViolation("completion_audit", f"{name}.{key}", "wrong type")
    if "evidence" in item and not isinstance(item["evidence"], str):
        raise SchemaViolation("completion_audit", f"{name}.evidence", "expected string")


def _pii_entry(name: str, item: Any) -> None:
    if not isinstance(item, dict):
        raise SchemaViolation("pii_detection", name, "entry is not an object")
    for key in ("type", "original_text"):
        if key not in item or not isinstance(item[key], str):
            raise SchemaViolation("pii_detection", f"{name}.{key}", "missing or non-string")
    if item["type"] not in PII_CATEGORIES:
        raise SchemaViolation("pii_detection", f"{name}.type", f"unknown category {item['type']!r}")


def _abstraction_entry(name: str, item: Any) -> None:
    if not isinstance(item, dict):
        raise SchemaViolation("pii_abstraction", name, "entry is not an object")
    for key in ("protected", "abstracted"):
        if key not in item or not isinstance(item[key], str):
            raise SchemaViolation("pii_abstraction", f"{name}.{key}", "missing or non-string")


def _string_item(name: str, item: Any) -> None:
    if not isinstance(item, str):
        raise SchemaViolation("<list>", name, "expected string item")


_SCHEMAS: dict[str, Schema] = {}


def _register(schema: Schema) -> None:
    _SCHEMAS[schema.schema_id] = schema


_register(
    Schema(
        "executor_directive",
        [
            Field("action", "str", enum=EXECUTOR_ACTIONS),
            Field("question_id", "str", required=False),
            Field("utterance", "str"),
            Field("notes", "list", required=False, item_check=_string_item),
        ],
        defaults={"question_id": "", "notes": []},
    )
)
_register(
    Schema(
        "completion_audit",
        [
            Field("question_id", "str", required=False),
            Field("coverage_map", "list", item_check=_coverage_entry),
            Field("next_followup_id", "null-or-str", required=False),
            Field("next_followup_prompt", "null-or-str", required=False),
            Field("verdict", "str", enum=("ALLOW_NEXT_QUESTION", "REQUIRE_MORE")),
            Field("confidence", "number", required=False),
            Field("notes", "str", required=False),
        ],
        defaults={
            "question_id": "",
            "next_followup_id": None,
            "next_followup_prompt": None,
            "confidence": 0.0,
            "notes": "",
        },
    )
)
_register(
    Schema(
        "presence_audit",
        [
            Field("hasQuestion", "bool"),
            Field("reason", "str", required=False),
            Field("confidence", "number", required=False),
            Field("shouldRegenerate", "bool"),
        ],
        defaults={"reason": "", "confidence": 0.0},
    )
)
_register(
    Schema(
        "concise_presence",
        [Field("ok", "bool"), Field("reason", "str", required=False)],
        defaults={"reason": ""},
    )
)
_register(
    Schema(
        "answerability",
        [
            Field("label", "str", enum=("NO_ABLE_ANSWER", "HAS_ANSWER")),
            Field("reason", "str", required=False),
            Field("reason_type", "str", required=False, enum=("no_experience", "refusal", "")),
            Field("evidence", "list", required=False, item_check=_string_item),
        ],
        defaults={"reason": "", "reason_type": "", "evidence": []},
    )
)
_register(
    Schema(
        "connector_polish",
        [Field("prefix", "str"), Field("suffix", "str")],
    )
)
_register(
    Schema(
        "pii_detection",
        [
            Field("privacy_issue", "bool"),
            Field("detected_pii", "list", item_check=_pii_entry),
            Field("text_with_placeholders", "str", required=False),
            Field("affected_text", "null-or-str", required=False),
        ],
        defaults={"text_with_placeholders": "", "affected_text": None},
    )
)
_register(
    Schema(
        "pii_abstraction",
        [Field("results", "list", item_check=_abstraction_entry)],
    )
)
for _dim in ("Relevance", "Specificity", "Clarity"):
    _register(Schema(f"rqi_{_dim.lower()}", [Field(_dim, "int", enum=(0, 1, 2))]))


def get_schema(schema_id: str) -> Schema:
    try:
        return _SCHEMAS[schema_id]
    except KeyError:
        raise ExtractionError(f"no schema registered for '{schema_id}'") from None


_FENCE_RE = re.compile(r"```[a-zA-Z0-9]*\n?|```")


def _candidate_texts(raw: str):
    yield raw.strip()
    defenced = _FENCE_RE.sub("", raw).strip()
    if defenced != raw.strip():
        yield defenced
    # last resort: widest {...} block
    start, end = raw.find("{"), raw.rfind("}")
    if start != -1 and end > start:
        yield raw[start : end + 1]


def extract_structured(raw: str, schema_id: str) -> StructuredPayload:
    """Parse raw model text into a validated payload.

    The repair pass strips markdown fences and surrounding prose before
    giving up. Schema violations name the offending key.
    """
    schema = get_schema(schema_id)
    last_violation: SchemaViolation | None = None
    parsed_any = False
    for candidate in _candidate_texts(raw):
        try:
            obj = json.loads(candidate)
        except (json.JSONDecodeError, ValueError):
            continue
        parsed_any = True
        try:
            return schema.validate(obj)
        except SchemaViolation as exc:
            last_violation = exc
    if last_violation is not None:
        raise last_violation
    if not parsed_any:
        raise ExtractionError(f"{schema_id}: output is not parseable JSON")
    raise ExtractionError(f"{schema_id}: no candidate payload validated")
