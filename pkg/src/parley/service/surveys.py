"""Survey instruments (data fixtures) and screening/answer validation."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources
from typing import Any

from .models import CONDITION_AI, CONDITION_FREE, InvalidInput

AI_USE_QUALIFYING = ("used_during", "used_to_prepare", "both")
AI_USE_VALUES = AI_USE_QUALIFYING + ("not_used", "other")


@lru_cache(maxsize=1)
def load_instruments() -> dict:
    raw = resources.files("parley").joinpath("fixtures/survey_instruments.json").read_bytes()
    return json.loads(raw)


def survey_items_for(condition: str) -> list[dict]:
    instruments = load_instruments()
    items = list(instruments["common"]) + list(instruments["demographic"])
    if condition == CONDITION_FREE:
        items += list(instruments["free_edit"])
    elif condition == CONDITION_AI:
        items += list(instruments["ai_edit"])
    return items


def screen_qualifies(answers: dict[str, Any]) -> bool:
    """Apply the inclusion rule: adult, fluent, and qualifying AI-use answer."""
    for key in ("age_18_plus", "fluent_english", "ai_use"):
        if key not in answers:
            raise InvalidInput(f"screening answer '{key}' is missing")
    if not isinstance(answers["age_18_plus"], bool) or not isinstance(
        answers["fluent_english"], bool
    ):
        raise InvalidInput("age_18_plus and fluent_english must be booleans")
    ai_use = answers["ai_use"]
    if ai_use not in AI_USE_VALUES:
        raise InvalidInput(f"ai_use must be one of {list(AI_USE_VALUES)}")
    return (
        answers["age_18_plus"]
        and answers["fluent_english"]
        and ai_use in AI_USE_QUALIFYING
    )


def validate_survey(condition: str, answers: dict[str, Any]) -> None:
    """Raise InvalidInput unless every item for this condition is answered.

    Likert answers must be integers on the fixed 1-5 scale; choice answers
    must be one of the listed options; free-text answers may be empty but the
    key must be present.
    """
    instruments = load_instruments()
    scale = instruments["likert_scale"]
    items = survey_items_for(condition)
    known_ids = {item["id"] for item in items}
    for answered_id in answers:
        if answered_id not in known_ids:
            raise InvalidInput(f"unknown survey item '{answered_id}'")
    for item in items:
        item_id = item["id"]
        if item_id not in answers:
            raise InvalidInput(f"survey item '{item_id}' is unanswered")
        value = answers[item_id]
        if item["type"] == "likert":
            if isinstance(value, bool) or not isinstance(value, int):
                raise InvalidInput(f"survey item '{item_id}' must be an integer rating")
            if not (scale["min"] <= value <= scale["max"]):
                raise InvalidInput(
                    f"survey item '{item_id}' must be between {scale['min']} and {scale['max']}"
                )
        elif item["type"] == "choice":
            if value not in item["options"]:
                raise InvalidInput(f"survey item '{item_id}' must be one of the listed options")
        else:  # free text
            if not isinstance(value, str):
                raise InvalidInput(f"survey item '{item_id}' must be text")
