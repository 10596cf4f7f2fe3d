"""Response-quality scoring: three 0-2 dimensions, product in [0, 8].

Each dimension is judged by one deterministic model call; the product is
computed locally. Judgments are cached by (dimension prompt hash, question,
answer) so reruns are free and report generation stays byte-stable.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from ..gateway import (
    AttemptsExhausted,
    ChatRequest,
    Gateway,
    load_judge_catalog,
)

logger = logging.getLogger(__name__)

RQI_DIMENSIONS = ("relevance", "clarity", "specificity")
JUDGE_ATTEMPTS = 2

MODE_LIVE = "live"
MODE_CACHED = "cached"
MODE_OFF = "off"
JUDGE_MODES = (MODE_LIVE, MODE_CACHED, MODE_OFF)


@dataclass(frozen=True)
class RqiScore:
    relevance: int
    clarity: int
    specificity: int
    rationales: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        for name in RQI_DIMENSIONS:
            value = getattr(self, name)
            if value not in (0, 1, 2):
                raise ValueError(f"{name} must be 0, 1, or 2 (got {value!r})")
        for name, text in self.rationales.items():
            if len(text.split()) >= 30:
                raise ValueError(f"rationale for {name} must stay under 30 words")

    @property
    def product(self) -> int:
        return self.relevance * self.clarity * self.specificity

    def to_dict(self) -> dict:
        return {
            "relevance": self.relevance,
            "clarity": self.clarity,
            "specificity": self.specificity,
            "product": self.product,
        }


class JudgeCache:
    """File-backed map from judgment key to the integer score."""

    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path is not None else None
        self.entries: dict[str, int] = {}
        self.dirty = False
        if self.path is not None and self.path.exists():
            self.entries = {
                k: int(v) for k, v in json.loads(self.path.read_text("utf-8")).items()
            }

    @staticmethod
    def key(template_text: str, question: str, answer: str) -> str:
        digest = hashlib.sha256()
        for part in (template_text, question, answer):
            digest.update(part.encode("utf-8"))
            digest.update(b"\x00")
        return digest.hexdigest()

    def get(self, key: str) -> int | None:
        return self.entries.get(key)

    def put(self, key: str, score: int) -> None:
        if self.entries.get(key) != score:
            self.entries[key] = score
            self.dirty = True

    def save(self) -> None:
        if self.path is not None and self.dirty:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self.path.write_text(
                json.dumps(self.entries, sort_keys=True, indent=0), "utf-8"
            )
            self.dirty = False


class RqiJudge:
    """Scores question/answer pairs; gateway must use the judge catalog."""

    def __init__(
        self,
        gateway: Gateway | None = None,
        cache: JudgeCache | None = None,
        mode: str = MODE_CACHED,
    ):
        if mode not in JUDGE_MODES:
            raise ValueError(f"judge mode must be one of {JUDGE_MODES}")
        if mode == MODE_LIVE and gateway is None:
            raise ValueError("live judging requires a gateway")
        self.gateway = gateway
        self.cache = cache or JudgeCache()
        self.mode = mode
        self.catalog = gateway.catalog if gateway is not None else load_judge_catalog()
        self.unjudged = 0

    def _dimension(self, dimension: str, question: str, answer: str) -> int | None:
        prompt_id = f"rqi_{dimension}"
        template = self.catalog.get(prompt_id)
        key = JudgeCache.key(template.text, question, answer)
        cached = self.cache.get(key)
        if cached is not None:
            return cached
        if self.mode != MODE_LIVE:
            return None
        assert self.gateway is not None
        request = ChatRequest(
            prompt_id=prompt_id,
            model_tier="judge",
            variables={"question": question, "answer": answer},
        )
        try:
            payload = self.gateway.complete_validated(request, prompt_id, JUDGE_ATTEMPTS)
        except AttemptsExhausted:
            logger.warning("judge call failed for dimension %s", dimension)
            return None
        field_name = dimension.capitalize()
        score = int(payload[field_name])
        self.cache.put(key, score)
        return score

    def judge(self, question: str, answer: str) -> RqiScore | None:
        """Score one response; None marks it unjudged (excluded, counted)."""
        if self.mode == MODE_OFF:
            self.unjudged += 1
            return None
        scores = {}
        for dimension in RQI_DIMENSIONS:
            value = self._dimension(dimension, question, answer)
            if value is None:
                self.unjudged += 1
                return None
            scores[dimension] = value
        return RqiScore(**scores)


def aggregate_rqi(products: list[int | float]) -> float:
    """Participant-level index: arithmetic mean of per-message products."""
    if not products:
        raise ValueError("participant has no judged responses")
    return sum(products) / len(products)
