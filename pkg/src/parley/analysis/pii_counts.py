"""Detection adapters for analysis: live gateway, cache file, or disabled.

Analysis re-runs detection over original and final message texts to compute
per-message PII counts and deltas. Results are cached by text hash so a
report is reproducible without provider access.
"""

from __future__ import annotations

import hashlib
import json
import logging
from pathlib import Path
from typing import Protocol

from ..gateway import Gateway
from ..privacy import PlaceholderLedger, detect_pii

logger = logging.getLogger(__name__)


class TextDetector(Protocol):
    def findings(self, text: str) -> list[dict] | None:
        """[{category, original_text}] per finding; None when unavailable."""
        ...


def text_key(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class DetectionCache:
    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path is not None else None
        self.entries: dict[str, list[dict]] = {}
        self.dirty = False
        if self.path is not None and self.path.exists():
            self.entries = json.loads(self.path.read_text("utf-8"))

    def get(self, text: str) -> list[dict] | None:
        return self.entries.get(text_key(text))

    def put(self, text: str, findings: list[dict]) -> None:
        self.entries[text_key(text)] = findings
        self.dirty = True

    def save(self) -> None:
        if self.path is not None and self.dirty:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self.path.write_text(json.dumps(self.entries, sort_keys=True), "utf-8")
            self.dirty = False


class GatewayDetector:
    """Live detection through the model gateway, write-through cached."""

    def __init__(self, gateway: Gateway, cache: DetectionCache | None = None):
        self.gateway = gateway
        self.cache = cache or DetectionCache()

    def findings(self, text: str) -> list[dict] | None:
        cached = self.cache.get(text)
        if cached is not None:
            return cached
        result = detect_pii(self.gateway, text, PlaceholderLedger())
        if result.detection_failed:
            return None
        rows = [
            {"category": f.category, "original_text": f.original_text}
            for f in result.findings
        ]
        self.cache.put(text, rows)
        return rows


class CachedDetector:
    """Cache-only detection; texts missing from the cache count as unavailable."""

    def __init__(self, cache: DetectionCache):
        self.cache = cache

    def findings(self, text: str) -> list[dict] | None:
        return self.cache.get(text)


class NullDetector:
    def findings(self, text: str) -> list[dict] | None:
        return None
