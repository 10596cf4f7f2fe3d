"""Disclosure and engagement metrics over submissions."""

from __future__ import annotations

from typing import Iterable, Sequence

EDIT_DECREASE = "decrease"
EDIT_INCREASE = "increase"
EDIT_NO_CHANGE = "no_change"
EDIT_OUTCOMES = (EDIT_DECREASE, EDIT_INCREASE, EDIT_NO_CHANGE)

# Message-length buckets: (low, high inclusive); None = unbounded.
WORD_BUCKETS: tuple[tuple[int, int | None], ...] = (
    (0, 9),
    (10, 19),
    (20, 39),
    (40, 79),
    (80, 159),
    (160, None),
)


def pii_count(findings: Sequence) -> int:
    """Counting unit is the number of findings on the message."""
    return len(findings)


def reduction_rate(before: int, after: int) -> float | None:
    """(before - after) / before; None marks a zero-baseline exclusion."""
    if before < 0 or after < 0:
        raise ValueError("counts must be non-negative")
    if before == 0:
        return None
    return (before - after) / before


def corpus_net_reduction(pairs: Iterable[tuple[int, int]]) -> float | None:
    """Net reduction over summed counts: (sum_before - sum_after) / sum_before."""
    total_before = 0
    total_after = 0
    for before, after in pairs:
        total_before += before
        total_after += after
    if total_before == 0:
        return None
    return (total_before - total_after) / total_before


def classify_edit_outcome(pii_before: int, pii_after: int) -> str:
    if pii_after < pii_before:
        return EDIT_DECREASE
    if pii_after > pii_before:
        return EDIT_INCREASE
    return EDIT_NO_CHANGE


def outcome_shares(outcomes: Sequence[str]) -> dict[str, float]:
    """Share of each outcome among the given classifications (sums to 1)."""
    shares = {o: 0.0 for o in EDIT_OUTCOMES}
    if not outcomes:
        return shares
    for outcome in outcomes:
        if outcome not in shares:
            raise ValueError(f"unknown outcome '{outcome}'")
        shares[outcome] += 1
    return {o: c / len(outcomes) for o, c in shares.items()}


def word_count(message: str) -> int:
    """Number of maximal whitespace-separated tokens."""
    return len(message.split())


def word_bucket(n: int) -> str:
    if n < 0:
        raise ValueError("word count must be non-negative")
    for low, high in WORD_BUCKETS:
        if high is None:
            return f">={low}"
        if low <= n <= high:
            return f"{low}-{high}"
    raise AssertionError("unreachable")


def bucket_labels() -> list[str]:
    return [f">={low}" if high is None else f"{low}-{high}" for low, high in WORD_BUCKETS]


def bucket_shares(word_counts: Sequence[int]) -> dict[str, float]:
    shares = {label: 0.0 for label in bucket_labels()}
    if not word_counts:
        return shares
    for n in word_counts:
        shares[word_bucket(n)] += 1
    return {label: c / len(word_counts) for label, c in shares.items()}


def edit_rate_by_group(messages: Iterable[tuple[str, bool]]) -> dict[str, float]:
    """Share of edited messages per question group.

    ``messages`` yields (group_id, edited) for every user message; edited
    means final text differs bytewise from the original.
    """
    totals: dict[str, int] = {}
    edited: dict[str, int] = {}
    for group_id, was_edited in messages:
        totals[group_id] = totals.get(group_id, 0) + 1
        if was_edited:
            edited[group_id] = edited.get(group_id, 0) + 1
    return {gid: edited.get(gid, 0) / total for gid, total in sorted(totals.items())}
