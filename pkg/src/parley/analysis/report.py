"""Batch report assembly over a directory of submission objects.

Given the same inputs (submissions, exclusion list, judge cache, detection
cache), report generation is pure: no clock, no RNG, stable ordering, so the
serialized report is byte-stable across runs.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from ..service.models import Submission
from .codebook import CodeTag, code_distribution
from .metrics import (
    bucket_shares,
    classify_edit_outcome,
    corpus_net_reduction,
    edit_rate_by_group,
    outcome_shares,
    pii_count,
    reduction_rate,
    word_count,
)
from .pii_counts import TextDetector
from .rqi import RqiJudge, aggregate_rqi
from .stats import anova_oneway, mean_ci95, describe, pearson_r, welch_t

logger = logging.getLogger(__name__)


@dataclass
class ConditionReport:
    condition: str
    participants: int = 0
    user_messages: int = 0
    mean_pii_per_message_final: float | None = None
    mean_pii_per_message_original: float | None = None
    participant_reduction_rates: list[float] = field(default_factory=list)
    participants_excluded_zero_baseline: int = 0
    share_participants_reducing: float | None = None
    corpus_net_reduction: float | None = None
    edit_outcome_shares: dict[str, float] = field(default_factory=dict)
    edited_message_count: int = 0
    rqi_mean: float | None = None
    rqi_ci95: tuple[float, float] | None = None
    rqi_participants_unjudged: int = 0
    word_count_summary: dict | None = None
    word_bucket_shares: dict[str, float] = field(default_factory=dict)
    edit_rate_by_group: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        mean_rate = (
            sum(self.participant_reduction_rates) / len(self.participant_reduction_rates)
            if self.participant_reduction_rates
            else None
        )
        return {
            "condition": self.condition,
            "participants": self.participants,
            "user_messages": self.user_messages,
            "mean_pii_per_message_final": self.mean_pii_per_message_final,
            "mean_pii_per_message_original": self.mean_pii_per_message_original,
            "mean_participant_reduction_rate": mean_rate,
            "participants_excluded_zero_baseline": self.participants_excluded_zero_baseline,
            "share_participants_reducing": self.share_participants_reducing,
            "corpus_net_reduction": self.corpus_net_reduction,
            "edit_outcome_shares": self.edit_outcome_shares,
            "edited_message_count": self.edited_message_count,
            "rqi_mean": self.rqi_mean,
            "rqi_ci95": list(self.rqi_ci95) if self.rqi_ci95 else None,
            "rqi_participants_unjudged": self.rqi_participants_unjudged,
            "word_count_summary": self.word_count_summary,
            "word_bucket_shares": self.word_bucket_shares,
            "edit_rate_by_group": self.edit_rate_by_group,
        }


@dataclass
class AnalysisReport:
    conditions: dict[str, ConditionReport]
    tests: dict[str, dict]
    code_distribution: dict[str, dict] | None
    unreadable_submissions: list[str]
    excluded_sessions: list[str]
    options: dict[str, Any]

    def to_dict(self) -> dict:
        return {
            "conditions": {c: r.to_dict() for c, r in sorted(self.conditions.items())},
            "tests": self.tests,
            "code_distribution": self.code_distribution,
            "unreadable_submissions": self.unreadable_submissions,
            "excluded_sessions": self.excluded_sessions,
            "options": self.options,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def load_exclusions(path: str | Path | None) -> set[str]:
    if path is None:
        return set()
    out = set()
    for line in Path(path).read_text("utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            out.add(line)
    return out


def load_submissions(
    input_dir: str | Path, exclusions: set[str]
) -> tuple[list[Submission], list[str], list[str]]:
    """(submissions, unreadable file names, excluded session ids)."""
    submissions = []
    unreadable = []
    excluded = []
    for path in sorted(Path(input_dir).glob("*.json")):
        try:
            submission = Submission.from_dict(json.loads(path.read_text("utf-8")))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            logger.warning("unreadable submission %s: %s", path.name, exc)
            unreadable.append(path.name)
            continue
        if submission.session_id in exclusions:
            excluded.append(submission.session_id)
            continue
        submissions.append(submission)
    submissions.sort(key=lambda s: s.session_id)
    return submissions, unreadable, excluded


def _user_rows(submission: Submission) -> list[dict]:
    return [row for row in submission.final_transcript if row["role"] == "user"]


def _question_for(submission: Submission, index: int) -> str:
    # the bot turn immediately preceding this row in the final transcript
    rows = submission.final_transcript
    for i in range(index - 1, -1, -1):
        if rows[i]["role"] == "bot":
            return rows[i]["text"]
    return ""


def _original_text(submission: Submission, message_id: str) -> str | None:
    for record in submission.edit_records:
        if record.message_id == message_id:
            return record.original
    return None


def build_report(
    input_dir: str | Path,
    exclusions_path: str | Path | None = None,
    detector: TextDetector | None = None,
    judge: RqiJudge | None = None,
    tags: list[CodeTag] | None = None,
    options: dict[str, Any] | None = None,
) -> AnalysisReport:
    exclusions = load_exclusions(exclusions_path)
    submissions, unreadable, excluded = load_submissions(input_dir, exclusions)

    conditions: dict[str, ConditionReport] = {}
    per_condition: dict[str, list[Submission]] = {}
    for submission in submissions:
        per_condition.setdefault(submission.condition, []).append(submission)

    participant_final_pii_means: dict[str, list[float]] = {}
    baseline_vs_absolute: list[tuple[float, float]] = []  # AI condition
    baseline_vs_rate: list[tuple[float, float]] = []

    for condition, subs in sorted(per_condition.items()):
        report = ConditionReport(condition=condition, participants=len(subs))
        final_counts_all: list[int] = []
        original_counts_all: list[int] = []
        word_counts: list[int] = []
        outcome_list: list[str] = []
        rqi_participant_means: list[float] = []
        edit_pairs: list[tuple[str, bool]] = []

        for submission in subs:
            rows = _user_rows(submission)
            report.user_messages += len(rows)
            sum_before = 0
            sum_after = 0
            detection_ok = detector is not None
            products: list[int] = []
            for index, row in enumerate(submission.final_transcript):
                if row["role"] != "user":
                    continue
                final_text = row["text"]
                original = _original_text(submission, row["message_id"])
                if original is None:
                    original = final_text
                word_counts.append(word_count(final_text))
                edited = original != final_text
                edit_pairs.append((row["group_id"], edited))

                if detector is not None and detection_ok:
                    found_after = detector.findings(final_text)
                    found_before = detector.findings(original)
                    if found_after is None or found_before is None:
                        detection_ok = False
                    else:
                        after_n = pii_count(found_after)
                        before_n = pii_count(found_before)
                        final_counts_all.append(after_n)
                        original_counts_all.append(before_n)
                        sum_before += before_n
                        sum_after += after_n
                        if edited:
                            outcome_list.append(classify_edit_outcome(before_n, after_n))

                if judge is not None:
                    score = judge.judge(_question_for(submission, index), final_text)
                    if score is not None:
                        products.append(score.product)

            if detector is not None and detection_ok:
                rate = reduction_rate(sum_before, sum_after)
                if rate is None:
                    report.participants_excluded_zero_baseline += 1
                else:
                    report.participant_reduction_rates.append(rate)
                    if condition == "ai_edit":
                        baseline_vs_absolute.append(
                            (float(sum_before), float(sum_before - sum_after))
                        )
                        baseline_vs_rate.append((float(sum_before), rate))
            if judge is not None:
                if products:
                    rqi_participant_means.append(aggregate_rqi(products))
                else:
                    report.rqi_participants_unjudged += 1

        if detector is not None and final_counts_all:
            report.mean_pii_per_message_final = sum(final_counts_all) / len(final_counts_all)
            report.mean_pii_per_message_original = sum(original_counts_all) / len(
                original_counts_all
            )
            report.corpus_net_reduction = corpus_net_reduction(
                [(b, a) for b, a in zip(original_counts_all, final_counts_all)]
            )
            participant_final_pii_means[condition] = []
            # per-participant mean final PII, for the between-condition ANOVA
            cursor = 0
            for submission in subs:
                n = len(_user_rows(submission))
                chunk = final_counts_all[cursor : cursor + n]
                cursor += n
                if chunk:
                    participant_final_pii_means[condition].append(sum(chunk) / len(chunk))
            if report.participant_reduction_rates or report.participants_excluded_zero_baseline:
                included = report.participant_reduction_rates
                reducing = sum(1 for r in included if r > 0)
                denominator = len(included) + report.participants_excluded_zero_baseline
                report.share_participants_reducing = reducing / denominator

        if outcome_list:
            report.edit_outcome_shares = outcome_shares(outcome_list)
            report.edited_message_count = len(outcome_list)
        if rqi_participant_means:
            mean, low, high = mean_ci95(rqi_participant_means)
            report.rqi_mean = mean
            report.rqi_ci95 = (low, high)
        if word_counts:
            report.word_count_summary = describe(word_counts).to_dict()
            report.word_bucket_shares = bucket_shares(word_counts)
        report.edit_rate_by_group = edit_rate_by_group(edit_pairs)
        conditions[condition] = report

    tests: dict[str, dict] = {}
    anova_groups = [v for v in participant_final_pii_means.values() if len(v) >= 2]
    if len(anova_groups) >= 2:
        try:
            result = anova_oneway(anova_groups)
            tests["final_pii_anova"] = {
                "F": result.f,
                "p": result.p,
                "eta_squared": result.eta_squared,
                "df": [result.df_between, result.df_within],
            }
        except ValueError:
            pass
    rates_ai = conditions.get("ai_edit")
    rates_free = conditions.get("free_edit")
    if (
        rates_ai
        and rates_free
        and len(rates_ai.participant_reduction_rates) >= 2
        and len(rates_free.participant_reduction_rates) >= 2
    ):
        try:
            result = welch_t(
                rates_free.participant_reduction_rates,
                rates_ai.participant_reduction_rates,
            )
            tests["reduction_rate_welch_free_vs_ai"] = {
                "t": result.t,
                "df": result.df,
                "p": result.p,
            }
        except ValueError:
            pass
    if len(baseline_vs_absolute) >= 2:
        try:
            tests["ai_baseline_vs_absolute_reduction_pearson"] = {
                "r": pearson_r(
                    [b for b, _ in baseline_vs_absolute],
                    [d for _, d in baseline_vs_absolute],
                )
            }
        except ValueError:
            pass
    if len(baseline_vs_rate) >= 2:
        try:
            tests["ai_baseline_vs_reduction_rate_pearson"] = {
                "r": pearson_r(
                    [b for b, _ in baseline_vs_rate], [r for _, r in baseline_vs_rate]
                )
            }
        except ValueError:
            pass

    distribution = None
    if tags:
        condition_of = {s.session_id: s.condition for s in submissions}
        distribution = code_distribution(
            [t for t in tags if t.submission_id in condition_of], condition_of
        )

    return AnalysisReport(
        conditions=conditions,
        tests=tests,
        code_distribution=distribution,
        unreadable_submissions=unreadable,
        excluded_sessions=sorted(excluded),
        options=dict(options or {}),
    )


def render_text(report: AnalysisReport) -> str:
    """Aligned, human-readable summary tables."""
    lines: list[str] = []
    conditions = sorted(report.conditions)

    def row(label: str, values: list[str]) -> str:
        return f"{label:<38}" + "".join(f"{v:>18}" for v in values)

    def fmt(value, digits=3, pct=False) -> str:
        if value is None:
            return "-"
        if pct:
            return f"{100 * value:.1f}%"
        return f"{value:.{digits}f}"

    lines.append("== Disclosure and editing by condition ==")
    lines.append(row("measure", conditions))
    reports = [report.conditions[c] for c in conditions]
    lines.append(row("participants", [str(r.participants) for r in reports]))
    lines.append(row("user messages", [str(r.user_messages) for r in reports]))
    lines.append(
        row("mean PII/message (final)", [fmt(r.mean_pii_per_message_final) for r in reports])
    )
    lines.append(
        row("mean PII/message (original)", [fmt(r.mean_pii_per_message_original) for r in reports])
    )
    lines.append(
        row("corpus net reduction", [fmt(r.corpus_net_reduction, pct=True) for r in reports])
    )
    lines.append(
        row(
            "mean participant reduction rate",
            [
                fmt(
                    sum(r.participant_reduction_rates) / len(r.participant_reduction_rates)
                    if r.participant_reduction_rates
                    else None,
                    pct=True,
                )
                for r in reports
            ],
        )
    )
    lines.append(
        row(
            "share of participants reducing",
            [fmt(r.share_participants_reducing, pct=True) for r in reports],
        )
    )
    lines.append(row("edited user messages", [str(r.edited_message_count) for r in reports]))
    for outcome in ("decrease", "increase", "no_change"):
        lines.append(
            row(
                f"edit outcome: {outcome}",
                [fmt(r.edit_outcome_shares.get(outcome), pct=True) for r in reports],
            )
        )
    lines.append(row("RQI mean", [fmt(r.rqi_mean, 2) for r in reports]))
    lines.append("")

    lines.append("== Message word counts (final transcripts) ==")
    header = ["mean", "sd", "min", "p25", "median", "p75", "p90", "max"]
    lines.append(row("condition", header))
    for c in conditions:
        summary = report.conditions[c].word_count_summary
        if summary:
            lines.append(
                row(c, [fmt(summary[k], 1) for k in ("mean", "sd")] +
                    [fmt(summary[k], 0) for k in ("min", "p25", "median", "p75", "p90", "max")])
            )
    lines.append("")

    buckets = [label for label in reports[0].word_bucket_shares] if reports else []
    if buckets:
        lines.append("== Word-count bucket shares ==")
        lines.append(row("condition", buckets))
        for c in conditions:
            shares = report.conditions[c].word_bucket_shares
            lines.append(row(c, [fmt(shares.get(b), pct=True) for b in buckets]))
        lines.append("")

    groups = sorted({g for r in reports for g in r.edit_rate_by_group})
    if groups:
        lines.append("== Edit rate by question group ==")
        lines.append(row("condition", groups))
        for c in conditions:
            rates = report.conditions[c].edit_rate_by_group
            lines.append(row(c, [fmt(rates.get(g), pct=True) for g in groups]))
        lines.append("")

    if report.code_distribution:
        lines.append("== Edit action codes (within-condition shares) ==")
        code_conditions = sorted(report.code_distribution)
        lines.append(row("code", code_conditions))
        codes = sorted(
            {code for dist in report.code_distribution.values() for code in dist}
        )
        for code in codes:
            cells = []
            for c in code_conditions:
                entry = report.code_distribution[c].get(code)
                cells.append(
                    f"{entry['count']} ({100 * entry['share']:.1f}%)" if entry else "-"
                )
            lines.append(row(code, cells))
        lines.append("")

    if report.tests:
        lines.append("== Inferential tests ==")
        for name, result in sorted(report.tests.items()):
            parts = ", ".join(
                f"{k}={v:.4f}" if isinstance(v, float) else f"{k}={v}"
                for k, v in result.items()
            )
            lines.append(f"{name}: {parts}")
        lines.append("")

    if report.unreadable_submissions:
        lines.append(f"unreadable submissions: {', '.join(report.unreadable_submissions)}")
    if report.excluded_sessions:
        lines.append(f"excluded sessions: {len(report.excluded_sessions)}")
    return "\n".join(lines) + "\n"
