"""Command-line entry points: serve the API, analyze submissions, run stats."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .analysis import (
    CachedDetector,
    DetectionCache,
    GatewayDetector,
    JudgeCache,
    NullDetector,
    RqiJudge,
    anova_oneway,
    build_report,
    cohens_kappa,
    load_submissions,
    load_tagging_file,
    pearson_r,
    render_text,
    welch_t,
)
from .analysis.rqi import MODE_CACHED, MODE_LIVE, MODE_OFF
from .gateway import Gateway, HttpChatProvider, load_judge_catalog


@click.group()
def main():
    """Interview platform tools."""


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def serve(host: str, port: int):
    """Run the session service (configure provider/store via environment)."""
    import uvicorn

    from .service.http import create_app

    uvicorn.run(create_app(), host=host, port=port)


def _make_detector(mode: str, cache_path: str | None):
    cache = DetectionCache(cache_path)
    if mode == MODE_LIVE:
        return GatewayDetector(Gateway(HttpChatProvider()), cache), cache
    if mode == MODE_CACHED:
        return CachedDetector(cache), cache
    return NullDetector(), cache


def _make_judge(mode: str, cache_path: str | None):
    cache = JudgeCache(cache_path)
    if mode == MODE_LIVE:
        gateway = Gateway(HttpChatProvider(), catalog=load_judge_catalog())
        return RqiJudge(gateway, cache, mode=MODE_LIVE), cache
    return RqiJudge(None, cache, mode=mode), cache


@main.command()
@click.option("--input", "input_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--exclusions", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--report", "report_path", required=True, type=click.Path(dir_okay=False))
@click.option(
    "--judge",
    "judge_mode",
    type=click.Choice([MODE_LIVE, MODE_CACHED, MODE_OFF]),
    default=MODE_CACHED,
    show_default=True,
    help="Judging and detection mode.",
)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--judge-cache", type=click.Path(dir_okay=False), default=None)
@click.option("--detect-cache", type=click.Path(dir_okay=False), default=None)
@click.option("--tags", "tags_path", type=click.Path(exists=True, dir_okay=False), default=None)
def analyze(input_dir, exclusions, report_path, judge_mode, seed, judge_cache, detect_cache, tags_path):
    """Build the full analysis report for a directory of submissions."""
    detector, detection_cache = _make_detector(judge_mode, detect_cache)
    judge, judge_cache_obj = _make_judge(judge_mode, judge_cache)
    tags = load_tagging_file(tags_path) if tags_path else None
    report = build_report(
        input_dir,
        exclusions_path=exclusions,
        detector=detector if judge_mode != MODE_OFF else None,
        judge=judge if judge_mode != MODE_OFF else None,
        tags=tags,
        options={"judge_mode": judge_mode, "seed": seed},
    )
    detection_cache.save()
    judge_cache_obj.save()
    Path(report_path).write_text(report.to_json() + "\n", "utf-8")
    text = render_text(report)
    Path(report_path).with_suffix(".txt").write_text(text, "utf-8")
    click.echo(text)
    click.echo(f"report written to {report_path}")


@main.command("judge-rqi")
@click.option("--input", "input_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--cache", "cache_path", required=True, type=click.Path(dir_okay=False))
def judge_rqi(input_dir, cache_path):
    """Populate the judge cache for every Q/A pair in the submissions."""
    judge, cache = _make_judge(MODE_LIVE, cache_path)
    submissions, unreadable, _ = load_submissions(input_dir, set())
    judged = 0
    for submission in submissions:
        rows = submission.final_transcript
        for i, row in enumerate(rows):
            if row["role"] != "user":
                continue
            question = next(
                (rows[j]["text"] for j in range(i - 1, -1, -1) if rows[j]["role"] == "bot"),
                "",
            )
            if judge.judge(question, row["text"]) is not None:
                judged += 1
    cache.save()
    click.echo(f"judged {judged} responses ({judge.unjudged} unjudged); cache at {cache_path}")
    if unreadable:
        click.echo(f"unreadable submissions skipped: {', '.join(unreadable)}")


@main.command()
@click.option(
    "--test",
    "test_name",
    required=True,
    type=click.Choice(["welch", "anova", "pearson", "kappa"]),
)
@click.option("--data", "data_path", required=True, type=click.Path(exists=True, dir_okay=False))
def stats(test_name, data_path):
    """Run one statistical test on a JSON data file.

    Expected shapes: welch {"a": [...], "b": [...]}; anova {"groups": [[...], ...]};
    pearson {"x": [...], "y": [...]}; kappa {"labels_a": [...], "labels_b": [...]}.
    """
    data = json.loads(Path(data_path).read_text("utf-8"))
    if test_name == "welch":
        result = welch_t(data["a"], data["b"])
        out = {"t": result.t, "df": result.df, "p": result.p}
    elif test_name == "anova":
        result = anova_oneway(data["groups"])
        out = {
            "F": result.f,
            "p": result.p,
            "eta_squared": result.eta_squared,
            "df": [result.df_between, result.df_within],
        }
    elif test_name == "pearson":
        out = {"r": pearson_r(data["x"], data["y"])}
    else:
        result = cohens_kappa(data["labels_a"], data["labels_b"])
        out = {
            "kappa": result.kappa,
            "observed_agreement": result.observed_agreement,
            "expected_agreement": result.expected_agreement,
            "undefined": result.undefined,
        }
    click.echo(json.dumps(out, indent=2))


@main.command("validate-script")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
def validate_script_command(path):
    """Check an interview script document against all invariants."""
    from .protocol import ScriptError, load_script

    try:
        script = load_script(Path(path).read_bytes())
    except ScriptError as exc:
        click.echo(f"invalid: {exc}", err=True)
        sys.exit(1)
    click.echo(
        f"ok: version {script.version}, {len(script.groups)} groups, "
        f"{sum(len(g.followups) for g in script.groups)} follow-ups"
    )


if __name__ == "__main__":
    main()
