import json

import pytest

from parley.analysis import (
    EDIT_ACTION_CODES,
    EDIT_DECREASE,
    EDIT_INCREASE,
    EDIT_NO_CHANGE,
    TaggingError,
    bucket_shares,
    classify_edit_outcome,
    code_distribution,
    corpus_net_reduction,
    edit_rate_by_group,
    load_tagging_file,
    outcome_shares,
    parse_tags,
    pii_count,
    reduction_rate,
    word_bucket,
    word_count,
)


# -- PII counting and reduction ---------------------------------------------


def test_pii_count_is_findings_count():
    assert pii_count([]) == 0
    assert pii_count([{"category": "NAME"}, {"category": "TIME"}]) == 2


def test_reduction_rate_basic():
    assert reduction_rate(4, 2) == 0.5
    assert reduction_rate(3, 3) == 0.0
    assert reduction_rate(2, 3) == -0.5


def test_reduction_rate_zero_baseline_excluded():
    assert reduction_rate(0, 0) is None
    assert reduction_rate(0, 2) is None


def test_reduction_rate_rejects_negative():
    with pytest.raises(ValueError):
        reduction_rate(-1, 0)


def test_corpus_net_reduction_uses_summed_counts():
    # per-message rates would be misleading; the corpus figure sums first
    pairs = [(10, 1), (1, 10)]
    assert corpus_net_reduction(pairs) == 0.0
    assert corpus_net_reduction([]) is None
    assert corpus_net_reduction([(0, 0)]) is None


def test_corpus_net_reduction_headline_fixture():
    # sums engineered so (sum_before - sum_after) / sum_before = 0.412 exactly
    pairs = [(5, 3)] * 47 + [(5, 2)] * 3  # 250 before, 147 after
    assert sum(b for b, _ in pairs) == 250
    assert sum(a for _, a in pairs) == 147
    assert corpus_net_reduction(pairs) == pytest.approx(0.412, abs=1e-12)


# -- edit outcomes --------------------------------------------------------------


@pytest.mark.parametrize(
    "before,after,expected",
    [(3, 1, EDIT_DECREASE), (1, 2, EDIT_INCREASE), (2, 2, EDIT_NO_CHANGE), (0, 0, EDIT_NO_CHANGE)],
)
def test_classify_edit_outcome(before, after, expected):
    assert classify_edit_outcome(before, after) == expected


def test_outcome_shares_sum_to_one():
    shares = outcome_shares([EDIT_DECREASE] * 3 + [EDIT_INCREASE] + [EDIT_NO_CHANGE] * 6)
    assert shares[EDIT_DECREASE] == 0.3
    assert shares[EDIT_INCREASE] == 0.1
    assert sum(shares.values()) == pytest.approx(1.0, abs=1e-9)


# -- word counts ------------------------------------------------------------------


def test_word_count_tokens():
    assert word_count("yes") == 1
    assert word_count("") == 0
    assert word_count("  two   words  ") == 2
    assert word_count("a\tb\nc") == 3


@pytest.mark.parametrize(
    "n,bucket",
    [
        (0, "0-9"),
        (9, "0-9"),
        (10, "10-19"),
        (14, "10-19"),
        (20, "20-39"),
        (39, "20-39"),
        (40, "40-79"),
        (80, "80-159"),
        (159, "80-159"),
        (160, ">=160"),
        (1000, ">=160"),
    ],
)
def test_word_bucket_boundaries(n, bucket):
    assert word_bucket(n) == bucket


def test_bucket_shares_sum_to_one():
    counts = [1, 5, 14, 20, 45, 90, 200, 14, 8]
    shares = bucket_shares(counts)
    assert sum(shares.values()) == pytest.approx(1.0, abs=1e-9)
    assert shares["0-9"] == pytest.approx(3 / 9)
    assert shares["10-19"] == pytest.approx(2 / 9)


# -- edit rate by group ------------------------------------------------------------


def test_edit_rate_no_edits_is_all_zero():
    rates = edit_rate_by_group([("Q1", False), ("Q2", False), ("Q2", False)])
    assert rates == {"Q1": 0.0, "Q2": 0.0}


def test_edit_rate_half_edited():
    rates = edit_rate_by_group([("Q1", True), ("Q1", False)])
    assert rates["Q1"] == 0.5


def test_edit_rate_profile_fixture():
    # group shares engineered to the published AI-aided profile
    pairs = (
        [("Q1", True)] * 10 + [("Q1", False)] * 11      # 10/21 -> 47.6%
        + [("Q2", True)] * 4 + [("Q2", False)] * 23      # 4/27 -> 14.8%
        + [("Q3", True)] * 4 + [("Q3", False)] * 27      # 4/31 -> 12.9%
        + [("Q4", False)] * 30
        + [("Q5", True)] * 1 + [("Q5", False)] * 43      # 1/44 -> 2.3%
        + [("Q6", False)] * 30
    )
    rates = edit_rate_by_group(pairs)
    assert round(100 * rates["Q1"], 1) == 47.6
    assert round(100 * rates["Q2"], 1) == 14.8
    assert round(100 * rates["Q3"], 1) == 12.9
    assert 100 * rates["Q5"] <= 2.3 + 1e-9
    assert rates["Q4"] == rates["Q6"] == 0.0


# -- codebook ----------------------------------------------------------------------


def test_codebook_is_the_closed_seven_code_set():
    assert len(EDIT_ACTION_CODES) == 7
    assert "redact_to_type_placeholder" in EDIT_ACTION_CODES
    assert "change_answer" in EDIT_ACTION_CODES


def test_parse_tags_validates_codes():
    with pytest.raises(TaggingError, match="unknown code"):
        parse_tags([{"submission_id": "s", "message_id": "m", "codes": ["delete_stuff"]}])
    with pytest.raises(TaggingError, match="non-empty"):
        parse_tags([{"submission_id": "s", "message_id": "m", "codes": []}])


def test_tagging_file_roundtrip(tmp_path):
    rows = [
        {"submission_id": "s1", "message_id": "m1", "codes": ["remove_content"]},
        {
            "submission_id": "s1",
            "message_id": "m2",
            "codes": ["redact_to_type_placeholder", "fix_format_typo"],
        },
    ]
    path = tmp_path / "tags.json"
    path.write_text(json.dumps(rows))
    tags = load_tagging_file(path)
    assert len(tags) == 2
    assert tags[1].codes == ("redact_to_type_placeholder", "fix_format_typo")


def test_code_distribution_reproduces_published_shares():
    tags = []
    ai_counts = {
        "redact_to_type_placeholder": 111,
        "abstract_to_general_information": 35,
        "remove_content": 2,
    }
    free_counts = {
        "add_new_content": 7,
        "fix_format_typo": 7,
        "redact_to_unrecognizable_placeholder": 4,
        "change_answer": 3,
        "abstract_to_general_information": 2,
        "remove_content": 1,
    }
    i = 0
    for code, n in ai_counts.items():
        for _ in range(n):
            tags.append({"submission_id": "ai1", "message_id": f"m{i}", "codes": [code]})
            i += 1
    for code, n in free_counts.items():
        for _ in range(n):
            tags.append({"submission_id": "fr1", "message_id": f"m{i}", "codes": [code]})
            i += 1
    distribution = code_distribution(
        parse_tags(tags), {"ai1": "ai_edit", "fr1": "free_edit"}
    )
    ai = distribution["ai_edit"]
    assert ai["redact_to_type_placeholder"]["count"] == 111
    assert round(100 * ai["redact_to_type_placeholder"]["share"], 1) == 75.0
    assert round(100 * ai["abstract_to_general_information"]["share"], 1) == 23.6
    free = distribution["free_edit"]
    assert round(100 * free["add_new_content"]["share"], 1) == 29.2
    assert round(100 * free["redact_to_unrecognizable_placeholder"]["share"], 1) == 16.7
    for condition in distribution.values():
        total_share = sum(e["share"] for e in condition.values())
        assert total_share == pytest.approx(1.0, abs=1e-9)


def test_code_distribution_rejects_unknown_submission():
    tags = parse_tags([{"submission_id": "ghost", "message_id": "m", "codes": ["remove_content"]}])
    with pytest.raises(TaggingError, match="ghost"):
        code_distribution(tags, {"s1": "control"})
