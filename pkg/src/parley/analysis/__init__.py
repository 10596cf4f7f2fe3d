from .codebook import (
    EDIT_ACTION_CODES,
    CodeTag,
    TaggingError,
    code_distribution,
    load_tagging_file,
    parse_tags,
)
from .distributions import f_sf, regularized_incomplete_beta, student_t_two_sided_p
from .metrics import (
    EDIT_DECREASE,
    EDIT_INCREASE,
    EDIT_NO_CHANGE,
    EDIT_OUTCOMES,
    WORD_BUCKETS,
    bucket_labels,
    bucket_shares,
    classify_edit_outcome,
    corpus_net_reduction,
    edit_rate_by_group,
    outcome_shares,
    pii_count,
    reduction_rate,
    word_bucket,
    word_count,
)
from .pii_counts import (
    CachedDetector,
    DetectionCache,
    GatewayDetector,
    NullDetector,
    TextDetector,
)
from .report import (
    AnalysisReport,
    ConditionReport,
    build_report,
    load_exclusions,
    load_submissions,
    render_text,
)
from .rqi import (
    JUDGE_MODES,
    MODE_CACHED,
    MODE_LIVE,
    MODE_OFF,
    RQI_DIMENSIONS,
    JudgeCache,
    RqiJudge,
    RqiScore,
    aggregate_rqi,
)
from .stats import (
    AnovaResult,
    DegenerateInput,
    KappaResult,
    SummaryStats,
    WelchResult,
    anova_oneway,
    cohens_kappa,
    describe,
    mean_ci95,
    pearson_r,
    percentile,
    welch_t,
    welch_t_from_moments,
    welch_t_summary,
)

__all__ = [
    "AnalysisReport",
    "AnovaResult",
    "CachedDetector",
    "CodeTag",
    "ConditionReport",
    "DegenerateInput",
    "DetectionCache",
    "EDIT_ACTION_CODES",
    "EDIT_DECREASE",
    "EDIT_INCREASE",
    "EDIT_NO_CHANGE",
    "EDIT_OUTCOMES",
    "GatewayDetector",
    "JUDGE_MODES",
    "JudgeCache",
    "KappaResult",
    "MODE_CACHED",
    "MODE_LIVE",
    "MODE_OFF",
    "NullDetector",
    "RQI_DIMENSIONS",
    "RqiJudge",
    "RqiScore",
    "SummaryStats",
    "TaggingError",
    "TextDetector",
    "WORD_BUCKETS",
    "WelchResult",
    "aggregate_rqi",
    "anova_oneway",
    "bucket_labels",
    "bucket_shares",
    "build_report",
    "classify_edit_outcome",
    "code_distribution",
    "cohens_kappa",
    "corpus_net_reduction",
    "describe",
    "edit_rate_by_group",
    "f_sf",
    "load_exclusions",
    "load_submissions",
    "load_tagging_file",
    "mean_ci95",
    "outcome_shares",
    "parse_tags",
    "pearson_r",
    "percentile",
    "pii_count",
    "reduction_rate",
    "regularized_incomplete_beta",
    "render_text",
    "student_t_two_sided_p",
    "welch_t",
    "welch_t_from_moments",
    "welch_t_summary",
    "word_bucket",
    "word_count",
]
