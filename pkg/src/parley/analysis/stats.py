"""Inferential statistics and descriptive summaries.

These are the quantitative primitives behind every reported measure: Welch's
two-sample t (Welch-Satterthwaite df), one-way ANOVA with eta squared,
Pearson's product-moment correlation, Cohen's kappa, normal-approximation
confidence intervals, and linear-interpolation percentiles. Everything here
is checked against independent brute-force oracles in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .distributions import f_sf, student_t_two_sided_p

Z_975 = 1.959963984540054  # two-sided 95% normal quantile


class DegenerateInput(ValueError):
    pass


def _mean(values: Sequence[float]) -> float:
    return sum(values) / len(values)


def _sample_variance(values: Sequence[float], mean: float | None = None) -> float:
    n = len(values)
    if n < 2:
        raise DegenerateInput("variance needs at least two values")
    m = _mean(values) if mean is None else mean
    return sum((v - m) ** 2 for v in values) / (n - 1)


@dataclass(frozen=True)
class WelchResult:
    t: float
    df: float
    p: float


def welch_t(sample_a: Sequence[float], sample_b: Sequence[float]) -> WelchResult:
    """Two-sample mean comparison without the equal-variance assumption."""
    if len(sample_a) < 2 or len(sample_b) < 2:
        raise DegenerateInput("each sample needs at least two values")
    mean_a, mean_b = _mean(sample_a), _mean(sample_b)
    var_a = _sample_variance(sample_a, mean_a)
    var_b = _sample_variance(sample_b, mean_b)
    return welch_t_from_moments(len(sample_a), mean_a, var_a, len(sample_b), mean_b, var_b)


def welch_t_summary(
    n_a: int, mean_a: float, sd_a: float, n_b: int, mean_b: float, sd_b: float
) -> WelchResult:
    """Welch's t from reported summary statistics (n, mean, SD)."""
    return welch_t_from_moments(n_a, mean_a, sd_a**2, n_b, mean_b, sd_b**2)


def welch_t_from_moments(
    n_a: int, mean_a: float, var_a: float, n_b: int, mean_b: float, var_b: float
) -> WelchResult:
    if n_a < 2 or n_b < 2:
        raise DegenerateInput("each sample needs at least two values")
    if var_a <= 0 and var_b <= 0:
        raise DegenerateInput("at least one sample must have nonzero variance")
    se_a, se_b = var_a / n_a, var_b / n_b
    se = math.sqrt(se_a + se_b)
    t = (mean_a - mean_b) / se
    df = (se_a + se_b) ** 2 / (
        (se_a**2) / (n_a - 1) + (se_b**2) / (n_b - 1)
    )
    return WelchResult(t=t, df=df, p=student_t_two_sided_p(t, df))


@dataclass(frozen=True)
class AnovaResult:
    f: float
    p: float
    eta_squared: float
    df_between: int
    df_within: int


def anova_oneway(groups: Sequence[Sequence[float]]) -> AnovaResult:
    """Classic one-way ANOVA; eta squared = SS_between / SS_total."""
    if len(groups) < 2:
        raise DegenerateInput("need at least two groups")
    for g in groups:
        if len(g) < 2:
            raise DegenerateInput("every group needs at least two values")
    all_values = [v for g in groups for v in g]
    grand_mean = _mean(all_values)
    ss_between = sum(len(g) * (_mean(g) - grand_mean) ** 2 for g in groups)
    ss_within = sum(sum((v - _mean(g)) ** 2 for v in g) for g in groups)
    ss_total = ss_between + ss_within
    df_between = len(groups) - 1
    df_within = len(all_values) - len(groups)
    if ss_total == 0.0:
        return AnovaResult(f=0.0, p=1.0, eta_squared=0.0, df_between=df_between, df_within=df_within)
    eta_squared = ss_between / ss_total
    if ss_within == 0.0:
        return AnovaResult(
            f=math.inf, p=0.0, eta_squared=eta_squared, df_between=df_between, df_within=df_within
        )
    f = (ss_between / df_between) / (ss_within / df_within)
    return AnovaResult(
        f=f,
        p=f_sf(f, df_between, df_within),
        eta_squared=eta_squared,
        df_between=df_between,
        df_within=df_within,
    )


def pearson_r(x: Sequence[float], y: Sequence[float]) -> float:
    if len(x) != len(y):
        raise DegenerateInput("samples must have equal length")
    if len(x) < 2:
        raise DegenerateInput("need at least two pairs")
    mean_x, mean_y = _mean(x), _mean(y)
    sxx = sum((a - mean_x) ** 2 for a in x)
    syy = sum((b - mean_y) ** 2 for b in y)
    if sxx == 0 or syy == 0:
        raise DegenerateInput("zero variance in one of the samples")
    sxy = sum((a - mean_x) * (b - mean_y) for a, b in zip(x, y))
    r = sxy / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


@dataclass(frozen=True)
class KappaResult:
    kappa: float | None
    observed_agreement: float
    expected_agreement: float

    @property
    def undefined(self) -> bool:
        return self.kappa is None


def cohens_kappa(labels_a: Sequence, labels_b: Sequence) -> KappaResult:
    """Chance-corrected agreement; exact rational arithmetic internally."""
    if len(labels_a) != len(labels_b):
        raise DegenerateInput("label sequences must have equal length")
    n = len(labels_a)
    if n < 1:
        raise DegenerateInput("need at least one labelled item")
    labels = sorted(set(labels_a) | set(labels_b), key=str)
    count_a = {k: 0 for k in labels}
    count_b = {k: 0 for k in labels}
    agree = 0
    for a, b in zip(labels_a, labels_b):
        count_a[a] += 1
        count_b[b] += 1
        if a == b:
            agree += 1
    p_o = Fraction(agree, n)
    p_e = sum(Fraction(count_a[k], n) * Fraction(count_b[k], n) for k in labels)
    if p_e == 1:
        return KappaResult(kappa=None, observed_agreement=float(p_o), expected_agreement=1.0)
    kappa = (p_o - p_e) / (1 - p_e)
    return KappaResult(
        kappa=float(kappa),
        observed_agreement=float(p_o),
        expected_agreement=float(p_e),
    )


def mean_ci95(values: Sequence[float]) -> tuple[float, float, float]:
    """(mean, low, high): normal-approximation 95% interval over the values."""
    if not values:
        raise DegenerateInput("no values")
    m = _mean(values)
    if len(values) == 1:
        return m, m, m
    se = math.sqrt(_sample_variance(values, m) / len(values))
    return m, m - Z_975 * se, m + Z_975 * se


def percentile(values: Sequence[float], q: float) -> float:
    """Linear-interpolation percentile (the common plotting convention)."""
    if not values:
        raise DegenerateInput("no values")
    if not (0 <= q <= 100):
        raise ValueError("q must be in [0, 100]")
    ordered = sorted(values)
    h = (len(ordered) - 1) * q / 100.0
    lo = math.floor(h)
    hi = math.ceil(h)
    if lo == hi:
        return float(ordered[int(h)])
    return ordered[lo] + (h - lo) * (ordered[hi] - ordered[lo])


@dataclass(frozen=True)
class SummaryStats:
    count: int
    mean: float
    sd: float
    min: float
    p25: float
    median: float
    p75: float
    p90: float
    max: float

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "mean": self.mean,
            "sd": self.sd,
            "min": self.min,
            "p25": self.p25,
            "median": self.median,
            "p75": self.p75,
            "p90": self.p90,
            "max": self.max,
        }


def describe(values: Sequence[float]) -> SummaryStats:
    if not values:
        raise DegenerateInput("no values")
    m = _mean(values)
    sd = math.sqrt(_sample_variance(values, m)) if len(values) > 1 else 0.0
    return SummaryStats(
        count=len(values),
        mean=m,
        sd=sd,
        min=float(min(values)),
        p25=percentile(values, 25),
        median=percentile(values, 50),
        p75=percentile(values, 75),
        p90=percentile(values, 90),
        max=float(max(values)),
    )
