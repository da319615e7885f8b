"""Proportion statistics for model evaluation.

Wilson score intervals, McNemar's paired test, Cohen's h, two one-sided
tests for equivalence of proportions, Bonferroni adjustment, Pearson
correlation and Krippendorff's alpha. Normal quantiles and tails use
:class:`statistics.NormalDist` and :func:`math.erfc`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from statistics import NormalDist
from typing import Mapping, Sequence

import numpy as np

from .errors import DomainError, InsufficientData, ZeroVariance

_STD = NormalDist()


def z_value(confidence: float) -> float:
    if not 0 < confidence < 1:
        raise DomainError(f"confidence must lie in (0, 1), got {confidence}")
    return _STD.inv_cdf(1 - (1 - confidence) / 2)


def chi2_sf_1df(x: float) -> float:
    """Upper tail of the chi-square distribution with one degree of freedom."""
    if x <= 0:
        return 1.0
    return math.erfc(math.sqrt(x / 2))


@dataclass(frozen=True)
class RateEstimate:
    successes: int
    trials: int
    point: float
    ci_low: float
    ci_high: float
    confidence_level: float = 0.95

    @property
    def half_width(self) -> float:
        return (self.ci_high - self.ci_low) / 2

    def as_dict(self) -> dict:
        return {
            "successes": self.successes,
            "trials": self.trials,
            "point": self.point,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "confidence_level": self.confidence_level,
        }


def wilson_interval(point: float, trials: int, confidence: float = 0.95) -> RateEstimate:
    """Wilson score interval around an observed proportion.

    >>> round(wilson_interval(0.974, 500).half_width, 4)
    0.0144
    """
    if not isinstance(trials, (int, np.integer)) or trials < 1:
        raise DomainError(f"trials must be a positive integer, got {trials!r}")
    if not 0.0 <= point <= 1.0 or math.isnan(point):
        raise DomainError(f"point must lie in [0, 1], got {point}")
    z = z_value(confidence)
    n = int(trials)
    z2 = z * z
    if point == 1.0:
        lo, hi = n / (n + z2), 1.0
    elif point == 0.0:
        lo, hi = 0.0, z2 / (n + z2)
    else:
        denom = 1 + z2 / n
        center = (point + z2 / (2 * n)) / denom
        half = z / denom * math.sqrt(point * (1 - point) / n + z2 / (4 * n * n))
        lo = max(0.0, min(point, center - half))
        hi = min(1.0, max(point, center + half))
    return RateEstimate(round(point * n), n, point, lo, hi, confidence)


def rate_from_counts(successes: int, trials: int, confidence: float = 0.95) -> RateEstimate:
    if trials < 1 or not 0 <= successes <= trials:
        raise DomainError(f"need 0 <= successes <= trials and trials >= 1, got {successes}/{trials}")
    est = wilson_interval(successes / trials, trials, confidence)
    return RateEstimate(successes, trials, est.point, est.ci_low, est.ci_high, confidence)


def wilson_coverage(p: float, n: int, draws: int, seed: int = 0, confidence: float = 0.95) -> float:
    """Fraction of simulated binomial samples whose Wilson interval covers ``p``."""
    rng = np.random.default_rng(seed)
    counts = rng.binomial(n, p, size=draws)
    z = z_value(confidence)
    phat = counts / n
    denom = 1 + z * z / n
    center = (phat + z * z / (2 * n)) / denom
    half = z / denom * np.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n))
    return float(np.mean((center - half <= p) & (p <= center + half)))


@dataclass(frozen=True)
class McNemarResult:
    statistic: float
    p: float
    method: str

    def __iter__(self):
        yield self.statistic
        yield self.p


def mcnemar(b: int, c: int, method: str = "corrected") -> McNemarResult:
    """McNemar's test on the two discordant counts of a paired design.

    ``method`` is ``"corrected"`` (continuity-corrected chi-square, the
    default), ``"exact"`` (two-sided binomial) or ``"auto"`` (exact when
    ``b + c < 25``). The reported statistic is always the corrected
    chi-square value.

    >>> s, p = mcnemar(5, 15)
    >>> round(s, 2), round(p, 4)
    (4.05, 0.0442)
    """
    if b < 0 or c < 0:
        raise DomainError("discordant counts must be non-negative")
    if method not in ("corrected", "exact", "auto"):
        raise DomainError(f"unknown McNemar method {method!r}")
    total = b + c
    if total == 0:
        return McNemarResult(0.0, 1.0, method)
    stat = max(abs(b - c) - 1, 0) ** 2 / total
    if method == "exact" or (method == "auto" and total < 25):
        k = min(b, c)
        tail = sum(math.comb(total, i) for i in range(k + 1)) / 2 ** total
        return McNemarResult(stat, min(1.0, 2 * tail), "exact")
    return McNemarResult(stat, chi2_sf_1df(stat), "corrected")


def _check_prop(p: float, name: str = "proportion"):
    if not 0.0 <= p <= 1.0 or math.isnan(p):
        raise DomainError(f"{name} must lie in [0, 1], got {p}")


def cohens_h(p1: float, p2: float) -> float:
    _check_prop(p1, "p1")
    _check_prop(p2, "p2")
    return 2 * math.asin(math.sqrt(p1)) - 2 * math.asin(math.sqrt(p2))


@dataclass(frozen=True)
class TostResult:
    equivalent: bool
    p_lower: float
    p_upper: float

    def __iter__(self):
        yield self.equivalent
        yield self.p_lower
        yield self.p_upper


def tost_two_proportions(
    p1: float, n1: int, p2: float, n2: int, margin: float, alpha: float = 0.05
) -> TostResult:
    """Two one-sided z-tests that ``p1 - p2`` lies inside ``(-margin, margin)``.

    Uses the unpooled standard error. With zero standard error the verdict
    is read off the difference directly (p = 0 inside the margin, 1 outside).
    """
    if margin <= 0:
        raise DomainError("equivalence margin must be positive")
    if n1 < 1 or n2 < 1:
        raise DomainError("sample sizes must be at least 1")
    if not 0 < alpha < 1:
        raise DomainError("alpha must lie in (0, 1)")
    _check_prop(p1, "p1")
    _check_prop(p2, "p2")
    diff = p1 - p2
    se = math.sqrt(p1 * (1 - p1) / n1 + p2 * (1 - p2) / n2)
    if se == 0:
        p_lo = 0.0 if diff > -margin else 1.0
        p_hi = 0.0 if diff < margin else 1.0
    else:
        p_lo = 1 - _STD.cdf((diff + margin) / se)
        p_hi = _STD.cdf((diff - margin) / se)
    return TostResult(p_lo < alpha and p_hi < alpha, p_lo, p_hi)


def bonferroni(pvalues: Sequence[float], m: int | None = None) -> list[float]:
    """Bonferroni-adjusted p-values, ``min(1, m * p)``."""
    for p in pvalues:
        _check_prop(p, "p-value")
    m = len(pvalues) if m is None else m
    if m < 1:
        raise DomainError("family size must be at least 1")
    return [min(1.0, m * p) for p in pvalues]


def pearson(xs: Sequence[float], ys: Sequence[float]) -> float:
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise DomainError("xs and ys must be 1-d sequences of equal length")
    if len(x) < 2:
        raise InsufficientData("need at least two paired observations")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0 or syy == 0:
        raise ZeroVariance("correlation undefined for a constant series")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def _missing(v) -> bool:
    return v is None or (isinstance(v, float) and math.isnan(v))


def krippendorff_alpha(ratings: Sequence[Sequence], metric: str = "nominal") -> float:
    """Krippendorff's alpha from a unit x rater table.

    Missing ratings are ``None`` or NaN. Units with fewer than two ratings
    are not pairable and are ignored. ``metric`` is ``nominal``,
    ``ordinal`` (rank-based) or ``interval``.
    """
    if metric not in ("nominal", "ordinal", "interval"):
        raise DomainError(f"unknown metric {metric!r}")
    units = [[v for v in row if not _missing(v)] for row in ratings]
    units = [u for u in units if len(u) >= 2]
    if len(units) < 2:
        raise InsufficientData("need at least two units with two or more ratings")
    values = sorted({v for u in units for v in u})
    index = {v: i for i, v in enumerate(values)}
    k = len(values)
    o = np.zeros((k, k))
    for u in units:
        m = len(u)
        for a, b in itertools.permutations(range(m), 2):
            o[index[u[a]], index[u[b]]] += 1.0 / (m - 1)
    nc = o.sum(axis=1)
    n = nc.sum()
    delta = np.zeros((k, k))
    for i in range(k):
        for j in range(k):
            if metric == "nominal":
                delta[i, j] = 0.0 if i == j else 1.0
            elif metric == "interval":
                delta[i, j] = (float(values[i]) - float(values[j])) ** 2
            else:
                lo, hi = min(i, j), max(i, j)
                delta[i, j] = (nc[lo:hi + 1].sum() - (nc[i] + nc[j]) / 2) ** 2
    observed = float((o * delta).sum())
    expected = float((np.outer(nc, nc) * delta).sum()) / (n - 1)
    if expected == 0:
        # A single category everywhere: nothing to disagree about.
        return 1.0
    return 1.0 - observed / expected


@dataclass(frozen=True)
class ComparisonResult:
    model_a: str
    model_b: str
    rate_a: RateEstimate
    rate_b: RateEstimate
    discordant_ab: int
    discordant_ba: int
    mcnemar_statistic: float
    mcnemar_p: float
    cohens_h: float
    tost: TostResult
    adjusted_p: float

    @property
    def tost_equivalent(self) -> bool:
        return self.tost.equivalent

    def as_dict(self) -> dict:
        return {
            "model_a": self.model_a,
            "model_b": self.model_b,
            "rate_a": self.rate_a.as_dict(),
            "rate_b": self.rate_b.as_dict(),
            "b": self.discordant_ab,
            "c": self.discordant_ba,
            "mcnemar_statistic": self.mcnemar_statistic,
            "mcnemar_p": self.mcnemar_p,
            "cohens_h": self.cohens_h,
            "tost_equivalent": self.tost.equivalent,
            "tost_p_lower": self.tost.p_lower,
            "tost_p_upper": self.tost.p_upper,
            "adjusted_p": self.adjusted_p,
        }


def pairwise_comparisons(
    verdicts: Mapping[str, Mapping[str, bool]],
    *,
    margin: float = 0.05,
    alpha: float = 0.05,
    confidence: float = 0.95,
    mcnemar_method: str = "corrected",
) -> list[ComparisonResult]:
    """Compare every pair of models over the tasks all of them were scored on.

    ``verdicts`` maps task id -> model -> pass/fail. McNemar p-values are
    Bonferroni-adjusted over the number of pairs.
    """
    models = sorted({m for row in verdicts.values() for m in row})
    if len(models) < 2:
        raise InsufficientData("need at least two models to compare")
    tasks = [t for t, row in verdicts.items() if all(m in row for m in models)]
    if not tasks:
        raise InsufficientData("no task was scored for every model")
    raw = []
    for a, b in itertools.combinations(models, 2):
        xa = [bool(verdicts[t][a]) for t in tasks]
        xb = [bool(verdicts[t][b]) for t in tasks]
        n = len(tasks)
        ra = rate_from_counts(sum(xa), n, confidence)
        rb = rate_from_counts(sum(xb), n, confidence)
        disc_ab = sum(1 for u, v in zip(xa, xb) if u and not v)
        disc_ba = sum(1 for u, v in zip(xa, xb) if v and not u)
        mc = mcnemar(disc_ab, disc_ba, mcnemar_method)
        h = cohens_h(ra.point, rb.point)
        tost = tost_two_proportions(ra.point, n, rb.point, n, margin, alpha)
        raw.append((a, b, ra, rb, disc_ab, disc_ba, mc, h, tost))
    adjusted = bonferroni([r[6].p for r in raw])
    return [
        ComparisonResult(a, b, ra, rb, dab, dba, mc.statistic, mc.p, h, tost, adj)
        for (a, b, ra, rb, dab, dba, mc, h, tost), adj in zip(raw, adjusted)
    ]
