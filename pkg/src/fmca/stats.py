"""Wilcoxon rank-sum and signed-rank tests, one-sided, plus summary helpers.

Both tests answer "is the first sample smaller?".  The default normal
approximation uses averaged ranks for ties, the tie-corrected variance and
a 0.5 continuity correction.  ``method="exact"`` counts the permutation
distribution given the observed tie pattern instead.
"""
from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from typing import Sequence

from scipy.stats import norm

RANK_SUM_ALPHA = 0.05
SIGNED_RANK_ALPHA = 0.01


class StatsError(ValueError):
    pass


class NoInformationError(StatsError):
    """Every paired difference is zero."""


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float
    r_plus: float | None = None
    r_minus: float | None = None
    n: int = 0
    method: str = "approx"
    direction: str = "less"

    __test__ = False  # not a pytest test class

    def significant(self, alpha: float) -> bool:
        return self.p_value <= alpha


def rankdata(values: Sequence[float]) -> list[float]:
    """1-based ranks, ties get the mean of the ranks they span."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def _tie_sum(values) -> float:
    counts: dict = {}
    for v in values:
        counts[v] = counts.get(v, 0) + 1
    return sum(c ** 3 - c for c in counts.values())


def _subset_sum_counts(weights: list[int], k: int | None) -> dict:
    """Counts of subset sums (optionally of fixed size ``k``) over integer weights."""
    if k is None:
        dist = {0: 1}
        for w in weights:
            nxt = dict(dist)
            for s, c in dist.items():
                nxt[s + w] = nxt.get(s + w, 0) + c
            dist = nxt
        return dist
    table = [dict() for _ in range(k + 1)]
    table[0][0] = 1
    for w in weights:
        for size in range(k, 0, -1):
            prev = table[size - 1]
            cur = table[size]
            for s, c in prev.items():
                cur[s + w] = cur.get(s + w, 0) + c
    return table[k]


def _lower_tail(dist: dict, observed: int) -> float:
    total = sum(dist.values())
    return sum(c for s, c in dist.items() if s <= observed) / total


def wilcoxon_rank_sum(a: Sequence[float], b: Sequence[float], method: str = "approx") -> TestResult:
    """One-sided test of H1: values in ``a`` tend to be smaller than in ``b``.

    The statistic is the rank sum of ``a`` in the pooled sample.
    """
    a, b = list(a), list(b)
    n1, n2 = len(a), len(b)
    if n1 == 0 or n2 == 0:
        raise StatsError("both samples must be non-empty")
    ranks = rankdata(a + b)
    w = sum(ranks[:n1])
    if method == "exact":
        doubled = [round(2 * r) for r in ranks]
        dist = _subset_sum_counts(doubled, n1)
        return TestResult(w, min(1.0, _lower_tail(dist, round(2 * w))), n=n1 + n2, method="exact")
    if method != "approx":
        raise ValueError(f"unknown method {method!r}")
    if n1 < 5 or n2 < 5:
        raise StatsError(f"samples of size {n1} and {n2} are too small for the normal approximation; "
                         "use method='exact'")
    n = n1 + n2
    mean = n1 * (n + 1) / 2
    var = n1 * n2 / 12 * ((n + 1) - _tie_sum(a + b) / (n * (n - 1)))
    if var <= 0:
        return TestResult(w, 1.0, n=n)
    z = (w - mean + 0.5) / math.sqrt(var)
    return TestResult(w, float(min(1.0, norm.cdf(z))), n=n)


def wilcoxon_signed_rank(pairs: Sequence[tuple[float, float]], method: str = "approx") -> TestResult:
    """One-sided paired test of H1: the first element of each pair tends to be smaller.

    Differences are ``x - y``; zeros are dropped.  The statistic is R+.
    """
    diffs = [x - y for x, y in pairs if x != y]
    if not diffs:
        raise NoInformationError("all paired differences are zero")
    ranks = rankdata([abs(d) for d in diffs])
    r_plus = float(sum(r for r, d in zip(ranks, diffs) if d > 0))
    r_minus = float(sum(r for r, d in zip(ranks, diffs) if d < 0))
    n = len(diffs)
    if method == "exact":
        dist = _subset_sum_counts([round(2 * r) for r in ranks], None)
        p = _lower_tail(dist, round(2 * r_plus))
        return TestResult(r_plus, min(1.0, p), r_plus, r_minus, n, "exact")
    if method != "approx":
        raise ValueError(f"unknown method {method!r}")
    if n < 6:
        raise StatsError(f"{n} non-zero differences are too few for the normal approximation; "
                         "use method='exact'")
    mean = n * (n + 1) / 4
    var = n * (n + 1) * (2 * n + 1) / 24 - _tie_sum([abs(d) for d in diffs]) / 48
    z = (r_plus - mean + 0.5) / math.sqrt(var)
    return TestResult(r_plus, float(min(1.0, norm.cdf(z))), r_plus, r_minus, n)


def median(values: Sequence[float]) -> float:
    if not values:
        raise StatsError("median of an empty sample")
    return float(statistics.median(values))


def speedup_percent(adapted_median: float, original_median: float) -> float:
    if original_median <= 0 or adapted_median <= 0:
        raise StatsError("medians must be positive")
    return (original_median - adapted_median) / original_median * 100.0
