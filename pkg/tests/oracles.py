"""Slow, obviously-correct reference implementations used only by the tests.

Nothing here shares code with the library beyond data types: product
enumeration walks every subset of features against the tree semantics,
validity of a t-set is "some valid product covers it", and the exact
Wilcoxon distributions enumerate every rank split / sign vector.
"""
from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp


def valid_products(fm) -> list[tuple[bool, ...]]:
    """All selections (as per-feature booleans) the feature model accepts."""
    out = []
    for bits in itertools.product((False, True), repeat=fm.n):
        chosen = {i for i, b in enumerate(bits) if b}
        if fm.is_valid_product(chosen):
            out.append(bits)
    return out


def truth_table_models(num_features, clauses) -> list[tuple[bool, ...]]:
    """Assignments satisfying every clause, by exhaustive enumeration.

    Clauses are lists of (value, negated) pairs in the value encoding.
    """
    out = []
    for bits in itertools.product((False, True), repeat=num_features):
        values = {2 * i if b else 2 * i + 1 for i, b in enumerate(bits)}
        if all(any((v in values) != neg for v, neg in cl) for cl in clauses):
            out.append(bits)
    return out


def tset_universe(products, n, t, excluded=()) -> set[tuple]:
    """Valid t-sets as sorted ((feature, selected), ...) tuples."""
    pool = [i for i in range(n) if i not in set(excluded)]
    t = min(t, len(pool))
    out = set()
    for p in products:
        for combo in itertools.combinations(pool, t):
            out.add(tuple((f, p[f]) for f in combo))
    return out


def covered_by_rows(rows, n, t) -> set[tuple]:
    pols = [tuple(2 * i in set(r) for i in range(n)) for r in rows]
    return tset_universe(pols, n, t)


def minimal_array_size(products, n, t) -> int:
    """Fewest products that together cover every valid t-set (0-1 ILP)."""
    t = min(t, n)
    combos = list(itertools.combinations(range(n), t))
    keys = {}
    cols = []
    for p in products:
        col = []
        for c in combos:
            key = (c, tuple(p[f] for f in c))
            col.append(keys.setdefault(key, len(keys)))
        cols.append(col)
    a = np.zeros((len(keys), len(products)))
    for j, col in enumerate(cols):
        a[col, j] = 1
    res = milp(np.ones(len(products)), constraints=LinearConstraint(a, lb=1),
               integrality=np.ones(len(products)), bounds=Bounds(0, 1))
    return int(round(res.fun))


def _avg_ranks(values):
    srt = sorted(values)
    first = {}
    last = {}
    for i, v in enumerate(srt, 1):
        first.setdefault(v, i)
        last[v] = i
    return [Fraction(first[v] + last[v], 2) for v in values]


def exact_rank_sum_p(a, b) -> float:
    """P(W <= observed) over every way of choosing which pooled positions belong to ``a``."""
    pooled = list(a) + list(b)
    ranks = _avg_ranks(pooled)
    observed = sum(ranks[: len(a)])
    hits = total = 0
    for idx in itertools.combinations(range(len(pooled)), len(a)):
        total += 1
        if sum(ranks[i] for i in idx) <= observed:
            hits += 1
    return hits / total


def exact_signed_rank_p(pairs) -> float:
    """P(R+ <= observed) over all 2**n sign vectors of the non-zero differences."""
    d = [x - y for x, y in pairs if x != y]
    ranks = _avg_ranks([abs(v) for v in d])
    observed = sum(r for r, v in zip(ranks, d) if v > 0)
    hits = 0
    for signs in itertools.product((0, 1), repeat=len(d)):
        if sum(r for r, s in zip(ranks, signs) if s) <= observed:
            hits += 1
    return hits / 2 ** len(d)


def mann_whitney_null_counts(n1: int, n2: int) -> list[int]:
    """Number of arrangements with U = u, untied data, by the classical recurrence.

    f(n1, n2, u) = f(n1 - 1, n2, u - n2) + f(n1, n2 - 1, u).
    """
    memo = {}

    def f(i, j, u):
        if u < 0:
            return 0
        if i == 0 or j == 0:
            return 1 if u == 0 else 0
        key = (i, j, u)
        if key not in memo:
            memo[key] = f(i - 1, j, u - j) + f(i, j - 1, u)
        return memo[key]

    return [f(n1, n2, u) for u in range(n1 * n2 + 1)]
