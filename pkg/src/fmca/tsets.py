"""t-sets, their validity, and coverage of covering arrays.

Two views live here.  :class:`TSet` and :func:`verify_coverage` are the plain,
readable definitions used for checking results.  :class:`TSetIndex` numbers
every t-set of a feature space densely (combination index times ``2**t`` plus
a polarity mask) so the search can keep coverage counts in flat arrays.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .cnf import CnfFormula, deselected, neg, pos, selected
from .sat import Assignment, solve


@dataclass(frozen=True)
class TSet:
    sel: frozenset[int] = frozenset()
    desel: frozenset[int] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "sel", frozenset(self.sel))
        object.__setattr__(self, "desel", frozenset(self.desel))
        if self.sel & self.desel:
            raise ValueError("a feature cannot be both selected and deselected")

    @property
    def t(self) -> int:
        return len(self.sel) + len(self.desel)

    @property
    def features(self) -> list[int]:
        return sorted(self.sel | self.desel)

    def items(self) -> list[tuple[int, bool]]:
        """Canonical form: ascending feature index with polarity (True = selected)."""
        return [(f, f in self.sel) for f in self.features]

    def values(self) -> list[int]:
        return [selected(f) if on else deselected(f) for f, on in self.items()]

    def literals(self):
        # "feature on" is +2f, "feature off" is -2f
        return [pos(selected(f)) if on else neg(selected(f)) for f, on in self.items()]

    def __str__(self) -> str:
        return f"[{{{', '.join(map(str, sorted(self.sel)))}}}, {{{', '.join(map(str, sorted(self.desel)))}}}]"


def count_tsets(n: int, t: int) -> int:
    if not 0 <= t <= n:
        raise ValueError(f"need 0 <= t <= n, got n={n}, t={t}")
    return math.comb(n, t) * 2 ** t


def enumerate_tsets(n: int, t: int, excluded: Iterable[int] = ()) -> Iterator[TSet]:
    """Combinations in lexicographic order, then polarity masks counting up.

    Mask bit ``t-1-j`` set means the ``j``-th feature of the combination is
    deselected, so every combination starts with its all-selected t-set.
    """
    excluded = set(excluded)
    pool = [i for i in range(n) if i not in excluded]
    for combo in itertools.combinations(pool, t):
        for mask in range(1 << t):
            sel = [f for j, f in enumerate(combo) if not mask >> (t - 1 - j) & 1]
            desel = [f for j, f in enumerate(combo) if mask >> (t - 1 - j) & 1]
            yield TSet(frozenset(sel), frozenset(desel))


def is_valid_tset(cnf: CnfFormula, ts: TSet) -> bool:
    return solve(cnf, ts.literals()) is not None


def covers(row, ts: TSet) -> bool:
    values = row if isinstance(row, (set, frozenset)) else set(row)
    return all(selected(f) in values for f in ts.sel) and all(deselected(f) in values for f in ts.desel)


class InvalidArrayError(ValueError):
    pass


@dataclass
class CoverageReport:
    covered: int
    total: int
    missing: list[TSet] = field(default_factory=list)
    missing_count: int = 0

    @property
    def percent(self) -> float:
        return 100.0 if self.total == 0 else 100.0 * self.covered / self.total

    @property
    def complete(self) -> bool:
        return self.covered == self.total


def _row_polarities(row, n: int) -> tuple[bool, ...]:
    values = set(row)
    if len(values) != n or any(not 0 <= v < 2 * n for v in values):
        raise InvalidArrayError(f"row {sorted(values)} is not a full row over {n} features")
    pol = []
    for i in range(n):
        on, off = selected(i) in values, deselected(i) in values
        if on == off:
            raise InvalidArrayError(f"row {sorted(values)} sets feature {i} {'twice' if on else 'not at all'}")
        pol.append(on)
    return tuple(pol)


def verify_coverage(rows: Sequence[Sequence[int]], cnf: CnfFormula, t: int,
                    excluded: Iterable[int] = (), missing_cap: int = 100) -> CoverageReport:
    """Count the valid t-sets (over non-excluded features) covered by ``rows``.

    Every row must satisfy ``cnf``.  A covered t-set is valid by definition, so
    the solver only runs on t-sets no row covers.
    """
    n = cnf.num_features
    excluded = set(excluded)
    pool = [i for i in range(n) if i not in excluded]
    t = min(t, len(pool))
    hit: set[tuple] = set()
    for row in rows:
        if not cnf.is_satisfied_by(row):
            raise InvalidArrayError(f"row {sorted(row)} violates the constraints")
        pol = _row_polarities(row, n)
        for combo in itertools.combinations(pool, t):
            hit.add(tuple((f, pol[f]) for f in combo))
    report = CoverageReport(0, 0)
    for ts in enumerate_tsets(n, t, excluded):
        key = tuple(ts.items())
        if key in hit:
            report.covered += 1
            report.total += 1
        elif is_valid_tset(cnf, ts):
            report.total += 1
            report.missing_count += 1
            if len(report.missing) < missing_cap:
                report.missing.append(ts)
    return report


class TSetIndex:
    """Dense numbering of all t-sets over features ``0..n-1`` plus their validity.

    Id of a t-set = ``combo_index * 2**t + mask`` with ``mask`` as in
    :func:`enumerate_tsets`.  Validity is settled with the solver, seeded by
    any witnesses at hand: every t-set a valid row covers is valid without a
    solver call.
    """

    def __init__(self, n: int, t: int):
        if not 0 <= t <= n:
            raise ValueError(f"need 0 <= t <= n, got n={n}, t={t}")
        self.n = n
        self.t = t
        combos = list(itertools.combinations(range(n), t))
        self.combos = np.array(combos, dtype=np.int32).reshape(len(combos), t)
        self.size = len(combos) << t
        self.weights = (1 << np.arange(t - 1, -1, -1)).astype(np.int64)
        self.valid: np.ndarray | None = None

    def ids_for_row(self, pol: np.ndarray) -> np.ndarray:
        """Ids of the t-sets covered by a row given as a 0/1 'selected' vector."""
        bits = 1 - np.asarray(pol, dtype=np.int64)[self.combos]
        masks = bits @ self.weights if self.t else np.zeros(len(self.combos), dtype=np.int64)
        return (np.arange(len(self.combos), dtype=np.int64) << self.t) + masks

    def tset(self, tid: int) -> TSet:
        combo = self.combos[tid >> self.t]
        mask = tid & ((1 << self.t) - 1)
        sel = [int(f) for j, f in enumerate(combo) if not mask >> (self.t - 1 - j) & 1]
        desel = [int(f) for j, f in enumerate(combo) if mask >> (self.t - 1 - j) & 1]
        return TSet(frozenset(sel), frozenset(desel))

    def compute_validity(self, cnf: CnfFormula, witnesses: Iterable[Assignment] = ()) -> np.ndarray:
        known = np.zeros(self.size, dtype=bool)
        valid = np.zeros(self.size, dtype=bool)
        for w in witnesses:
            ids = self.ids_for_row(np.array(w.chosen, dtype=np.int8))
            known[ids] = True
            valid[ids] = True
        for tid in np.flatnonzero(~known):
            if known[tid]:
                continue
            model = solve(cnf, self.tset(int(tid)).literals())
            if model is None:
                known[tid] = True
            else:
                ids = self.ids_for_row(np.array(model.chosen, dtype=np.int8))
                known[ids] = True
                valid[ids] = True
        self.valid = valid
        return valid

    def lower_bound(self) -> int:
        """Rows needed at minimum: each row covers one t-set per combination."""
        if self.valid is None:
            raise RuntimeError("validity not computed")
        if self.size == 0:
            return 1
        per_combo = self.valid.reshape(-1, 1 << self.t).sum(axis=1)
        return max(1, int(per_combo.max()))


class ArrayFormatError(ValueError):
    pass


@dataclass
class CoveringArray:
    t: int
    n: int
    rows: list[list[int]] = field(default_factory=list)
    complete: bool = True

    def __len__(self) -> int:
        return len(self.rows)

    def to_text(self) -> str:
        lines = [str(len(self.rows))]
        lines += [" ".join(str(v) for v in sorted(row)) for row in self.rows]
        return "\n".join(lines) + "\n"


def parse_array_file(text: str) -> list[list[int]]:
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if not lines:
        raise ArrayFormatError("array file is empty")
    try:
        count = int(lines[0])
        rows = [[int(v) for v in line.split()] for line in lines[1:]]
    except ValueError as exc:
        raise ArrayFormatError(str(exc)) from None
    if count != len(rows):
        raise ArrayFormatError(f"array file declares {count} rows but contains {len(rows)}")
    return rows
