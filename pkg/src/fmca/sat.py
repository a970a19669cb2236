"""DPLL satisfiability over :class:`~fmca.cnf.CnfFormula`.

Each feature is one boolean variable; the selected/deselected value pair of
the external interface is folded into it, which makes the structural
exclusion/totality clauses vanish.  Decisions go in ascending feature order,
trying "selected" first unless a phase vector says otherwise.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .cnf import CnfFormula, Literal, deselected, selected


class ModelLimitExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Assignment:
    """A total selected/deselected choice for every feature."""

    chosen: tuple[bool, ...]

    @property
    def n(self) -> int:
        return len(self.chosen)

    @property
    def sel(self) -> frozenset[int]:
        return frozenset(i for i, on in enumerate(self.chosen) if on)

    @property
    def desel(self) -> frozenset[int]:
        return frozenset(i for i, on in enumerate(self.chosen) if not on)

    def values(self) -> list[int]:
        return [selected(i) if on else deselected(i) for i, on in enumerate(self.chosen)]

    @classmethod
    def from_values(cls, values, n: int) -> "Assignment":
        vs = set(values)
        return cls(tuple(selected(i) in vs for i in range(n)))


class _Search:
    def __init__(self, nvars: int, clauses: Sequence[tuple[int, ...]]):
        self.nvars = nvars
        self.clauses = clauses
        self.occurs: dict[int, list[int]] = {}
        for ci, clause in enumerate(clauses):
            for lit in clause:
                self.occurs.setdefault(lit, []).append(ci)
        self.val = [0] * (nvars + 1)  # 1 true, -1 false, 0 free; index 0 unused
        self.trail: list[int] = []

    def assign(self, lit: int) -> bool:
        var = abs(lit)
        want = 1 if lit > 0 else -1
        cur = self.val[var]
        if cur:
            return cur == want
        self.val[var] = want
        self.trail.append(var)
        return True

    def undo(self, mark: int):
        val, trail = self.val, self.trail
        while len(trail) > mark:
            val[trail.pop()] = 0

    def propagate(self, start: int) -> bool:
        val, trail, clauses, occurs = self.val, self.trail, self.clauses, self.occurs
        i = start
        while i < len(trail):
            var = trail[i]
            i += 1
            false_lit = -var if val[var] == 1 else var
            for ci in occurs.get(false_lit, ()):
                free = 0
                last = 0
                for lit in clauses[ci]:
                    v = val[lit if lit > 0 else -lit]
                    if v == 0:
                        free += 1
                        last = lit
                    elif (v == 1) == (lit > 0):
                        break
                else:
                    if free == 0:
                        return False
                    if free == 1:
                        val[abs(last)] = 1 if last > 0 else -1
                        trail.append(abs(last))
        return True

    def start(self, assumptions: Sequence[int]) -> bool:
        for clause in self.clauses:
            if not clause:
                return False
            if len(clause) == 1 and not self.assign(clause[0]):
                return False
        for lit in assumptions:
            if not self.assign(lit):
                return False
        return self.propagate(0)

    def open_clauses(self):
        val = self.val
        for clause in self.clauses:
            for lit in clause:
                v = val[abs(lit)]
                if v and (v == 1) == (lit > 0):
                    break
            else:
                yield clause

    def pure_literals(self):
        while True:
            seen: dict[int, int] = {}
            for clause in self.open_clauses():
                for lit in clause:
                    if self.val[abs(lit)] == 0:
                        seen[abs(lit)] = seen.get(abs(lit), 0) | (1 if lit > 0 else 2)
            pure = [var if mask == 1 else -var for var, mask in seen.items() if mask != 3]
            if not pure:
                return
            for lit in pure:
                self.assign(lit)

    def branch_var(self) -> int:
        best = 0
        val = self.val
        for clause in self.open_clauses():
            for lit in clause:
                var = abs(lit)
                if val[var] == 0 and (best == 0 or var < best):
                    best = var
        return best

    def solve(self, phase, pure: bool) -> bool:
        if pure:
            self.pure_literals()
        var = self.branch_var()
        if var == 0:
            return True
        first = 1 if phase is None or phase[var - 1] else -1
        for sign in (first, -first):
            mark = len(self.trail)
            self.assign(sign * var)
            if self.propagate(mark) and self.solve(phase, pure):
                return True
            self.undo(mark)
        return False

    def enumerate(self, out: list, cap: int, var: int = 1):
        # every variable is branched on, so each leaf is one distinct model
        if var > self.nvars:
            if any(True for _ in self.open_clauses()):
                return
            out.append(Assignment(tuple(self.val[v] == 1 for v in range(1, self.nvars + 1))))
            if len(out) > cap:
                raise ModelLimitExceeded(f"more than {cap} models")
            return
        if self.val[var]:
            self.enumerate(out, cap, var + 1)
            return
        for sign in (1, -1):
            mark = len(self.trail)
            self.assign(sign * var)
            if self.propagate(mark):
                self.enumerate(out, cap, var + 1)
            self.undo(mark)


def _assumption_lits(assumptions) -> list[int]:
    out = []
    for lit in assumptions:
        var, on = Literal(*lit).as_var()
        out.append(var + 1 if on else -(var + 1))
    return out


def solve(cnf: CnfFormula, assumptions=(), phase: Sequence[bool] | None = None,
          pure_literals: bool = True) -> Assignment | None:
    """Return a model of ``cnf`` under ``assumptions`` or None when unsatisfiable.

    ``phase[i]`` picks which polarity of feature ``i`` is tried first.  Pure-literal
    elimination forces one-sided variables; switch it off when sampling diverse
    witnesses.
    """
    n = cnf.num_features
    for lit in assumptions:
        if not 0 <= Literal(*lit).value < 2 * n:
            raise ValueError(f"assumption {lit} out of range")
    search = _Search(n, cnf.var_clauses)
    if not search.start(_assumption_lits(assumptions)):
        return None
    if not search.solve(phase, pure_literals):
        return None
    val = search.val
    chosen = tuple(val[v] == 1 if val[v] else (phase is None or bool(phase[v - 1])) for v in range(1, n + 1))
    return Assignment(chosen)


def enumerate_models(cnf: CnfFormula, cap: int = 1 << 16) -> list[Assignment]:
    """All models of ``cnf``; raises :class:`ModelLimitExceeded` past ``cap``."""
    if cap < 1:
        raise ValueError("cap must be at least 1")
    search = _Search(cnf.num_features, cnf.var_clauses)
    out: list[Assignment] = []
    if search.start(()):
        search.enumerate(out, cap)
    return out


def satisfies(cnf: CnfFormula, assignment: Assignment) -> bool:
    return cnf.is_satisfied_by(assignment.values())
