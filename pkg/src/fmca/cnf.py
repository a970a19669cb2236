"""CNF over CASA-style values and the two-file model/constraints format.

Feature ``i`` selected is value ``2*i``, deselected is ``2*i + 1``.  A literal
is a value plus a negation flag, so ``-18`` reads "value 18 does not hold".
Every formula implicitly carries, for each feature, the exclusion clause
``-2i -(2i+1)`` and the totality clause ``+2i +(2i+1)``; those are generated,
never written to files.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple

from . import fm as fmod

MAX_CTC_LITERALS = 16


def selected(i: int) -> int:
    return 2 * i


def deselected(i: int) -> int:
    return 2 * i + 1


def feature_of(value: int) -> int:
    return value // 2


class Literal(NamedTuple):
    value: int
    negated: bool = False

    def __str__(self) -> str:
        return ("-" if self.negated else "+") + str(self.value)

    def holds(self, values) -> bool:
        return (self.value in values) != self.negated

    def as_var(self) -> tuple[int, bool]:
        """(feature, wants_selected) after folding away the value parity."""
        return feature_of(self.value), (self.value % 2 == 0) != self.negated


def pos(value: int) -> Literal:
    return Literal(value, False)


def neg(value: int) -> Literal:
    return Literal(value, True)


@dataclass(frozen=True)
class Clause:
    literals: tuple[Literal, ...]

    def __init__(self, literals: Iterable[Literal]):
        seen = []
        for lit in literals:
            lit = Literal(*lit)
            if lit not in seen:
                seen.append(lit)
        if not seen:
            raise ValueError("a clause needs at least one literal")
        object.__setattr__(self, "literals", tuple(seen))

    def __iter__(self):
        return iter(self.literals)

    def __len__(self):
        return len(self.literals)

    def __str__(self) -> str:
        return " ".join(str(lit) for lit in self.literals)

    def canonical(self) -> "Clause":
        return Clause(sorted(self.literals))

    def holds(self, values) -> bool:
        return any(lit.holds(values) for lit in self.literals)


@dataclass(frozen=True)
class CnfFormula:
    num_features: int
    clauses: tuple[Clause, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(self.clauses))
        limit = 2 * self.num_features
        for clause in self.clauses:
            for lit in clause:
                if not 0 <= lit.value < limit:
                    raise ValueError(f"literal {lit} out of range for {self.num_features} features")

    def structural_clauses(self) -> list[Clause]:
        out = []
        for i in range(self.num_features):
            out.append(Clause([neg(selected(i)), neg(deselected(i))]))
            out.append(Clause([pos(selected(i)), pos(deselected(i))]))
        return out

    def all_clauses(self) -> list[Clause]:
        return self.structural_clauses() + list(self.clauses)

    def with_clauses(self, extra: Iterable[Clause]) -> "CnfFormula":
        return CnfFormula(self.num_features, self.clauses + tuple(extra))

    @cached_property
    def var_clauses(self) -> tuple[tuple[int, ...], ...]:
        """Explicit clauses as signed 1-based boolean literals (``+(i+1)`` = feature i on).

        Structural clauses vanish in this view; tautologies and duplicates are dropped.
        """
        out = []
        seen = set()
        for clause in self.clauses:
            lits = set()
            for lit in clause:
                var, on = lit.as_var()
                lits.add(var + 1 if on else -(var + 1))
            if any(-x in lits for x in lits):
                continue
            key = tuple(sorted(lits, key=lambda x: (abs(x), x)))
            if key not in seen:
                seen.add(key)
                out.append(key)
        return tuple(out)

    def is_satisfied_by(self, values) -> bool:
        values = set(values)
        for i in range(self.num_features):
            if (selected(i) in values) == (deselected(i) in values):
                return False
        return all(c.holds(values) for c in self.clauses)

    def violated(self, values) -> list[Clause]:
        values = set(values)
        return [c for c in self.all_clauses() if not c.holds(values)]


# -- feature model encoding --------------------------------------------------


def _nnf_cnf(expr, negate: bool = False) -> list[frozenset[tuple[int, bool]]]:
    """CNF of ``expr`` (or its negation) by plain distribution, as sets of (feature, on)."""
    if isinstance(expr, fmod.Var):
        return [frozenset({(expr.index, not negate)})]
    if isinstance(expr, fmod.Not):
        return _nnf_cnf(expr.arg, not negate)
    if isinstance(expr, fmod.Implies):
        expr = fmod.Or(fmod.Not(expr.left), expr.right)
    conj = isinstance(expr, fmod.And) != negate
    left = _nnf_cnf(expr.left, negate)
    right = _nnf_cnf(expr.right, negate)
    if conj:
        return left + right
    return [a | b for a in left for b in right]


def ctc_to_clauses(expr) -> list[Clause]:
    n_lits = len(fmod.variables(expr))
    if n_lits > MAX_CTC_LITERALS:
        raise ValueError(f"constraint has {n_lits} literals, limit is {MAX_CTC_LITERALS}")
    out = []
    for lits in _nnf_cnf(expr):
        if any((f, not on) in lits for f, on in lits):
            continue
        clause = Clause(
            pos(selected(f)) if on else neg(selected(f)) for f, on in sorted(lits, key=lambda x: (x[0], not x[1]))
        )
        if clause not in out:
            out.append(clause)
    return out


def encode_fm_to_cnf(model: fmod.FeatureModel) -> CnfFormula:
    clauses: list[Clause] = []

    def add(clause: Clause):
        if clause not in clauses:
            clauses.append(clause)

    if model.features:
        add(Clause([pos(selected(model.root))]))
    for f in model.features:
        if f.parent is not None:
            add(Clause([neg(selected(f.index)), pos(selected(f.parent))]))
            if f.kind == fmod.MANDATORY:
                add(Clause([neg(selected(f.parent)), pos(selected(f.index))]))
        if f.group is not None:
            members = model.children(f.index)
            add(Clause([neg(selected(f.index))] + [pos(selected(m)) for m in members]))
            if f.group == "xor":
                for a in range(len(members)):
                    for b in range(a + 1, len(members)):
                        add(Clause([neg(selected(members[a])), neg(selected(members[b]))]))
    for ctc in model.ctcs:
        for clause in ctc_to_clauses(ctc):
            add(clause)
    return CnfFormula(model.n, tuple(clauses))


# -- CASA files --------------------------------------------------------------


class FormatError(ValueError):
    pass


def _content_lines(text: str) -> list[str]:
    return [line.strip() for line in text.splitlines() if line.strip()]


def parse_model_file(text: str) -> tuple[int, int, list[int]]:
    lines = _content_lines(text)
    if len(lines) != 3:
        raise FormatError(f"model file needs exactly 3 lines (strength, features, levels), got {len(lines)}")
    try:
        t = int(lines[0])
        k = int(lines[1])
        levels = [int(x) for x in lines[2].split()]
    except ValueError as exc:
        raise FormatError(f"model file: {exc}") from None
    if k < 0 or t < 0:
        raise FormatError("strength and feature count must be non-negative")
    if len(levels) != k:
        raise FormatError(f"model file declares {k} features but lists {len(levels)} levels")
    for col, lv in enumerate(levels):
        if lv != 2:
            raise FormatError(
                f"column {col} has {lv} levels; feature models only allow 2 (selected / deselected)")
    if t > k:
        raise FormatError(f"strength {t} exceeds the number of features {k}")
    return t, k, levels


def write_model_file(t: int, k: int) -> str:
    return f"{t}\n{k}\n{' '.join(['2'] * k)}\n"


def _parse_term(tok: str) -> Literal:
    if len(tok) < 2 or tok[0] not in "+-" or not tok[1:].isdigit():
        raise FormatError(f"bad literal {tok!r}; expected +v or -v")
    return Literal(int(tok[1:]), tok[0] == "-")


def parse_constraints_file(text: str, num_features: int) -> CnfFormula:
    lines = _content_lines(text)
    if not lines:
        raise FormatError("constraints file is empty; expected a clause count")
    try:
        count = int(lines[0])
    except ValueError:
        raise FormatError(f"bad clause count {lines[0]!r}") from None
    body = lines[1:]
    if len(body) != count:
        raise FormatError(f"constraints file declares {count} clauses but contains {len(body)}")
    clauses = []
    for line in body:
        # "- 14 - 16" and "-14 -16" are both accepted
        toks = line.replace("+ ", "+").replace("- ", "-").split()
        lits = [_parse_term(tok) for tok in toks]
        for lit in lits:
            if lit.value >= 2 * num_features:
                raise FormatError(f"value {lit.value} out of range for {num_features} features")
        clauses.append(Clause(lits))
    return CnfFormula(num_features, tuple(clauses))


def write_constraints_file(cnf: CnfFormula) -> str:
    lines = [str(len(cnf.clauses))]
    lines += [str(c.canonical()) for c in cnf.clauses]
    return "\n".join(lines) + "\n"
