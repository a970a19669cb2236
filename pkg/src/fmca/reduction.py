"""Root and mandatory-child reduction of the feature space.

The root (first core feature) and every feature equivalent to a
lower-indexed surviving feature are dropped before generation.  Survivors
are renumbered consecutively, constraints are rewritten onto the survivors,
and generated rows are expanded back afterwards.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .cnf import Clause, CnfFormula, Literal, deselected, feature_of, neg, pos, selected
from .sat import Assignment, solve
from .tsets import count_tsets


class VoidModelError(ValueError):
    """The constraints admit no product at all."""


class InconsistentConstraintsError(ValueError):
    pass


def root_test(cnf: CnfFormula, f: int) -> bool:
    return solve(cnf, [neg(selected(f))]) is None


def mandatory_child_test(cnf: CnfFormula, f1: int, f2: int) -> bool:
    if f1 == f2:
        raise ValueError("mandatory child test needs two different features")
    return (solve(cnf, [neg(selected(f1)), pos(selected(f2))]) is None
            and solve(cnf, [pos(selected(f1)), neg(selected(f2))]) is None)


@dataclass(frozen=True)
class ReductionSet:
    n: int
    root: int | None
    mandatories: dict[int, int] = field(default_factory=dict)  # child -> surviving representative

    @property
    def reduceable(self) -> frozenset[int]:
        out = set(self.mandatories)
        if self.root is not None:
            out.add(self.root)
        return frozenset(out)

    @property
    def m(self) -> int:
        return len(self.reduceable)

    @property
    def survivors(self) -> list[int]:
        red = self.reduceable
        return [i for i in range(self.n) if i not in red]


def find_mand_and_root(cnf: CnfFormula) -> ReductionSet:
    """Pick the root and group the remaining features into equivalence classes.

    Features are scanned in ascending order; each one joins the class of the
    first earlier representative it is equivalent to (core features join the
    root), otherwise it becomes a representative itself.  Known models rule
    out most pairs without a solver call.
    """
    n = cnf.num_features
    first = solve(cnf)
    if first is None:
        raise VoidModelError("the constraints are unsatisfiable; the product line is void")
    witnesses: list[Assignment] = [first]

    def differ(a: int, b: int) -> bool:
        return any(w.chosen[a] != w.chosen[b] for w in witnesses)

    def equivalent(a: int, b: int) -> bool:
        if differ(a, b):
            return False
        for lits in ([neg(selected(a)), pos(selected(b))], [pos(selected(a)), neg(selected(b))]):
            model = solve(cnf, lits)
            if model is not None:
                witnesses.append(model)
                return False
        return True

    root = None
    for f in range(n):
        if not first.chosen[f]:
            continue
        model = solve(cnf, [neg(selected(f))])
        if model is None:
            root = f
            break
        witnesses.append(model)

    mandatories: dict[int, int] = {}
    reps: list[int] = []
    for f in range(n):
        if f == root:
            continue
        if root is not None and equivalent(root, f):
            mandatories[f] = root
            continue
        for r in reps:
            if equivalent(r, f):
                mandatories[f] = r
                break
        else:
            reps.append(f)
    return ReductionSet(n, root, mandatories)


@dataclass(frozen=True)
class ValueMapping:
    n_old: int
    n_new: int
    old_to_new: tuple[int, ...]
    new_to_old: tuple[int, ...]  # covers 0..2*n_new-1 plus the root pair if there is a root

    def oldToNew(self, v: int) -> int:  # noqa: N802 - mirrors the algorithm's vocabulary
        return self.old_to_new[v]

    def newToOld(self, v: int) -> int:  # noqa: N802
        return self.new_to_old[v]

    @property
    def root_values(self) -> tuple[int, int]:
        return 2 * self.n_new, 2 * self.n_new + 1


def generate_mappings(rset: ReductionSet) -> ValueMapping:
    survivors = rset.survivors
    n_new = len(survivors)
    old_to_new = [-1] * (2 * rset.n)
    new_to_old = []
    for j, f in enumerate(survivors):
        old_to_new[selected(f)] = 2 * j
        old_to_new[deselected(f)] = 2 * j + 1
        new_to_old += [selected(f), deselected(f)]
    if rset.root is not None:
        old_to_new[selected(rset.root)] = 2 * n_new
        old_to_new[deselected(rset.root)] = 2 * n_new + 1
        new_to_old += [selected(rset.root), deselected(rset.root)]
    for child, parent in rset.mandatories.items():
        old_to_new[selected(child)] = old_to_new[selected(parent)]
        old_to_new[deselected(child)] = old_to_new[deselected(parent)]
    return ValueMapping(rset.n, n_new, tuple(old_to_new), tuple(new_to_old))


def adapt_constraints(cnf: CnfFormula, mapping: ValueMapping) -> CnfFormula:
    """Rewrite clauses onto the new values and resolve the (always selected) root."""
    root_on, root_off = mapping.root_values
    has_root = len(mapping.new_to_old) > 2 * mapping.n_new
    out: list[Clause] = []
    for clause in cnf.clauses:
        lits: list[Literal] = []
        satisfied = False
        for lit in clause:
            v = mapping.old_to_new[lit.value]
            if has_root and v in (root_on, root_off):
                if (v == root_on) != lit.negated:
                    satisfied = True
                    break
                continue
            lits.append(Literal(v, lit.negated))
        if satisfied:
            continue
        if not lits:
            raise InconsistentConstraintsError(f"clause {clause} is false once the root is selected")
        if _tautology(lits):
            continue
        new = Clause(lits)
        if new not in out:
            out.append(new)
    return CnfFormula(mapping.n_new, tuple(out))


def _tautology(lits: list[Literal]) -> bool:
    truths = set()
    for lit in lits:
        truths.add((feature_of(lit.value), (lit.value % 2 == 0) != lit.negated))
    if any((f, not on) in truths for f, on in truths):
        return True
    # -2f and -(2f+1) can never both be false
    negs = {lit.value for lit in lits if lit.negated}
    return any(v % 2 == 0 and v + 1 in negs for v in negs)


def expand_row(row, mapping: ValueMapping, rset: ReductionSet) -> list[int]:
    values = [mapping.new_to_old[v] for v in row]
    present = set(values)
    if rset.root is not None:
        values.append(selected(rset.root))
        present.add(selected(rset.root))
    for child, parent in sorted(rset.mandatories.items()):
        values.append(selected(child) if selected(parent) in present else deselected(child))
    return sorted(values)


def expand(rows, mapping: ValueMapping, rset: ReductionSet) -> list[list[int]]:
    return [expand_row(row, mapping, rset) for row in rows]


@dataclass
class ReductionReport:
    n: int
    m: int
    t: int
    reduceable: list[str]
    tsets_full: int
    tsets_reduced: int

    @property
    def reduction_percent(self) -> float:
        if self.tsets_full == 0:
            return 0.0
        return 100.0 * (self.tsets_full - self.tsets_reduced) / self.tsets_full

    def as_text(self) -> str:
        return "\n".join([
            f"features: {self.n}",
            f"reduceable: {self.m} ({', '.join(self.reduceable)})",
            f"t: {self.t}",
            f"t-sets full: {self.tsets_full}",
            f"t-sets reduced: {self.tsets_reduced}",
            f"reduction: {self.reduction_percent:.1f}%",
        ]) + "\n"

    def as_csv(self) -> str:
        head = "n,m,t,reduceable,tsets_full,tsets_reduced,reduction_percent"
        row = (f"{self.n},{self.m},{self.t},{' '.join(self.reduceable)},"
               f"{self.tsets_full},{self.tsets_reduced},{self.reduction_percent:.1f}")
        return head + "\n" + row + "\n"


def reduction_report(cnf: CnfFormula, t: int, names=None) -> ReductionReport:
    rset = find_mand_and_root(cnf)
    names = names or [f"f{i}" for i in range(cnf.num_features)]
    n, m = cnf.num_features, rset.m
    return ReductionReport(
        n, m, t, [names[i] for i in sorted(rset.reduceable)],
        count_tsets(n, min(t, n)), count_tsets(n - m, min(t, n - m)),
    )
