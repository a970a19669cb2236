"""Simulated annealing for constrained t-wise covering arrays.

An outer binary search on the number of rows brackets the answer between a
lower bound from the valid t-set universe and the size of a greedy cover.
For each probed size the inner search anneals an N x n matrix of feature
polarities.  Fitness is the number of uncovered valid t-sets plus
``penalty`` times the number of violated clauses summed over rows.

Moves: flip one feature in one row, or (with ``reseed_probability``) replace
that row by a fresh solver witness which takes the flipped value and
otherwise follows the current row wherever the constraints allow.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from numba import njit

from .cnf import CnfFormula, deselected, selected
from .reduction import VoidModelError
from .sat import Assignment, solve
from .tsets import CoveringArray, TSetIndex

log = logging.getLogger(__name__)


@dataclass
class AnnealConfig:
    initial_temperature: float = 0.5
    # temperature is multiplied by this after every `iterations_per_temperature` moves
    cooling_factor: float = 0.999999
    iterations_per_temperature: int = 1
    max_stagnation: int = 100_000
    max_iterations: int = 2_000_000
    rng_seed: int = 0
    reseed_probability: float = 0.1
    penalty: int = 10
    witness_pool: int = 64
    greedy_probes: int = 32

    def __post_init__(self):
        if not 0.0 < self.cooling_factor < 1.0:
            raise ValueError("cooling_factor must lie in (0, 1)")
        if self.initial_temperature <= 0:
            raise ValueError("initial_temperature must be positive")
        if self.iterations_per_temperature < 1 or self.max_stagnation < 1 or self.max_iterations < 0:
            raise ValueError("iteration counts must be positive")
        if not 0.0 <= self.reseed_probability <= 1.0:
            raise ValueError("reseed_probability must lie in [0, 1]")


@dataclass
class SearchState:
    rows: np.ndarray  # N x n, 1 = selected
    fitness: int
    uncovered: int
    violations: int
    iterations: int

    @property
    def solved(self) -> bool:
        return self.fitness == 0


# -- kernel ------------------------------------------------------------------


@njit(cache=True)
def _next_u64(state):
    x = state[0]
    x ^= x >> np.uint64(12)
    x ^= x << np.uint64(25)
    x ^= x >> np.uint64(27)
    state[0] = x
    return x * np.uint64(0x2545F4914F6CDD1D)


@njit(cache=True)
def _uniform(state):
    return float(_next_u64(state) >> np.uint64(11)) * (1.0 / 9007199254740992.0)


@njit(cache=True)
def _below(state, k):
    v = int(_uniform(state) * k)
    return v if v < k else k - 1


@njit(cache=True)
def _tset_id(row, combos, c, t):
    mask = 0
    for j in range(t):
        mask = (mask << 1) | (1 - row[combos[c, j]])
    return (c << t) | mask


@njit(cache=True)
def _row_sat(row, cl_ptr, cl_var, cl_on, sat_row):
    viol = 0
    for k in range(cl_ptr.shape[0] - 1):
        s = 0
        for q in range(cl_ptr[k], cl_ptr[k + 1]):
            if row[cl_var[q]] == cl_on[q]:
                s += 1
        sat_row[k] = s
        if s == 0:
            viol += 1
    return viol


@njit(cache=True)
def _propagate(head, tlen, val, trail, cl_ptr, cl_var, cl_on, vo_ptr, vo_clause, vo_on):
    # returns (trail length, no conflict)
    while head < tlen:
        v = trail[head]
        head += 1
        x = val[v]
        for q in range(vo_ptr[v], vo_ptr[v + 1]):
            if vo_on[q] == x:
                continue
            k = vo_clause[q]
            free = 0
            last = -1
            sat = False
            for p in range(cl_ptr[k], cl_ptr[k + 1]):
                u = cl_var[p]
                if val[u] < 0:
                    free += 1
                    last = p
                elif val[u] == cl_on[p]:
                    sat = True
                    break
            if sat:
                continue
            if free == 0:
                return tlen, False
            if free == 1:
                u = cl_var[last]
                val[u] = cl_on[last]
                trail[tlen] = u
                tlen += 1
    return tlen, True


@njit(cache=True)
def _witness(phase, force_var, force_val, val, trail, dpos, dflip,
             cl_ptr, cl_var, cl_on, vo_ptr, vo_clause, vo_on):
    """DPLL with ``force_var = force_val`` assumed, deciding in ascending order by ``phase``."""
    n = val.shape[0]
    for i in range(n):
        val[i] = -1
    tlen = 0
    for k in range(cl_ptr.shape[0] - 1):
        if cl_ptr[k + 1] - cl_ptr[k] == 1:
            u = cl_var[cl_ptr[k]]
            if val[u] < 0:
                val[u] = cl_on[cl_ptr[k]]
                trail[tlen] = u
                tlen += 1
            elif val[u] != cl_on[cl_ptr[k]]:
                return False
    if force_var >= 0:
        if val[force_var] < 0:
            val[force_var] = force_val
            trail[tlen] = force_var
            tlen += 1
        elif val[force_var] != force_val:
            return False
    tlen, ok = _propagate(0, tlen, val, trail, cl_ptr, cl_var, cl_on, vo_ptr, vo_clause, vo_on)
    if not ok:
        return False
    depth = 0
    while True:
        v = -1
        for i in range(n):
            if val[i] < 0:
                v = i
                break
        if v < 0:
            return True
        dpos[depth] = tlen
        dflip[depth] = False
        depth += 1
        val[v] = phase[v]
        trail[tlen] = v
        tlen += 1
        tlen, ok = _propagate(tlen - 1, tlen, val, trail, cl_ptr, cl_var, cl_on, vo_ptr, vo_clause, vo_on)
        while not ok:
            while depth > 0 and dflip[depth - 1]:
                depth -= 1
            if depth == 0:
                return False
            p = dpos[depth - 1]
            v = trail[p]  # the decision variable
            flipped = 1 - val[v]
            for i in range(p, tlen):
                val[trail[i]] = -1
            dflip[depth - 1] = True
            val[v] = flipped
            trail[p] = v
            tlen, ok = _propagate(p, p + 1, val, trail, cl_ptr, cl_var, cl_on, vo_ptr, vo_clause, vo_on)


@njit(cache=True)
def _accepts(delta, temperature, state):
    """Metropolis rule; draws a uniform only for worsening moves."""
    if delta <= 0:
        return True
    return _uniform(state) < np.exp(-delta / temperature)


@njit(cache=True)
def _anneal_kernel(rows, combos, t, valid, fc_ptr, fc_combo, fc_pos,
                   cl_ptr, cl_var, cl_on, vo_ptr, vo_clause, vo_on,
                   temperature, cooling, ipt, max_iter, max_stag, reseed_p, penalty, seed):
    n_rows, n = rows.shape
    n_combos = combos.shape[0]
    n_clauses = cl_ptr.shape[0] - 1
    state = np.empty(1, dtype=np.uint64)
    state[0] = np.uint64(seed) | np.uint64(1)

    counts = np.zeros(valid.shape[0], dtype=np.int32)
    for r in range(n_rows):
        for c in range(n_combos):
            counts[_tset_id(rows[r], combos, c, t)] += 1
    uncovered = 0
    for i in range(valid.shape[0]):
        if valid[i] and counts[i] == 0:
            uncovered += 1
    sat = np.zeros((n_rows, n_clauses), dtype=np.int32)
    rowviol = np.zeros(n_rows, dtype=np.int64)
    viol = 0
    for r in range(n_rows):
        rowviol[r] = _row_sat(rows[r], cl_ptr, cl_var, cl_on, sat[r])
        viol += rowviol[r]

    fitness = uncovered + penalty * viol
    best = fitness
    best_unc = uncovered
    best_viol = viol
    best_rows = rows.copy()
    cand = np.empty(n, dtype=np.int8)
    trail = np.empty(n, dtype=np.int64)
    dpos = np.empty(n + 1, dtype=np.int64)
    dflip = np.empty(n + 1, dtype=np.bool_)
    last_improve = 0
    it = 0
    while it < max_iter and fitness > 0 and it - last_improve < max_stag:
        r = _below(state, n_rows)
        if _uniform(state) < reseed_p:
            f = _below(state, n)
            if _witness(rows[r], f, 1 - rows[r, f], cand, trail, dpos, dflip,
                        cl_ptr, cl_var, cl_on, vo_ptr, vo_clause, vo_on):
                dcov = 0
                for c in range(n_combos):
                    a = _tset_id(rows[r], combos, c, t)
                    b = _tset_id(cand, combos, c, t)
                    if a != b:
                        if valid[a] and counts[a] == 1:
                            dcov += 1
                        if valid[b] and counts[b] == 0:
                            dcov -= 1
                delta = dcov - penalty * rowviol[r]
                if _accepts(delta, temperature, state):
                    for c in range(n_combos):
                        a = _tset_id(rows[r], combos, c, t)
                        b = _tset_id(cand, combos, c, t)
                        if a != b:
                            counts[a] -= 1
                            counts[b] += 1
                    rows[r, :] = cand
                    _row_sat(cand, cl_ptr, cl_var, cl_on, sat[r])
                    viol -= rowviol[r]
                    rowviol[r] = 0
                    uncovered += dcov
        else:
            f = _below(state, n)
            old = rows[r, f]
            dcov = 0
            for q in range(fc_ptr[f], fc_ptr[f + 1]):
                c = fc_combo[q]
                a = _tset_id(rows[r], combos, c, t)
                b = a ^ (1 << (t - 1 - fc_pos[q]))
                if valid[a] and counts[a] == 1:
                    dcov += 1
                if valid[b] and counts[b] == 0:
                    dcov -= 1
            dviol = 0
            for q in range(vo_ptr[f], vo_ptr[f + 1]):
                k = vo_clause[q]
                if old == vo_on[q]:
                    if sat[r, k] == 1:
                        dviol += 1
                elif sat[r, k] == 0:
                    dviol -= 1
            delta = dcov + penalty * dviol
            if _accepts(delta, temperature, state):
                for q in range(fc_ptr[f], fc_ptr[f + 1]):
                    c = fc_combo[q]
                    a = _tset_id(rows[r], combos, c, t)
                    counts[a] -= 1
                    counts[a ^ (1 << (t - 1 - fc_pos[q]))] += 1
                for q in range(vo_ptr[f], vo_ptr[f + 1]):
                    k = vo_clause[q]
                    if old == vo_on[q]:
                        sat[r, k] -= 1
                    else:
                        sat[r, k] += 1
                rows[r, f] = 1 - old
                rowviol[r] += dviol
                viol += dviol
                uncovered += dcov
        it += 1
        if it % ipt == 0:
            temperature *= cooling
        fitness = uncovered + penalty * viol
        if fitness < best:
            best = fitness
            best_unc = uncovered
            best_viol = viol
            best_rows[:, :] = rows
            last_improve = it
    return best, best_unc, best_viol, best_rows, it


# -- problem setup -----------------------------------------------------------


class CoveringProblem:
    """Everything the search needs about one (formula, strength) pair."""

    def __init__(self, cnf: CnfFormula, t: int):
        self.cnf = cnf
        self.n = n = cnf.num_features
        self.t = t = min(t, n)
        self.index = TSetIndex(n, t)

        fc: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for c, combo in enumerate(self.index.combos):
            for j, f in enumerate(combo):
                fc[f].append((c, j))
        self.fc_ptr = np.cumsum([0] + [len(x) for x in fc]).astype(np.int64)
        self.fc_combo = np.array([c for x in fc for c, _ in x], dtype=np.int64)
        self.fc_pos = np.array([j for x in fc for _, j in x], dtype=np.int64)

        clauses = cnf.var_clauses
        self.cl_ptr = np.cumsum([0] + [len(c) for c in clauses]).astype(np.int64)
        self.cl_var = np.array([abs(x) - 1 for c in clauses for x in c], dtype=np.int64)
        self.cl_on = np.array([1 if x > 0 else 0 for c in clauses for x in c], dtype=np.int8)
        vo: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for k, c in enumerate(clauses):
            for x in c:
                vo[abs(x) - 1].append((k, 1 if x > 0 else 0))
        self.vo_ptr = np.cumsum([0] + [len(x) for x in vo]).astype(np.int64)
        self.vo_clause = np.array([k for x in vo for k, _ in x], dtype=np.int64)
        self.vo_on = np.array([o for x in vo for _, o in x], dtype=np.int8)

        self.pool = np.zeros((0, n), dtype=np.int8)

    def sample_witnesses(self, rng: np.random.Generator, count: int) -> list[Assignment]:
        seen = {}
        for _ in range(count):
            phase = rng.random(self.n) < 0.5
            model = solve(self.cnf, phase=phase, pure_literals=False)
            if model is None:
                raise VoidModelError("the constraints are unsatisfiable; the product line is void")
            seen.setdefault(model.chosen, model)
        return list(seen.values())

    def prepare(self, rng: np.random.Generator, pool_size: int):
        witnesses = self.sample_witnesses(rng, max(1, pool_size))
        self.pool = np.array([w.chosen for w in witnesses], dtype=np.int8).reshape(len(witnesses), self.n)
        self.index.compute_validity(self.cnf, witnesses)

    @property
    def valid(self) -> np.ndarray:
        return self.index.valid

    def uncovered(self, rows: np.ndarray) -> np.ndarray:
        covered = np.zeros(self.index.size, dtype=bool)
        for row in rows:
            covered[self.index.ids_for_row(row)] = True
        return self.valid & ~covered


def greedy_cover(problem: CoveringProblem, rng: np.random.Generator, probes: int = 32) -> np.ndarray:
    """One pass of "take the best of ``probes`` witnesses" until every valid t-set is covered.

    Each probe is a witness forced through a randomly chosen uncovered t-set,
    so every step makes progress.
    """
    uncovered = problem.valid.copy()
    rows = []
    while True:
        open_ids = np.flatnonzero(uncovered)
        if open_ids.size == 0:
            break
        best_gain, best_row, best_ids = -1, None, None
        for _ in range(probes):
            tid = int(open_ids[rng.integers(open_ids.size)])
            phase = rng.random(problem.n) < 0.5
            model = solve(problem.cnf, problem.index.tset(tid).literals(), phase=phase, pure_literals=False)
            row = np.array(model.chosen, dtype=np.int8)
            ids = problem.index.ids_for_row(row)
            gain = int(uncovered[ids].sum())
            if gain > best_gain:
                best_gain, best_row, best_ids = gain, row, ids
        rows.append(best_row)
        uncovered[best_ids] = False
    if not rows:
        # the empty t-set still needs one product
        rows.append(problem.pool[0] if len(problem.pool) else np.zeros(problem.n, dtype=np.int8))
    return np.array(rows, dtype=np.int8).reshape(len(rows), problem.n)


def anneal_at_size(problem: CoveringProblem, n_rows: int, cfg: AnnealConfig,
                   rng: np.random.Generator, initial: np.ndarray | None = None) -> SearchState:
    if n_rows < 1:
        raise ValueError("need at least one row")
    if initial is None:
        pick = rng.choice(len(problem.pool), size=n_rows, replace=len(problem.pool) < n_rows)
        initial = problem.pool[pick]
    rows = np.array(initial, dtype=np.int8, copy=True).reshape(n_rows, problem.n)
    seed = int(rng.integers(1, 2 ** 63 - 1))
    best, unc, viol, best_rows, its = _anneal_kernel(
        rows, problem.index.combos, problem.t, problem.valid,
        problem.fc_ptr, problem.fc_combo, problem.fc_pos,
        problem.cl_ptr, problem.cl_var, problem.cl_on,
        problem.vo_ptr, problem.vo_clause, problem.vo_on,
        float(cfg.initial_temperature), float(cfg.cooling_factor), int(cfg.iterations_per_temperature),
        int(cfg.max_iterations), int(cfg.max_stagnation), float(cfg.reseed_probability),
        int(cfg.penalty), seed,
    )
    return SearchState(best_rows, int(best), int(unc), int(viol), int(its))


def outer_size_search(problem: CoveringProblem, cfg: AnnealConfig,
                      rng: np.random.Generator) -> tuple[np.ndarray, list[tuple[int, bool]]]:
    """Smallest row count the annealer solved, by binary search.

    Returns the rows and the probe log ``[(N, solved), ...]``.
    """
    best = greedy_cover(problem, rng, cfg.greedy_probes)
    hi = len(best)
    lo = min(problem.index.lower_bound(), hi)
    probes = []
    while lo < hi:
        mid = (lo + hi) // 2
        state = anneal_at_size(problem, mid, cfg, rng)
        probes.append((mid, state.solved))
        log.debug("N=%d fitness=%d after %d iterations", mid, state.fitness, state.iterations)
        if state.solved:
            hi = mid
            best = state.rows
        else:
            lo = mid + 1
    return best, probes


def _to_values(pol_row) -> list[int]:
    return [selected(i) if on else deselected(i) for i, on in enumerate(pol_row)]


def generate_covering_array(cnf: CnfFormula, t: int, cfg: AnnealConfig | None = None) -> CoveringArray:
    """A t-wise covering array of valid rows for ``cnf``, deterministic in ``cfg.rng_seed``.

    Strength is capped at the number of features.  ``complete`` is False only
    if the returned rows fail to cover the valid universe.
    """
    cfg = cfg or AnnealConfig()
    if t < 0:
        raise ValueError("strength must be non-negative")
    if solve(cnf) is None:
        raise VoidModelError("the constraints are unsatisfiable; the product line is void")
    rng = np.random.default_rng(cfg.rng_seed)
    problem = CoveringProblem(cnf, t)
    problem.prepare(rng, cfg.witness_pool)
    rows, _ = outer_size_search(problem, cfg, rng)
    out: list[list[int]] = []
    seen = set()
    for row in rows:
        key = tuple(int(x) for x in row)
        if key not in seen:
            seen.add(key)
            out.append(_to_values(key))
    complete = not problem.uncovered(np.array([list(k) for k in seen], dtype=np.int8).reshape(-1, cnf.num_features)).any()
    for values in out:
        if not cnf.is_satisfied_by(values):
            raise AssertionError(f"annealer produced an invalid row {values}")
    return CoveringArray(problem.t, cnf.num_features, out, complete)


def warmup():
    """Compile the kernel so that timed runs do not pay for it."""
    from .cnf import Clause, pos

    problem = CoveringProblem(CnfFormula(3, (Clause([pos(0)]),)), 2)
    rng = np.random.default_rng(0)
    problem.prepare(rng, 4)
    anneal_at_size(problem, 2, AnnealConfig(max_stagnation=50, max_iterations=200), rng)
