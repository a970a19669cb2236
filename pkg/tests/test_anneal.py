import numpy as np
import pytest

from fmca.anneal import (AnnealConfig, CoveringProblem, _accepts, anneal_at_size, generate_covering_array,
                         greedy_cover, outer_size_search)
from fmca.cnf import Clause, CnfFormula, neg, pos
from fmca.reduction import VoidModelError, adapt_constraints, find_mand_and_root, generate_mappings
from fmca.sat import enumerate_models
from fmca.tsets import verify_coverage

from oracles import minimal_array_size


@pytest.fixture(scope="module")
def reduced_aircraft(aircraft_cnf):
    return adapt_constraints(aircraft_cnf, generate_mappings(find_mand_and_root(aircraft_cnf)))


@pytest.mark.parametrize("kw", [dict(cooling_factor=1.0), dict(cooling_factor=0.0), dict(initial_temperature=0),
                                dict(max_stagnation=0), dict(reseed_probability=1.5)])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        AnnealConfig(**kw)


def test_acceptance_rule():
    state = np.array([12345], dtype=np.uint64)
    assert all(_accepts(-3, 1e-9, state) for _ in range(100))
    assert _accepts(0, 1e-9, state)
    assert not any(_accepts(1, 1e-6, state) for _ in range(1000))
    hot = sum(_accepts(1, 1e6, state) for _ in range(1000))
    assert hot > 990


def test_single_feature():
    free = generate_covering_array(CnfFormula(1), 1)
    assert sorted(map(tuple, free.rows)) == [(0,), (1,)]
    core = generate_covering_array(CnfFormula(1, (Clause([pos(0)]),)), 1)
    assert core.rows == [[0]]


def test_one_row_when_everything_is_core():
    cnf = CnfFormula(3, tuple(Clause([pos(2 * i)]) for i in range(3)))
    assert len(generate_covering_array(cnf, 1)) == 1


def test_unsatisfiable():
    with pytest.raises(VoidModelError):
        generate_covering_array(CnfFormula(1, (Clause([pos(0)]), Clause([neg(0)]))), 1)


def test_solved_state_returns_immediately(reduced_aircraft):
    problem = CoveringProblem(reduced_aircraft, 2)
    rng = np.random.default_rng(0)
    problem.prepare(rng, 16)
    rows = np.array([m.chosen for m in enumerate_models(reduced_aircraft)], dtype=np.int8)
    state = anneal_at_size(problem, len(rows), AnnealConfig(), rng, initial=rows)
    assert state.solved and state.iterations == 0


def test_greedy_and_outer_search(reduced_aircraft):
    problem = CoveringProblem(reduced_aircraft, 3)
    rng = np.random.default_rng(3)
    problem.prepare(rng, 32)
    greedy = greedy_cover(problem, rng)
    assert not problem.uncovered(greedy).any()
    rows, probes = outer_size_search(problem, AnnealConfig(rng_seed=3), rng)
    assert len(rows) <= len(greedy)
    assert not problem.uncovered(rows).any()
    assert all(n < len(rows) for n, ok in probes if not ok)
    assert any(ok and n == len(rows) for n, ok in probes) or len(rows) == len(greedy)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_reduced_aircraft_pairwise_is_minimal(reduced_aircraft, seed):
    products = [m.chosen for m in enumerate_models(reduced_aircraft)]
    best = minimal_array_size(products, reduced_aircraft.num_features, 2)
    arr = generate_covering_array(reduced_aircraft, 2, AnnealConfig(rng_seed=seed))
    assert arr.complete
    assert verify_coverage(arr.rows, reduced_aircraft, 2).complete
    assert len(arr) == best


def test_deterministic(aircraft_cnf):
    a = generate_covering_array(aircraft_cnf, 2, AnnealConfig(rng_seed=11))
    b = generate_covering_array(aircraft_cnf, 2, AnnealConfig(rng_seed=11))
    assert a.to_text() == b.to_text()


def test_rows_valid_and_complete(cnfs):
    for name, cnf in cnfs.items():
        arr = generate_covering_array(cnf, 2, AnnealConfig(rng_seed=5))
        assert all(cnf.is_satisfied_by(r) for r in arr.rows), name
        assert arr.complete and verify_coverage(arr.rows, cnf, 2).complete, name


def test_undersized_probe_fails(aircraft_cnf):
    # 2 rows cannot cover the 3-wise universe; the budget ends the search
    problem = CoveringProblem(aircraft_cnf, 3)
    rng = np.random.default_rng(0)
    problem.prepare(rng, 8)
    state = anneal_at_size(problem, 2, AnnealConfig(max_iterations=500), rng)
    assert not state.solved and state.iterations <= 500
    assert state.fitness == state.uncovered + 10 * state.violations
