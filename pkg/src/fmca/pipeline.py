"""End-to-end generation: reduce, anneal on the reduced space, expand back."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .anneal import AnnealConfig, generate_covering_array
from .cnf import CnfFormula, encode_fm_to_cnf, parse_constraints_file, parse_model_file
from .fm import load_feature_model
from .reduction import (ReductionSet, ValueMapping, adapt_constraints, expand, find_mand_and_root,
                        generate_mappings)
from .tsets import CoveringArray


@dataclass
class Problem:
    cnf: CnfFormula
    names: list[str]
    t: int | None = None  # strength from a model file header, if any


def load_problem(path, constraints=None) -> Problem:
    """A feature model file, or a CASA model file plus its constraints file."""
    path = Path(path)
    if constraints is None:
        model = load_feature_model(path)
        return Problem(encode_fm_to_cnf(model), model.names)
    t, k, _ = parse_model_file(path.read_text())
    cnf = parse_constraints_file(Path(constraints).read_text(), k)
    return Problem(cnf, [f"f{i}" for i in range(k)], t)


@dataclass
class GenerationResult:
    array: CoveringArray
    reduced: bool
    rset: ReductionSet | None = None
    mapping: ValueMapping | None = None
    reduced_rows: list[list[int]] | None = None


def generate(cnf: CnfFormula, t: int, cfg: AnnealConfig | None = None, reduce: bool = True) -> GenerationResult:
    cfg = cfg or AnnealConfig()
    if not reduce:
        array = generate_covering_array(cnf, t, cfg)
        return GenerationResult(array, False)
    rset = find_mand_and_root(cnf)
    mapping = generate_mappings(rset)
    reduced_cnf = adapt_constraints(cnf, mapping)
    # below t surviving features, lower-strength coverage of the survivors is what
    # carries over to the full space
    inner = generate_covering_array(reduced_cnf, min(t, mapping.n_new), cfg)
    rows = expand(inner.rows, mapping, rset)
    for row in rows:
        if not cnf.is_satisfied_by(row):
            raise AssertionError(f"expanded row {row} violates the original constraints")
    array = CoveringArray(t, cnf.num_features, rows, inner.complete)
    return GenerationResult(array, True, rset, mapping, inner.rows)
