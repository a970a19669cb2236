#!/usr/bin/env python3
"""Annealed array sizes next to the true minimum (0-1 ILP over all valid products)."""
import argparse
import itertools

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp

from fmca import fixture_names, fixture_path
from fmca.anneal import AnnealConfig
from fmca.cnf import encode_fm_to_cnf
from fmca.fm import load_feature_model
from fmca.pipeline import generate
from fmca.sat import enumerate_models


def minimum(models, n, t):
    combos = list(itertools.combinations(range(n), t))
    keys = {}
    cover = []
    for m in models:
        cover.append([keys.setdefault((c, tuple(m.chosen[f] for f in c)), len(keys)) for c in combos])
    a = np.zeros((len(keys), len(models)))
    for j, col in enumerate(cover):
        a[col, j] = 1
    res = milp(np.ones(len(models)), constraints=LinearConstraint(a, lb=1),
               integrality=np.ones(len(models)), bounds=Bounds(0, 1))
    return int(round(res.fun))


ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("--seeds", type=int, default=5)
args = ap.parse_args()

print(f"{'model':<10} t  opt  reduced        unreduced")
for name in fixture_names():
    cnf = encode_fm_to_cnf(load_feature_model(fixture_path(name)))
    models = enumerate_models(cnf)
    for t in (2, 3):
        sizes = {v: [len(generate(cnf, t, AnnealConfig(rng_seed=s), reduce=v).array) for s in range(args.seeds)]
                 for v in (True, False)}
        print(f"{name:<10} {t}  {minimum(models, cnf.num_features, t):>3}  "
              f"{str(sizes[True]):<14} {sizes[False]}")
