#!/usr/bin/env python3
"""Paired reduced/unreduced runs over the bundled models, CSVs written to --out."""
import argparse
import logging

from fmca import fixture_names, fixture_path
from fmca.anneal import AnnealConfig
from fmca.bench import run_bench, summarize, write_report

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("--models", nargs="*", default=fixture_names())
ap.add_argument("--runs", type=int, default=30)
ap.add_argument("--seed-base", type=int, default=0)
ap.add_argument("--strength", type=int, default=3)
ap.add_argument("--workers", type=int, default=1)
ap.add_argument("--out", default="results/bench")
args = ap.parse_args()
logging.basicConfig(level=logging.INFO, format="%(message)s")

runs = run_bench([fixture_path(m) for m in args.models], args.runs, args.seed_base, args.strength,
                 AnnealConfig(), args.workers,
                 progress=lambda r: logging.info("%-10s %-9s seed=%-3d %8.1f ms %3d rows",
                                                 r.model, r.variant, r.seed, r.elapsed_ms, r.rows))
report = summarize(runs)
for path in write_report(report, runs, args.out):
    print("wrote", path)
print(f"{'model':<10} {'m':>2} {'red%':>6} {'ms red':>9} {'ms full':>9} {'speedup':>8} {'p':>9} {'rows':>9}")
for s in report.models:
    print(f"{s.model:<10} {s.m:>2} {s.tset_reduction_percent:>6.1f} {s.median_ms_reduced:>9.1f} "
          f"{s.median_ms_unreduced:>9.1f} {s.speedup_percent:>7.1f}% {s.rank_sum_p:>9.2g} "
          f"{s.median_rows_reduced:>4g}/{s.median_rows_unreduced:<4g}")
for label, res, note in (("times", report.time_test, report.time_note), ("sizes", report.size_test, report.size_note)):
    if res:
        print(f"signed-rank over median {label}: R+={res.r_plus} R-={res.r_minus} p={res.p_value:.3g} ({res.method})")
    else:
        print(f"signed-rank over median {label}: {note}")
