"""Command line front-end: ``fmca generate|convert|verify|reduce|bench|stats``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .anneal import AnnealConfig
from .bench import CoverageFailure, read_runs_csv, run_bench, summarize, write_report, write_summary_csv, write_tests_csv
from .cnf import FormatError, write_constraints_file, write_model_file
from .fm import FeatureModelError, load_feature_model
from .pipeline import generate, load_problem
from .reduction import VoidModelError, reduction_report
from .stats import RANK_SUM_ALPHA, SIGNED_RANK_ALPHA
from .tsets import ArrayFormatError, InvalidArrayError, parse_array_file, verify_coverage

DEFAULT_STRENGTH = 3
log = logging.getLogger("fmca")


def _problem(args):
    problem = load_problem(args.model, args.constraints)
    t = args.strength or problem.t or DEFAULT_STRENGTH
    return problem, t


def _emit(text: str, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _config(args) -> AnnealConfig:
    kw = {"rng_seed": args.seed}
    if args.iterations is not None:
        kw["max_iterations"] = args.iterations
    if args.temperature is not None:
        kw["initial_temperature"] = args.temperature
    if args.cooling is not None:
        kw["cooling_factor"] = args.cooling
    return AnnealConfig(**kw)


def cmd_generate(args) -> int:
    problem, t = _problem(args)
    result = generate(problem.cnf, t, _config(args), reduce=not args.no_reduce)
    _emit(result.array.to_text(), args.out)
    note = "" if result.array.complete else " (INCOMPLETE: iteration budget exhausted)"
    print(f"{len(result.array)} rows, t={t}, n={problem.cnf.num_features}"
          f"{', m=%d' % result.rset.m if result.rset else ''}{note}", file=sys.stderr)
    return 0 if result.array.complete else 3


def cmd_convert(args) -> int:
    model = load_feature_model(args.fm)
    from .cnf import encode_fm_to_cnf

    cnf = encode_fm_to_cnf(model)
    prefix = Path(args.out) if args.out else Path(args.fm).with_suffix("")
    model_path = prefix.with_name(prefix.name + ".citmodel")
    constr_path = prefix.with_name(prefix.name + ".constraints")
    model_path.write_text(write_model_file(args.strength or DEFAULT_STRENGTH, model.n))
    constr_path.write_text(write_constraints_file(cnf))
    print(f"wrote {model_path} and {constr_path}", file=sys.stderr)
    return 0


def cmd_verify(args) -> int:
    problem, t = _problem(args)
    rows = parse_array_file(Path(args.array).read_text())
    rep = verify_coverage(rows, problem.cnf, t, missing_cap=args.missing_cap)
    lines = [f"valid t-sets: {rep.total}", f"covered: {rep.covered}", f"coverage: {rep.percent:.2f}%"]
    if rep.missing_count:
        lines.append(f"missing: {rep.missing_count}" + (f" (first {len(rep.missing)} listed)"
                                                       if len(rep.missing) < rep.missing_count else ""))
        for ts in rep.missing:
            desc = ", ".join(("" if on else "!") + problem.names[f] for f, on in ts.items())
            lines.append(f"  {ts}  {desc}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0 if rep.complete else 1


def cmd_reduce(args) -> int:
    problem, t = _problem(args)
    rep = reduction_report(problem.cnf, t, problem.names)
    _emit(rep.as_csv() if args.format == "csv" else rep.as_text(), args.out)
    return 0


def _print_report(report):
    sys.stdout.write(write_summary_csv(report))
    sys.stdout.write(write_tests_csv(report))
    for s in report.models:
        verdict = "significant" if s.rank_sum_p <= RANK_SUM_ALPHA else "not significant"
        print(f"# {s.model}: speedup {s.speedup_percent:.1f}%, rank-sum p={s.rank_sum_p:.3g} ({verdict})")
    if report.time_test:
        print(f"# across models, median times: R+={report.time_test.r_plus} R-={report.time_test.r_minus} "
              f"p={report.time_test.p_value:.3g} (alpha {SIGNED_RANK_ALPHA})")
    if report.size_test:
        print(f"# across models, median sizes: R+={report.size_test.r_plus} R-={report.size_test.r_minus} "
              f"p={report.size_test.p_value:.3g} (alpha {SIGNED_RANK_ALPHA})")
    elif report.size_note:
        print(f"# across models, median sizes: {report.size_note}")


def cmd_bench(args) -> int:
    cfg = _config(args)

    def progress(r):
        log.info("%s %s seed=%d %.1f ms %d rows", r.model, r.variant, r.seed, r.elapsed_ms, r.rows)

    try:
        runs = run_bench(args.fm, args.runs, args.seed_base, args.strength or DEFAULT_STRENGTH, cfg,
                         args.workers, progress=progress)
    except CoverageFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    report = summarize(runs)
    if args.out:
        for p in write_report(report, runs, args.out):
            print(f"wrote {p}", file=sys.stderr)
    _print_report(report)
    return 0


def cmd_stats(args) -> int:
    report = summarize(read_runs_csv(Path(args.csv).read_text()))
    _print_report(report)
    return 0


def _add_inputs(p):
    p.add_argument("model", help="feature model (.fm) or a CASA model file")
    p.add_argument("constraints", nargs="?", help="CASA constraints file (with a CASA model file)")
    p.add_argument("--strength", "-t", type=int, help="t; defaults to the model file header, else 3")


def _add_anneal(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--iterations", type=int, help="iteration budget per size probe")
    p.add_argument("--temperature", type=float, help="initial temperature")
    p.add_argument("--cooling", type=float, help="multiplicative cooling factor")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fmca", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a covering array")
    _add_inputs(p)
    _add_anneal(p)
    p.add_argument("--no-reduce", action="store_true", help="anneal on the full feature space")
    p.add_argument("--out", "-o")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("convert", help="feature model to CASA model + constraints files")
    p.add_argument("fm")
    p.add_argument("--strength", "-t", type=int)
    p.add_argument("--out", "-o", help="output prefix (default: next to the input)")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("verify", help="coverage of an array file")
    p.add_argument("array")
    _add_inputs(p)
    p.add_argument("--missing-cap", type=int, default=100)
    p.add_argument("--out", "-o")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("reduce", help="report reduceable features and t-set counts")
    _add_inputs(p)
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.add_argument("--out", "-o")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("bench", help="paired reduced/unreduced timing runs")
    p.add_argument("fm", nargs="+")
    p.add_argument("--runs", type=int, default=30)
    p.add_argument("--seed-base", type=int, default=0)
    p.add_argument("--strength", "-t", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--iterations", type=int)
    p.add_argument("--temperature", type=float)
    p.add_argument("--cooling", type=float)
    p.add_argument("--out", "-o", help="directory for the CSV files")
    p.set_defaults(func=cmd_bench, seed=0)

    p = sub.add_parser("stats", help="significance tests on a bench runs CSV")
    p.add_argument("csv")
    p.set_defaults(func=cmd_stats)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (OSError, FormatError, FeatureModelError, ArrayFormatError, InvalidArrayError,
            VoidModelError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
