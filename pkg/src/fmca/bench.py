"""Paired reduced-vs-unreduced benchmark runs and their summaries.

Each (model, seed) pair is run once per variant with the same seed.  The
clock covers generation only (SAT analysis, mapping, annealing, expansion);
loading and coverage verification happen outside it.
"""
from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from .anneal import AnnealConfig, warmup
from .pipeline import generate, load_problem
from .reduction import reduction_report
from .stats import (NoInformationError, StatsError, TestResult, median, speedup_percent,
                    wilcoxon_rank_sum, wilcoxon_signed_rank)
from .tsets import verify_coverage

VARIANTS = ("reduced", "unreduced")


class CoverageFailure(RuntimeError):
    def __init__(self, model, variant, seed, percent):
        super().__init__(f"{model}: {variant} run with seed {seed} covered only {percent:.2f}% of the valid t-sets")
        self.model, self.variant, self.seed = model, variant, seed


@dataclass
class BenchRun:
    model: str
    variant: str
    seed: int
    elapsed_ms: float
    rows: int
    n: int
    m: int
    tsets_full: int
    tsets_reduced: int


RUN_COLUMNS = [f.name for f in fields(BenchRun)]


def run_one(path, variant: str, seed: int, t: int, cfg: AnnealConfig, verify: bool = True) -> BenchRun:
    path = Path(path)
    problem = load_problem(path)
    cfg = replace(cfg, rng_seed=seed)
    t0 = time.perf_counter()
    result = generate(problem.cnf, t, cfg, reduce=(variant == "reduced"))
    elapsed = (time.perf_counter() - t0) * 1000.0
    if verify:
        rep = verify_coverage(result.array.rows, problem.cnf, t)
        if not rep.complete:
            raise CoverageFailure(path.stem, variant, seed, rep.percent)
    red = reduction_report(problem.cnf, t)
    return BenchRun(path.stem, variant, seed, round(elapsed, 3), len(result.array),
                    red.n, red.m, red.tsets_full, red.tsets_reduced)


def _run_job(args) -> BenchRun:
    return run_one(*args)


def run_bench(paths, runs: int = 30, seed_base: int = 0, t: int = 3, cfg: AnnealConfig | None = None,
              workers: int = 1, variants=VARIANTS, progress=None) -> list[BenchRun]:
    """All runs for all models; seeds ``seed_base .. seed_base + runs - 1`` per variant."""
    if runs < 2:
        raise ValueError("need at least 2 runs per variant")
    cfg = cfg or AnnealConfig()
    # variants alternate within a seed so that slow drift hits both alike
    jobs = [(str(p), v, seed_base + i, t, cfg) for p in paths for i in range(runs) for v in variants]
    out: list[BenchRun] = []
    if workers <= 1:
        warmup()
        for job in jobs:
            out.append(run_one(*job))
            if progress:
                progress(out[-1])
        return out
    with ProcessPoolExecutor(max_workers=workers, initializer=warmup) as pool:
        for r in pool.map(_run_job, jobs):
            out.append(r)
            if progress:
                progress(r)
    return out


def write_runs_csv(runs: list[BenchRun]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=RUN_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in runs:
        w.writerow(asdict(r))
    return buf.getvalue()


_ALIASES = {"run": "seed", "array_rows": "rows"}


def read_runs_csv(text: str) -> list[BenchRun]:
    """Bench CSV back into runs.  Only model, variant, seed/run, elapsed_ms and rows/array_rows are required."""
    out = []
    for rec in csv.DictReader(io.StringIO(text)):
        rec = {_ALIASES.get(k.strip(), k.strip()): (v or "").strip() for k, v in rec.items() if k}
        missing = {"model", "variant", "seed", "elapsed_ms", "rows"} - rec.keys()
        if missing:
            raise ValueError(f"CSV lacks columns {sorted(missing)}")
        out.append(BenchRun(
            rec["model"], rec["variant"], int(rec["seed"]), float(rec["elapsed_ms"]), int(rec["rows"]),
            int(rec.get("n") or 0), int(rec.get("m") or 0),
            int(rec.get("tsets_full") or 0), int(rec.get("tsets_reduced") or 0),
        ))
    return out


@dataclass
class ModelSummary:
    model: str
    n: int
    m: int
    tsets_full: int
    tsets_reduced: int
    runs: int
    median_ms_reduced: float
    median_ms_unreduced: float
    speedup_percent: float
    rank_sum_p: float
    median_rows_reduced: float
    median_rows_unreduced: float

    @property
    def tset_reduction_percent(self) -> float:
        if not self.tsets_full:
            return 0.0
        return 100.0 * (self.tsets_full - self.tsets_reduced) / self.tsets_full

    @property
    def size_difference_percent(self) -> float:
        """Positive when reduced arrays are larger."""
        return 100.0 * (self.median_rows_reduced - self.median_rows_unreduced) / self.median_rows_unreduced


@dataclass
class BenchReport:
    models: list[ModelSummary]
    time_test: TestResult | None
    size_test: TestResult | None
    size_note: str = ""
    time_note: str = ""


def _paired_test(pairs) -> tuple[TestResult | None, str]:
    try:
        nonzero = sum(1 for x, y in pairs if x != y)
        return wilcoxon_signed_rank(pairs, "approx" if nonzero >= 6 else "exact"), ""
    except NoInformationError as exc:
        return None, str(exc)
    except StatsError as exc:
        return None, str(exc)


def summarize(runs: list[BenchRun]) -> BenchReport:
    by_model: dict[str, dict[str, list[BenchRun]]] = {}
    for r in runs:
        by_model.setdefault(r.model, {}).setdefault(r.variant, []).append(r)
    models = []
    for name, per in by_model.items():
        red, full = per.get("reduced", []), per.get("unreduced", [])
        if not red or not full:
            raise ValueError(f"{name}: both variants are needed")
        if len(red) != len(full):
            raise ValueError(f"{name}: {len(red)} reduced runs but {len(full)} unreduced runs")
        t_red = [r.elapsed_ms for r in red]
        t_full = [r.elapsed_ms for r in full]
        method = "approx" if min(len(red), len(full)) >= 5 else "exact"
        p = wilcoxon_rank_sum(t_red, t_full, method).p_value
        mr, mf = median(t_red), median(t_full)
        first = red[0]
        models.append(ModelSummary(
            name, first.n, first.m, first.tsets_full, first.tsets_reduced, len(red), mr, mf,
            speedup_percent(mr, mf) if mr > 0 and mf > 0 else math.nan, p,
            median([r.rows for r in red]), median([r.rows for r in full]),
        ))
    time_test, time_note = _paired_test([(s.median_ms_reduced, s.median_ms_unreduced) for s in models])
    size_test, size_note = _paired_test([(s.median_rows_reduced, s.median_rows_unreduced) for s in models])
    return BenchReport(models, time_test, size_test, size_note, time_note)


SUMMARY_COLUMNS = ["model", "n", "m", "tsets_full", "tsets_reduced", "tset_reduction_percent", "runs",
                   "median_ms_reduced", "median_ms_unreduced", "speedup_percent", "rank_sum_p",
                   "median_rows_reduced", "median_rows_unreduced", "size_difference_percent"]


def write_summary_csv(report: BenchReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUMMARY_COLUMNS)
    for s in report.models:
        w.writerow([s.model, s.n, s.m, s.tsets_full, s.tsets_reduced, f"{s.tset_reduction_percent:.1f}", s.runs,
                    f"{s.median_ms_reduced:.3f}", f"{s.median_ms_unreduced:.3f}", f"{s.speedup_percent:.1f}",
                    f"{s.rank_sum_p:.4g}", s.median_rows_reduced, s.median_rows_unreduced,
                    f"{s.size_difference_percent:.2f}"])
    return buf.getvalue()


def write_tests_csv(report: BenchReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["comparison", "n", "r_plus", "r_minus", "p_value", "method", "note"])
    for label, res, note in (("median_time", report.time_test, report.time_note),
                             ("median_size", report.size_test, report.size_note)):
        if res is None:
            w.writerow([label, 0, "", "", "", "", note])
        else:
            w.writerow([label, res.n, res.r_plus, res.r_minus, f"{res.p_value:.4g}", res.method, note])
    return buf.getvalue()


def histogram_csv(values, label: str, width: float = 10.0) -> str:
    """Counts per ``width``-point percentage bin, lower edge inclusive."""
    values = [v for v in values if not math.isnan(v)]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["bin_low", "bin_high", label])
    if not values:
        return buf.getvalue()
    lo = math.floor(min(values) / width) * width
    hi = max(math.floor(max(values) / width) * width + width, lo + width)
    edge = lo
    while edge < hi:
        count = sum(1 for v in values if edge <= v < edge + width)
        w.writerow([f"{edge:g}", f"{edge + width:g}", count])
        edge += width
    return buf.getvalue()


def write_report(report: BenchReport, runs: list[BenchRun], out_dir) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    files = {
        "runs.csv": write_runs_csv(runs),
        "summary.csv": write_summary_csv(report),
        "tests.csv": write_tests_csv(report),
        "hist_tset_reduction.csv": histogram_csv([s.tset_reduction_percent for s in report.models], "models"),
        "hist_speedup.csv": histogram_csv([s.speedup_percent for s in report.models], "models"),
    }
    paths = []
    for name, text in files.items():
        p = out_dir / name
        p.write_text(text)
        paths.append(p)
    return paths
