"""Runtime sweeps, single-run traces and the initial-rate comparison table.

Every trial is seeded independently from ``(base seed, variant label,
lambda, repetition)`` through :class:`numpy.random.SeedSequence`, so the
results of a sweep do not depend on the order in which cells run or on the
number of worker processes.
"""
from __future__ import annotations

import math
import os
import statistics
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import io
from .algorithms import VARIANTS, AlgorithmConfig, RunRecord, normalize_tie_rule, run
from .core import build_ladder

RESULT_COLUMNS = ["variant", "lambda", "n", "F", "tie", "rinit", "rep", "seed", "generations", "found"]
SUMMARY_COLUMNS = ["variant", "lambda", "mean", "std", "min", "max", "reps", "found"]
RELATIVE_COLUMNS = ["variant", "lambda", "ratio"]
TRACE_COLUMNS = ["t", "k", "r"]
PROFILE_COLUMNS = ["variant", "d", "r"]

DEFAULT_SEED = 2019


@dataclass(frozen=True)
class VariantSpec:
    """One algorithm variant of a sweep.

    Labels are ``static``, ``fitness-dependent`` or
    ``self-adaptive/F=<F>/tie=<biased|random>/rinit=<min|max|exponent>``.
    """

    algo: str
    F: float | None = None
    tie: str = "biased"
    rinit: str = "min"

    def __post_init__(self):
        if self.algo not in VARIANTS:
            raise ValueError(f"unknown algorithm {self.algo!r}; choose from {VARIANTS}")
        if self.algo == "self-adaptive":
            if self.F is None:
                raise ValueError("self-adaptive variant needs F")
            object.__setattr__(self, "tie", normalize_tie_rule(self.tie))
            if self.rinit not in ("min", "max") and not str(self.rinit).isdigit():
                raise ValueError(f"rinit must be 'min', 'max' or an exponent, got {self.rinit!r}")
            object.__setattr__(self, "rinit", str(self.rinit))

    @classmethod
    def parse(cls, token: str) -> VariantSpec:
        algo, *opts = token.strip().split("/")
        kwargs = {}
        for opt in opts:
            key, sep, value = opt.partition("=")
            if not sep or key not in ("F", "tie", "rinit"):
                raise ValueError(f"bad variant option {opt!r} in {token!r}")
            kwargs[key] = float(value) if key == "F" else value
        if algo != "self-adaptive" and kwargs:
            raise ValueError(f"variant {algo!r} takes no options")
        return cls(algo, **kwargs)

    @property
    def label(self) -> str:
        if self.algo != "self-adaptive":
            return self.algo
        return f"self-adaptive/F={self.F:g}/tie={self.tie}/rinit={self.rinit}"

    def rinit_exponent(self, n: int) -> int | None:
        if self.algo != "self-adaptive":
            return None
        if self.rinit == "min":
            return 1
        if self.rinit == "max":
            return build_ladder(self.F, n).i_max
        return int(self.rinit)

    def config(self, n: int, lam: int, seed: int, max_generations: int | None = None) -> AlgorithmConfig:
        if self.algo == "self-adaptive":
            return AlgorithmConfig(n, lam, self.algo, self.F, self.rinit_exponent(n), self.tie,
                                   max_generations, seed)
        return AlgorithmConfig(n, lam, self.algo, tie_break="random",
                               max_generations=max_generations, seed=seed)


def derive_seed(base: int, label: str, lam: int, rep: int) -> int:
    """64-bit trial seed mixed from the base seed and the cell coordinates."""
    entropy = [int(base), zlib.crc32(label.encode()), int(lam), int(rep)]
    return int(np.random.SeedSequence(entropy).generate_state(1, np.uint64)[0])


@dataclass
class SweepSpec:
    n: int
    lambdas: list[int]
    variants: list[VariantSpec]
    reps: int = 100
    seed: int = DEFAULT_SEED
    max_generations: int | None = None

    def __post_init__(self):
        if self.reps < 1:
            raise ValueError("reps must be at least 1")
        if not self.lambdas or not self.variants:
            raise ValueError("a sweep needs at least one lambda and one variant")
        self.variants = [v if isinstance(v, VariantSpec) else VariantSpec.parse(v) for v in self.variants]
        labels = [v.label for v in self.variants]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate variants in {labels}")

    @classmethod
    def from_config(cls, cfg: dict[str, str]) -> SweepSpec:
        unknown = set(cfg) - {"n", "lambdas", "variants", "reps", "seed", "max_generations"}
        if unknown:
            raise ValueError(f"unknown sweep keys: {sorted(unknown)}")
        missing = {"n", "lambdas", "variants"} - set(cfg)
        if missing:
            raise ValueError(f"missing sweep keys: {sorted(missing)}")
        return cls(
            n=int(cfg["n"]),
            lambdas=[int(x) for x in cfg["lambdas"].split(",")],
            variants=[VariantSpec.parse(x) for x in cfg["variants"].split(",")],
            reps=int(cfg.get("reps", 100)),
            seed=int(cfg.get("seed", DEFAULT_SEED)),
            max_generations=int(cfg["max_generations"]) if cfg.get("max_generations") else None,
        )

    def as_config(self) -> dict:
        return dict(n=self.n, lambdas=self.lambdas, variants=[v.label for v in self.variants],
                    reps=self.reps, seed=self.seed, max_generations=self.max_generations)

    def cells(self):
        for variant in self.variants:
            for lam in self.lambdas:
                for rep in range(self.reps):
                    yield variant, lam, rep


@dataclass(frozen=True)
class TrialResult:
    variant: str
    lam: int
    n: int
    F: float | None
    tie: str | None
    rinit: int | None
    rep: int
    seed: int
    generations: int
    found: bool

    def row(self) -> list:
        return [self.variant, self.lam, self.n, self.F, self.tie, self.rinit, self.rep, self.seed,
                self.generations, self.found]

    @classmethod
    def from_row(cls, row: dict[str, str]) -> TrialResult:
        def opt(v, conv):
            return conv(v) if v != "" else None
        return cls(row["variant"], int(row["lambda"]), int(row["n"]), opt(row["F"], float),
                   opt(row["tie"], str), opt(row["rinit"], int), int(row["rep"]), int(row["seed"]),
                   int(row["generations"]), row["found"] == "1")


@dataclass(frozen=True)
class TrialSummary:
    variant: str
    lam: int
    mean: float
    std: float
    min: int
    max: int
    reps: int
    found: int

    def row(self) -> list:
        return [self.variant, self.lam, self.mean, self.std, self.min, self.max, self.reps, self.found]

    @property
    def capped(self) -> bool:
        return self.found < self.reps

    @classmethod
    def from_row(cls, row: dict[str, str]) -> TrialSummary:
        return cls(row["variant"], int(row["lambda"]), float(row["mean"]), float(row["std"]),
                   int(row["min"]), int(row["max"]), int(row["reps"]), int(row["found"]))


def _run_cell(args) -> TrialResult:
    variant, n, lam, rep, seed, max_generations = args
    cfg = variant.config(n, lam, seed, max_generations)
    record = run(cfg)
    gens = record.generations_to_optimum if record.found else cfg.max_generations
    return TrialResult(variant.label, lam, n, variant.F if variant.algo == "self-adaptive" else None,
                       cfg.tie_break if variant.algo == "self-adaptive" else None,
                       cfg.r_init if variant.algo == "self-adaptive" else None,
                       rep, seed, gens, record.found)


def worker_count(requested: int | None = None) -> int:
    """Worker processes: ``requested`` or the CPU count, capped by ``ADAPTEA_THREADS``."""
    workers = requested or os.cpu_count() or 1
    cap = os.environ.get("ADAPTEA_THREADS")
    if cap:
        workers = min(workers, max(1, int(cap)))
    return max(1, workers)


def run_sweep(spec: SweepSpec, workers: int | None = None, progress=None):
    """Run every cell of ``spec``; returns ``(trial results, summaries)``.

    Trials that hit the generation cap count with the cap value and show up
    as ``found < reps`` in their cell summary.
    """
    tasks = [(v, spec.n, lam, rep, derive_seed(spec.seed, v.label, lam, rep), spec.max_generations)
             for v, lam, rep in spec.cells()]
    workers = worker_count(workers)
    results = []
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(workers) as pool:
            for res in pool.map(_run_cell, tasks, chunksize=max(1, len(tasks) // (8 * workers))):
                results.append(res)
                if progress:
                    progress(len(results), len(tasks))
    else:
        for task in tasks:
            results.append(_run_cell(task))
            if progress:
                progress(len(results), len(tasks))
    return results, summarize(results)


def summarize(results) -> list[TrialSummary]:
    """Per-(variant, lambda) statistics in first-appearance order of variants."""
    cells: dict[tuple[str, int], list[TrialResult]] = {}
    for res in results:
        cells.setdefault((res.variant, res.lam), []).append(res)
    order = list(dict.fromkeys(res.variant for res in results))
    out = []
    for (variant, lam), trials in sorted(cells.items(), key=lambda kv: (order.index(kv[0][0]), kv[0][1])):
        gens = sorted(t.generations for t in trials)
        out.append(TrialSummary(
            variant, lam,
            mean=math.fsum(gens) / len(gens),
            std=statistics.stdev(gens) if len(gens) > 1 else 0.0,
            min=gens[0], max=gens[-1], reps=len(gens),
            found=sum(t.found for t in trials),
        ))
    return out


def write_results(path, results, header=()) -> None:
    io.write_csv(path, RESULT_COLUMNS, (r.row() for r in results), header)


def read_results(path) -> list[TrialResult]:
    _, columns, rows = io.read_csv(path)
    _require(columns, RESULT_COLUMNS, path)
    return [TrialResult.from_row(r) for r in rows]


def write_summary(path, summaries, header=()) -> None:
    io.write_csv(path, SUMMARY_COLUMNS, (s.row() for s in summaries), header)


def read_summary(path) -> list[TrialSummary]:
    _, columns, rows = io.read_csv(path)
    _require(columns, SUMMARY_COLUMNS, path)
    return [TrialSummary.from_row(r) for r in rows]


def _require(columns, expected, path):
    if columns != expected:
        raise ValueError(f"{path}: expected columns {expected}, found {columns}")


# -- single runs ---------------------------------------------------------------


def trace_header(cfg: AlgorithmConfig) -> list[str]:
    return io.header_lines(cfg.as_dict(), cfg.seed)


def run_trace(cfg: AlgorithmConfig, path=None, profile_path=None, label=None, start=None) -> RunRecord:
    """Run once; optionally write the ``t,k,r`` trace and the distance/rate profile."""
    record = run(cfg, start)
    header = trace_header(cfg)
    if path is not None:
        io.write_csv(path, TRACE_COLUMNS, record.rows(), header)
    if profile_path is not None:
        label = label or cfg.variant
        io.write_csv(profile_path, PROFILE_COLUMNS,
                     ([label, d, r] for d, r in rate_profile(record)), header)
    return record


def rate_profile(record: RunRecord) -> list[tuple[int, float]]:
    """Distinct ``(distance, rate)`` pairs of the parent, in order of first visit."""
    return list(dict.fromkeys(zip(record.distances.tolist(), record.rates.tolist())))


# -- initial-rate comparison -----------------------------------------------------


@dataclass
class Table1:
    """Mean generations for {biased, random} ties x {r_min, r_max} initial rates."""

    means: dict[tuple[str, str], float]
    summaries: list[TrialSummary] = field(repr=False)
    results: list[TrialResult] = field(repr=False)

    def rows(self):
        for rinit in ("min", "max"):
            yield [f"r_{rinit}", self.means[("biased", rinit)], self.means[("random", rinit)]]


def table1_spec(reps=100, seed=DEFAULT_SEED, n=10_000, lam=500, F=1.2) -> SweepSpec:
    variants = [VariantSpec("self-adaptive", F, tie, rinit)
                for rinit in ("min", "max") for tie in ("biased", "random")]
    return SweepSpec(n, [lam], variants, reps, seed)


def compare_table1(reps=100, seed=DEFAULT_SEED, n=10_000, lam=500, F=1.2, workers=None,
                   progress=None) -> Table1:
    spec = table1_spec(reps, seed, n, lam, F)
    results, summaries = run_sweep(spec, workers, progress)
    means = {}
    for v, s in zip(spec.variants, summaries):
        means[(v.tie, v.rinit)] = s.mean
    return Table1(means, summaries, results)


# -- relative runtimes -------------------------------------------------------------


@dataclass
class RelativeRuntime:
    ratios: dict[int, float]
    missing: list[int]


def relative_runtime(table: dict[int, float], baseline: dict[int, float]) -> RelativeRuntime:
    """Per-lambda ratio ``table[lam] / baseline[lam]``.

    Lambdas present in only one of the two tables are listed in ``missing``;
    an empty intersection is an error.
    """
    shared = sorted(set(table) & set(baseline))
    if not shared:
        raise ValueError("no common lambda values between table and baseline")
    missing = sorted(set(table) ^ set(baseline))
    return RelativeRuntime({lam: table[lam] / baseline[lam] for lam in shared}, missing)


def means_by_variant(summaries) -> dict[str, dict[int, float]]:
    out: dict[str, dict[int, float]] = {}
    for s in summaries:
        out.setdefault(s.variant, {})[s.lam] = s.mean
    return out


def relative_rows(summaries, baseline_label: str) -> list[list]:
    """``[variant, lambda, ratio]`` rows of every variant against ``baseline_label``."""
    table = means_by_variant(summaries)
    if baseline_label not in table:
        raise ValueError(f"baseline {baseline_label!r} not among {sorted(table)}")
    rows = []
    for variant, means in table.items():
        rel = relative_runtime(means, table[baseline_label])
        rows.extend([variant, lam, ratio] for lam, ratio in rel.ratios.items())
    return rows


# -- rate profiles by distance decile -----------------------------------------------


def mean_log_rate_by_decile(profiles: dict[str, list[tuple[int, float]]], bins: int = 10):
    """Mean ``ln r`` of each profile within pooled distance quantile bins.

    ``profiles`` maps a label to ``(d, r)`` pairs; the optimum ``d = 0`` is
    left out. Returns the bin edges and, per label, one mean per bin (NaN
    where a profile has no point in a bin).
    """
    arrays = {label: np.asarray(pts, dtype=float).reshape(-1, 2) for label, pts in profiles.items()}
    pooled = np.concatenate([a[:, 0] for a in arrays.values()])
    pooled = pooled[pooled > 0]
    if pooled.size == 0:
        raise ValueError("profiles contain no point with positive distance")
    edges = np.quantile(pooled, np.linspace(0, 1, bins + 1))
    means = {}
    for label, a in arrays.items():
        row = []
        for j, (lo, hi) in enumerate(zip(edges[:-1], edges[1:])):
            upper = a[:, 0] <= hi if j == bins - 1 else a[:, 0] < hi
            sel = (a[:, 0] >= lo) & upper & (a[:, 0] > 0)
            row.append(float(np.log(a[sel, 1]).mean()) if sel.any() else math.nan)
        means[label] = row
    return edges, means
