import math
import statistics

import pytest

from adaptea import io
from adaptea.algorithms import AlgorithmConfig, run
from adaptea.core import SearchPoint, build_ladder
from adaptea.experiments import (
    SweepSpec,
    TrialResult,
    VariantSpec,
    derive_seed,
    mean_log_rate_by_decile,
    rate_profile,
    read_results,
    read_summary,
    relative_rows,
    relative_runtime,
    run_sweep,
    run_trace,
    summarize,
    table1_spec,
    worker_count,
    write_results,
    write_summary,
)


def small_spec(**kw):
    base = dict(n=200, lambdas=[12, 24], variants=["static", "self-adaptive/F=1.5", "fitness-dependent"],
                reps=3, seed=5)
    base.update(kw)
    return SweepSpec(**base)


@pytest.fixture(scope="module")
def small_sweep():
    return run_sweep(small_spec(), workers=1)


def test_variant_labels_roundtrip():
    for token in ["static", "fitness-dependent", "self-adaptive/F=1.2/tie=random/rinit=max",
                  "self-adaptive/F=32/tie=biased/rinit=min", "self-adaptive/F=2/rinit=3"]:
        v = VariantSpec.parse(token)
        assert VariantSpec.parse(v.label) == v
    assert VariantSpec.parse("self-adaptive/F=2").label == "self-adaptive/F=2/tie=biased/rinit=min"
    assert VariantSpec.parse("self-adaptive/F=2/tie=prefer-low-rate").tie == "biased"


@pytest.mark.parametrize("token", ["static/F=2", "self-adaptive", "self-adaptive/G=2", "greedy",
                                   "self-adaptive/F=2/rinit=top"])
def test_bad_variant_tokens(token):
    with pytest.raises(ValueError):
        VariantSpec.parse(token)


def test_rinit_exponents():
    v = VariantSpec.parse("self-adaptive/F=1.2/rinit=max")
    assert v.rinit_exponent(10_000) == build_ladder(1.2, 10_000).i_max
    assert VariantSpec.parse("self-adaptive/F=1.2").rinit_exponent(10_000) == 1
    assert VariantSpec("static").rinit_exponent(100) is None


def test_seed_derivation_is_stable_and_distinct():
    a = derive_seed(1, "static", 100, 0)
    assert a == derive_seed(1, "static", 100, 0)
    seeds = {derive_seed(1, v, lam, rep) for v in ("static", "fitness-dependent")
             for lam in (100, 200) for rep in range(5)}
    assert len(seeds) == 20
    assert 0 <= a < 2**64


def test_sweep_spec_validation():
    with pytest.raises(ValueError):
        small_spec(reps=0)
    with pytest.raises(ValueError):
        small_spec(variants=["static", "static"])
    with pytest.raises(ValueError):
        SweepSpec.from_config({"n": "10", "lambdas": "2"})
    with pytest.raises(ValueError):
        SweepSpec.from_config({"n": "10", "lambdas": "2", "variants": "static", "colour": "red"})


def test_sweep_spec_from_config():
    spec = SweepSpec.from_config({"n": "300", "lambdas": "8,16", "variants": "static,self-adaptive/F=2",
                                  "reps": "2", "seed": "9"})
    assert spec.lambdas == [8, 16] and spec.reps == 2 and spec.seed == 9
    assert [v.label for v in spec.variants] == ["static", "self-adaptive/F=2/tie=biased/rinit=min"]


def test_sweep_invariant_under_order_and_parallelism(small_sweep):
    spec = small_spec()
    serial, _ = small_sweep
    parallel, _ = run_sweep(spec, workers=2)
    assert serial == parallel
    reordered, _ = run_sweep(small_spec(lambdas=[24, 12], variants=list(reversed(spec.variants))), workers=1)
    assert sorted(reordered, key=lambda r: (r.variant, r.lam, r.rep)) == \
        sorted(serial, key=lambda r: (r.variant, r.lam, r.rep))


def test_summaries_match_raw_rows(small_sweep):
    results, summaries = small_sweep
    assert summarize(results) == summaries
    for s in summaries:
        gens = [r.generations for r in results if r.variant == s.variant and r.lam == s.lam]
        assert s.reps == len(gens) == 3
        assert s.mean == math.fsum(gens) / 3
        assert s.std == statistics.stdev(gens)
        assert s.min <= s.mean <= s.max
        assert s.found <= s.reps


def test_capped_trials_are_counted_with_cap():
    results, summaries = run_sweep(small_spec(max_generations=3, lambdas=[2]), workers=1)
    assert all(r.generations == 3 and not r.found for r in results)
    assert all(s.found == 0 and s.capped and s.mean == 3 for s in summaries)


def test_csv_roundtrip_is_idempotent(tmp_path, small_sweep):
    spec = small_spec()
    results, summaries = small_sweep
    header = io.header_lines(spec.as_config(), spec.seed)
    write_results(tmp_path / "a.csv", results, header)
    again = read_results(tmp_path / "a.csv")
    assert again == results
    write_results(tmp_path / "b.csv", again, header)
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    write_summary(tmp_path / "s.csv", summaries, header)
    assert read_summary(tmp_path / "s.csv") == summaries
    assert summarize(read_results(tmp_path / "a.csv")) == read_summary(tmp_path / "s.csv")


def test_reading_wrong_schema_fails(tmp_path):
    io.write_csv(tmp_path / "x.csv", ["a", "b"], [[1, 2]])
    with pytest.raises(ValueError, match="expected columns"):
        read_results(tmp_path / "x.csv")


def test_trial_row_types():
    r = TrialResult("self-adaptive/F=2/tie=biased/rinit=min", 8, 300, 2.0, "biased", 1, 0, 123, 40, True)
    row = dict(zip(["variant", "lambda", "n", "F", "tie", "rinit", "rep", "seed", "generations", "found"],
                   [io.format_cell(c) for c in r.row()]))
    assert TrialResult.from_row(row) == r


def test_relative_runtime_contract():
    base = {100: 50.0, 200: 40.0}
    assert relative_runtime(base, base).ratios == {100: 1.0, 200: 1.0}
    rel = relative_runtime({100: 25.0, 300: 1.0}, base)
    assert rel.ratios == {100: 0.5}
    assert rel.missing == [200, 300]
    with pytest.raises(ValueError):
        relative_runtime({300: 1.0}, base)


def test_relative_rows_against_baseline(small_sweep):
    _, summaries = small_sweep
    rows = relative_rows(summaries, "static")
    assert [r[2] for r in rows if r[0] == "static"] == [1.0, 1.0]
    with pytest.raises(ValueError):
        relative_rows(summaries, "nope")


def test_worker_count_respects_env(monkeypatch):
    monkeypatch.setenv("ADAPTEA_THREADS", "1")
    assert worker_count(8) == 1
    monkeypatch.delenv("ADAPTEA_THREADS")
    assert worker_count(3) == 3


def test_trace_csv(tmp_path):
    cfg = AlgorithmConfig(100, 12, F=1.2, seed=7)
    rec = run_trace(cfg, tmp_path / "t.csv", tmp_path / "p.csv")
    header, columns, rows = io.read_csv(tmp_path / "t.csv")
    assert columns == ["t", "k", "r"]
    assert header[0].startswith("adaptea format-version")
    assert any("seed=7" in line for line in header)
    assert len(rows) == rec.generations_run + 1
    for row in rows:
        i = math.log(float(row["r"])) / math.log(1.2)
        assert abs(i - round(i)) < 1e-9
    _, columns, prof = io.read_csv(tmp_path / "p.csv")
    assert columns == ["variant", "d", "r"]
    assert len(prof) == len(set((p["d"], p["r"]) for p in prof))


def test_trace_from_optimum(tmp_path):
    cfg = AlgorithmConfig(100, 12, F=1.2, seed=7)
    run_trace(cfg, tmp_path / "t.csv", start=SearchPoint.ones(100))
    _, _, rows = io.read_csv(tmp_path / "t.csv")
    assert rows == [{"t": "0", "k": "0", "r": "1.2"}]


def test_rate_profile_pairs_are_distinct():
    rec = run(AlgorithmConfig(200, 10, F=1.5, seed=2))
    prof = rate_profile(rec)
    assert len(prof) == len(set(prof))
    assert set(prof) == set(zip(rec.distances.tolist(), rec.rates.tolist()))


def test_random_ties_pick_larger_rates_per_distance_decile():
    profiles = {
        tie: rate_profile(run(AlgorithmConfig(10_000, 500, F=1.2, tie_break=tie, seed=2019)))
        for tie in ("biased", "random")
    }
    _, means = mean_log_rate_by_decile(profiles)
    wins = sum(r >= b for r, b in zip(means["random"], means["biased"]))
    assert wins >= 7


def test_decile_helper_rejects_empty():
    with pytest.raises(ValueError):
        mean_log_rate_by_decile({"a": [(0, 1.0)]})


def test_table1_spec_cells():
    spec = table1_spec(reps=2)
    assert spec.n == 10_000 and spec.lambdas == [500]
    assert {(v.tie, v.rinit) for v in spec.variants} == {
        ("biased", "min"), ("random", "min"), ("biased", "max"), ("random", "max")}
    assert all(v.F == 1.2 for v in spec.variants)
