import json
from fractions import Fraction
from pathlib import Path

import pytest

from radsched.bench import (
    Case,
    Suite,
    emit_report,
    load_results,
    load_suite,
    render_summary_csv,
    run_experiment,
    save_suite,
    summarize,
    with_overrides,
)
from radsched.model import Instance, Patient
from radsched.scenarios import Scenario, ScenarioSet
from radsched.solvers import SolverParams

QUICK = SolverParams(max_iterations=30)


def small_suite(reps=3) -> Suite:
    inst_a = Instance(1, 5, 2, (
        Patient("P1", "general", 2),
        Patient("P2", "special", 3, frozenset({2})),
    ))
    inst_b = Instance(1, 6, 1, (
        Patient("P1", "general", 2, release_day=1),
        Patient("P2", "general", 2, release_day=2),
        Patient("P3", "general", 1, release_day=4),
    ))
    scen = ScenarioSet((
        Scenario("w1", Fraction(1, 2), (Patient("f1", "general", 1),)),
        Scenario("w2", Fraction(1, 2), ()),
    ))
    return Suite("mini", repetitions=reps, seed_base=7, cases=(
        Case("c1", "2p", "offline", inst_a),
        Case("c2", "3p", "replay-os", inst_b, scen),
    ))


def test_seed_schedule_base_plus_k():
    results = run_experiment(small_suite(reps=3), ["ga"], QUICK)
    seeds = [r.seed for r in results.runs if r.case_id == "c1"]
    assert seeds == [7, 8, 9]


def test_deterministic_algorithms_run_once():
    results = run_experiment(small_suite(), ["exact", "greedy", "ga"], QUICK)
    assert sum(r.algorithm == "exact" for r in results.runs) == 2  # one per case
    assert sum(r.algorithm == "greedy" for r in results.runs) == 2
    assert sum(r.algorithm == "ga" for r in results.runs) == 6


def test_unknown_algorithm_rejected():
    with pytest.raises(ValueError, match="unknown algorithms"):
        run_experiment(small_suite(), ["ga", "sa"], QUICK)


def test_parallel_matches_sequential(tmp_path):
    suite = small_suite(reps=2)
    algorithms = ["exact", "greedy", "ga", "wo"]
    seq = run_experiment(suite, algorithms, QUICK, parallel=False)
    par = run_experiment(suite, algorithms, QUICK, parallel=True)
    for out_dir, results in (("seq", seq), ("par", par)):
        emit_report(summarize(results), results, "csv", tmp_path / out_dir)
    seq_files = sorted(p.relative_to(tmp_path / "seq") for p in (tmp_path / "seq").rglob("*") if p.is_file())
    par_files = sorted(p.relative_to(tmp_path / "par") for p in (tmp_path / "par").rglob("*") if p.is_file())
    assert seq_files == par_files
    for rel in seq_files:
        if rel.name == "timings.csv":
            continue  # wall-clock is the one intentionally volatile artifact
        assert (tmp_path / "seq" / rel).read_bytes() == (tmp_path / "par" / rel).read_bytes(), rel


def test_summary_aggregates():
    results = run_experiment(small_suite(reps=3), ["exact", "ga"], QUICK)
    summary = summarize(results)
    for row in summary.rows:
        if row.runs:
            assert row.best <= row.avg <= row.worst
            assert row.stddev_runtime_ms >= 0
    # gaps only on cases with a proven optimum, and never negative
    assert summary.optima
    assert all(g >= 0 for g in summary.gaps.values())


def test_summary_single_run_degenerate():
    results = run_experiment(small_suite(reps=1), ["greedy"], QUICK)
    summary = summarize(results)
    for row in summary.rows:
        if row.runs:
            assert row.best == row.avg == row.worst


def test_summary_statistics_recomputable_from_run_json(tmp_path):
    results = run_experiment(small_suite(reps=2), ["ga"], QUICK)
    summary = summarize(results)
    emit_report(summary, results, "csv", tmp_path)
    by_group = {}
    for path in (tmp_path / "runs").glob("*.json"):
        obj = json.loads(path.read_text())
        by_group.setdefault((obj["algorithm"], obj["group"]), []).append(obj["objective"])
    for row in summary.rows:
        values = by_group[(row.algorithm, row.group)]
        assert abs(row.avg - sum(values) / len(values)) < 1e-12
        assert row.best == min(values) and row.worst == max(values)


def test_emit_report_layout(tmp_path):
    results = run_experiment(small_suite(reps=1), ["greedy", "ga"], QUICK)
    emit_report(summarize(results), results, "md", tmp_path)
    assert (tmp_path / "summary.csv").exists()
    assert (tmp_path / "summary.json").exists()
    assert (tmp_path / "summary.md").exists()
    assert (tmp_path / "timings.csv").exists()
    assert (tmp_path / "traces" / "ga_c1_7.csv").exists()
    assert (tmp_path / "traces" / "greedy_c1_det.csv").exists()
    header = (tmp_path / "summary.csv").read_text().splitlines()[0]
    assert header == "algorithm,case_group,best,avg,worst,gap_vs_exact,mean_convergence_iter,waiting_days,waiting_patients"
    md = (tmp_path / "summary.md").read_text()
    assert "| Algorithm | Waiting Days | Waiting Patients |" in md
    assert "artifact-defined" in md
    trace = (tmp_path / "traces" / "ga_c1_7.csv").read_text().splitlines()
    assert trace[0] == "iteration,best_so_far"
    assert len(trace) == 1 + QUICK.max_iterations


def test_emit_report_rejects_empty(tmp_path):
    results = run_experiment(small_suite(reps=1), ["greedy"], QUICK)
    empty = type(results)(results.suite_name, results.algorithms, 1, 7, ())
    with pytest.raises(ValueError, match="nothing to report"):
        summarize(empty)
    with pytest.raises(ValueError, match="nothing to report"):
        emit_report(summarize(results), empty, "csv", tmp_path)


def test_report_reload_and_rerender(tmp_path):
    results = run_experiment(small_suite(reps=2), ["exact", "ga"], QUICK)
    summary = summarize(results)
    emit_report(summary, results, "csv", tmp_path)
    reloaded = load_results(tmp_path)
    render_summary_csv(summarize(reloaded), tmp_path / "summary2.csv")
    assert (tmp_path / "summary.csv").read_bytes() == (tmp_path / "summary2.csv").read_bytes()


def test_suite_files_round_trip(tmp_path):
    suite = small_suite(reps=4)
    save_suite(suite, tmp_path / "suite")
    loaded = load_suite(tmp_path / "suite")
    assert loaded == suite
    assert with_overrides(loaded, repetitions=9).repetitions == 9
    assert with_overrides(loaded, seed_base=123).seed_base == 123


def test_solver_errors_captured_not_fatal():
    # exact on an unschedulable instance records an error, other runs proceed
    bad = Instance(1, 2, 1, (Patient("P1", "general", 2), Patient("P2", "general", 2)))
    suite = Suite("err", 1, 0, (Case("bad", "2p", "offline", bad),))
    results = run_experiment(suite, ["exact", "greedy"], QUICK)
    exact_run = next(r for r in results.runs if r.algorithm == "exact")
    assert exact_run.error == "infeasible"
    greedy_run = next(r for r in results.runs if r.algorithm == "greedy")
    assert greedy_run.error is None
    assert greedy_run.objective is not None
