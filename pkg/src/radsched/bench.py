"""Benchmark harness: multi-case suites, repeated seeded runs, reports.

Reports are split into a deterministic part and a timing part. Everything
under the report directory except timings.csv is a pure function of
(suite, algorithms, params): re-running a benchmark, in parallel or not,
reproduces those files byte for byte. Wall-clock measurements are inherently
unrepeatable, so they live only in timings.csv and in the human-readable
summary.md section that is explicitly labeled as machine-local.
"""

from __future__ import annotations

import csv
import json
import re
import shutil
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from statistics import fmean, pstdev

from . import fileio
from .constraints import patient_cost, unassigned_penalty, waiting_metrics
from .encoding import offline_context
from .model import Instance, Schedule
from .oracle import SearchLimits, greedy_first_fit, solve_exact_offline
from .replay import METAHEURISTICS, replay
from .scenarios import ScenarioSet
from .solvers import SolverParams, solve

KNOWN_ALGORITHMS = ("ga", "ffo", "wo", "greedy", "exact")
DETERMINISTIC_ALGORITHMS = ("greedy", "exact")
CASE_MODES = ("offline", "replay-os", "replay-online")


@dataclass(frozen=True)
class Case:
    id: str
    group: str
    mode: str
    instance: Instance
    scenario_set: ScenarioSet | None = None


@dataclass(frozen=True)
class Suite:
    name: str
    repetitions: int
    seed_base: int
    cases: tuple[Case, ...]
    params: SolverParams | None = None  # suite-pinned solver protocol, if any

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        ids = [c.id for c in self.cases]
        if len(set(ids)) != len(ids):
            raise ValueError("case ids must be unique")


@dataclass(frozen=True)
class RunRecord:
    case_id: str
    group: str
    algorithm: str
    rep: int
    seed: int | None
    objective: float | None
    penalty: float
    waiting_days: int | None
    waiting_patients: int | None
    convergence_iteration: float | None
    iterations_run: int
    traces: tuple[tuple[str, tuple[float, ...]], ...]
    wall_time_ms: float
    proven_optimal: bool | None = None
    error: str | None = None


@dataclass(frozen=True)
class ExperimentResults:
    suite_name: str
    algorithms: tuple[str, ...]
    repetitions: int
    seed_base: int
    runs: tuple[RunRecord, ...]


@dataclass(frozen=True)
class SummaryRow:
    algorithm: str
    group: str
    runs: int
    best: float | None
    avg: float | None
    worst: float | None
    gap_vs_exact: float | None
    mean_runtime_ms: float | None
    stddev_runtime_ms: float | None
    mean_convergence_iter: float | None
    waiting_days: float | None
    waiting_patients: float | None


@dataclass(frozen=True)
class Summary:
    rows: tuple[SummaryRow, ...]
    gaps: dict  # (case_id, algorithm, rep) -> float
    optima: dict  # case_id -> proven optimum


# ---------------------------------------------------------------------------
# Running

def _schedule_objective(instance: Instance, schedule: Schedule) -> float:
    total = 0.0
    for pid, a in schedule.assignments.items():
        total += patient_cost(instance.patient(pid).sessions, a.start_day)
    for pid in schedule.unassigned:
        total += unassigned_penalty(instance.horizon_days, instance.patient(pid).sessions)
    return total


def _offline_run(case: Case, algorithm: str, rep: int, seed: int | None,
                 params: SolverParams) -> RunRecord:
    import time
    started = time.perf_counter()
    if algorithm in METAHEURISTICS:
        result = solve(algorithm, offline_context(case.instance), params, seed)
        wait = waiting_metrics(case.instance, result.best.schedule)
        return RunRecord(
            case.id, case.group, algorithm, rep, seed,
            objective=result.best_objective, penalty=result.best.penalty,
            waiting_days=wait.total_waiting_days, waiting_patients=wait.waiting_patients,
            convergence_iteration=float(result.convergence_iteration),
            iterations_run=result.iterations_run,
            traces=(("", result.trace),),
            wall_time_ms=(time.perf_counter() - started) * 1000.0,
        )
    if algorithm == "greedy":
        schedule = greedy_first_fit(case.instance)
        objective = _schedule_objective(case.instance, schedule)
        wait = waiting_metrics(case.instance, schedule)
        penalty = sum(unassigned_penalty(case.instance.horizon_days,
                                         case.instance.patient(pid).sessions)
                      for pid in schedule.unassigned)
        return RunRecord(
            case.id, case.group, algorithm, rep, None,
            objective=objective, penalty=float(penalty),
            waiting_days=wait.total_waiting_days, waiting_patients=wait.waiting_patients,
            convergence_iteration=1.0, iterations_run=1,
            traces=(("", (objective,)),),
            wall_time_ms=(time.perf_counter() - started) * 1000.0,
        )
    # exact
    result = solve_exact_offline(case.instance, SearchLimits())
    if result.schedule is None:
        return RunRecord(
            case.id, case.group, algorithm, rep, None,
            objective=None, penalty=0.0, waiting_days=None, waiting_patients=None,
            convergence_iteration=None, iterations_run=1, traces=(),
            wall_time_ms=(time.perf_counter() - started) * 1000.0,
            proven_optimal=result.proven_optimal,
            error="infeasible" if result.proven_optimal else "search cap reached",
        )
    wait = waiting_metrics(case.instance, result.schedule)
    return RunRecord(
        case.id, case.group, algorithm, rep, None,
        objective=float(result.objective), penalty=0.0,
        waiting_days=wait.total_waiting_days, waiting_patients=wait.waiting_patients,
        convergence_iteration=1.0, iterations_run=1,
        traces=(("", (float(result.objective),)),),
        wall_time_ms=(time.perf_counter() - started) * 1000.0,
        proven_optimal=result.proven_optimal,
    )


def _replay_run(case: Case, algorithm: str, rep: int, seed: int | None,
                params: SolverParams) -> RunRecord:
    import time
    started = time.perf_counter()
    mode = "os" if case.mode == "replay-os" else "online"
    outcome = replay(case.instance, algorithm, mode=mode, params=params,
                     seed=seed if seed is not None else 0,
                     scenario_set=case.scenario_set)
    runs = outcome.arrival_runs
    convergence = fmean(r.convergence_iteration for r in runs) if runs else None
    traces = tuple(
        (f"a{d.arrival_index:02d}", d.run.trace) for d in outcome.decisions if d.run is not None
    )
    if not traces:
        traces = (("", (outcome.objective,)),)
    penalty = sum(unassigned_penalty(case.instance.horizon_days,
                                     case.instance.patient(pid).sessions)
                  for pid in outcome.schedule.unassigned)
    return RunRecord(
        case.id, case.group, algorithm, rep, seed,
        objective=outcome.objective, penalty=float(penalty),
        waiting_days=outcome.waiting.total_waiting_days,
        waiting_patients=outcome.waiting.waiting_patients,
        convergence_iteration=convergence,
        iterations_run=sum(r.iterations_run for r in runs) if runs else 1,
        traces=traces,
        wall_time_ms=(time.perf_counter() - started) * 1000.0,
    )


def _run_spec(spec) -> RunRecord:
    case, algorithm, rep, seed, params = spec
    try:
        if case.mode == "offline":
            return _offline_run(case, algorithm, rep, seed, params)
        return _replay_run(case, algorithm, rep, seed, params)
    except Exception as exc:  # captured per-run, never fatal to the experiment
        return RunRecord(
            case.id, case.group, algorithm, rep, seed,
            objective=None, penalty=0.0, waiting_days=None, waiting_patients=None,
            convergence_iteration=None, iterations_run=0, traces=(),
            wall_time_ms=0.0, error=f"{type(exc).__name__}: {exc}",
        )


def run_experiment(suite: Suite, algorithms, params: SolverParams | None = None,
                   parallel: bool = False) -> ExperimentResults:
    """Run every (case, algorithm, repetition) combination.

    Stochastic algorithms run `repetitions` times with seeds seed_base + k;
    greedy and exact are deterministic and run once per case. Results are
    identical whether or not parallel execution is used.
    """
    algorithms = tuple(algorithms)
    unknown = [a for a in algorithms if a not in KNOWN_ALGORITHMS]
    if unknown:
        raise ValueError(f"unknown algorithms: {unknown}")
    params = params or suite.params or SolverParams()

    specs = []
    for case in suite.cases:
        if case.mode not in CASE_MODES:
            raise ValueError(f"case {case.id!r}: unknown mode {case.mode!r}")
        for algorithm in algorithms:
            if algorithm in DETERMINISTIC_ALGORITHMS:
                specs.append((case, algorithm, 0, None, params))
            else:
                for rep in range(suite.repetitions):
                    specs.append((case, algorithm, rep, suite.seed_base + rep, params))

    if parallel and len(specs) > 1:
        with ProcessPoolExecutor() as pool:
            runs = tuple(pool.map(_run_spec, specs, chunksize=1))
    else:
        runs = tuple(_run_spec(spec) for spec in specs)
    return ExperimentResults(
        suite_name=suite.name, algorithms=algorithms,
        repetitions=suite.repetitions, seed_base=suite.seed_base, runs=runs,
    )


# ---------------------------------------------------------------------------
# Summaries

def _group_sort_key(group: str):
    m = re.match(r"(\d+)", group)
    return (int(m.group(1)) if m else 1 << 30, group)


def summarize(results: ExperimentResults) -> Summary:
    """Aggregate per (algorithm, case group); objective stats include penalties."""
    if not results.runs:
        raise ValueError("nothing to report: no runs")

    optima: dict[str, float] = {}
    for r in results.runs:
        if r.algorithm == "exact" and r.proven_optimal and r.objective is not None:
            optima[r.case_id] = r.objective

    gaps: dict = {}
    for r in results.runs:
        if r.error is None and r.objective is not None and r.case_id in optima:
            opt = optima[r.case_id]
            gaps[(r.case_id, r.algorithm, r.rep)] = (r.objective - opt) / max(1.0, opt)

    rows = []
    groups = sorted({r.group for r in results.runs}, key=_group_sort_key)
    for algorithm in results.algorithms:
        for group in groups:
            batch = [r for r in results.runs
                     if r.algorithm == algorithm and r.group == group and r.error is None
                     and r.objective is not None]
            if not batch:
                rows.append(SummaryRow(algorithm, group, 0, None, None, None, None,
                                       None, None, None, None, None))
                continue
            objectives = [r.objective for r in batch]
            batch_gaps = [gaps[(r.case_id, r.algorithm, r.rep)] for r in batch
                          if (r.case_id, r.algorithm, r.rep) in gaps]
            convergences = [r.convergence_iteration for r in batch
                            if r.convergence_iteration is not None]
            rows.append(SummaryRow(
                algorithm=algorithm, group=group, runs=len(batch),
                best=min(objectives), avg=fmean(objectives), worst=max(objectives),
                gap_vs_exact=fmean(batch_gaps) if batch_gaps else None,
                mean_runtime_ms=fmean(r.wall_time_ms for r in batch),
                stddev_runtime_ms=pstdev([r.wall_time_ms for r in batch]),
                mean_convergence_iter=fmean(convergences) if convergences else None,
                waiting_days=fmean(r.waiting_days for r in batch),
                waiting_patients=fmean(r.waiting_patients for r in batch),
            ))
    return Summary(rows=tuple(rows), gaps=gaps, optima=optima)


# ---------------------------------------------------------------------------
# Report files

SUMMARY_COLUMNS = ("algorithm", "case_group", "best", "avg", "worst", "gap_vs_exact",
                   "mean_convergence_iter", "waiting_days", "waiting_patients")


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _run_to_json(record: RunRecord, gap: float | None) -> dict:
    return {
        "case_id": record.case_id,
        "group": record.group,
        "algorithm": record.algorithm,
        "rep": record.rep,
        "seed": record.seed,
        "objective": record.objective,
        "penalty": record.penalty,
        "waiting_days": record.waiting_days,
        "waiting_patients": record.waiting_patients,
        "convergence_iteration": record.convergence_iteration,
        "iterations_run": record.iterations_run,
        "gap_vs_exact": gap,
        "proven_optimal": record.proven_optimal,
        "error": record.error,
        "traces": {label: list(trace) for label, trace in record.traces},
    }


def _run_stem(record: RunRecord) -> str:
    seed = "det" if record.seed is None else str(record.seed)
    return f"{record.algorithm}_{record.case_id}_{seed}"


def render_summary_csv(summary: Summary, path: Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SUMMARY_COLUMNS)
        for row in summary.rows:
            writer.writerow([
                row.algorithm, row.group, _fmt(row.best), _fmt(row.avg), _fmt(row.worst),
                _fmt(row.gap_vs_exact), _fmt(row.mean_convergence_iter),
                _fmt(row.waiting_days), _fmt(row.waiting_patients),
            ])


def render_summary_json(summary: Summary, results: ExperimentResults, path: Path) -> None:
    doc = {
        "suite": results.suite_name,
        "algorithms": list(results.algorithms),
        "repetitions": results.repetitions,
        "seed_base": results.seed_base,
        "rows": [
            {
                "algorithm": row.algorithm, "case_group": row.group, "runs": row.runs,
                "best": row.best, "avg": row.avg, "worst": row.worst,
                "gap_vs_exact": row.gap_vs_exact,
                "mean_convergence_iter": row.mean_convergence_iter,
                "waiting_days": row.waiting_days, "waiting_patients": row.waiting_patients,
            }
            for row in summary.rows
        ],
        "runs": [
            _run_to_json(r, summary.gaps.get((r.case_id, r.algorithm, r.rep)))
            for r in results.runs
        ],
    }
    path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def render_summary_md(summary: Summary, results: ExperimentResults, path: Path,
                      timings: dict | None = None) -> None:
    lines = [f"# Benchmark report: {results.suite_name}", ""]
    lines += ["## Objective values (penalized total treatment days)", ""]
    lines += ["| Algorithm | Group | Runs | Best | Avg | Worst | Gap vs exact |",
              "|---|---|---|---|---|---|---|"]
    for row in summary.rows:
        lines.append(
            f"| {row.algorithm} | {row.group} | {row.runs} | {_fmt(row.best)} "
            f"| {_fmt(row.avg)} | {_fmt(row.worst)} | {_fmt(row.gap_vs_exact)} |")
    lines += ["", "## Waiting comparison", "",
              "Waiting days / waiting patients are artifact-defined metrics "
              "(wait = start day - release day; unassigned patients wait out the horizon).", ""]
    lines += ["| Algorithm | Waiting Days | Waiting Patients |", "|---|---|---|"]
    for algorithm in results.algorithms:
        rows = [r for r in summary.rows if r.algorithm == algorithm and r.waiting_days is not None]
        if not rows:
            continue
        wd = fmean(r.waiting_days for r in rows)
        wp = fmean(r.waiting_patients for r in rows)
        lines.append(f"| {algorithm} | {_fmt(round(wd, 3))} | {_fmt(round(wp, 3))} |")
    lines += ["", "## Convergence", ""]
    lines += ["| Algorithm | Group | Mean convergence iteration |", "|---|---|---|"]
    for row in summary.rows:
        lines.append(f"| {row.algorithm} | {row.group} | {_fmt(row.mean_convergence_iter)} |")
    if timings:
        lines += ["", "## Runtime (machine-local)", "",
                  "Wall-clock times are specific to this machine and run; only the "
                  "relative ordering within this report is meaningful.", ""]
        lines += ["| Algorithm | Mean runtime (ms) |", "|---|---|"]
        for algorithm in results.algorithms:
            values = timings.get(algorithm)
            if values:
                lines.append(f"| {algorithm} | {_fmt(round(fmean(values), 3))} |")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def emit_report(summary: Summary, results: ExperimentResults, format: str, out_dir) -> list[Path]:
    """Write the report file set; returns the paths written.

    Deterministic artifacts: summary.csv, summary.json, runs/*.json,
    traces/*.csv, experiment.json (and summary.md for format="md").
    Volatile artifact: timings.csv.
    """
    if format not in ("csv", "json", "md"):
        raise ValueError(f"unknown report format {format!r}")
    if not results.runs:
        raise ValueError("nothing to report: no runs")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for sub in ("runs", "traces"):
        if (out / sub).exists():
            shutil.rmtree(out / sub)
        (out / sub).mkdir()

    written = []
    for record in results.runs:
        gap = summary.gaps.get((record.case_id, record.algorithm, record.rep))
        path = out / "runs" / f"{_run_stem(record)}.json"
        path.write_text(json.dumps(_run_to_json(record, gap), indent=2) + "\n", encoding="utf-8")
        written.append(path)
        for label, trace in record.traces:
            suffix = f"_{label}" if label else ""
            tpath = out / "traces" / f"{_run_stem(record)}{suffix}.csv"
            with open(tpath, "w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(["iteration", "best_so_far"])
                for i, value in enumerate(trace, start=1):
                    writer.writerow([i, _fmt(float(value))])
            written.append(tpath)

    meta = out / "experiment.json"
    meta.write_text(json.dumps({
        "suite": results.suite_name,
        "algorithms": list(results.algorithms),
        "repetitions": results.repetitions,
        "seed_base": results.seed_base,
    }, indent=2) + "\n", encoding="utf-8")
    written.append(meta)

    csv_path = out / "summary.csv"
    render_summary_csv(summary, csv_path)
    written.append(csv_path)
    json_path = out / "summary.json"
    render_summary_json(summary, results, json_path)
    written.append(json_path)
    if format == "md":
        md_path = out / "summary.md"
        timings = {}
        for r in results.runs:
            timings.setdefault(r.algorithm, []).append(r.wall_time_ms)
        render_summary_md(summary, results, md_path, timings)
        written.append(md_path)

    timings_path = out / "timings.csv"
    with open(timings_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["algorithm", "case_id", "rep", "seed", "wall_time_ms"])
        for r in results.runs:
            writer.writerow([r.algorithm, r.case_id, r.rep,
                             "" if r.seed is None else r.seed, _fmt(r.wall_time_ms)])
    written.append(timings_path)
    return written


def load_results(report_dir) -> ExperimentResults:
    """Rebuild results from a report directory (runs/*.json + experiment.json)."""
    out = Path(report_dir)
    meta_path = out / "experiment.json"
    if not meta_path.exists():
        raise FileNotFoundError(f"{meta_path}: not a report directory")
    meta = json.loads(meta_path.read_text(encoding="utf-8"))
    records = []
    for path in sorted((out / "runs").glob("*.json")):
        obj = json.loads(path.read_text(encoding="utf-8"))
        records.append(RunRecord(
            case_id=obj["case_id"], group=obj["group"], algorithm=obj["algorithm"],
            rep=obj["rep"], seed=obj["seed"], objective=obj["objective"],
            penalty=obj["penalty"], waiting_days=obj["waiting_days"],
            waiting_patients=obj["waiting_patients"],
            convergence_iteration=obj["convergence_iteration"],
            iterations_run=obj["iterations_run"],
            traces=tuple((label, tuple(vals)) for label, vals in sorted(obj["traces"].items())),
            wall_time_ms=0.0,
            proven_optimal=obj.get("proven_optimal"),
            error=obj.get("error"),
        ))
    order = {algo: i for i, algo in enumerate(meta["algorithms"])}
    records.sort(key=lambda r: (order.get(r.algorithm, 99), r.case_id, r.rep))
    return ExperimentResults(
        suite_name=meta["suite"], algorithms=tuple(meta["algorithms"]),
        repetitions=meta["repetitions"], seed_base=meta["seed_base"],
        runs=tuple(records),
    )


# ---------------------------------------------------------------------------
# Suite files

def save_suite(suite: Suite, out_dir) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cases = []
    for case in suite.cases:
        inst_name = f"{case.id}.instance.json"
        fileio.save_instance(case.instance, out / inst_name)
        entry = {"id": case.id, "group": case.group, "mode": case.mode,
                 "instance": inst_name, "scenarios": None}
        if case.scenario_set is not None:
            scen_name = f"{case.id}.scenarios.json"
            fileio.save_scenarios(case.scenario_set, out / scen_name)
            entry["scenarios"] = scen_name
        cases.append(entry)
    manifest = {
        "version": 1,
        "name": suite.name,
        "repetitions": suite.repetitions,
        "seed_base": suite.seed_base,
        "cases": cases,
    }
    if suite.params is not None:
        (out / "params.json").write_text(
            json.dumps(suite.params.to_json(), indent=2) + "\n", encoding="utf-8")
        manifest["params"] = "params.json"
    path = out / "suite.json"
    path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return path


def load_suite(suite_dir) -> Suite:
    root = Path(suite_dir)
    manifest_path = root / "suite.json"
    if not manifest_path.exists():
        raise FileNotFoundError(f"{manifest_path}: suite manifest not found")
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    cases = []
    for entry in manifest["cases"]:
        scenario_set = None
        if entry.get("scenarios"):
            scenario_set = fileio.load_scenarios(root / entry["scenarios"])
        mode = entry.get("mode") or ("replay-os" if scenario_set else "offline")
        cases.append(Case(
            id=entry["id"], group=entry["group"], mode=mode,
            instance=fileio.load_instance(root / entry["instance"]),
            scenario_set=scenario_set,
        ))
    params = None
    if manifest.get("params"):
        params = SolverParams.from_json(
            json.loads((root / manifest["params"]).read_text(encoding="utf-8")))
    return Suite(
        name=manifest.get("name", root.name),
        repetitions=manifest.get("repetitions", 1),
        seed_base=manifest.get("seed_base", 0),
        cases=tuple(cases),
        params=params,
    )


def with_overrides(suite: Suite, repetitions: int | None = None,
                   seed_base: int | None = None) -> Suite:
    updates = {}
    if repetitions is not None:
        updates["repetitions"] = repetitions
    if seed_base is not None:
        updates["seed_base"] = seed_base
    return replace(suite, **updates) if updates else suite
