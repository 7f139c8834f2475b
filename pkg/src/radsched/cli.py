"""Command-line interface.

Subcommands: generate, solve, validate, replay, bench, report. Machine-
readable JSON goes to stdout (or the --out target); diagnostics go to
stderr. Exit codes: 0 success, 1 domain failure (infeasible or invalid
input), 2 usage error. Stochastic algorithms always require --seed; nothing
is ever seeded from the clock.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import bench as bench_mod
from . import fileio
from .constraints import check_constraints, offline_objective
from .encoding import offline_context, os_context
from .model import GENERAL, SPECIAL, Instance, ModelError, Patient, Schedule, validate_instance
from .oracle import SearchLimits, candidate_assignments, greedy_first_fit, solve_exact_offline
from .portable_rng import SplitMix64
from .replay import METAHEURISTICS, replay
from .solvers import SolverParams, solve
from .stochastic import os_objective

STOCHASTIC = set(METAHEURISTICS)


class DomainFailure(Exception):
    """Raised for domain-level failures; rendered as structured JSON, exit 1."""

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.details = details


def _emit(payload: dict, out: str | None = None) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load_params(path: str | None) -> SolverParams:
    if path is None:
        return SolverParams()
    obj = json.loads(Path(path).read_text(encoding="utf-8"))
    return SolverParams.from_json(obj)


def _load_valid_instance(path: str) -> Instance:
    instance = fileio.load_instance(path)
    findings = validate_instance(instance)
    if findings:
        raise DomainFailure(f"invalid instance {path}",
                            findings=[f.to_json() for f in findings])
    return instance


# ---------------------------------------------------------------------------
# generate

def generate_instance(patients: int, machines: int, days: int, slots: int,
                      special_ratio: float, sessions_min: int, sessions_max: int,
                      seed: int) -> Instance:
    """Deterministic synthetic instance (SplitMix64-seeded)."""
    if patients < 0 or machines < 1 or days < 1 or slots < 1:
        raise ModelError("patients must be >= 0 and machines/days/slots >= 1")
    if not 1 <= sessions_min <= sessions_max:
        raise ModelError(f"bad sessions range [{sessions_min}, {sessions_max}]")
    if sessions_max > days:
        raise ModelError(f"sessions-max {sessions_max} exceeds horizon {days}")
    if not 0.0 <= special_ratio <= 1.0:
        raise ModelError("special-ratio must be in [0, 1]")
    rng = SplitMix64(seed)
    roster = []
    for k in range(patients):
        sessions = rng.randint(sessions_min, sessions_max)
        if rng.random() < special_ratio:
            size = rng.randint(1, slots)
            allowed = frozenset(rng.sample(list(range(1, slots + 1)), size))
            roster.append(Patient(f"P{k + 1}", SPECIAL, sessions, allowed))
        else:
            roster.append(Patient(f"P{k + 1}", GENERAL, sessions))
    return Instance(machine_count=machines, horizon_days=days, slots_per_day=slots,
                    patients=tuple(roster))


def _cmd_generate(args) -> int:
    instance = generate_instance(args.patients, args.machines, args.days, args.slots,
                                 args.special_ratio, args.sessions_min, args.sessions_max,
                                 args.seed)
    fileio.save_instance(instance, args.out)
    _emit({"written": args.out, "patients": len(instance.patients),
           "instance_id": fileio.instance_digest(instance)})
    return 0


# ---------------------------------------------------------------------------
# solve

def _solve_offline(args, instance: Instance, params: SolverParams):
    if args.algo == "exact":
        result = solve_exact_offline(instance, SearchLimits())
        if result.schedule is None:
            raise DomainFailure("infeasible: no complete schedule exists")
        return result.schedule, {
            "algorithm": "exact", "objective": result.objective,
            "proven_optimal": result.proven_optimal,
            "nodes_explored": result.nodes_explored,
        }
    if args.algo == "greedy":
        schedule = greedy_first_fit(instance)
        payload = {"algorithm": "greedy", "unassigned": list(schedule.unassigned)}
        if not schedule.unassigned:
            payload["objective"] = offline_objective(instance, schedule)
        return schedule, payload
    context = offline_context(instance)
    run = solve(args.algo, context, params, args.seed)
    payload = run.to_json(include_timing=True)
    payload["feasible"] = run.feasible
    return run.best.schedule, payload


def _solve_os(args, instance: Instance, params: SolverParams):
    if args.scenarios is None:
        raise DomainFailure("os mode requires --scenarios")
    if len(instance.patients) != 1:
        raise DomainFailure(
            "os mode solves a single pending arrival; give a one-patient instance "
            "or use `replay` for a sequence of arrivals")
    scenario_set = fileio.load_scenarios(args.scenarios)
    pending = instance.patients[0].id
    if args.algo in STOCHASTIC:
        context = os_context(instance, None, pending, scenario_set, respect_release=True)
        run = solve(args.algo, context, params, args.seed)
        schedule = run.best.schedule
        payload = run.to_json(include_timing=True)
        payload["feasible"] = run.feasible
        if pending in schedule.assignments:
            payload["objective_exact_recourse"] = float(
                os_objective(instance, schedule, pending, scenario_set, "exact"))
        return schedule, payload
    # exact / greedy: enumerate candidates; greedy is myopic (ignores scenarios)
    patient = instance.patients[0]
    candidates = candidate_assignments(instance, patient, min_start=patient.release_day)
    if not candidates:
        raise DomainFailure("infeasible: pending patient has no feasible placement")
    from .model import Assignment

    if args.algo == "greedy":
        c = candidates[0]
        schedule = Schedule({pending: Assignment(pending, c.machine, c.start_day, c.slot)})
        value = os_objective(instance, schedule, pending, scenario_set, "exact")
        return schedule, {"algorithm": "greedy", "objective": float(value)}
    best_schedule, best_value = None, None
    for c in candidates:
        trial = Schedule({pending: Assignment(pending, c.machine, c.start_day, c.slot)})
        value = os_objective(instance, trial, pending, scenario_set, "exact")
        if best_value is None or value < best_value:
            best_schedule, best_value = trial, value
    return best_schedule, {"algorithm": "exact", "objective": float(best_value),
                           "proven_optimal": True}


def _cmd_solve(args) -> int:
    if args.algo in STOCHASTIC and args.seed is None:
        raise UsageError(f"--seed is required for --algo {args.algo}")
    instance = _load_valid_instance(args.instance)
    params = _load_params(args.params)
    if args.mode == "offline":
        schedule, payload = _solve_offline(args, instance, params)
    else:
        schedule, payload = _solve_os(args, instance, params)
    if args.out:
        fileio.save_schedule(schedule, instance, args.out)
        payload["schedule_file"] = args.out
        _emit(payload)
    else:
        payload["schedule"] = fileio.schedule_to_json(schedule, instance)
        _emit(payload)
    return 0


# ---------------------------------------------------------------------------
# validate

def _cmd_validate(args) -> int:
    instance = fileio.load_instance(args.instance)
    findings = validate_instance(instance)
    if findings:
        _emit({"instance_findings": [f.to_json() for f in findings]})
        return 1
    if args.schedule is None:
        _emit({"violations": []})
        return 0
    schedule = fileio.load_schedule(args.schedule, instance)
    violations = check_constraints(instance, schedule, require_complete=True)
    _emit({"violations": [v.to_json() for v in violations]})
    return 0 if not violations else 1


# ---------------------------------------------------------------------------
# replay

def _load_forecasts(path: str | None, arrivals: int):
    if path is None:
        return None, None
    p = Path(path)
    if p.is_dir():
        sets = []
        for k in range(1, arrivals + 1):
            f = p / f"arrival{k:02d}.json"
            if not f.exists():
                raise DomainFailure(f"per-arrival scenario file missing: {f}")
            sets.append(fileio.load_scenarios(f))
        return None, sets
    return fileio.load_scenarios(p), None


def _cmd_replay(args) -> int:
    if args.algo in STOCHASTIC and args.seed is None:
        raise UsageError(f"--seed is required for --algo {args.algo}")
    instance = _load_valid_instance(args.instance)
    params = _load_params(args.params)
    standing, per_arrival = _load_forecasts(args.scenarios, len(instance.patients))
    if args.mode == "os" and standing is None and per_arrival is None:
        raise DomainFailure("os replay requires --scenarios")
    outcome = replay(instance, args.algo, mode=args.mode, params=params,
                     seed=args.seed if args.seed is not None else 0,
                     scenario_set=standing, scenario_sets_per_arrival=per_arrival,
                     order=args.order)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    fileio.save_schedule(outcome.schedule, instance, out / "final_schedule.json")
    decisions = []
    for d in outcome.decisions:
        entry = {
            "arrival": d.arrival_index,
            "patient": d.patient_id,
            "assignment": None if d.assignment is None else {
                "machine": d.assignment.machine,
                "start_day": d.assignment.start_day,
                "slot": d.assignment.slot,
            },
        }
        if d.run is not None:
            entry["result"] = d.run.to_json(include_timing=True)
        decisions.append(entry)
    (out / "decisions.json").write_text(json.dumps({
        "order": [d.patient_id for d in outcome.decisions],
        "decisions": decisions,
    }, indent=2) + "\n", encoding="utf-8")
    _emit({
        "written": str(out),
        "objective": outcome.objective,
        "waiting_days": outcome.waiting.total_waiting_days,
        "waiting_patients": outcome.waiting.waiting_patients,
        "unassigned": list(outcome.schedule.unassigned),
    })
    return 0


# ---------------------------------------------------------------------------
# bench / report

def _cmd_bench(args) -> int:
    suite = bench_mod.load_suite(args.suite)
    suite = bench_mod.with_overrides(suite, repetitions=args.reps, seed_base=args.seed)
    params = _load_params(args.params)
    parallel = bool(os.environ.get("RADSCHED_BENCH_PARALLEL"))
    results = bench_mod.run_experiment(suite, args.algos, params, parallel=parallel)
    summary = bench_mod.summarize(results)
    bench_mod.emit_report(summary, results, args.format, args.report)
    errors = [r for r in results.runs if r.error is not None]
    _emit({"report": args.report, "runs": len(results.runs), "errors": len(errors)})
    return 0


def _cmd_report(args) -> int:
    results = bench_mod.load_results(args.results)
    summary = bench_mod.summarize(results)
    out = Path(args.results)
    if args.format == "csv":
        path = out / "summary.csv"
        bench_mod.render_summary_csv(summary, path)
    elif args.format == "json":
        path = out / "summary.json"
        bench_mod.render_summary_json(summary, results, path)
    else:
        path = out / "summary.md"
        bench_mod.render_summary_md(summary, results, path)
    _emit({"written": str(path)})
    return 0


# ---------------------------------------------------------------------------
# parser

class UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="radsched",
        description="Radiotherapy patient scheduling: generation, solving, replay, benchmarks.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    g = sub.add_parser("generate", help="write a synthetic instance")
    g.add_argument("--patients", type=int, required=True)
    g.add_argument("--machines", type=int, required=True)
    g.add_argument("--days", type=int, required=True)
    g.add_argument("--slots", type=int, required=True)
    g.add_argument("--special-ratio", type=float, default=0.0)
    g.add_argument("--sessions-min", type=int, default=1)
    g.add_argument("--sessions-max", type=int, default=1)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--out", required=True)
    g.set_defaults(func=_cmd_generate)

    s = sub.add_parser("solve", help="solve an instance")
    s.add_argument("--algo", required=True, choices=["ga", "ffo", "wo", "exact", "greedy"])
    s.add_argument("--mode", default="offline", choices=["offline", "os"])
    s.add_argument("--instance", required=True)
    s.add_argument("--scenarios")
    s.add_argument("--params")
    s.add_argument("--seed", type=int)
    s.add_argument("--out")
    s.set_defaults(func=_cmd_solve)

    v = sub.add_parser("validate", help="validate an instance and optional schedule")
    v.add_argument("--instance", required=True)
    v.add_argument("--schedule")
    v.set_defaults(func=_cmd_validate)

    r = sub.add_parser("replay", help="schedule arrivals one at a time")
    r.add_argument("--instance", required=True)
    r.add_argument("--order", default="release", choices=["release", "input"])
    r.add_argument("--algo", required=True, choices=["ga", "ffo", "wo", "exact", "greedy"])
    r.add_argument("--mode", default="online", choices=["online", "os"])
    r.add_argument("--scenarios", help="scenario file, or directory of arrivalNN.json files")
    r.add_argument("--params")
    r.add_argument("--seed", type=int)
    r.add_argument("--out", required=True)
    r.set_defaults(func=_cmd_replay)

    b = sub.add_parser("bench", help="run a benchmark suite end to end")
    b.add_argument("--suite", required=True)
    b.add_argument("--algos", nargs="+", required=True,
                   choices=["ga", "ffo", "wo", "greedy", "exact"])
    b.add_argument("--reps", type=int)
    b.add_argument("--seed", type=int)
    b.add_argument("--report", required=True)
    b.add_argument("--format", default="csv", choices=["csv", "json", "md"])
    b.add_argument("--params")
    b.set_defaults(func=_cmd_bench)

    p = sub.add_parser("report", help="re-render reports from stored per-run JSON")
    p.add_argument("--results", required=True)
    p.add_argument("--format", default="md", choices=["csv", "json", "md"])
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.exit(2, f"{parser.prog}: error: {exc}\n")
    except DomainFailure as exc:
        _emit({"error": {"type": "DomainFailure", "message": str(exc), **exc.details}})
        return 1
    except (ModelError, fileio.ParseError, FileNotFoundError, ValueError) as exc:
        _emit({"error": {"type": type(exc).__name__, "message": str(exc)}})
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
