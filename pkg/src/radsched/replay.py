"""Sequential arrival replay: schedule patients one at a time, freezing the past.

Arrivals are processed in release order (ties broken by roster order) or in
roster order. Each arrival is placed by the chosen algorithm — myopic
first-fit (greedy), per-arrival optimal placement (exact, which in os mode
minimizes placement cost plus exact expected recourse), or one of the
population solvers — and the assignment is then frozen for all later
arrivals. A patient never starts before its release day.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constraints import patient_cost, unassigned_penalty, waiting_metrics, WaitingMetrics
from .encoding import online_context, os_context
from .model import Assignment, Instance, ModelError, Occupancy, Schedule, build_occupancy
from .oracle import candidate_assignments
from .scenarios import ScenarioSet
from .solvers import RunResult, SolverParams, solve
from .stochastic import expected_recourse

METAHEURISTICS = ("ga", "ffo", "wo")
REPLAY_ALGORITHMS = METAHEURISTICS + ("greedy", "exact")

# Per-arrival solver seeds: spread the base seed so arrival streams never
# overlap across reasonable suite sizes.
_ARRIVAL_SEED_STRIDE = 100003


@dataclass(frozen=True)
class ArrivalDecision:
    arrival_index: int  # 1-based
    patient_id: str
    assignment: Assignment | None
    run: RunResult | None  # population solvers only


@dataclass(frozen=True)
class ReplayOutcome:
    schedule: Schedule
    decisions: tuple[ArrivalDecision, ...]
    objective: float  # placement costs plus penalties for unplaceable patients
    waiting: WaitingMetrics

    @property
    def arrival_runs(self) -> tuple[RunResult, ...]:
        return tuple(d.run for d in self.decisions if d.run is not None)


def arrival_order(instance: Instance, order: str = "release") -> list[str]:
    if order == "input":
        return [p.id for p in instance.patients]
    if order == "release":
        indexed = list(enumerate(instance.patients))
        indexed.sort(key=lambda item: (item[1].release_day, item[0]))
        return [p.id for _, p in indexed]
    raise ValueError(f"unknown arrival order {order!r}")


def _occupancy_with(instance: Instance, base: Occupancy, assignment: Assignment,
                    sessions: int) -> Occupancy:
    used = base.used.copy()
    for k in range(sessions):
        used[assignment.machine - 1, assignment.start_day - 1 + k, assignment.slot - 1] = True
    return Occupancy(used=used, count=used.sum(axis=0).astype(np.int32))


def _exact_arrival(instance: Instance, frozen: Schedule, pid: str, mode: str,
                   scenario_set: ScenarioSet | None) -> Assignment | None:
    patient = instance.patient(pid)
    occupancy = build_occupancy(instance, frozen)
    candidates = candidate_assignments(instance, patient, occupancy,
                                       min_start=patient.release_day)
    if not candidates:
        return None
    if mode == "online" or scenario_set is None:
        c = candidates[0]  # cost order: the first candidate is optimal
        return Assignment(pid, c.machine, c.start_day, c.slot)
    best = None
    best_value = None
    for c in candidates:
        trial = Assignment(pid, c.machine, c.start_day, c.slot)
        occ = _occupancy_with(instance, occupancy, trial, patient.sessions)
        value = c.cost + expected_recourse(instance, occ, scenario_set)
        if best_value is None or value < best_value:
            best, best_value = trial, value
    return best


def _greedy_arrival(instance: Instance, frozen: Schedule, pid: str) -> Assignment | None:
    patient = instance.patient(pid)
    occupancy = build_occupancy(instance, frozen)
    candidates = candidate_assignments(instance, patient, occupancy,
                                       min_start=patient.release_day)
    if not candidates:
        return None
    c = candidates[0]
    return Assignment(pid, c.machine, c.start_day, c.slot)


def replay(
    instance: Instance,
    algorithm: str,
    mode: str = "online",
    params: SolverParams | None = None,
    seed: int = 0,
    scenario_set: ScenarioSet | None = None,
    scenario_sets_per_arrival: list[ScenarioSet] | None = None,
    order: str = "release",
) -> ReplayOutcome:
    """Replay the roster as a sequence of arrivals under the given algorithm."""
    if algorithm not in REPLAY_ALGORITHMS:
        raise ValueError(f"unknown replay algorithm {algorithm!r}")
    if mode not in ("online", "os"):
        raise ValueError(f"unknown replay mode {mode!r}")
    if mode == "os" and scenario_set is None and scenario_sets_per_arrival is None:
        raise ModelError("os replay requires a scenario set")
    params = params or SolverParams()

    ids = arrival_order(instance, order)
    if scenario_sets_per_arrival is not None and len(scenario_sets_per_arrival) != len(ids):
        raise ModelError(
            f"per-arrival scenario list has {len(scenario_sets_per_arrival)} entries "
            f"for {len(ids)} arrivals"
        )

    schedule = Schedule()
    decisions: list[ArrivalDecision] = []
    for k, pid in enumerate(ids):
        forecast = (scenario_sets_per_arrival[k] if scenario_sets_per_arrival is not None
                    else scenario_set)
        run = None
        if algorithm == "greedy":
            assignment = _greedy_arrival(instance, schedule, pid)
        elif algorithm == "exact":
            assignment = _exact_arrival(instance, schedule, pid, mode, forecast)
        else:
            if mode == "os":
                context = os_context(instance, schedule, pid, forecast, respect_release=True)
            else:
                context = online_context(instance, schedule, pid, respect_release=True)
            run = solve(algorithm, context, params, seed + _ARRIVAL_SEED_STRIDE * k)
            assignment = run.best.schedule.assignments.get(pid)
        if assignment is not None:
            schedule = schedule.with_assignment(assignment)
        else:
            schedule = Schedule(schedule.assignments, schedule.unassigned + (pid,))
        decisions.append(ArrivalDecision(k + 1, pid, assignment, run))

    objective = 0.0
    for pid, a in schedule.assignments.items():
        objective += patient_cost(instance.patient(pid).sessions, a.start_day)
    for pid in schedule.unassigned:
        objective += unassigned_penalty(instance.horizon_days, instance.patient(pid).sessions)

    return ReplayOutcome(
        schedule=schedule,
        decisions=tuple(decisions),
        objective=objective,
        waiting=waiting_metrics(instance, schedule),
    )
