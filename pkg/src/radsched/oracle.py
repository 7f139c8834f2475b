"""Reference solvers: exact branch-and-bound, per-scenario recourse, first-fit greedy.

These exist for verification and baselines, not scale: exhaustive-with-pruning
search is intended for desk-sized instances (roughly up to a dozen patients).
All results are bit-reproducible: candidate enumeration and tie-breaking are
fully deterministic.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .constraints import patient_cost, unassigned_penalty
from .model import Assignment, Instance, Occupancy, Patient, Schedule, empty_occupancy
from .scenarios import Scenario


@dataclass(frozen=True)
class Candidate:
    machine: int
    start_day: int
    slot: int
    cost: int


@dataclass(frozen=True)
class OptimalResult:
    schedule: Schedule | None
    objective: int | None
    nodes_explored: int
    proven_optimal: bool

    @property
    def feasible(self) -> bool:
        return self.schedule is not None


@dataclass(frozen=True)
class SearchLimits:
    node_cap: int | None = None
    time_cap: float | None = None  # seconds


def _free_run(avail, used, machine0: int, start0: int, slot0: int, sessions: int) -> bool:
    for day0 in range(start0, start0 + sessions):
        if not avail[machine0, day0, slot0] or used[machine0, day0, slot0]:
            return False
    return True


def _candidates_on_grids(instance: Instance, patient: Patient, avail, used, min_start: int) -> list[Candidate]:
    out = []
    last_start = instance.horizon_days - patient.sessions + 1
    slots = patient.slots(instance.slots_per_day)
    for start in range(max(1, min_start), last_start + 1):
        for slot in slots:
            for machine in range(1, instance.machine_count + 1):
                if _free_run(avail, used, machine - 1, start - 1, slot - 1, patient.sessions):
                    out.append(Candidate(machine, start, slot, patient_cost(patient.sessions, start)))
    return out


def candidate_assignments(
    instance: Instance,
    patient: Patient,
    occupancy: Occupancy | None = None,
    min_start: int = 1,
) -> list[Candidate]:
    """All feasible (machine, start, slot) placements for a patient.

    A candidate requires every session cell to be available and unoccupied.
    The list is sorted by cost ascending with (start_day, slot, machine) as
    the deterministic tie-break; since cost is monotone in start_day for a
    fixed patient, scanning starts ascending realizes that order directly.
    """
    if occupancy is None:
        occupancy = empty_occupancy(instance)
    avail = instance.availability_array()
    return _candidates_on_grids(instance, patient, avail, occupancy.used, min_start)


def _branch_and_bound(
    instance: Instance,
    patients: Sequence[Patient],
    base_used: np.ndarray,
    limits: SearchLimits,
) -> OptimalResult:
    """Depth-first search over patients (largest session count first)."""
    avail = instance.availability_array()
    order = sorted(range(len(patients)), key=lambda i: (-patients[i].sessions, i))
    ordered = [patients[i] for i in order]
    n = len(ordered)

    # Admissible per-patient bound: cheapest placement under availability alone.
    min_costs = []
    for p in ordered:
        cands = _candidates_on_grids(instance, p, avail, np.zeros_like(base_used), 1)
        if not cands:
            return OptimalResult(None, None, 0, True)  # proven infeasible outright
        min_costs.append(cands[0].cost)
    suffix_bound = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix_bound[i] = suffix_bound[i + 1] + min_costs[i]

    used = base_used.copy()
    best_cost: int | None = None
    best_assignments: dict[str, Assignment] | None = None
    current: dict[str, Assignment] = {}
    nodes = 0
    deadline = None if limits.time_cap is None else time.perf_counter() + limits.time_cap
    capped = False

    def dfs(i: int, partial: int):
        nonlocal nodes, best_cost, best_assignments, capped
        nodes += 1
        if capped or (limits.node_cap is not None and nodes > limits.node_cap):
            capped = True
            return
        if deadline is not None and nodes % 256 == 0 and time.perf_counter() > deadline:
            capped = True
            return
        if i == n:
            if best_cost is None or partial < best_cost:
                best_cost = partial
                best_assignments = dict(current)
            return
        p = ordered[i]
        for cand in _candidates_on_grids(instance, p, avail, used, 1):
            if best_cost is not None and partial + cand.cost + suffix_bound[i + 1] >= best_cost:
                break  # candidates are cost-ascending; nothing later can improve
            for day0 in range(cand.start_day - 1, cand.start_day - 1 + p.sessions):
                used[cand.machine - 1, day0, cand.slot - 1] = True
            current[p.id] = Assignment(p.id, cand.machine, cand.start_day, cand.slot)
            dfs(i + 1, partial + cand.cost)
            del current[p.id]
            for day0 in range(cand.start_day - 1, cand.start_day - 1 + p.sessions):
                used[cand.machine - 1, day0, cand.slot - 1] = False
            if capped:
                return

    dfs(0, 0)
    if best_assignments is None:
        return OptimalResult(None, None, nodes, proven_optimal=not capped)
    schedule = Schedule(assignments=best_assignments)
    return OptimalResult(schedule, best_cost, nodes, proven_optimal=not capped)


def solve_exact_offline(instance: Instance, limits: SearchLimits | None = None) -> OptimalResult:
    """Global minimum of total treatment days, or a proven infeasibility marker.

    proven_optimal is False only when a node or time cap stopped the search;
    the result then carries the best incumbent found (if any).
    """
    return _branch_and_bound(instance, instance.patients, empty_occupancy(instance).used, limits or SearchLimits())


def solve_recourse(
    instance: Instance,
    fixed_occupancy: Occupancy,
    scenario: Scenario,
    limits: SearchLimits | None = None,
) -> int:
    """Optimal cost of placing a scenario's patients around the fixed schedule.

    Returns the penalty value (horizon+1) * total scenario sessions when the
    scenario cannot be fully placed.
    """
    result = _branch_and_bound(instance, scenario.patients, fixed_occupancy.used.copy(), limits or SearchLimits())
    if result.schedule is None:
        return unassigned_penalty(instance.horizon_days, scenario.total_sessions())
    return result.objective


def greedy_first_fit(instance: Instance, order: Sequence[str] | None = None) -> Schedule:
    """First-fit proxy for manual scheduling.

    Walks patients in the given id order (roster order by default) and takes
    each patient's first candidate in (day, slot, machine) scan order, never
    starting before the patient's release day. Unplaceable patients are left
    unassigned.
    """
    roster = {p.id: p for p in instance.patients}
    ids = list(order) if order is not None else [p.id for p in instance.patients]
    avail = instance.availability_array()
    used = empty_occupancy(instance).used
    assignments: dict[str, Assignment] = {}
    unassigned: list[str] = []
    for pid in ids:
        p = roster[pid]
        cands = _candidates_on_grids(instance, p, avail, used, p.release_day)
        if not cands:
            unassigned.append(pid)
            continue
        c = cands[0]
        for day0 in range(c.start_day - 1, c.start_day - 1 + p.sessions):
            used[c.machine - 1, day0, c.slot - 1] = True
        assignments[pid] = Assignment(pid, c.machine, c.start_day, c.slot)
    return Schedule(assignments=assignments, unassigned=tuple(unassigned))
