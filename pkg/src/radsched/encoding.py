"""Solution encoding shared by all three population solvers.

A solution is a numeric vector of length 2n ("position"): the first half
holds start-day genes in [1, L], the second half slot genes in [1, T], one
pair per decision patient. Decoding rounds and clamps each pair, places
patients in canonical order (first-fit over machines), repairs infeasible
pairs toward the nearest feasible start, and charges a penalty of
(L+1) * sessions for patients that cannot be placed at all.

Canonical decision order: the whole roster (offline mode); the pending
patient alone (online mode); the pending patient followed by every scenario
patient, scenario by scenario in set order (os mode). In os mode each
scenario is decoded against the occupancy left by the frozen schedule plus
the pending placement, and the objective adds the probability-weighted
scenario values (the encoded-recourse reading).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .model import Assignment, Instance, ModelError, Patient, Schedule, build_occupancy
from .scenarios import ScenarioSet, validate_scenarios

OFFLINE = "offline"
ONLINE = "online"
OS = "os"


@dataclass(frozen=True)
class DecodedSolution:
    schedule: Schedule  # decision patients only
    scenario_schedules: dict[str, Schedule]
    penalty: float
    objective_with_penalty: float


@dataclass(frozen=True)
class DecodeContext:
    instance: Instance
    mode: str
    decision_patients: tuple[Patient, ...]
    scenario_set: ScenarioSet | None
    pending_id: str | None
    sessions: np.ndarray
    allowed: np.ndarray
    min_start: np.ndarray
    avail: np.ndarray
    base_used: np.ndarray
    os_mode: int
    scen_offsets: np.ndarray
    scen_prob: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    @property
    def genome_length(self) -> int:
        return 2 * len(self.decision_patients)

    def decode_population(self, positions: np.ndarray):
        """Kernel decode of float64[pop, 2n] -> (objective, penalty, assign)."""
        positions = np.ascontiguousarray(positions, dtype=np.float64)
        if positions.ndim != 2 or positions.shape[1] != self.genome_length:
            raise ValueError(
                f"positions must be (pop, {self.genome_length}), got {positions.shape}"
            )
        return kernels.decode_population(
            positions, self.sessions, self.allowed, self.min_start,
            self.avail, self.base_used, self.os_mode,
            self.scen_offsets, self.scen_prob,
        )


def _patient_arrays(instance: Instance, patients: tuple[Patient, ...], min_start: list[int]):
    n = len(patients)
    sessions = np.array([p.sessions for p in patients], dtype=np.int32)
    allowed = np.zeros((n, instance.slots_per_day), dtype=np.uint8)
    for j, p in enumerate(patients):
        for s in p.slots(instance.slots_per_day):
            allowed[j, s - 1] = 1
    lower = np.ones(2 * n, dtype=np.float64)
    upper = np.empty(2 * n, dtype=np.float64)
    upper[:n] = instance.horizon_days
    upper[n:] = instance.slots_per_day
    return sessions, allowed, np.array(min_start, dtype=np.int32), lower, upper


def _base_used(instance: Instance, frozen: Schedule | None) -> np.ndarray:
    if frozen is None:
        shape = (instance.machine_count, instance.horizon_days, instance.slots_per_day)
        return np.zeros(shape, dtype=np.uint8)
    return build_occupancy(instance, frozen).used.astype(np.uint8)


def offline_context(instance: Instance) -> DecodeContext:
    """Whole-roster decision set, empty starting occupancy."""
    patients = instance.patients
    sessions, allowed, min_start, lower, upper = _patient_arrays(
        instance, patients, [1] * len(patients))
    return DecodeContext(
        instance=instance, mode=OFFLINE, decision_patients=patients,
        scenario_set=None, pending_id=None,
        sessions=sessions, allowed=allowed, min_start=min_start,
        avail=instance.availability_array(), base_used=_base_used(instance, None),
        os_mode=0, scen_offsets=np.zeros(1, dtype=np.int32),
        scen_prob=np.zeros(0, dtype=np.float64), lower=lower, upper=upper,
    )


def online_context(instance: Instance, frozen: Schedule | None, pending_id: str,
                   respect_release: bool = False) -> DecodeContext:
    """Single pending patient against a frozen partial schedule."""
    pending = instance.patient(pending_id)
    start_lo = max(1, pending.release_day) if respect_release else 1
    sessions, allowed, min_start, lower, upper = _patient_arrays(
        instance, (pending,), [start_lo])
    return DecodeContext(
        instance=instance, mode=ONLINE, decision_patients=(pending,),
        scenario_set=None, pending_id=pending_id,
        sessions=sessions, allowed=allowed, min_start=min_start,
        avail=instance.availability_array(), base_used=_base_used(instance, frozen),
        os_mode=0, scen_offsets=np.zeros(1, dtype=np.int32),
        scen_prob=np.zeros(0, dtype=np.float64), lower=lower, upper=upper,
    )


def os_context(instance: Instance, frozen: Schedule | None, pending_id: str,
               scenario_set: ScenarioSet, respect_release: bool = False) -> DecodeContext:
    """Pending patient plus all scenario patients (encoded-recourse fitness)."""
    findings = validate_scenarios(scenario_set, instance)
    if findings:
        raise ModelError(f"invalid scenario set: {findings[0].message}")
    pending = instance.patient(pending_id)
    patients = [pending]
    offsets = [1]
    for sc in scenario_set.scenarios:
        patients.extend(sc.patients)
        offsets.append(offsets[-1] + len(sc.patients))
    start_lo = max(1, pending.release_day) if respect_release else 1
    min_start = [start_lo] + [1] * (len(patients) - 1)
    sessions, allowed, min_start_arr, lower, upper = _patient_arrays(
        instance, tuple(patients), min_start)
    return DecodeContext(
        instance=instance, mode=OS, decision_patients=tuple(patients),
        scenario_set=scenario_set, pending_id=pending_id,
        sessions=sessions, allowed=allowed, min_start=min_start_arr,
        avail=instance.availability_array(), base_used=_base_used(instance, frozen),
        os_mode=1,
        scen_offsets=np.array(offsets, dtype=np.int32),
        scen_prob=np.array([float(sc.probability) for sc in scenario_set.scenarios],
                           dtype=np.float64),
        lower=lower, upper=upper,
    )


def solution_from_row(context: DecodeContext, objective: float, penalty: float,
                      assign_row: np.ndarray) -> DecodedSolution:
    """Materialize Schedule objects from one decoded kernel row."""
    def entry(j: int) -> Assignment | None:
        machine, start, slot = (int(v) for v in assign_row[j])
        if machine <= 0:
            return None
        return Assignment(context.decision_patients[j].id, machine, start, slot)

    scenario_schedules: dict[str, Schedule] = {}
    if context.os_mode:
        a0 = entry(0)
        assignments = {a0.patient_id: a0} if a0 else {}
        unassigned = [] if a0 else [context.pending_id]
        for s, sc in enumerate(context.scenario_set.scenarios):
            sc_assign: dict[str, Assignment] = {}
            sc_missing: list[str] = []
            for j in range(context.scen_offsets[s], context.scen_offsets[s + 1]):
                a = entry(j)
                if a is None:
                    sc_missing.append(context.decision_patients[j].id)
                else:
                    sc_assign[a.patient_id] = a
            scenario_schedules[sc.id] = Schedule(sc_assign, tuple(sc_missing))
    else:
        assignments = {}
        unassigned = []
        for j, p in enumerate(context.decision_patients):
            a = entry(j)
            if a is None:
                unassigned.append(p.id)
            else:
                assignments[p.id] = a
    return DecodedSolution(
        schedule=Schedule(assignments, tuple(unassigned)),
        scenario_schedules=scenario_schedules,
        penalty=float(penalty),
        objective_with_penalty=float(objective),
    )


def decode(position, context: DecodeContext) -> DecodedSolution:
    """Decode a single position vector."""
    vec = np.ascontiguousarray(position, dtype=np.float64)
    if vec.ndim != 1 or vec.shape[0] != context.genome_length:
        raise ValueError(
            f"position length {vec.shape} does not match decision patients "
            f"(expected {context.genome_length})"
        )
    objective, penalty, assign = context.decode_population(vec.reshape(1, -1))
    return solution_from_row(context, objective[0], penalty[0], assign[0])
