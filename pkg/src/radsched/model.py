"""Problem data model: machines, working-day horizon, slot grid, patients, schedules.

Conventions used throughout the package:

- All indices are 1-based: machines 1..machine_count, days 1..horizon_days,
  slots 1..slots_per_day.
- Days are working days; weekends are excluded from the calendar, so
  "consecutive day indices" always means consecutive working days.
- All model values are immutable after construction and safe to share
  between parallel workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

GENERAL = "general"
SPECIAL = "special"


class ModelError(ValueError):
    """Malformed model data (unknown ids, bad indices, wrong shapes)."""


@dataclass(frozen=True)
class Patient:
    id: str
    kind: str  # "general" | "special"
    sessions: int
    allowed_slots: frozenset[int] = frozenset()  # meaningful for special patients only
    release_day: int = 1  # earliest day the patient may start (replay + waiting metrics)

    def __post_init__(self):
        if self.kind not in (GENERAL, SPECIAL):
            raise ModelError(f"patient {self.id!r}: unknown kind {self.kind!r}")
        object.__setattr__(self, "allowed_slots", frozenset(self.allowed_slots))

    def slots(self, slots_per_day: int) -> tuple[int, ...]:
        """Slots this patient may occupy, ascending."""
        if self.kind == SPECIAL:
            return tuple(sorted(self.allowed_slots))
        return tuple(range(1, slots_per_day + 1))


@dataclass(frozen=True)
class Instance:
    machine_count: int
    horizon_days: int
    slots_per_day: int
    patients: tuple[Patient, ...] = ()
    blocked: frozenset[tuple[int, int, int]] = frozenset()  # (machine, day, slot) exceptions

    def __post_init__(self):
        object.__setattr__(self, "patients", tuple(self.patients))
        object.__setattr__(self, "blocked", frozenset(tuple(b) for b in self.blocked))

    def available(self, machine: int, day: int, slot: int) -> bool:
        return (machine, day, slot) not in self.blocked

    def availability_array(self) -> np.ndarray:
        """Availability grid as uint8[machine, day, slot], 0-based indices."""
        grid = np.ones((self.machine_count, self.horizon_days, self.slots_per_day), dtype=np.uint8)
        for m, d, s in self.blocked:
            grid[m - 1, d - 1, s - 1] = 0
        return grid

    def patient(self, patient_id: str) -> Patient:
        for p in self.patients:
            if p.id == patient_id:
                return p
        raise ModelError(f"unknown patient id {patient_id!r}")

    def patient_ids(self) -> tuple[str, ...]:
        return tuple(p.id for p in self.patients)


@dataclass(frozen=True)
class Assignment:
    patient_id: str
    machine: int
    start_day: int
    slot: int


@dataclass(frozen=True)
class Schedule:
    """Per-patient assignments; patients absent from `assignments` are unassigned."""

    assignments: dict[str, Assignment] = field(default_factory=dict)
    unassigned: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "assignments", dict(self.assignments))
        object.__setattr__(self, "unassigned", tuple(self.unassigned))
        for pid, a in self.assignments.items():
            if pid != a.patient_id:
                raise ModelError(f"assignment keyed {pid!r} carries patient_id {a.patient_id!r}")

    def with_assignment(self, assignment: Assignment) -> "Schedule":
        new = dict(self.assignments)
        new[assignment.patient_id] = assignment
        rest = tuple(u for u in self.unassigned if u != assignment.patient_id)
        return Schedule(new, rest)


@dataclass(frozen=True)
class ValidationFinding:
    code: str
    locator: dict
    message: str

    def to_json(self) -> dict:
        return {"code": self.code, "locator": dict(self.locator), "message": self.message}


def sessions_of(assignment: Assignment, sessions: int, horizon_days: int | None = None) -> list[tuple[int, int]]:
    """Expand an assignment into its (day, slot) session cells.

    Sessions run on consecutive days at the assignment's fixed slot. Raises
    ModelError when the block would run past the horizon.
    """
    if sessions < 1:
        raise ModelError(f"patient {assignment.patient_id!r}: sessions must be >= 1")
    last = assignment.start_day + sessions - 1
    if horizon_days is not None and last > horizon_days:
        raise ModelError(
            f"assignment for {assignment.patient_id!r} exceeds horizon: "
            f"days {assignment.start_day}..{last} > {horizon_days}"
        )
    return [(assignment.start_day + k, assignment.slot) for k in range(sessions)]


@dataclass(frozen=True)
class Occupancy:
    """Materialized machine usage: used[machine, day, slot] and count[day, slot].

    Arrays are 0-based (index = model index - 1); values never mutate after
    construction.
    """

    used: np.ndarray  # bool[M, L, T]
    count: np.ndarray  # int32[L, T]

    def is_free(self, machine: int, day: int, slot: int) -> bool:
        return not self.used[machine - 1, day - 1, slot - 1]


def empty_occupancy(instance: Instance) -> Occupancy:
    used = np.zeros((instance.machine_count, instance.horizon_days, instance.slots_per_day), dtype=bool)
    return Occupancy(used=used, count=np.zeros((instance.horizon_days, instance.slots_per_day), dtype=np.int32))


def build_occupancy(instance: Instance, schedule: Schedule) -> Occupancy:
    """Expand a schedule into per-machine usage grids.

    Pure function: does not mutate its inputs; raises ModelError on unknown
    patients or out-of-range indices.
    """
    used = np.zeros((instance.machine_count, instance.horizon_days, instance.slots_per_day), dtype=bool)
    for pid, a in schedule.assignments.items():
        patient = instance.patient(pid)
        if not 1 <= a.machine <= instance.machine_count:
            raise ModelError(f"assignment for {pid!r}: machine {a.machine} out of range")
        if not 1 <= a.slot <= instance.slots_per_day:
            raise ModelError(f"assignment for {pid!r}: slot {a.slot} out of range")
        if a.start_day < 1:
            raise ModelError(f"assignment for {pid!r}: start_day {a.start_day} out of range")
        for day, slot in sessions_of(a, patient.sessions, instance.horizon_days):
            used[a.machine - 1, day - 1, slot - 1] = True
    count = used.sum(axis=0).astype(np.int32)
    return Occupancy(used=used, count=count)


def iter_patients_with_index(instance: Instance) -> Iterator[tuple[int, Patient]]:
    return enumerate(instance.patients)


def validate_instance(instance: Instance) -> list[ValidationFinding]:
    """Structural validation; an empty report means the instance is well formed."""
    findings: list[ValidationFinding] = []

    def add(code, locator, message):
        findings.append(ValidationFinding(code, locator, message))

    if instance.machine_count < 1:
        add("machine_count", {}, f"machine_count must be >= 1, got {instance.machine_count}")
    if instance.horizon_days < 1:
        add("horizon_days", {}, f"horizon_days must be >= 1, got {instance.horizon_days}")
    if instance.slots_per_day < 1:
        add("slots_per_day", {}, f"slots_per_day must be >= 1, got {instance.slots_per_day}")

    for m, d, s in sorted(instance.blocked):
        if not (1 <= m <= instance.machine_count and 1 <= d <= instance.horizon_days
                and 1 <= s <= instance.slots_per_day):
            add("blocked_out_of_range", {"machine": m, "day": d, "slot": s},
                f"blocked cell ({m},{d},{s}) outside the machine/day/slot grid")

    seen: set[str] = set()
    for p in instance.patients:
        loc = {"patient": p.id}
        if p.id in seen:
            add("duplicate_patient_id", loc, f"duplicate patient id {p.id!r}")
        seen.add(p.id)
        if p.sessions < 1:
            add("sessions_nonpositive", loc, f"patient {p.id!r}: sessions must be >= 1")
        elif p.sessions > instance.horizon_days:
            add("sessions_exceed_horizon", loc,
                f"patient {p.id!r}: sessions exceed horizon ({p.sessions} > {instance.horizon_days})")
        if p.release_day < 1:
            add("release_day_nonpositive", loc, f"patient {p.id!r}: release_day must be >= 1")
        if p.kind == SPECIAL:
            if not p.allowed_slots:
                add("empty_allowed_slots", loc, f"special patient {p.id!r} has empty allowed_slots")
            bad = sorted(s for s in p.allowed_slots if not 1 <= s <= instance.slots_per_day)
            if bad:
                add("allowed_slot_out_of_range", loc,
                    f"patient {p.id!r}: allowed slots {bad} outside 1..{instance.slots_per_day}")
    return findings
