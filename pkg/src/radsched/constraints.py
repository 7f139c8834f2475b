"""Feasibility checking and the treatment-day objective functions.

A schedule assigns each patient a machine, a start day, and a fixed slot;
its sessions then occupy consecutive days at that slot, which is the normal
form of the contiguity requirement. The checker reports structured
violations; the objective functions assume checked (or caller-asserted)
schedules.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import (
    SPECIAL,
    Instance,
    ModelError,
    Schedule,
    sessions_of,
)

# Violation codes (stable strings, used in CLI JSON output)
C7A_DOUBLE_BOOKING = "C7a_double_booking"
C7B_UNAVAILABLE = "C7b_unavailable"
C7C_SPECIAL_SLOT = "C7c_special_slot"
C7D_SESSION_COUNT = "C7d_session_count"
C7E_CONTIGUITY = "C7e_contiguity"  # structurally enforced; kept for serialization completeness
C7F_DOMAIN = "C7f_domain"
HORIZON_OVERFLOW = "horizon_overflow"
UNASSIGNED_PATIENT = "unassigned_patient"


@dataclass(frozen=True)
class Violation:
    code: str
    patients: tuple[str, ...]
    machine: int | None = None
    day: int | None = None
    slot: int | None = None
    message: str = ""

    def to_json(self) -> dict:
        return {
            "code": self.code,
            "patients": list(self.patients),
            "machine": self.machine,
            "day": self.day,
            "slot": self.slot,
            "message": self.message,
        }


def patient_cost(sessions: int, start_day: int) -> int:
    """Treatment-day total for one patient: sum of its session day indices."""
    return sessions * start_day + sessions * (sessions - 1) // 2


def unassigned_penalty(horizon_days: int, sessions: int) -> int:
    """Penalty charged for a patient that cannot be placed.

    (L+1) * sessions strictly dominates any feasible placement cost, so
    search methods always prefer feasibility.
    """
    return (horizon_days + 1) * sessions


def check_constraints(instance: Instance, schedule: Schedule, require_complete: bool = True) -> list[Violation]:
    """Check a schedule against the scheduling model; empty list = feasible.

    With require_complete, every roster patient must be assigned; otherwise
    missing patients are reported as informational unassigned_patient
    findings and a partial schedule may otherwise pass.
    """
    violations: list[Violation] = []
    cells: dict[tuple[int, int, int], list[str]] = {}

    for pid in schedule.assignments:
        instance.patient(pid)  # raises ModelError on unknown ids

    for pid, a in sorted(schedule.assignments.items()):
        patient = instance.patient(pid)
        in_domain = (
            1 <= a.machine <= instance.machine_count
            and 1 <= a.start_day <= instance.horizon_days
            and 1 <= a.slot <= instance.slots_per_day
        )
        if not in_domain:
            violations.append(Violation(
                C7F_DOMAIN, (pid,), a.machine, a.start_day, a.slot,
                f"{pid}: assignment indices outside the machine/day/slot grid",
            ))
            continue
        if a.start_day + patient.sessions - 1 > instance.horizon_days:
            violations.append(Violation(
                HORIZON_OVERFLOW, (pid,), a.machine, a.start_day, a.slot,
                f"{pid}: {patient.sessions} sessions from day {a.start_day} exceed the horizon",
            ))
            continue
        if patient.kind == SPECIAL and a.slot not in patient.allowed_slots:
            violations.append(Violation(
                C7C_SPECIAL_SLOT, (pid,), a.machine, a.start_day, a.slot,
                f"{pid}: slot {a.slot} not in allowed slots {sorted(patient.allowed_slots)}",
            ))
        for day, slot in sessions_of(a, patient.sessions, instance.horizon_days):
            if not instance.available(a.machine, day, slot):
                violations.append(Violation(
                    C7B_UNAVAILABLE, (pid,), a.machine, day, slot,
                    f"{pid}: machine {a.machine} unavailable on day {day} slot {slot}",
                ))
            cells.setdefault((a.machine, day, slot), []).append(pid)

    for (machine, day, slot), pids in sorted(cells.items()):
        if len(pids) > 1:
            violations.append(Violation(
                C7A_DOUBLE_BOOKING, tuple(sorted(pids)), machine, day, slot,
                f"machine {machine} double-booked on day {day} slot {slot}: {sorted(pids)}",
            ))

    missing = [pid for pid in instance.patient_ids() if pid not in schedule.assignments]
    for pid in missing:
        sessions = instance.patient(pid).sessions
        if require_complete:
            violations.append(Violation(
                C7D_SESSION_COUNT, (pid,),
                message=f"{pid}: 0 of {sessions} required sessions scheduled",
            ))
        else:
            violations.append(Violation(
                UNASSIGNED_PATIENT, (pid,),
                message=f"{pid}: not assigned",
            ))
    return violations


def offline_objective(instance: Instance, schedule: Schedule) -> int:
    """Total treatment days over the whole roster (the offline problem value)."""
    missing = [pid for pid in instance.patient_ids() if pid not in schedule.assignments]
    if missing:
        raise ModelError(f"objective undefined for partial schedule; unassigned: {missing}")
    total = 0
    for pid, a in schedule.assignments.items():
        total += patient_cost(instance.patient(pid).sessions, a.start_day)
    return total


def online_objective(instance: Instance, schedule: Schedule, pending_patient_id: str) -> int:
    """Offline summand restricted to the newly arrived patient."""
    if pending_patient_id not in schedule.assignments:
        raise ModelError(f"pending patient {pending_patient_id!r} is not assigned")
    a = schedule.assignments[pending_patient_id]
    return patient_cost(instance.patient(pending_patient_id).sessions, a.start_day)


@dataclass(frozen=True)
class WaitingMetrics:
    total_waiting_days: int
    waiting_patients: int
    per_patient_wait: dict[str, int]


def waiting_metrics(instance: Instance, schedule: Schedule) -> WaitingMetrics:
    """Access-delay metrics: wait = start_day - release_day per assigned patient.

    Unassigned patients count as waiting for the rest of the horizon
    (horizon_days - release_day + 1 days). These metrics are artifact-defined;
    reports label them as such.
    """
    per: dict[str, int] = {}
    waiting = 0
    for p in instance.patients:
        a = schedule.assignments.get(p.id)
        if a is None:
            per[p.id] = instance.horizon_days - p.release_day + 1
            waiting += 1
        else:
            per[p.id] = a.start_day - p.release_day
            if per[p.id] > 0:
                waiting += 1
    return WaitingMetrics(
        total_waiting_days=sum(per.values()),
        waiting_patients=waiting,
        per_patient_wait=per,
    )
