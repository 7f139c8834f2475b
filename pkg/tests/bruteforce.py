"""Independent reference oracle used by the tests.

Deliberately simple and separate from the library's solvers: placements are
enumerated with itertools over full index ranges, feasibility is re-derived
from first principles (cell sets), and objectives are literal sums of session
day indices rather than the closed form. Keep this module free of imports
from radsched.oracle so the two implementations stay independent.
"""

from __future__ import annotations

import itertools

from radsched.model import Instance, Patient, Schedule


def _session_cells(machine: int, start: int, slot: int, sessions: int):
    return [(machine, start + k, slot) for k in range(sessions)]


def availability_placements(instance: Instance, patient: Patient):
    """All (machine, start, slot) placements feasible under availability alone."""
    out = []
    if patient.kind == "special":
        slots = sorted(patient.allowed_slots)
    else:
        slots = list(range(1, instance.slots_per_day + 1))
    for machine in range(1, instance.machine_count + 1):
        for start in range(1, instance.horizon_days - patient.sessions + 2):
            for slot in slots:
                cells = _session_cells(machine, start, slot, patient.sessions)
                if all(instance.available(m, d, s) for m, d, s in cells):
                    out.append((machine, start, slot))
    return out


def brute_force_offline(instance: Instance):
    """Cartesian-product minimum of total treatment days.

    Returns (objective, placements) for the best complete schedule, or
    (None, None) when no complete feasible schedule exists.
    """
    per_patient = []
    for p in instance.patients:
        options = []
        for machine, start, slot in availability_placements(instance, p):
            cells = frozenset(_session_cells(machine, start, slot, p.sessions))
            value = sum(day for _, day, _ in cells)
            options.append(((machine, start, slot), cells, value))
        if not options:
            return None, None
        per_patient.append(options)
    best = None
    best_combo = None
    for combo in itertools.product(*per_patient):
        cells: frozenset = frozenset()
        value = 0
        ok = True
        for _, pc, pv in combo:
            if cells & pc:
                ok = False
                break
            cells = cells | pc
            value += pv
        if ok and (best is None or value < best):
            best = value
            best_combo = tuple(placement for placement, _, _ in combo)
    if best is None:
        return None, None
    return best, best_combo


def schedule_is_feasible(instance: Instance, schedule: Schedule) -> bool:
    """First-principles feasibility predicate for a complete schedule."""
    cells = set()
    for p in instance.patients:
        a = schedule.assignments.get(p.id)
        if a is None:
            return False
        if not (1 <= a.machine <= instance.machine_count
                and 1 <= a.slot <= instance.slots_per_day
                and 1 <= a.start_day
                and a.start_day + p.sessions - 1 <= instance.horizon_days):
            return False
        if p.kind == "special" and a.slot not in p.allowed_slots:
            return False
        for cell in _session_cells(a.machine, a.start_day, a.slot, p.sessions):
            if cell in cells:
                return False
            if not instance.available(*cell):
                return False
            cells.add(cell)
    return True
