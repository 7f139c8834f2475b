"""Online-stochastic objective: online term plus expected recourse over scenarios.

Two evaluation routes exist for the recourse term and are deliberately kept
apart: the exact route solves each scenario to optimality, while the encoded
route prices a supplied per-scenario schedule (the solution-vector reading
used inside the metaheuristics). The encoded value can never beat the exact
one, which the test suite checks as a property.
"""

from __future__ import annotations

from fractions import Fraction

from .constraints import online_objective, patient_cost, unassigned_penalty
from .model import Instance, ModelError, Occupancy, Schedule, build_occupancy, sessions_of
from .oracle import solve_recourse
from .scenarios import Scenario, ScenarioSet, validate_scenarios


def expected_recourse(instance: Instance, fixed_occupancy: Occupancy, scenario_set: ScenarioSet):
    """Probability-weighted sum of optimal per-scenario recourse values.

    Exact rational arithmetic when every probability is rational, float
    otherwise. The sum runs in scenario-list order.
    """
    exact = scenario_set.is_exact()
    total = Fraction(0) if exact else 0.0
    for scenario in scenario_set.scenarios:
        q = solve_recourse(instance, fixed_occupancy, scenario)
        total += scenario.probability * q
    return total


def encoded_scenario_value(
    instance: Instance,
    fixed_occupancy: Occupancy,
    scenario: Scenario,
    recourse: Schedule,
) -> int:
    """Price a supplied recourse schedule for one scenario.

    The schedule must place every scenario patient on available, unoccupied
    cells (occupancy = the incumbent schedule), at an allowed slot, within the
    horizon, without internal overlaps. Any failure prices the whole scenario
    at the penalty value; an infeasible encoding is never silently accepted.
    """
    penalty = unassigned_penalty(instance.horizon_days, scenario.total_sessions())
    cells: set[tuple[int, int, int]] = set()
    value = 0
    for p in scenario.patients:
        a = recourse.assignments.get(p.id)
        if a is None:
            return penalty
        if not (1 <= a.machine <= instance.machine_count and 1 <= a.slot <= instance.slots_per_day):
            return penalty
        if a.start_day < 1 or a.start_day + p.sessions - 1 > instance.horizon_days:
            return penalty
        if a.slot not in p.slots(instance.slots_per_day):
            return penalty
        for day, slot in sessions_of(a, p.sessions, instance.horizon_days):
            if not instance.available(a.machine, day, slot):
                return penalty
            if not fixed_occupancy.is_free(a.machine, day, slot):
                return penalty
            cell = (a.machine, day, slot)
            if cell in cells:
                return penalty
            cells.add(cell)
        value += patient_cost(p.sessions, a.start_day)
    return value


def os_objective(
    instance: Instance,
    schedule: Schedule,
    pending_patient_id: str,
    scenario_set: ScenarioSet,
    recourse_mode: str = "exact",
    encoded_recourse: dict[str, Schedule] | None = None,
):
    """Online-stochastic value of scheduling the pending patient.

    Returns online term + E[recourse]. recourse_mode "exact" solves each
    scenario to optimality; "encoded" prices the supplied per-scenario
    schedules (encoded_recourse maps scenario id -> Schedule).
    """
    findings = validate_scenarios(scenario_set, instance)
    if findings:
        raise ModelError(f"invalid scenario set: {findings[0].message}")
    online = online_objective(instance, schedule, pending_patient_id)
    occupancy = build_occupancy(instance, schedule)
    if recourse_mode == "exact":
        return online + expected_recourse(instance, occupancy, scenario_set)
    if recourse_mode != "encoded":
        raise ValueError(f"unknown recourse_mode {recourse_mode!r}")
    if encoded_recourse is None:
        raise ModelError("encoded recourse_mode requires a per-scenario schedule map")
    exact = scenario_set.is_exact()
    total = Fraction(0) if exact else 0.0
    for scenario in scenario_set.scenarios:
        if scenario.id not in encoded_recourse:
            raise ModelError(f"encoded recourse missing scenario {scenario.id!r}")
        q = encoded_scenario_value(instance, occupancy, scenario, encoded_recourse[scenario.id])
        total += scenario.probability * q
    return online + total
