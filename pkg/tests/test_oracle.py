import numpy as np
import pytest

from bruteforce import brute_force_offline, schedule_is_feasible
from conftest import random_instance
from radsched.constraints import check_constraints, offline_objective
from radsched.model import Assignment, Instance, Patient, Schedule, build_occupancy, empty_occupancy
from radsched.oracle import (
    SearchLimits,
    candidate_assignments,
    greedy_first_fit,
    solve_exact_offline,
    solve_recourse,
)
from radsched.scenarios import Scenario


def test_candidates_enumerated_in_cost_order():
    inst = Instance(1, 3, 1, (Patient("P1", "general", 2),))
    cands = candidate_assignments(inst, inst.patients[0])
    assert [(c.start_day, c.cost) for c in cands] == [(1, 3), (2, 5)]


def test_candidates_respect_special_slots():
    inst = Instance(1, 4, 2, (Patient("P1", "special", 2, frozenset({2})),))
    cands = candidate_assignments(inst, inst.patients[0])
    assert cands and all(c.slot == 2 for c in cands)


def test_candidates_respect_occupancy():
    inst = Instance(1, 3, 1, (Patient("P1", "general", 2), Patient("P2", "general", 1)))
    occ = build_occupancy(inst, Schedule({"P2": Assignment("P2", 1, 1, 1)}))
    cands = candidate_assignments(inst, inst.patients[0], occ)
    assert [c.start_day for c in cands] == [2]


def test_candidates_respect_min_start():
    inst = Instance(1, 5, 1, (Patient("P1", "general", 2),))
    cands = candidate_assignments(inst, inst.patients[0], min_start=3)
    assert [c.start_day for c in cands] == [3, 4]


def test_exact_on_i1(i1):
    result = solve_exact_offline(i1)
    assert result.proven_optimal and result.objective == 9
    assert check_constraints(i1, result.schedule) == []


def test_exact_orders_special_before_general(tight):
    result = solve_exact_offline(tight)
    assert result.objective == 6
    assert result.schedule.assignments["P1"].slot == 2
    assert result.schedule.assignments["P2"].slot == 1


def test_exact_detects_infeasibility():
    inst = Instance(1, 2, 1, (Patient("P1", "general", 2), Patient("P2", "general", 2)))
    result = solve_exact_offline(inst)
    assert result.schedule is None and result.objective is None
    assert result.proven_optimal  # proven infeasible, not a cap
    assert not result.feasible


def test_exact_respects_node_cap(i1):
    result = solve_exact_offline(i1, SearchLimits(node_cap=1))
    assert not result.proven_optimal


def test_exact_matches_brute_force_on_random_instances():
    rng = np.random.default_rng(17)
    for _ in range(60):
        inst = random_instance(rng)
        expected, _ = brute_force_offline(inst)
        result = solve_exact_offline(inst)
        if expected is None:
            assert result.schedule is None
        else:
            assert result.objective == expected
            assert schedule_is_feasible(inst, result.schedule)
            assert check_constraints(inst, result.schedule) == []


def test_greedy_first_fit_scan_order(tight):
    sched = greedy_first_fit(tight, order=["P1", "P2"])
    assert sched.assignments["P1"].slot == 1  # first fit takes slot 1
    assert sched.unassigned == ("P2",)


def test_greedy_order_sensitivity(tight):
    sched = greedy_first_fit(tight, order=["P2", "P1"])
    assert not sched.unassigned
    assert offline_objective(tight, sched) == 6


def test_greedy_empty_roster():
    inst = Instance(1, 3, 1, ())
    sched = greedy_first_fit(inst)
    assert sched.assignments == {} and sched.unassigned == ()


def test_greedy_never_beats_exact():
    rng = np.random.default_rng(23)
    for _ in range(80):
        inst = random_instance(rng)
        exact = solve_exact_offline(inst)
        greedy = greedy_first_fit(inst)
        if exact.schedule is not None and not greedy.unassigned:
            assert offline_objective(inst, greedy) >= exact.objective


def test_recourse_empty_scenario_is_zero(i1):
    occ = empty_occupancy(i1)
    assert solve_recourse(i1, occ, Scenario("w", 1.0, ())) == 0


def test_recourse_earliest_free_day():
    inst = Instance(1, 3, 1, (), blocked=frozenset({(1, 1, 1)}))
    occ = empty_occupancy(inst)
    scenario = Scenario("w", 1.0, (Patient("f", "general", 1),))
    assert solve_recourse(inst, occ, scenario) == 2


def test_recourse_penalty_when_unplaceable():
    inst = Instance(1, 3, 1, (), blocked=frozenset({(1, 1, 1)}))
    occ = empty_occupancy(inst)
    scenario = Scenario("w", 1.0, (Patient("f", "general", 3),))
    assert solve_recourse(inst, occ, scenario) == (3 + 1) * 3


def test_recourse_consistent_with_exact_offline():
    rng = np.random.default_rng(29)
    for _ in range(40):
        inst = random_instance(rng, blocked_ratio=0.15)
        scenario = Scenario("w", 1.0, inst.patients)
        q = solve_recourse(inst, empty_occupancy(inst), scenario)
        exact = solve_exact_offline(inst)
        if exact.schedule is None:
            assert q == (inst.horizon_days + 1) * sum(p.sessions for p in inst.patients)
        else:
            assert q == exact.objective


def test_solver_schedules_always_pass_checker():
    rng = np.random.default_rng(31)
    for _ in range(50):
        inst = random_instance(rng)
        exact = solve_exact_offline(inst)
        if exact.schedule is not None:
            assert check_constraints(inst, exact.schedule) == []
        greedy = greedy_first_fit(inst)
        partial = check_constraints(inst, greedy, require_complete=False)
        assert all(v.code == "unassigned_patient" for v in partial)
