from fractions import Fraction

import numpy as np
import pytest

from conftest import random_instance
from radsched.model import Assignment, Instance, ModelError, Patient, Schedule, build_occupancy, empty_occupancy
from radsched.scenarios import Scenario, ScenarioSet
from radsched.stochastic import encoded_scenario_value, expected_recourse, os_objective


@pytest.fixture
def recourse_world():
    """1 machine, L=3, T=1; pending p=2 on days 1-2 leaves only day 3 free."""
    inst = Instance(1, 3, 1, (Patient("J", "general", 2),))
    sched = Schedule({"J": Assignment("J", 1, 1, 1)})
    scen = ScenarioSet((
        Scenario("w1", Fraction(1, 2), (Patient("f", "general", 1),)),
        Scenario("w2", Fraction(1, 2), ()),
    ))
    return inst, sched, scen


def test_expected_recourse_of_certain_empty_scenario(recourse_world):
    inst, sched, _ = recourse_world
    certain_empty = ScenarioSet((Scenario("w", Fraction(1), ()),))
    occ = build_occupancy(inst, sched)
    assert expected_recourse(inst, occ, certain_empty) == 0


def test_expected_recourse_weighted_sum(recourse_world):
    inst, sched, scen = recourse_world
    occ = build_occupancy(inst, sched)
    value = expected_recourse(inst, occ, scen)
    assert value == Fraction(3, 2)  # 0.5 * (day 3) + 0.5 * 0


def test_os_objective_exact_mode(recourse_world):
    inst, sched, scen = recourse_world
    assert os_objective(inst, sched, "J", scen, "exact") == Fraction(9, 2)  # 3 + 1.5


def test_os_objective_reduces_to_online_for_empty_scenarios(recourse_world):
    inst, sched, _ = recourse_world
    certain_empty = ScenarioSet((Scenario("w", Fraction(1), ()),))
    assert os_objective(inst, sched, "J", certain_empty, "exact") == 3


def test_scenario_split_linearity(recourse_world):
    inst, sched, scen = recourse_world
    occ = build_occupancy(inst, sched)
    whole = expected_recourse(inst, occ, scen)
    halves = ScenarioSet((
        Scenario("w1a", Fraction(1, 4), scen.scenarios[0].patients),
        Scenario("w1b", Fraction(1, 4), scen.scenarios[0].patients),
        Scenario("w2", Fraction(1, 2), ()),
    ))
    assert expected_recourse(inst, occ, halves) == whole


def test_encoded_value_prices_supplied_schedule(recourse_world):
    inst, sched, scen = recourse_world
    occ = build_occupancy(inst, sched)
    good = Schedule({"f": Assignment("f", 1, 3, 1)})
    assert encoded_scenario_value(inst, occ, scen.scenarios[0], good) == 3
    clash = Schedule({"f": Assignment("f", 1, 1, 1)})  # collides with the pending patient
    assert encoded_scenario_value(inst, occ, scen.scenarios[0], clash) == (3 + 1) * 1
    missing = Schedule(unassigned=("f",))
    assert encoded_scenario_value(inst, occ, scen.scenarios[0], missing) == (3 + 1) * 1


def test_os_objective_encoded_vs_exact_bound(recourse_world):
    inst, sched, scen = recourse_world
    encoded = {
        "w1": Schedule({"f": Assignment("f", 1, 3, 1)}),
        "w2": Schedule(),
    }
    exact = os_objective(inst, sched, "J", scen, "exact")
    value = os_objective(inst, sched, "J", scen, "encoded", encoded)
    assert value >= exact
    assert value == Fraction(9, 2)  # this encoding happens to be optimal


def test_os_objective_requires_encoded_schedules(recourse_world):
    inst, sched, scen = recourse_world
    with pytest.raises(ModelError, match="encoded"):
        os_objective(inst, sched, "J", scen, "encoded")


def test_os_objective_rejects_invalid_scenarios(recourse_world):
    inst, sched, _ = recourse_world
    bad = ScenarioSet((Scenario("w", Fraction(1, 3), ()),))
    with pytest.raises(ModelError, match="invalid scenario set"):
        os_objective(inst, sched, "J", bad, "exact")


def test_recourse_nonnegative_random():
    rng = np.random.default_rng(41)
    from radsched.oracle import solve_recourse
    for _ in range(50):
        inst = random_instance(rng, blocked_ratio=0.2)
        scenario = Scenario("w", Fraction(1), inst.patients)
        assert solve_recourse(inst, empty_occupancy(inst), scenario) >= 0
