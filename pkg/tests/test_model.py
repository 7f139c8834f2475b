import numpy as np
import pytest

from radsched.model import (
    Assignment,
    Instance,
    ModelError,
    Patient,
    Schedule,
    build_occupancy,
    sessions_of,
    validate_instance,
)


def test_sessions_of_expands_consecutive_days():
    a = Assignment("P1", 1, 2, 1)
    assert sessions_of(a, 3, horizon_days=5) == [(2, 1), (3, 1), (4, 1)]


def test_sessions_of_single_session():
    assert sessions_of(Assignment("P1", 1, 1, 2), 1, horizon_days=5) == [(1, 2)]


def test_sessions_of_rejects_horizon_overflow():
    with pytest.raises(ModelError, match="exceeds horizon"):
        sessions_of(Assignment("P1", 1, 4, 1), 3, horizon_days=5)


def test_sessions_of_property_shared_slot_and_length():
    rng = np.random.default_rng(7)
    for _ in range(200):
        p = int(rng.integers(1, 6))
        start = int(rng.integers(1, 10))
        slot = int(rng.integers(1, 4))
        cells = sessions_of(Assignment("X", 1, start, slot), p)
        assert len(cells) == p
        assert all(s == slot for _, s in cells)
        assert [d for d, _ in cells] == list(range(start, start + p))


def test_validate_accepts_wellformed_instance():
    inst = Instance(1, 5, 2, (
        Patient("P1", "general", 2),
        Patient("P2", "special", 3, frozenset({2})),
    ))
    assert validate_instance(inst) == []


def test_validate_flags_empty_allowed_slots():
    inst = Instance(1, 5, 2, (Patient("P1", "special", 2, frozenset()),))
    findings = validate_instance(inst)
    assert [f.code for f in findings] == ["empty_allowed_slots"]
    assert "empty allowed_slots" in findings[0].message


def test_validate_flags_sessions_exceeding_horizon():
    inst = Instance(1, 5, 2, (Patient("P1", "general", 6),))
    findings = validate_instance(inst)
    assert [f.code for f in findings] == ["sessions_exceed_horizon"]
    assert "exceed horizon" in findings[0].message


def test_validate_flags_duplicate_ids_and_bad_blocked():
    inst = Instance(1, 3, 1, (Patient("P1", "general", 1), Patient("P1", "general", 2)),
                    blocked=frozenset({(1, 9, 1)}))
    codes = {f.code for f in validate_instance(inst)}
    assert "duplicate_patient_id" in codes
    assert "blocked_out_of_range" in codes


def test_build_occupancy_empty_schedule_is_all_zero(i1):
    occ = build_occupancy(i1, Schedule())
    assert not occ.used.any()
    assert occ.count.sum() == 0


def test_build_occupancy_marks_session_cells(i1):
    sched = Schedule({"P1": Assignment("P1", 1, 1, 1)})
    occ = build_occupancy(i1, sched)
    assert occ.used[0, 0, 0] and occ.used[0, 1, 0]
    assert occ.count.sum() == 2


def test_build_occupancy_counts_double_booking(i1):
    sched = Schedule({
        "P1": Assignment("P1", 1, 1, 2),
        "P2": Assignment("P2", 1, 1, 2),
    })
    occ = build_occupancy(i1, sched)
    # both patients share machine 1 / day 1 / slot 2: occupancy reports, checker flags
    assert occ.count[0, 1] >= 1
    assert occ.used[0, 0, 1]


def test_build_occupancy_is_pure(i1):
    sched = Schedule({"P1": Assignment("P1", 1, 2, 1)})
    a = build_occupancy(i1, sched)
    b = build_occupancy(i1, sched)
    assert np.array_equal(a.used, b.used) and np.array_equal(a.count, b.count)


def test_build_occupancy_rejects_unknown_patient(i1):
    sched = Schedule({"XX": Assignment("XX", 1, 1, 1)})
    with pytest.raises(ModelError, match="unknown patient"):
        build_occupancy(i1, sched)


def test_build_occupancy_rejects_out_of_range_machine(i1):
    sched = Schedule({"P1": Assignment("P1", 9, 1, 1)})
    with pytest.raises(ModelError, match="machine"):
        build_occupancy(i1, sched)


def test_schedule_key_must_match_patient_id():
    with pytest.raises(ModelError):
        Schedule({"P1": Assignment("P2", 1, 1, 1)})
