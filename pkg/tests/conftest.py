import numpy as np
import pytest

from radsched.model import GENERAL, SPECIAL, Instance, Patient


@pytest.fixture
def i1() -> Instance:
    """1 machine, L=5, T=2; P1 general p=2, P2 special {2} p=3 (optimum 9)."""
    return Instance(1, 5, 2, (
        Patient("P1", GENERAL, 2),
        Patient("P2", SPECIAL, 3, frozenset({2})),
    ))


@pytest.fixture
def tight() -> Instance:
    """1 machine, T=2, L=2; greedy misorders this one (optimum 6)."""
    return Instance(1, 2, 2, (
        Patient("P1", GENERAL, 2),
        Patient("P2", SPECIAL, 2, frozenset({1})),
    ))


def random_instance(rng: np.random.Generator, max_patients: int = 4, max_days: int = 5,
                    max_slots: int = 2, max_machines: int = 2,
                    blocked_ratio: float = 0.1) -> Instance:
    """Small random instance with mixed special/general patients."""
    machines = int(rng.integers(1, max_machines + 1))
    days = int(rng.integers(2, max_days + 1))
    slots = int(rng.integers(1, max_slots + 1))
    n = int(rng.integers(1, max_patients + 1))
    patients = []
    for k in range(n):
        sessions = int(rng.integers(1, days + 1))
        if rng.random() < 0.4:
            size = int(rng.integers(1, slots + 1))
            allowed = frozenset(int(s) for s in rng.choice(slots, size=size, replace=False) + 1)
            patients.append(Patient(f"P{k + 1}", SPECIAL, sessions, allowed))
        else:
            patients.append(Patient(f"P{k + 1}", GENERAL, sessions))
    blocked = set()
    for m in range(1, machines + 1):
        for d in range(1, days + 1):
            for s in range(1, slots + 1):
                if rng.random() < blocked_ratio:
                    blocked.add((m, d, s))
    return Instance(machines, days, slots, tuple(patients), frozenset(blocked))
