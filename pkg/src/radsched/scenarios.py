"""Scenario sets for anticipated future arrivals.

A scenario is one hypothesized batch of future patients with a probability
weight; a scenario set enumerates the whole (finite) scenario space, so the
expectation over it is an exact weighted sum rather than a sampled estimate.
Probabilities are kept as exact rationals whenever the source data is
rational; float probabilities are compared with a 1e-9 tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .model import GENERAL, SPECIAL, Instance, Patient, ValidationFinding
from .portable_rng import SplitMix64

PROBABILITY_TOLERANCE = 1e-9


@dataclass(frozen=True)
class Scenario:
    id: str
    probability: Fraction | float
    patients: tuple[Patient, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "patients", tuple(self.patients))

    def total_sessions(self) -> int:
        return sum(p.sessions for p in self.patients)


@dataclass(frozen=True)
class ScenarioSet:
    scenarios: tuple[Scenario, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "scenarios", tuple(self.scenarios))

    def is_exact(self) -> bool:
        """True when every probability is a rational (exact arithmetic applies)."""
        return all(isinstance(s.probability, Fraction) for s in self.scenarios)


@dataclass(frozen=True)
class GeneratorConfig:
    scenario_count: int
    patients_per_scenario: tuple[int, int]
    special_ratio: float
    sessions_range: tuple[int, int]
    slots_pool: tuple[int, ...]
    probability_mode: str = "uniform"  # "uniform" | "dirichlet_like_random"


def _check_config(instance: Instance, config: GeneratorConfig) -> None:
    lo, hi = config.patients_per_scenario
    if config.scenario_count < 1:
        raise ValueError("scenario_count must be >= 1")
    if lo < 0 or hi < lo:
        raise ValueError(f"patients_per_scenario range [{lo}, {hi}] is empty")
    slo, shi = config.sessions_range
    if slo < 1 or shi < slo:
        raise ValueError(f"sessions_range [{slo}, {shi}] is empty")
    if shi > instance.horizon_days:
        raise ValueError(f"sessions_range upper bound {shi} exceeds horizon {instance.horizon_days}")
    if not 0.0 <= config.special_ratio <= 1.0:
        raise ValueError("special_ratio must be in [0, 1]")
    if config.special_ratio > 0:
        if not config.slots_pool:
            raise ValueError("slots_pool must be non-empty when special patients can be generated")
        bad = [s for s in config.slots_pool if not 1 <= s <= instance.slots_per_day]
        if bad:
            raise ValueError(f"slots_pool entries {bad} outside 1..{instance.slots_per_day}")
    if config.probability_mode not in ("uniform", "dirichlet_like_random"):
        raise ValueError(f"unknown probability_mode {config.probability_mode!r}")


def generate_scenarios(instance: Instance, config: GeneratorConfig, seed: int) -> ScenarioSet:
    """Deterministically generate a scenario set (SplitMix64-seeded)."""
    _check_config(instance, config)
    rng = SplitMix64(seed)
    drafts = []
    for i in range(config.scenario_count):
        count = rng.randint(*config.patients_per_scenario)
        patients = []
        for k in range(count):
            special = rng.random() < config.special_ratio
            sessions = rng.randint(*config.sessions_range)
            if special:
                size = rng.randint(1, len(config.slots_pool))
                allowed = frozenset(rng.sample(sorted(config.slots_pool), size))
                patients.append(Patient(f"w{i + 1}p{k + 1}", SPECIAL, sessions, allowed))
            else:
                patients.append(Patient(f"w{i + 1}p{k + 1}", GENERAL, sessions))
        drafts.append((f"w{i + 1}", tuple(patients)))

    n = config.scenario_count
    if config.probability_mode == "uniform":
        probs = [Fraction(1, n)] * n
    else:
        weights = [rng.randint(1, 1000) for _ in range(n)]
        total = sum(weights)
        probs = [Fraction(w, total) for w in weights]

    return ScenarioSet(tuple(
        Scenario(sid, prob, patients) for (sid, patients), prob in zip(drafts, probs)
    ))


def validate_scenarios(scenario_set: ScenarioSet, instance: Instance) -> list[ValidationFinding]:
    """Structural validation; empty report = usable scenario set."""
    findings: list[ValidationFinding] = []

    def add(code, locator, message):
        findings.append(ValidationFinding(code, locator, message))

    seen: set[str] = set()
    for sc in scenario_set.scenarios:
        loc = {"scenario": sc.id}
        if sc.id in seen:
            add("duplicate_scenario_id", loc, f"duplicate scenario id {sc.id!r}")
        seen.add(sc.id)
        if not sc.probability > 0:
            add("probability_nonpositive", loc, f"scenario {sc.id!r}: probability must be > 0")
        for p in sc.patients:
            ploc = {"scenario": sc.id, "patient": p.id}
            if p.sessions < 1:
                add("sessions_nonpositive", ploc, f"{sc.id}/{p.id}: sessions must be >= 1")
            elif p.sessions > instance.horizon_days:
                add("sessions_exceed_horizon", ploc,
                    f"{sc.id}/{p.id}: sessions exceed horizon ({p.sessions} > {instance.horizon_days})")
            if p.kind == SPECIAL:
                if not p.allowed_slots:
                    add("empty_allowed_slots", ploc, f"{sc.id}/{p.id}: special patient has empty allowed_slots")
                bad = sorted(s for s in p.allowed_slots if not 1 <= s <= instance.slots_per_day)
                if bad:
                    add("allowed_slot_out_of_range", ploc,
                        f"{sc.id}/{p.id}: allowed slots {bad} outside 1..{instance.slots_per_day}")

    total = sum((sc.probability for sc in scenario_set.scenarios), start=Fraction(0))
    if scenario_set.is_exact():
        if total != 1:
            add("probability_sum", {},
                f"scenario probabilities sum to {total}, off by {1 - total}")
    elif abs(total - 1.0) > PROBABILITY_TOLERANCE:
        add("probability_sum", {},
            f"scenario probabilities sum to {float(total):.12g}, off by {1 - float(total):.12g}")
    return findings
