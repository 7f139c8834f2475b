"""JSON file formats: instances, schedules, scenario sets.

All formats are versioned ({"version": 1}) and use 1-based indices. Writers
emit a canonical form (fixed key order, sorted index lists, two-space indent,
trailing newline) so save/load round-trips are byte-stable.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from pathlib import Path

from .model import GENERAL, SPECIAL, Assignment, Instance, Patient, Schedule
from .scenarios import Scenario, ScenarioSet

FORMAT_VERSION = 1


class ParseError(ValueError):
    """File does not match the documented schema; message names the field."""


def _require(obj: dict, key: str, where: str):
    if key not in obj:
        raise ParseError(f"{where}: missing required field {key!r}")
    return obj[key]


def _as_int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"{where}: expected an integer, got {value!r}")
    return value


def _check_version(obj: dict, where: str):
    version = _require(obj, "version", where)
    if version != FORMAT_VERSION:
        raise ParseError(f"{where}: schema-version mismatch (expected {FORMAT_VERSION}, got {version!r})")


def _load_json(path) -> dict:
    text = Path(path).read_text(encoding="utf-8")
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: not valid JSON at line {exc.lineno}: {exc.msg}") from None
    if not isinstance(obj, dict):
        raise ParseError(f"{path}: top-level value must be an object")
    return obj


def _dump_json(obj: dict, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# Patients (shared by instance and scenario files)

def _patient_from_json(obj: dict, where: str, with_release: bool) -> Patient:
    pid = _require(obj, "id", where)
    if not isinstance(pid, str) or not pid:
        raise ParseError(f"{where}.id: expected a non-empty string")
    kind = _require(obj, "kind", where)
    if kind not in (GENERAL, SPECIAL):
        raise ParseError(f"{where}.kind: expected 'general' or 'special', got {kind!r}")
    sessions = _as_int(_require(obj, "sessions", where), f"{where}.sessions")
    slots = obj.get("allowed_slots", [])
    if not isinstance(slots, list):
        raise ParseError(f"{where}.allowed_slots: expected a list")
    if kind == SPECIAL and not slots:
        raise ParseError(f"{where}.allowed_slots: required and non-empty for special patients")
    release = 1
    if with_release:
        release = _as_int(obj.get("release_day", 1), f"{where}.release_day")
    return Patient(
        id=pid,
        kind=kind,
        sessions=sessions,
        allowed_slots=frozenset(_as_int(s, f"{where}.allowed_slots[]") for s in slots),
        release_day=release,
    )


def _patient_to_json(p: Patient, with_release: bool) -> dict:
    obj: dict = {"id": p.id, "kind": p.kind, "sessions": p.sessions}
    if p.kind == SPECIAL:
        obj["allowed_slots"] = sorted(p.allowed_slots)
    if with_release:
        obj["release_day"] = p.release_day
    return obj


# ---------------------------------------------------------------------------
# Instances

def instance_to_json(instance: Instance) -> dict:
    return {
        "version": FORMAT_VERSION,
        "machines": instance.machine_count,
        "horizon_days": instance.horizon_days,
        "slots_per_day": instance.slots_per_day,
        "blocked": [list(b) for b in sorted(instance.blocked)],
        "patients": [_patient_to_json(p, with_release=True) for p in instance.patients],
    }


def instance_from_json(obj: dict, where: str = "instance") -> Instance:
    _check_version(obj, where)
    machines = _as_int(_require(obj, "machines", where), f"{where}.machines")
    horizon = _as_int(_require(obj, "horizon_days", where), f"{where}.horizon_days")
    slots = _as_int(_require(obj, "slots_per_day", where), f"{where}.slots_per_day")
    blocked_raw = obj.get("blocked", [])
    if not isinstance(blocked_raw, list):
        raise ParseError(f"{where}.blocked: expected a list of [machine, day, slot] triples")
    blocked = set()
    for i, triple in enumerate(blocked_raw):
        if not (isinstance(triple, list) and len(triple) == 3):
            raise ParseError(f"{where}.blocked[{i}]: expected a [machine, day, slot] triple")
        blocked.add(tuple(_as_int(v, f"{where}.blocked[{i}]") for v in triple))
    patients_raw = _require(obj, "patients", where)
    if not isinstance(patients_raw, list):
        raise ParseError(f"{where}.patients: expected a list")
    patients = tuple(
        _patient_from_json(p, f"{where}.patients[{i}]", with_release=True)
        for i, p in enumerate(patients_raw)
    )
    return Instance(
        machine_count=machines,
        horizon_days=horizon,
        slots_per_day=slots,
        patients=patients,
        blocked=frozenset(blocked),
    )


def save_instance(instance: Instance, path) -> None:
    _dump_json(instance_to_json(instance), path)


def load_instance(path) -> Instance:
    return instance_from_json(_load_json(path), str(path))


def instance_digest(instance: Instance) -> str:
    """Short content hash used to tie schedule files to their instance."""
    canonical = json.dumps(instance_to_json(instance), indent=2)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]


# ---------------------------------------------------------------------------
# Schedules

def schedule_to_json(schedule: Schedule, instance: Instance) -> dict:
    order = {pid: k for k, pid in enumerate(instance.patient_ids())}
    assignments = sorted(schedule.assignments.values(), key=lambda a: order.get(a.patient_id, len(order)))
    return {
        "version": FORMAT_VERSION,
        "instance_id": instance_digest(instance),
        "assignments": [
            {"id": a.patient_id, "machine": a.machine, "start_day": a.start_day, "slot": a.slot}
            for a in assignments
        ],
        "unassigned": sorted(schedule.unassigned, key=lambda pid: order.get(pid, len(order))),
    }


def save_schedule(schedule: Schedule, instance: Instance, path) -> None:
    _dump_json(schedule_to_json(schedule, instance), path)


def load_schedule(path, instance: Instance) -> Schedule:
    obj = _load_json(path)
    where = str(path)
    _check_version(obj, where)
    file_id = _require(obj, "instance_id", where)
    expected = instance_digest(instance)
    if file_id != expected:
        raise ParseError(f"{where}: instance_id {file_id!r} does not match instance ({expected!r})")
    known = set(instance.patient_ids())
    assignments: dict[str, Assignment] = {}
    for i, entry in enumerate(_require(obj, "assignments", where)):
        w = f"{where}.assignments[{i}]"
        pid = _require(entry, "id", w)
        if pid not in known:
            raise ParseError(f"{w}: unknown patient id {pid!r}")
        if pid in assignments:
            raise ParseError(f"{w}: duplicate assignment for {pid!r}")
        assignments[pid] = Assignment(
            patient_id=pid,
            machine=_as_int(_require(entry, "machine", w), f"{w}.machine"),
            start_day=_as_int(_require(entry, "start_day", w), f"{w}.start_day"),
            slot=_as_int(_require(entry, "slot", w), f"{w}.slot"),
        )
    unassigned = []
    for i, pid in enumerate(obj.get("unassigned", [])):
        w = f"{where}.unassigned[{i}]"
        if pid not in known:
            raise ParseError(f"{w}: unknown patient id {pid!r}")
        if pid in assignments:
            raise ParseError(f"{w}: patient {pid!r} is both assigned and unassigned")
        unassigned.append(pid)
    covered = set(assignments) | set(unassigned)
    missing = [pid for pid in instance.patient_ids() if pid not in covered]
    if missing:
        raise ParseError(f"{where}: roster patients missing from the file: {missing}")
    return Schedule(assignments=assignments, unassigned=tuple(unassigned))


# ---------------------------------------------------------------------------
# Scenario sets

def _probability_from_json(value, where: str):
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"{where}: cannot parse probability {value!r}") from None
    if isinstance(value, bool):
        raise ParseError(f"{where}: expected a probability, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return value
    raise ParseError(f"{where}: expected a probability, got {value!r}")


def _probability_to_json(value):
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    return value


def scenario_set_to_json(scenario_set: ScenarioSet) -> dict:
    return {
        "version": FORMAT_VERSION,
        "scenarios": [
            {
                "id": sc.id,
                "probability": _probability_to_json(sc.probability),
                "patients": [_patient_to_json(p, with_release=False) for p in sc.patients],
            }
            for sc in scenario_set.scenarios
        ],
    }


def save_scenarios(scenario_set: ScenarioSet, path) -> None:
    _dump_json(scenario_set_to_json(scenario_set), path)


def load_scenarios(path) -> ScenarioSet:
    obj = _load_json(path)
    where = str(path)
    _check_version(obj, where)
    scenarios = []
    for i, entry in enumerate(_require(obj, "scenarios", where)):
        w = f"{where}.scenarios[{i}]"
        scenarios.append(
            Scenario(
                id=_require(entry, "id", w),
                probability=_probability_from_json(_require(entry, "probability", w), f"{w}.probability"),
                patients=tuple(
                    _patient_from_json(p, f"{w}.patients[{j}]", with_release=False)
                    for j, p in enumerate(_require(entry, "patients", w))
                ),
            )
        )
    return ScenarioSet(scenarios=tuple(scenarios))
