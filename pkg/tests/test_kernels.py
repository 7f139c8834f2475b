"""Backend equivalence: the compiled kernels must match the pure-Python ones
bit for bit, and whole solver runs must not depend on the backend."""

import math

import numpy as np
import pytest

from conftest import random_instance
from radsched import kernels
from radsched.encoding import offline_context, os_context
from radsched.model import Instance, Patient
from radsched.scenarios import Scenario, ScenarioSet
from radsched.solvers import SolverParams, solve

pytestmark = pytest.mark.skipif(
    "compiled" not in kernels.available_backends(),
    reason="compiled kernel extension not built",
)


def _both():
    return kernels.get_backend("compiled"), kernels.get_backend("pure")


def test_decode_population_bit_identical_flat():
    fast, pure = _both()
    rng = np.random.default_rng(1)
    for _ in range(25):
        inst = random_instance(rng, blocked_ratio=0.15)
        ctx = offline_context(inst)
        genes = np.ascontiguousarray(
            rng.uniform(-2, inst.horizon_days + 2, size=(16, ctx.genome_length)))
        args = (genes, ctx.sessions, ctx.allowed, ctx.min_start, ctx.avail,
                ctx.base_used, ctx.os_mode, ctx.scen_offsets, ctx.scen_prob)
        fo, fp, fa = fast.decode_population(*args)
        po, pp, pa = pure.decode_population(*args)
        assert np.array_equal(fo, po)
        assert np.array_equal(fp, pp)
        assert np.array_equal(fa, pa)


def test_decode_population_bit_identical_os():
    fast, pure = _both()
    rng = np.random.default_rng(2)
    from fractions import Fraction
    inst = Instance(2, 6, 2, (Patient("J", "general", 2),))
    scen = ScenarioSet((
        Scenario("w1", Fraction(1, 4), (Patient("a", "general", 2), Patient("b", "special", 1, frozenset({2})))),
        Scenario("w2", Fraction(1, 4), (Patient("c", "general", 3),)),
        Scenario("w3", Fraction(1, 2), ()),
    ))
    ctx = os_context(inst, None, "J", scen)
    genes = np.ascontiguousarray(rng.uniform(0, 7, size=(32, ctx.genome_length)))
    args = (genes, ctx.sessions, ctx.allowed, ctx.min_start, ctx.avail,
            ctx.base_used, ctx.os_mode, ctx.scen_offsets, ctx.scen_prob)
    fo, fp, fa = fast.decode_population(*args)
    po, pp, pa = pure.decode_population(*args)
    assert np.array_equal(fo, po) and np.array_equal(fp, pp) and np.array_equal(fa, pa)


def test_ffo_sweep_bit_identical():
    fast, pure = _both()
    rng = np.random.default_rng(3)
    pop, d = 9, 6
    base = rng.uniform(1, 5, size=(pop, d))
    intensity = rng.uniform(0, 10, size=pop)
    rand = rng.uniform(-1, 1, size=(pop, pop, d))
    scale = rng.uniform(0, 0.5, size=d)
    lower = np.full(d, 1.0)
    upper = np.full(d, 5.0)
    a = base.copy()
    b = base.copy()
    fast.ffo_sweep(a, intensity, 1.0, 0.2, rand, scale, lower, upper)
    pure.ffo_sweep(b, intensity, 1.0, 0.2, rand, scale, lower, upper)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, base)  # the sweep actually moved something
    assert (a >= lower).all() and (a <= upper).all()


def test_full_runs_backend_independent(monkeypatch, i1):
    pure = kernels.get_backend("pure")
    ctx = offline_context(i1)
    params = SolverParams(max_iterations=40)
    compiled_runs = {a: solve(a, ctx, params, seed=5) for a in ("ga", "ffo", "wo")}
    monkeypatch.setattr(kernels, "decode_population", pure.decode_population)
    monkeypatch.setattr(kernels, "ffo_sweep", pure.ffo_sweep)
    for algo, compiled_run in compiled_runs.items():
        pure_run = solve(algo, ctx, params, seed=5)
        assert pure_run.trace == compiled_run.trace
        assert pure_run.best_objective == compiled_run.best_objective
        assert pure_run.best.schedule == compiled_run.best.schedule


def test_round_half_up_rule():
    # floor(x + 0.5): 1.5 -> 2 and 2.5 -> 3 in both backends
    fast, pure = _both()
    inst = Instance(1, 5, 1, (Patient("P1", "general", 1),))
    ctx = offline_context(inst)
    genes = np.array([[1.5, 1.0], [2.5, 1.0]], dtype=np.float64)
    for backend in (fast, pure):
        _, _, assign = backend.decode_population(
            genes, ctx.sessions, ctx.allowed, ctx.min_start, ctx.avail,
            ctx.base_used, ctx.os_mode, ctx.scen_offsets, ctx.scen_prob)
        assert assign[0, 0, 1] == 2
        assert assign[1, 0, 1] == 3
    assert math.floor(1.5 + 0.5) == 2  # guard against a future rounding-mode change
