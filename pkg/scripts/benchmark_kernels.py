#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Times the two hot kernels (population decode, firefly sweep) and a full run
of each solver under both backends, and checks that the backends agree bit
for bit on the way. Run from the repo root:

    python3 scripts/benchmark_kernels.py
"""

import time
from fractions import Fraction

import numpy as np

from radsched import kernels
from radsched.encoding import offline_context, os_context
from radsched.model import Instance, Patient
from radsched.scenarios import Scenario, ScenarioSet
from radsched.solvers import SolverParams, solve


def sample_contexts():
    offline = Instance(2, 12, 2, tuple(
        [Patient(f"G{k}", "general", 2 + k % 2) for k in range(6)]
        + [Patient(f"S{k}", "special", 2, frozenset({2})) for k in range(4)]
    ))
    pending = Instance(1, 15, 2, (Patient("J", "general", 3),))
    scen = ScenarioSet((
        Scenario("w1", Fraction(1, 4), (Patient("f1", "special", 3, frozenset({2})),)),
        Scenario("w2", Fraction(1, 4), (Patient("f2", "general", 2),)),
        Scenario("w3", Fraction(1, 2), ()),
    ))
    return offline_context(offline), os_context(pending, None, "J", scen)


def time_decode(backend, ctx, genes, repeats=50):
    args = (genes, ctx.sessions, ctx.allowed, ctx.min_start, ctx.avail,
            ctx.base_used, ctx.os_mode, ctx.scen_offsets, ctx.scen_prob)
    backend.decode_population(*args)  # warm up
    started = time.perf_counter()
    for _ in range(repeats):
        out = backend.decode_population(*args)
    return (time.perf_counter() - started) / repeats, out


def time_sweep(backend, repeats=50):
    rng = np.random.default_rng(1)
    pop, d = 25, 20
    positions = rng.uniform(1, 15, size=(pop, d))
    intensity = rng.uniform(0, 10, size=pop)
    rand = rng.uniform(-1, 1, size=(pop, pop, d))
    scale = np.full(d, 0.5)
    lower, upper = np.full(d, 1.0), np.full(d, 15.0)
    work = positions.copy()
    backend.ffo_sweep(work, intensity, 1.0, 0.01, rand, scale, lower, upper)
    started = time.perf_counter()
    for _ in range(repeats):
        work = positions.copy()
        backend.ffo_sweep(work, intensity, 1.0, 0.01, rand, scale, lower, upper)
    return (time.perf_counter() - started) / repeats, work


def time_full_runs(backend_name):
    impl = kernels.get_backend(backend_name)
    saved = (kernels.decode_population, kernels.ffo_sweep)
    kernels.decode_population, kernels.ffo_sweep = impl.decode_population, impl.ffo_sweep
    try:
        ctx, _ = sample_contexts()
        params = SolverParams(max_iterations=100)
        out = {}
        for algo in ("ga", "ffo", "wo"):
            started = time.perf_counter()
            run = solve(algo, ctx, params, seed=7)
            out[algo] = (time.perf_counter() - started, run.best_objective)
        return out
    finally:
        kernels.decode_population, kernels.ffo_sweep = saved


def main():
    backends = kernels.available_backends()
    print(f"available backends: {', '.join(backends)} (active: {kernels.BACKEND})")
    if "compiled" not in backends:
        print("compiled extension not built; nothing to compare")
        return

    fast = kernels.get_backend("compiled")
    pure = kernels.get_backend("pure")
    rng = np.random.default_rng(0)

    print("\nkernel microbenchmarks (mean per call)")
    print(f"{'kernel':28s} {'compiled':>12s} {'pure':>12s} {'speedup':>9s}")
    for label, ctx in zip(("decode offline (pop 64)", "decode os (pop 64)"), sample_contexts()):
        genes = np.ascontiguousarray(rng.uniform(0, 16, size=(64, ctx.genome_length)))
        t_fast, out_fast = time_decode(fast, ctx, genes)
        t_pure, out_pure = time_decode(pure, ctx, genes, repeats=5)
        assert all(np.array_equal(a, b) for a, b in zip(out_fast, out_pure)), "backend mismatch"
        print(f"{label:28s} {t_fast * 1e6:10.1f}us {t_pure * 1e6:10.1f}us {t_pure / t_fast:8.1f}x")
    t_fast, out_fast = time_sweep(fast)
    t_pure, out_pure = time_sweep(pure, repeats=5)
    assert np.array_equal(out_fast, out_pure), "backend mismatch"
    print(f"{'ffo sweep (pop 25, d 20)':28s} {t_fast * 1e6:10.1f}us {t_pure * 1e6:10.1f}us {t_pure / t_fast:8.1f}x")

    print("\nfull solver runs (10 patients, 100 iterations)")
    fast_runs = time_full_runs("compiled")
    pure_runs = time_full_runs("pure")
    print(f"{'solver':28s} {'compiled':>12s} {'pure':>12s} {'speedup':>9s}")
    for algo in ("ga", "ffo", "wo"):
        tf, of = fast_runs[algo]
        tp, op = pure_runs[algo]
        assert of == op, f"{algo}: backends disagree ({of} vs {op})"
        print(f"{algo:28s} {tf * 1e3:10.1f}ms {tp * 1e3:10.1f}ms {tp / tf:8.1f}x")
    print("\nbackends agree bit-for-bit on all compared outputs")


if __name__ == "__main__":
    main()
