"""Pure-Python kernels: population decode and the firefly pairwise sweep.

This is the fallback backend and the behavioural reference for the compiled
extension (radsched.kernels._fast). Both backends perform the same primitive
operations in the same order, so for a given input they produce bit-identical
results; the extension is just much faster. Keep the two in lockstep when
changing anything here.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND = "pure"


def _round_clamp(x: float, lo: int, hi: int) -> int:
    if x < lo:
        return lo
    if x > hi:
        return hi
    v = int(math.floor(x + 0.5))
    if v < lo:
        return lo
    if v > hi:
        return hi
    return v


def _first_free_machine(avail, occ, machine_count, start, slot, sessions) -> int:
    """First machine (1-based) free for the whole session block, else 0."""
    for m in range(machine_count):
        ok = True
        for d in range(start - 1, start - 1 + sessions):
            if not avail[m, d, slot - 1] or occ[m, d, slot - 1]:
                ok = False
                break
        if ok:
            return m + 1
    return 0


def _mark(occ, machine, start, slot, sessions):
    for d in range(start - 1, start - 1 + sessions):
        occ[machine - 1, d, slot - 1] = 1


def _place_patient(gene_start, gene_slot, j, sessions, allowed, min_start, avail, occ, dims):
    """Decode one patient: direct placement, then nearest-start repair.

    Returns (machine, start, slot) or None when no feasible candidate exists.
    The repair prefers the smallest |start - rounded gene start|, then lower
    cost (the earlier of the two equidistant starts), then slot, then machine.
    """
    machine_count, horizon, slots_per_day = dims
    p = sessions[j]
    start = _round_clamp(gene_start, 1, horizon)
    slot = _round_clamp(gene_slot, 1, slots_per_day)
    lo = min_start[j]
    last_start = horizon - p + 1

    if lo <= start <= last_start and allowed[j, slot - 1]:
        m = _first_free_machine(avail, occ, machine_count, start, slot, p)
        if m:
            _mark(occ, m, start, slot, p)
            return m, start, slot

    for k in range(horizon):
        for cand in ((start - k, start + k) if k else (start,)):
            if cand < lo or cand > last_start:
                continue
            for slot_c in range(1, slots_per_day + 1):
                if not allowed[j, slot_c - 1]:
                    continue
                m = _first_free_machine(avail, occ, machine_count, cand, slot_c, p)
                if m:
                    _mark(occ, m, cand, slot_c, p)
                    return m, cand, slot_c
    return None


def decode_population(genes, sessions, allowed, min_start, avail, base_used,
                      os_mode, scen_offsets, scen_prob):
    """Decode a population of gene vectors into placements and fitness values.

    genes is float64[pop, 2n]: start-day genes then slot genes. Returns
    (objective, penalty, assign) where objective already includes the
    penalty term and assign is int32[pop, n, 3] of (machine, start, slot),
    -1 for unplaceable patients.

    In os mode, patient 0 is the pending arrival and scen_offsets delimits
    each scenario's patients; every scenario is decoded against the
    occupancy left by the pending placement alone.
    """
    pop = genes.shape[0]
    n = genes.shape[1] // 2
    dims = (avail.shape[0], avail.shape[1], avail.shape[2])
    horizon = dims[1]

    objective = np.zeros(pop, dtype=np.float64)
    penalty = np.zeros(pop, dtype=np.float64)
    assign = np.full((pop, n, 3), -1, dtype=np.int32)

    for k in range(pop):
        occ = base_used.copy()
        pen = 0.0
        if not os_mode:
            value = 0.0
            for j in range(n):
                placed = _place_patient(genes[k, j], genes[k, n + j], j, sessions,
                                        allowed, min_start, avail, occ, dims)
                if placed is None:
                    pen += float((horizon + 1) * sessions[j])
                else:
                    assign[k, j, 0], assign[k, j, 1], assign[k, j, 2] = placed
                    p = sessions[j]
                    value += float(p * placed[1] + p * (p - 1) // 2)
            objective[k] = value + pen
        else:
            pending_term = 0.0
            placed = _place_patient(genes[k, 0], genes[k, n], 0, sessions,
                                    allowed, min_start, avail, occ, dims)
            if placed is None:
                pen += float((horizon + 1) * sessions[0])
            else:
                assign[k, 0, 0], assign[k, 0, 1], assign[k, 0, 2] = placed
                p = sessions[0]
                pending_term = float(p * placed[1] + p * (p - 1) // 2)
            occ_pending = occ.copy()
            expected = 0.0
            for s in range(len(scen_prob)):
                occ = occ_pending.copy()
                q = 0.0
                for j in range(scen_offsets[s], scen_offsets[s + 1]):
                    placed = _place_patient(genes[k, j], genes[k, n + j], j, sessions,
                                            allowed, min_start, avail, occ, dims)
                    if placed is None:
                        pen += float((horizon + 1) * sessions[j])
                    else:
                        assign[k, j, 0], assign[k, j, 1], assign[k, j, 2] = placed
                        p = sessions[j]
                        q += float(p * placed[1] + p * (p - 1) // 2)
                expected += scen_prob[s] * q
            objective[k] = pending_term + expected + pen
        penalty[k] = pen
    return objective, penalty, assign


def ffo_sweep(positions, intensity, beta0, gamma, rand, scale, lower, upper):
    """One firefly iteration: move every firefly toward each brighter one.

    positions is updated in place, sequentially in (i, j) order, so moves see
    the partially updated swarm exactly like the compiled kernel. A firefly
    with no brighter neighbour takes a pure random step (rand[i, i]).
    Positions are clamped to bounds after every pairwise move.
    """
    pop = positions.shape[0]
    d = positions.shape[1]
    for i in range(pop):
        moved = False
        for j in range(pop):
            if intensity[j] > intensity[i]:
                moved = True
                d2 = 0.0
                for g in range(d):
                    diff = positions[i, g] - positions[j, g]
                    d2 += diff * diff
                beta = beta0 * math.exp(-gamma * d2)
                for g in range(d):
                    x = positions[i, g] + beta * (positions[j, g] - positions[i, g]) + scale[g] * rand[i, j, g]
                    if x < lower[g]:
                        x = lower[g]
                    elif x > upper[g]:
                        x = upper[g]
                    positions[i, g] = x
        if not moved:
            for g in range(d):
                x = positions[i, g] + scale[g] * rand[i, i, g]
                if x < lower[g]:
                    x = lower[g]
                elif x > upper[g]:
                    x = upper[g]
                positions[i, g] = x
