# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels: population decode and the firefly pairwise sweep.

Mirror of radsched.kernels.pure, operation for operation, so both backends
return bit-identical results. Any semantic change must be made in both files.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, floor

cnp.import_array()

BACKEND = "compiled"


cdef struct Placed:
    int machine
    int start
    int slot


cdef inline int _round_clamp(double x, int lo, int hi) noexcept nogil:
    cdef int v
    if x < lo:
        return lo
    if x > hi:
        return hi
    v = <int>floor(x + 0.5)
    if v < lo:
        return lo
    if v > hi:
        return hi
    return v


cdef inline int _first_free_machine(const unsigned char[:, :, ::1] avail,
                                    const unsigned char[:, :, ::1] occ,
                                    int machine_count, int start, int slot,
                                    int sessions) noexcept nogil:
    cdef int m, d
    cdef bint ok
    for m in range(machine_count):
        ok = True
        for d in range(start - 1, start - 1 + sessions):
            if avail[m, d, slot - 1] == 0 or occ[m, d, slot - 1] != 0:
                ok = False
                break
        if ok:
            return m + 1
    return 0


cdef inline void _mark(unsigned char[:, :, ::1] occ, int machine, int start,
                       int slot, int sessions) noexcept nogil:
    cdef int d
    for d in range(start - 1, start - 1 + sessions):
        occ[machine - 1, d, slot - 1] = 1


cdef inline Placed _place_patient(double gene_start, double gene_slot, int j,
                                  const int[::1] sessions,
                                  const unsigned char[:, ::1] allowed,
                                  const int[::1] min_start,
                                  const unsigned char[:, :, ::1] avail,
                                  unsigned char[:, :, ::1] occ,
                                  int machine_count, int horizon,
                                  int slots_per_day) noexcept nogil:
    cdef Placed out
    cdef int p = sessions[j]
    cdef int start = _round_clamp(gene_start, 1, horizon)
    cdef int slot = _round_clamp(gene_slot, 1, slots_per_day)
    cdef int lo = min_start[j]
    cdef int last_start = horizon - p + 1
    cdef int m, k, c, cand, slot_c

    out.machine = 0
    out.start = 0
    out.slot = 0
    if lo <= start and start <= last_start and allowed[j, slot - 1]:
        m = _first_free_machine(avail, occ, machine_count, start, slot, p)
        if m:
            _mark(occ, m, start, slot, p)
            out.machine = m
            out.start = start
            out.slot = slot
            return out

    for k in range(horizon):
        for c in range(2):
            if k == 0 and c == 1:
                continue
            cand = start - k if c == 0 else start + k
            if cand < lo or cand > last_start:
                continue
            for slot_c in range(1, slots_per_day + 1):
                if not allowed[j, slot_c - 1]:
                    continue
                m = _first_free_machine(avail, occ, machine_count, cand, slot_c, p)
                if m:
                    _mark(occ, m, cand, slot_c, p)
                    out.machine = m
                    out.start = cand
                    out.slot = slot_c
                    return out
    return out


cdef inline void _copy_grid(unsigned char[:, :, ::1] dst,
                            const unsigned char[:, :, ::1] src) noexcept nogil:
    cdef Py_ssize_t a, b, c
    for a in range(src.shape[0]):
        for b in range(src.shape[1]):
            for c in range(src.shape[2]):
                dst[a, b, c] = src[a, b, c]


def decode_population(const double[:, ::1] genes, const int[::1] sessions,
                      const unsigned char[:, ::1] allowed, const int[::1] min_start,
                      const unsigned char[:, :, ::1] avail,
                      const unsigned char[:, :, ::1] base_used,
                      int os_mode, const int[::1] scen_offsets,
                      const double[::1] scen_prob):
    """See radsched.kernels.pure.decode_population (behavioural reference)."""
    cdef Py_ssize_t pop = genes.shape[0]
    cdef int n = <int>(genes.shape[1] // 2)
    cdef int machine_count = <int>avail.shape[0]
    cdef int horizon = <int>avail.shape[1]
    cdef int slots_per_day = <int>avail.shape[2]
    cdef int n_scen = <int>scen_prob.shape[0]

    objective_arr = np.zeros(pop, dtype=np.float64)
    penalty_arr = np.zeros(pop, dtype=np.float64)
    assign_arr = np.full((pop, n, 3), -1, dtype=np.int32)
    occ_arr = np.empty_like(np.asarray(base_used))
    occ_pending_arr = np.empty_like(occ_arr)

    cdef double[::1] objective = objective_arr
    cdef double[::1] penalty = penalty_arr
    cdef int[:, :, ::1] assign = assign_arr
    cdef unsigned char[:, :, ::1] occ = occ_arr
    cdef unsigned char[:, :, ::1] occ_pending = occ_pending_arr

    cdef Py_ssize_t k
    cdef int j, s, p
    cdef double pen, value, pending_term, expected, q
    cdef Placed placed

    with nogil:
        for k in range(pop):
            _copy_grid(occ, base_used)
            pen = 0.0
            if not os_mode:
                value = 0.0
                for j in range(n):
                    placed = _place_patient(genes[k, j], genes[k, n + j], j, sessions,
                                            allowed, min_start, avail, occ,
                                            machine_count, horizon, slots_per_day)
                    p = sessions[j]
                    if placed.machine == 0:
                        pen += <double>((horizon + 1) * p)
                    else:
                        assign[k, j, 0] = placed.machine
                        assign[k, j, 1] = placed.start
                        assign[k, j, 2] = placed.slot
                        value += <double>(p * placed.start + p * (p - 1) / 2)
                objective[k] = value + pen
            else:
                pending_term = 0.0
                placed = _place_patient(genes[k, 0], genes[k, n], 0, sessions,
                                        allowed, min_start, avail, occ,
                                        machine_count, horizon, slots_per_day)
                p = sessions[0]
                if placed.machine == 0:
                    pen += <double>((horizon + 1) * p)
                else:
                    assign[k, 0, 0] = placed.machine
                    assign[k, 0, 1] = placed.start
                    assign[k, 0, 2] = placed.slot
                    pending_term = <double>(p * placed.start + p * (p - 1) / 2)
                _copy_grid(occ_pending, occ)
                expected = 0.0
                for s in range(n_scen):
                    _copy_grid(occ, occ_pending)
                    q = 0.0
                    for j in range(scen_offsets[s], scen_offsets[s + 1]):
                        placed = _place_patient(genes[k, j], genes[k, n + j], j, sessions,
                                                allowed, min_start, avail, occ,
                                                machine_count, horizon, slots_per_day)
                        p = sessions[j]
                        if placed.machine == 0:
                            pen += <double>((horizon + 1) * p)
                        else:
                            assign[k, j, 0] = placed.machine
                            assign[k, j, 1] = placed.start
                            assign[k, j, 2] = placed.slot
                            q += <double>(p * placed.start + p * (p - 1) / 2)
                    expected += scen_prob[s] * q
                objective[k] = pending_term + expected + pen
            penalty[k] = pen
    return objective_arr, penalty_arr, assign_arr


def ffo_sweep(double[:, ::1] positions, const double[::1] intensity,
              double beta0, double gamma, const double[:, :, ::1] rand,
              const double[::1] scale, const double[::1] lower,
              const double[::1] upper):
    """See radsched.kernels.pure.ffo_sweep (behavioural reference)."""
    cdef Py_ssize_t pop = positions.shape[0]
    cdef Py_ssize_t d = positions.shape[1]
    cdef Py_ssize_t i, j, g
    cdef bint moved
    cdef double d2, diff, beta, x

    with nogil:
        for i in range(pop):
            moved = False
            for j in range(pop):
                if intensity[j] > intensity[i]:
                    moved = True
                    d2 = 0.0
                    for g in range(d):
                        diff = positions[i, g] - positions[j, g]
                        d2 += diff * diff
                    beta = beta0 * exp(-gamma * d2)
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
