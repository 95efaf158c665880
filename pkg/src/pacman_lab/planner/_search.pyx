# cython: boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled search over the availability-constrained timestamped graph.

Must return exactly the same flags as ``_search_py.find_act_flags``; the
tie-break mask lives in a uint64, so this kernel only accepts horizons up to
64 (the dispatcher falls back to the pure version beyond that).
"""

from libc.stdint cimport int64_t, uint64_t

import numpy as np

DEF INF = 4611686018427387904  # 1 << 62


def find_act_flags(nxt_arr, int s0, goal_arr, int k):
    """Return a (k,) uint8 array of act flags, or None if no plan exists."""
    if k < 1 or k > 64:
        raise ValueError("compiled kernel supports 1 <= horizon <= 64")
    cdef const int64_t[:, ::1] nxt = np.ascontiguousarray(nxt_arr, dtype=np.int64)
    cdef const unsigned char[::1] goal = np.ascontiguousarray(goal_arr, dtype=np.uint8)
    cdef Py_ssize_t n = goal.shape[0]
    if nxt.shape[0] < k or nxt.shape[1] != n:
        raise ValueError("nxt must be (k, n_states)")

    count_a = np.full(n, INF, dtype=np.int64)
    count_b = np.full(n, INF, dtype=np.int64)
    mask_a = np.zeros(n, dtype=np.uint64)
    mask_b = np.zeros(n, dtype=np.uint64)
    came_np = np.zeros((k + 1, n), dtype=np.int64)
    acted_np = np.zeros((k + 1, n), dtype=np.uint8)
    cdef int64_t[::1] count = count_a
    cdef int64_t[::1] new_count = count_b
    cdef uint64_t[::1] mask = mask_a
    cdef uint64_t[::1] new_mask = mask_b
    cdef int64_t[:, ::1] came = came_np
    cdef unsigned char[:, ::1] acted = acted_np

    cdef Py_ssize_t s, ns, t
    cdef int64_t c, c2
    cdef uint64_t m, m2, bit
    cdef int64_t[::1] tmp_c
    cdef uint64_t[::1] tmp_m

    count[s0] = 0
    for t in range(1, k + 1):
        bit = (<uint64_t>1) << (k - t)
        for s in range(n):
            new_count[s] = INF
            new_mask[s] = 0
        for s in range(n):
            c = count[s]
            if c >= INF:
                continue
            m = mask[s]
            if c < new_count[s] or (c == new_count[s] and m > new_mask[s]):
                new_count[s] = c
                new_mask[s] = m
                came[t, s] = s
                acted[t, s] = 0
            ns = nxt[t - 1, s]
            if ns >= 0:
                c2 = c + 1
                m2 = m | bit
                if c2 < new_count[ns] or (c2 == new_count[ns] and m2 > new_mask[ns]):
                    new_count[ns] = c2
                    new_mask[ns] = m2
                    came[t, ns] = s
                    acted[t, ns] = 1
        tmp_c = count; count = new_count; new_count = tmp_c
        tmp_m = mask; mask = new_mask; new_mask = tmp_m

    cdef Py_ssize_t best = -1
    for s in range(n):
        if goal[s] == 0 or count[s] >= INF:
            continue
        if (
            best < 0
            or count[s] < count[best]
            or (count[s] == count[best] and mask[s] > mask[best])
        ):
            best = s
    if best < 0:
        return None

    flags = np.zeros(k, dtype=np.uint8)
    cdef unsigned char[::1] fview = flags
    s = best
    for t in range(k, 0, -1):
        fview[t - 1] = acted[t, s]
        s = came[t, s]
    return flags
