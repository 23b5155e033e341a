# cython: boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled trajectory-batch kernels.

Same accumulation order as the numpy reference implementation, so the two
backends agree bit for bit.
"""

import numpy as np


def dwell_times(const unsigned char[::1] levels,
                const double[:, ::1] switch_times,
                const Py_ssize_t[::1] counts,
                const double[::1] t_grid):
    """Time spent at the high level in [0, t] per trajectory and grid time."""
    cdef Py_ssize_t n = levels.shape[0]
    cdef Py_ssize_t m = t_grid.shape[0]
    out = np.empty((n, m), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef Py_ssize_t i, gi, j, c
    cdef double acc, prev, lvl, t
    with nogil:
        for i in range(n):
            j = 0
            acc = 0.0
            prev = 0.0
            lvl = <double> levels[i]
            c = counts[i]
            for gi in range(m):
                t = t_grid[gi]
                while j < c and switch_times[i, j] <= t:
                    acc = acc + lvl * (switch_times[i, j] - prev)
                    prev = switch_times[i, j]
                    lvl = 1.0 - lvl
                    j += 1
                o[i, gi] = acc + lvl * (t - prev)
    return out


def levels_at_times(const unsigned char[::1] levels,
                    const double[:, ::1] switch_times,
                    const Py_ssize_t[::1] counts,
                    const double[::1] t_grid):
    """Level bit at each grid time per trajectory (parity of prior switches)."""
    cdef Py_ssize_t n = levels.shape[0]
    cdef Py_ssize_t m = t_grid.shape[0]
    out = np.empty((n, m), dtype=np.uint8)
    cdef unsigned char[:, ::1] o = out
    cdef Py_ssize_t i, gi, j, c
    cdef double t
    with nogil:
        for i in range(n):
            j = 0
            c = counts[i]
            for gi in range(m):
                t = t_grid[gi]
                while j < c and switch_times[i, j] <= t:
                    j += 1
                o[i, gi] = levels[i] ^ <unsigned char> (j & 1)
    return out
