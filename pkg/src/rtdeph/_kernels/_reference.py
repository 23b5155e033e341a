"""Pure-numpy implementations of the trajectory-batch kernels.

These mirror the compiled kernels operation for operation: dwell times are
accumulated segment by segment in switch order (np.cumsum accumulates
sequentially), and the final per-query expression uses the same operand
order, so both backends produce bit-identical output.
"""

from __future__ import annotations

import numpy as np


def dwell_times(levels, switch_times, counts, t_grid):
    """Time spent at the high level in [0, t] per trajectory and grid time.

    Parameters
    ----------
    levels : uint8 array, shape (n,)
        Level bit at t=0 for each trajectory.
    switch_times : float array, shape (n, k)
        Row i holds counts[i] increasing switch times, padded with +inf.
    counts : integer array, shape (n,)
        Number of valid switch times per row.
    t_grid : float array, shape (m,)
        Ascending query times.

    Returns
    -------
    float array, shape (n, m)
    """
    n, k = switch_times.shape
    m = t_grid.shape[0]
    lvl0 = levels.astype(np.float64)

    if k == 0:
        return lvl0[:, None] * t_grid[None, :]

    seg = np.arange(k)
    valid = seg[None, :] < counts[:, None]
    # Finite stand-in for the +inf padding; padded segments are masked out.
    tau_fin = np.where(valid, switch_times, 0.0)
    prev = np.concatenate([np.zeros((n, 1)), tau_fin[:, :-1]], axis=1)
    seg_lvl = (levels[:, None] ^ (seg[None, :] & 1)).astype(np.float64)
    contrib = np.where(valid, seg_lvl * (tau_fin - prev), 0.0)
    # dwell[:, j] = time at the high level up to and including switch j
    dwell = np.concatenate([np.zeros((n, 1)), np.cumsum(contrib, axis=1)], axis=1)
    tau_ext = np.concatenate([np.zeros((n, 1)), switch_times], axis=1)

    out = np.empty((n, m))
    for gi, t in enumerate(t_grid):
        j = (switch_times <= t).sum(axis=1)  # inf padding never counts
        dj = np.take_along_axis(dwell, j[:, None], axis=1)[:, 0]
        tj = np.take_along_axis(tau_ext, j[:, None], axis=1)[:, 0]
        lvl = (levels ^ (j & 1)).astype(np.float64)
        out[:, gi] = dj + lvl * (t - tj)
    return out


def levels_at_times(levels, switch_times, counts, t_grid):
    """Level bit at each grid time per trajectory (parity of prior switches)."""
    n, k = switch_times.shape
    m = t_grid.shape[0]
    if k == 0:
        return np.repeat(levels[:, None], m, axis=1)
    out = np.empty((n, m), dtype=np.uint8)
    for gi, t in enumerate(t_grid):
        j = (switch_times <= t).sum(axis=1)
        out[:, gi] = levels ^ (j & 1).astype(np.uint8)
    return out
