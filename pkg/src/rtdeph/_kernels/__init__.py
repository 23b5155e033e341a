"""Hot-loop kernels with backend selection at import time.

The compiled Cython extension is used when built; otherwise a numpy
fallback with identical semantics (and, by construction, identical
floating-point accumulation order) takes over.  Set the environment
variable ``RTDEPH_BACKEND`` to ``compiled`` or ``pure`` to force a choice;
``compiled`` raises if the extension is missing.
"""

from __future__ import annotations

import os

import numpy as np

from rtdeph._kernels import _reference

try:
    from rtdeph._kernels import _core
except ImportError:
    _core = None

_requested = os.environ.get("RTDEPH_BACKEND", "auto").strip().lower()
if _requested in ("", "auto"):
    _impl = _core if _core is not None else _reference
elif _requested in ("compiled", "cython"):
    if _core is None:
        raise ImportError(
            "RTDEPH_BACKEND=compiled requested but the rtdeph._kernels._core "
            "extension is not built; install with the Cython extension or "
            "use RTDEPH_BACKEND=pure"
        )
    _impl = _core
elif _requested in ("pure", "python", "numpy"):
    _impl = _reference
else:
    raise ValueError(f"unrecognized RTDEPH_BACKEND value: {_requested!r}")

#: Name of the backend selected at import: "compiled" or "pure".
BACKEND = "compiled" if _impl is _core else "pure"


def available_backends() -> dict:
    """Importable backend modules keyed by name (for tests and benchmarks)."""
    backends = {"pure": _reference}
    if _core is not None:
        backends["compiled"] = _core
    return backends


def _prepare(levels, switch_times, counts, t_grid):
    levels = np.ascontiguousarray(levels, dtype=np.uint8)
    switch_times = np.ascontiguousarray(switch_times, dtype=np.float64)
    counts = np.ascontiguousarray(counts, dtype=np.intp)
    t_grid = np.ascontiguousarray(t_grid, dtype=np.float64)
    if switch_times.ndim != 2 or switch_times.shape[0] != levels.shape[0]:
        raise ValueError("switch_times must be 2-D with one row per trajectory")
    if counts.shape != levels.shape:
        raise ValueError("counts must have one entry per trajectory")
    if t_grid.ndim != 1:
        raise ValueError("t_grid must be 1-D")
    if t_grid.size and (t_grid[0] < 0.0 or np.any(np.diff(t_grid) < 0.0)):
        raise ValueError("t_grid must be ascending and non-negative")
    return levels, switch_times, counts, t_grid


def dwell_times(levels, switch_times, counts, t_grid, impl=None):
    """Time at the high level in [0, t] per trajectory and grid time."""
    args = _prepare(levels, switch_times, counts, t_grid)
    return (impl or _impl).dwell_times(*args)


def levels_at_times(levels, switch_times, counts, t_grid, impl=None):
    """Level bit at each grid time per trajectory."""
    args = _prepare(levels, switch_times, counts, t_grid)
    return (impl or _impl).levels_at_times(*args)
