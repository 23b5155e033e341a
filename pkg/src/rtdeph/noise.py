"""Symmetric random telegraph noise: model, sampling, and statistics.

The process xi(t) switches between 0 and an amplitude ``v`` with rate
``gamma/2`` in each direction (total switching rate ``gamma``).  Sampling is
exact and grid free: the level at t=0 is drawn from the stationary (1/2,
1/2) distribution and successive waiting times are exponential with mean
``2/gamma``.  ``gamma = 0`` encodes a frozen process that never switches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from rtdeph import _kernels


@dataclass(frozen=True)
class RTParams:
    """Telegraph-noise parameters: amplitude ``v`` and switching rate ``gamma``."""

    v: float
    gamma: float

    def __post_init__(self):
        if not (math.isfinite(self.v) and self.v > 0.0):
            raise ValueError(f"noise amplitude v must be finite and positive, got {self.v!r}")
        if not (math.isfinite(self.gamma) and self.gamma >= 0.0):
            raise ValueError(f"switching rate gamma must be finite and >= 0, got {self.gamma!r}")

    @property
    def g(self) -> float:
        """Dimensionless coupling v/gamma; infinite in the static limit gamma=0."""
        return math.inf if self.gamma == 0.0 else self.v / self.gamma


@dataclass(frozen=True)
class RTTrajectory:
    """One realization of the telegraph path on [0, horizon].

    ``initial_level`` is the level bit at t=0 (1 means xi = v) and
    ``switch_times`` are the strictly increasing times in (0, horizon] at
    which the level flips.
    """

    initial_level: int
    switch_times: np.ndarray
    horizon: float

    def __post_init__(self):
        if self.initial_level not in (0, 1):
            raise ValueError(f"initial_level must be 0 or 1, got {self.initial_level!r}")
        if not (math.isfinite(self.horizon) and self.horizon >= 0.0):
            raise ValueError(f"horizon must be finite and >= 0, got {self.horizon!r}")
        times = np.asarray(self.switch_times, dtype=float)
        object.__setattr__(self, "switch_times", times)
        if times.ndim != 1:
            raise ValueError("switch_times must be 1-D")
        if times.size:
            if times[0] <= 0.0 or times[-1] > self.horizon:
                raise ValueError("switch times must lie in (0, horizon]")
            if np.any(np.diff(times) <= 0.0):
                raise ValueError("switch times must be strictly increasing")


def trajectory_rng(master_seed: int, index: int) -> np.random.Generator:
    """Independent random stream for one trajectory index.

    The mapping (master_seed, index) -> stream is fixed, so ensembles are
    reproducible no matter how trajectories are scheduled.
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(master_seed, spawn_key=(index,))))


def _draw_switch_times(rng: np.random.Generator, gamma: float, horizon: float) -> np.ndarray:
    if gamma == 0.0:
        return np.empty(0)
    scale = 2.0 / gamma
    expected = horizon / scale
    chunk = max(8, int(expected + 6.0 * math.sqrt(expected) + 8.0))
    waits = rng.exponential(scale, size=chunk)
    times = np.cumsum(waits)
    while times[-1] <= horizon:
        waits = rng.exponential(scale, size=chunk)
        times = np.concatenate([times, times[-1] + np.cumsum(waits)])
    return times[times <= horizon]


def sample_trajectory(params: RTParams, horizon: float, rng: np.random.Generator) -> RTTrajectory:
    """Draw one telegraph realization on [0, horizon].

    The initial level is equiprobable (stationary distribution of the
    symmetric process); waiting times are exponential with rate gamma/2.
    With gamma = 0 the trajectory never switches.
    """
    if not (math.isfinite(horizon) and horizon > 0.0):
        raise ValueError(f"horizon must be finite and positive, got {horizon!r}")
    level = int(rng.integers(0, 2))
    times = _draw_switch_times(rng, params.gamma, horizon)
    return RTTrajectory(initial_level=level, switch_times=times, horizon=horizon)


@dataclass(frozen=True)
class TrajectoryBatch:
    """Batch of trajectories in padded-array form for the kernels.

    ``switch_times`` has one row per trajectory, padded with +inf beyond
    ``counts[i]`` entries.
    """

    levels: np.ndarray
    switch_times: np.ndarray
    counts: np.ndarray
    horizon: float

    @property
    def n(self) -> int:
        return self.levels.shape[0]

    def trajectory(self, i: int) -> RTTrajectory:
        c = int(self.counts[i])
        return RTTrajectory(
            initial_level=int(self.levels[i]),
            switch_times=self.switch_times[i, :c].copy(),
            horizon=self.horizon,
        )


def sample_batch(params: RTParams, horizon: float, n: int, master_seed: int,
                 start_index: int = 0) -> TrajectoryBatch:
    """Sample ``n`` independent trajectories with per-index streams.

    Trajectory ``i`` is drawn from ``trajectory_rng(master_seed,
    start_index + i)`` and depends on nothing else, so batches are
    reproducible and two batches sharing (seed, index) share realizations.
    """
    if n < 1:
        raise ValueError(f"need at least one trajectory, got n={n}")
    trajectories = [
        sample_trajectory(params, horizon, trajectory_rng(master_seed, start_index + i))
        for i in range(n)
    ]
    counts = np.array([t.switch_times.size for t in trajectories], dtype=np.intp)
    k = int(counts.max())
    times = np.full((n, k), np.inf)
    for i, traj in enumerate(trajectories):
        times[i, : counts[i]] = traj.switch_times
    levels = np.array([t.initial_level for t in trajectories], dtype=np.uint8)
    return TrajectoryBatch(levels=levels, switch_times=times, counts=counts, horizon=horizon)


def _check_query_time(traj: RTTrajectory, t: float) -> float:
    t = float(t)
    if not math.isfinite(t) or t < 0.0 or t > traj.horizon:
        raise ValueError(f"query time {t!r} outside [0, {traj.horizon!r}]")
    return t


def level_at(traj: RTTrajectory, t: float, v: float = 1.0) -> float:
    """Noise value at time t: v times the level bit (parity of prior switches)."""
    t = _check_query_time(traj, t)
    flips = int(np.searchsorted(traj.switch_times, t, side="right"))
    return v * (traj.initial_level ^ (flips & 1))


def accumulated_phase(traj: RTTrajectory, t: float, v: float = 1.0) -> float:
    """Integral of the noise over [0, t]: v times the dwell time at the high level.

    Computed exactly from the switch times, with no time-grid error.
    """
    t = _check_query_time(traj, t)
    cuts = np.minimum(np.concatenate([[0.0], traj.switch_times, [np.inf]]), t)
    seg = np.diff(cuts)
    lvl = (traj.initial_level ^ (np.arange(seg.size) & 1)).astype(float)
    return v * float(lvl @ seg)


@dataclass(frozen=True)
class AutocorrelationResult:
    """Monte Carlo autocorrelation estimates with standard errors."""

    lags: np.ndarray
    estimates: np.ndarray
    stderrs: np.ndarray
    n_samples: int = field(default=0)


def estimate_autocorrelation(params: RTParams, lags, n_samples: int,
                             master_seed: int) -> AutocorrelationResult:
    """Estimate the normalized autocorrelation of the telegraph process.

    Uses the mean-centered process (xi - v/2), for which the normalized
    autocorrelation of the symmetric telegraph process is exp(-gamma*tau);
    the raw second-moment ratio of the {0, v} process would saturate at 1/2
    instead of decaying to zero.  Each sample is an independent stationary
    realization; the per-sample product of centered signs at lag 0 and lag
    tau averages to the estimate, with ddof=1 standard errors.
    """
    if n_samples < 1:
        raise ValueError(f"need at least one sample, got n_samples={n_samples}")
    lag_arr = np.asarray(lags, dtype=float)
    if lag_arr.ndim != 1:
        raise ValueError("lags must be 1-D")
    if lag_arr.size == 0:
        return AutocorrelationResult(lag_arr, np.empty(0), np.empty(0), n_samples)
    if not np.all(np.isfinite(lag_arr)) or np.any(lag_arr < 0.0):
        raise ValueError("lags must be finite and non-negative")

    horizon = float(lag_arr.max())
    if horizon == 0.0:
        ones = np.ones_like(lag_arr)
        return AutocorrelationResult(lag_arr, ones, np.zeros_like(lag_arr), n_samples)

    batch = sample_batch(params, horizon, n_samples, master_seed)
    order = np.argsort(lag_arr, kind="stable")
    bits = _kernels.levels_at_times(batch.levels, batch.switch_times, batch.counts,
                                    lag_arr[order])
    bits = bits[:, np.argsort(order, kind="stable")]
    s0 = 2.0 * batch.levels.astype(float) - 1.0
    products = s0[:, None] * (2.0 * bits.astype(float) - 1.0)
    estimates = products.mean(axis=0)
    if n_samples > 1:
        stderrs = products.std(axis=0, ddof=1) / math.sqrt(n_samples)
    else:
        stderrs = np.zeros_like(estimates)
    return AutocorrelationResult(lag_arr, estimates, stderrs, n_samples)
