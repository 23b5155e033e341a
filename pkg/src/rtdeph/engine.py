"""Monte Carlo trajectory engine for the dephasing qubit pair.

Each telegraph realization evolves the initial Bell state in closed form:
the Hamiltonian is diagonal per realization, so the state at time t is
(|00> + exp(-i*theta_tot)|11>)/sqrt(2) with theta_tot the sum of the
deterministic frequency phase and the noise phase integral.  No time
stepping, hence no integration error.  Ensembles average the projectors of
these states; per-trajectory coherences exp(-i * integral of xi) average to
the Monte Carlo estimate of the analytic coherence factor.

Reproducibility contract: trajectory i draws from a stream derived from
(master_seed, i) only, and reductions run over fixed-size blocks combined
in index order, so results are bit-identical for any thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from rtdeph import _kernels, noise, states
from rtdeph.analytic import SystemParams

#: Upper bound on n_trajectories * len(t_grid); larger requests would
#: allocate multi-gigabyte intermediates and are rejected up front.
MAX_ENSEMBLE_VALUES = 1 << 25

# Fixed reduction block size; must not depend on the thread count.
_BLOCK = 2048

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class RunConfig:
    """Ensemble run description: system, sample times, size, and seed."""

    system: SystemParams
    t_grid: np.ndarray
    n_trajectories: int
    master_seed: int

    def __post_init__(self):
        grid = np.asarray(self.t_grid, dtype=float)
        object.__setattr__(self, "t_grid", grid)
        if grid.ndim != 1 or grid.size == 0:
            raise ValueError("t_grid must be a non-empty 1-D array")
        if not np.all(np.isfinite(grid)):
            raise ValueError("t_grid must be finite")
        if grid[0] < 0.0 or np.any(np.diff(grid) <= 0.0):
            raise ValueError("t_grid must be strictly increasing and start at >= 0")
        if grid[-1] <= 0.0:
            raise ValueError("t_grid must extend beyond t = 0")
        if self.n_trajectories < 1:
            raise ValueError(f"n_trajectories must be >= 1, got {self.n_trajectories}")
        if self.master_seed < 0:
            raise ValueError(f"master_seed must be >= 0, got {self.master_seed}")
        total = self.n_trajectories * grid.size
        if total > MAX_ENSEMBLE_VALUES:
            raise ValueError(
                f"ensemble of {self.n_trajectories} trajectories x {grid.size} times "
                f"needs {total} values, above the limit of {MAX_ENSEMBLE_VALUES}; "
                "split the time grid or reduce n_trajectories"
            )


@dataclass(frozen=True)
class EnsembleResult:
    """Per-grid-time Monte Carlo estimates and the run metadata.

    ``e_h`` is ``e_av - e_f`` by construction.  ``q_mean`` is the mean of
    the per-trajectory coherence factors exp(-i * integral of xi); its
    standard errors are ddof=1 sample deviations over sqrt(n).
    """

    t_grid: np.ndarray
    rho: np.ndarray
    q_mean: np.ndarray
    q_se_re: np.ndarray
    q_se_im: np.ndarray
    e_av: np.ndarray
    e_av_se: np.ndarray
    e_f: np.ndarray
    e_f_se: np.ndarray
    e_h: np.ndarray
    min_trajectory_entropy: float
    n_trajectories: int
    master_seed: int
    system: SystemParams = field(repr=False)


def evolve_trajectory(system: SystemParams, traj: noise.RTTrajectory, t: float) -> np.ndarray:
    """Bell state evolved along one noise realization, in the gauge where the
    |00> amplitude stays real positive.

    Returns (|00> + exp(-i*theta_tot)|11>)/sqrt(2) with theta_tot =
    (omega_a + omega_b)*t plus the accumulated noise phase.  Exact: the
    phase integral comes from the switch times.
    """
    theta = (system.omega_a + system.omega_b) * float(t) + noise.accumulated_phase(
        traj, t, v=system.rt.v
    )
    state = np.zeros(4, dtype=complex)
    state[0] = 1.0
    state[3] = np.exp(-1j * theta)
    return state / np.sqrt(2.0)


def _dwell_batched(batch: noise.TrajectoryBatch, t_grid: np.ndarray, n_threads: int) -> np.ndarray:
    if n_threads <= 1 or batch.n <= _BLOCK:
        return _kernels.dwell_times(batch.levels, batch.switch_times, batch.counts, t_grid)
    starts = range(0, batch.n, _BLOCK)

    def one_block(s):
        e = min(s + _BLOCK, batch.n)
        return _kernels.dwell_times(
            batch.levels[s:e], batch.switch_times[s:e], batch.counts[s:e], t_grid
        )

    with ThreadPoolExecutor(max_workers=n_threads) as pool:
        parts = list(pool.map(one_block, starts))
    return np.concatenate(parts, axis=0)


def _ef_derivative(c: float) -> float:
    """d E_f / dC, with the continuous limits 0 at C=0 and 1/ln2 at C=1."""
    if c <= 0.0:
        return 0.0
    if c >= 1.0:
        return 1.0 / math.log(2.0)
    s = math.sqrt(1.0 - c * c)
    return (c / (2.0 * s)) * math.log2((1.0 + s) / (1.0 - s))


def _assemble_rho(q_mean: np.ndarray, omega_sum: float, t_grid: np.ndarray) -> np.ndarray:
    """Average of the trajectory projectors, which populates only the Bell
    corners: diag(1/2, 0, 0, 1/2) plus conj(q_mean) * exp(i*omega_sum*t) / 2
    in the <00|rho|11> corner."""
    n_t = t_grid.size
    rho = np.zeros((n_t, 4, 4), dtype=complex)
    corner = 0.5 * np.conj(q_mean) * np.exp(1j * omega_sum * t_grid)
    rho[:, 0, 0] = 0.5
    rho[:, 3, 3] = 0.5
    rho[:, 0, 3] = corner
    rho[:, 3, 0] = np.conj(corner)
    return rho


def _coherence_stats(z: np.ndarray):
    n = z.shape[0]
    q_mean = z.mean(axis=0)
    if n > 1:
        se_re = z.real.std(axis=0, ddof=1) / math.sqrt(n)
        se_im = z.imag.std(axis=0, ddof=1) / math.sqrt(n)
    else:
        se_re = np.zeros(z.shape[1])
        se_im = np.zeros(z.shape[1])
    return q_mean, se_re, se_im


def run_ensemble(config: RunConfig, n_threads: int = 1) -> EnsembleResult:
    """Average an ensemble of noise realizations over the time grid.

    For each grid time this produces the averaged density matrix, the mean
    coherence with standard errors, the entanglement of formation of the
    average (via the general concurrence), the average entanglement over
    trajectories, and their difference (the hidden entanglement).
    Deterministic given ``config.master_seed``, independent of ``n_threads``.
    """
    params = config.system.rt
    horizon = float(config.t_grid[-1])
    batch = noise.sample_batch(params, horizon, config.n_trajectories, config.master_seed)

    dwell = _dwell_batched(batch, config.t_grid, n_threads)
    z = np.exp(-1j * (params.v * dwell))
    q_mean, q_se_re, q_se_im = _coherence_stats(z)

    # Entropy of entanglement of (|00> + z exp(-i*omega*t)|11>)/sqrt(2):
    # the reduced state of qubit A is diag(1, |z|^2)/(1 + |z|^2).
    e_traj = states.binary_entropy(1.0 / (1.0 + np.abs(z) ** 2))
    e_av = e_traj.mean(axis=0)
    if config.n_trajectories > 1:
        e_av_se = e_traj.std(axis=0, ddof=1) / math.sqrt(config.n_trajectories)
    else:
        e_av_se = np.zeros_like(e_av)

    omega_sum = config.system.omega_a + config.system.omega_b
    rho = _assemble_rho(q_mean, omega_sum, config.t_grid)
    e_f = np.array([
        states.entanglement_of_formation(states.concurrence(rho[gi]))
        for gi in range(config.t_grid.size)
    ])

    q_abs = np.abs(q_mean)
    se_c = np.where(
        q_abs > 0.0,
        np.sqrt((q_mean.real * q_se_re) ** 2 + (q_mean.imag * q_se_im) ** 2)
        / np.where(q_abs > 0.0, q_abs, 1.0),
        np.maximum(q_se_re, q_se_im),
    )
    e_f_se = np.array([_ef_derivative(min(c, 1.0)) for c in q_abs]) * se_c

    return EnsembleResult(
        t_grid=config.t_grid,
        rho=rho,
        q_mean=q_mean,
        q_se_re=q_se_re,
        q_se_im=q_se_im,
        e_av=e_av,
        e_av_se=e_av_se,
        e_f=e_f,
        e_f_se=e_f_se,
        e_h=e_av - e_f,
        min_trajectory_entropy=float(e_traj.min()),
        n_trajectories=config.n_trajectories,
        master_seed=config.master_seed,
        system=config.system,
    )


def _revival_index(v: float, t_n: float) -> int:
    """Validate that t_n is a revival time 2*pi*n/v and return n."""
    ratio = v * float(t_n) / _TWO_PI
    n = int(round(ratio))
    if n < 1 or abs(v * float(t_n) - _TWO_PI * n) > 1e-9 * max(1.0, abs(v * float(t_n))):
        raise ValueError(f"t = {t_n!r} is not a revival time 2*pi*n/v for any n >= 1")
    return n


def recover_trajectory(system: SystemParams, traj: noise.RTTrajectory, t_n: float) -> np.ndarray:
    """Undo the random phase of one realization at a revival time.

    The leftover noise phase is theta(t_n) = integral of xi - 2*pi*n; the
    local unitary exp(-i*theta/2*sigma_z) on the noisy qubit cancels it, so
    the corrected state is maximally entangled again.  Knowing theta
    requires the realization, which is exactly the classical side
    information that turns hidden entanglement back into usable
    entanglement.
    """
    n = _revival_index(system.rt.v, t_n)
    vartheta = noise.accumulated_phase(traj, t_n, v=system.rt.v) - _TWO_PI * n
    state = evolve_trajectory(system, traj, t_n)
    return states.apply_local_phase(state, vartheta, qubit="A")


@dataclass(frozen=True)
class RecoveryReport:
    """Ensemble concurrence at a revival time, before and after recovery."""

    t_n: float
    revival_index: int
    concurrence_before: float
    concurrence_after: float


def recovery_report(config: RunConfig, n: int, n_threads: int = 1) -> RecoveryReport:
    """Concurrence of the averaged ensemble at t_n = 2*pi*n/v, with and
    without the per-trajectory phase correction.

    Uses the same trajectory streams as ``run_ensemble`` for the same seed.
    """
    if n < 1:
        raise ValueError(f"revival index must be >= 1, got {n}")
    params = config.system.rt
    t_n = _TWO_PI * n / params.v
    batch = noise.sample_batch(params, t_n, config.n_trajectories, config.master_seed)
    grid = np.array([t_n])
    dwell = _dwell_batched(batch, grid, n_threads)
    theta = params.v * dwell[:, 0]

    omega_sum = config.system.omega_a + config.system.omega_b
    z_before = np.exp(-1j * theta)
    vartheta = theta - _TWO_PI * n
    z_after = np.exp(-1j * (theta - vartheta))

    before = states.concurrence(_assemble_rho(np.array([z_before.mean()]), omega_sum, grid)[0])
    after = states.concurrence(_assemble_rho(np.array([z_after.mean()]), omega_sum, grid)[0])
    return RecoveryReport(
        t_n=t_n, revival_index=n, concurrence_before=before, concurrence_after=after
    )


def recovered_ensemble_concurrence(config: RunConfig, n: int, n_threads: int = 1) -> float:
    """Ensemble concurrence at t_n after per-trajectory phase recovery."""
    return recovery_report(config, n, n_threads=n_threads).concurrence_after


def static_ensemble(system: SystemParams, t: float) -> list[tuple[float, np.ndarray]]:
    """The two-member trajectory ensemble of the frozen-noise limit.

    With gamma = 0 the noise never switches, so the only realizations are
    the constant levels 0 and v, each with probability 1/2.
    """
    if system.rt.gamma != 0.0:
        raise ValueError(f"static ensemble requires gamma = 0, got gamma = {system.rt.gamma!r}")
    t = float(t)
    horizon = max(t, 0.0)
    members = []
    for level in (0, 1):
        traj = noise.RTTrajectory(initial_level=level, switch_times=np.empty(0), horizon=horizon)
        members.append((0.5, evolve_trajectory(system, traj, t)))
    return members
