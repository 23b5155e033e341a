import math

import numpy as np
import pytest

from rtdeph import analytic, engine, noise, states

TWO_PI = 2.0 * math.pi


def system_for(g, v=1.0, **kw):
    gamma = 0.0 if math.isinf(g) else v / g
    return analytic.SystemParams(rt=noise.RTParams(v=v, gamma=gamma), **kw)


def static_traj(level, horizon):
    return noise.RTTrajectory(initial_level=level, switch_times=np.empty(0), horizon=horizon)


def test_run_config_validation():
    system = system_for(5.0)
    with pytest.raises(ValueError):
        engine.RunConfig(system=system, t_grid=np.array([1.0, 0.5]), n_trajectories=10, master_seed=0)
    with pytest.raises(ValueError):
        engine.RunConfig(system=system, t_grid=np.array([]), n_trajectories=10, master_seed=0)
    with pytest.raises(ValueError):
        engine.RunConfig(system=system, t_grid=np.array([0.0]), n_trajectories=10, master_seed=0)
    with pytest.raises(ValueError):
        engine.RunConfig(system=system, t_grid=np.array([0.0, 1.0]), n_trajectories=0, master_seed=0)
    with pytest.raises(ValueError):
        engine.RunConfig(system=system, t_grid=np.array([0.0, 1.0]), n_trajectories=10, master_seed=-1)
    with pytest.raises(ValueError, match="limit"):
        engine.RunConfig(
            system=system, t_grid=np.linspace(0.0, 1.0, 1000), n_trajectories=10**6, master_seed=0
        )


def test_evolve_trajectory_examples():
    system = system_for(math.inf)
    traj0 = static_traj(0, 10.0)
    np.testing.assert_allclose(
        engine.evolve_trajectory(system, traj0, 0.0), states.bell_phi_plus(), atol=1e-15
    )
    for t in (0.5, 3.0, 10.0):
        np.testing.assert_allclose(
            engine.evolve_trajectory(system, traj0, t), states.bell_phi_plus(), atol=1e-15
        )
    # constant high level flips the corner sign at v*t = pi
    trajv = static_traj(1, 10.0)
    out = engine.evolve_trajectory(system, trajv, math.pi)
    np.testing.assert_allclose(out, np.array([1.0, 0.0, 0.0, -1.0]) / math.sqrt(2.0), atol=1e-15)


def test_evolve_trajectory_with_frequencies():
    system = system_for(math.inf, omega_a=0.4, omega_b=0.2)
    out = engine.evolve_trajectory(system, static_traj(0, 5.0), 2.0)
    assert out[3] == pytest.approx(np.exp(-1.2j) / math.sqrt(2.0), abs=1e-15)


def test_evolve_trajectory_rejects_beyond_horizon():
    with pytest.raises(ValueError):
        engine.evolve_trajectory(system_for(5.0), static_traj(0, 1.0), 2.0)


def test_trajectory_states_stay_maximally_entangled():
    params = noise.RTParams(v=1.0, gamma=0.5)
    system = analytic.SystemParams(rt=params)
    for i in range(20):
        traj = noise.sample_trajectory(params, 8.0, noise.trajectory_rng(3, i))
        for t in (1.0, 4.5, 8.0):
            state = engine.evolve_trajectory(system, traj, t)
            assert states.entropy_of_entanglement(state) == pytest.approx(1.0, abs=1e-9)


def test_static_ensemble_members_and_endpoints():
    system = system_for(math.inf)
    at_zero = engine.static_ensemble(system, 0.0)
    for _, member in at_zero:
        np.testing.assert_allclose(member, states.bell_phi_plus(), atol=1e-15)

    # full dephasing point: mixture carries no entanglement, all of it hidden
    at_pi = engine.static_ensemble(system, math.pi)
    ef = states.entanglement_of_formation(states.concurrence(states.mixture_density(at_pi)))
    assert ef == pytest.approx(0.0, abs=1e-9)
    assert states.hidden_entanglement(at_pi) == pytest.approx(1.0, abs=1e-9)

    # revival point: mixture is again maximally entangled, nothing hidden
    at_2pi = engine.static_ensemble(system, TWO_PI)
    ef = states.entanglement_of_formation(states.concurrence(states.mixture_density(at_2pi)))
    assert ef == pytest.approx(1.0, abs=1e-9)
    assert states.hidden_entanglement(at_2pi) == pytest.approx(0.0, abs=1e-9)


def test_static_ensemble_rejects_finite_gamma():
    with pytest.raises(ValueError):
        engine.static_ensemble(system_for(5.0), 1.0)


def run(g, n=2000, seed=0, points=25, threads=1, vt_end=6.0 * math.pi):
    system = system_for(g)
    config = engine.RunConfig(
        system=system,
        t_grid=np.linspace(0.0, vt_end, points),
        n_trajectories=n,
        master_seed=seed,
    )
    return config, engine.run_ensemble(config, n_threads=threads)


def test_static_ensemble_average_matches_cosine():
    config, result = run(math.inf, n=4000)
    expected = np.abs(np.cos(config.t_grid / 2.0))
    dev = np.abs(np.abs(result.q_mean) - expected)
    bound = 3.0 * np.hypot(result.q_se_re, result.q_se_im) + 1e-12
    assert np.all(dev <= bound)


def test_average_entanglement_is_identically_one():
    for g in (0.5, 5.0, math.inf):
        _, result = run(g, n=500, points=9)
        np.testing.assert_allclose(result.e_av, 1.0, atol=1e-9)
        assert result.min_trajectory_entropy >= 1.0 - 1e-9
        np.testing.assert_allclose(result.e_av_se, 0.0, atol=1e-9)


def test_mc_matches_coherence_factor_within_errors():
    for g in (0.5, 1.0, 5.0):
        config, result = run(g, n=2000, points=20)
        q_ref = np.atleast_1d(analytic.coherence_factor(config.system.rt, config.t_grid))
        ok_re = np.abs(result.q_mean.real - q_ref.real) <= 4.0 * result.q_se_re
        ok_im = np.abs(result.q_mean.imag - q_ref.imag) <= 4.0 * result.q_se_im
        assert (ok_re & ok_im).mean() >= 0.95
        assert np.abs(result.q_mean - q_ref).max() < 0.05


def test_ensemble_density_matrices_are_valid():
    _, result = run(5.0, n=300, points=8)
    pattern = np.zeros((4, 4), dtype=bool)
    pattern[0, 0] = pattern[3, 3] = pattern[0, 3] = pattern[3, 0] = True
    for rho in result.rho:
        states.check_density_matrix(rho)
        assert np.all(rho[~pattern] == 0.0)
        np.testing.assert_array_equal(np.diag(rho).real, [0.5, 0.0, 0.0, 0.5])


def test_hidden_entanglement_identity():
    _, result = run(5.0, n=400, points=10)
    np.testing.assert_array_equal(result.e_h, result.e_av - result.e_f)
    # E_av is 1, so the hidden part complements E_f
    np.testing.assert_allclose(result.e_h, 1.0 - result.e_f, atol=1e-9)


def test_results_identical_across_thread_counts():
    _, single = run(5.0, n=3000, seed=11, points=15, threads=1)
    _, multi = run(5.0, n=3000, seed=11, points=15, threads=4)
    np.testing.assert_array_equal(single.q_mean, multi.q_mean)
    np.testing.assert_array_equal(single.q_se_re, multi.q_se_re)
    np.testing.assert_array_equal(single.e_f, multi.e_f)
    np.testing.assert_array_equal(single.e_av, multi.e_av)
    np.testing.assert_array_equal(single.rho, multi.rho)


def test_coherence_statistics_definition():
    # rebuild the estimator from raw trajectories: mean and ddof=1 errors
    config, result = run(5.0, n=150, points=6)
    params = config.system.rt
    batch = noise.sample_batch(params, float(config.t_grid[-1]), 150, config.master_seed)
    z = np.empty((150, 6), dtype=complex)
    for i in range(150):
        traj = batch.trajectory(i)
        for gi, t in enumerate(config.t_grid):
            z[i, gi] = np.exp(-1j * noise.accumulated_phase(traj, t, v=params.v))
    np.testing.assert_allclose(result.q_mean, z.mean(axis=0), atol=1e-12)
    np.testing.assert_allclose(result.q_se_re, z.real.std(axis=0, ddof=1) / math.sqrt(150), atol=1e-12)


def test_recover_trajectory_static_cases():
    system = system_for(math.inf)
    t_1 = TWO_PI  # first revival of v=1

    # level 0: leftover phase is a multiple of 2*pi, state unchanged up to
    # a global phase
    out = engine.recover_trajectory(system, static_traj(0, t_1), t_1)
    overlap = abs(np.vdot(out, engine.evolve_trajectory(system, static_traj(0, t_1), t_1)))
    assert overlap == pytest.approx(1.0, abs=1e-12)

    # level v at t_1: phase integral is exactly 2*pi, correction is zero
    out = engine.recover_trajectory(system, static_traj(1, t_1), t_1)
    np.testing.assert_allclose(out, engine.evolve_trajectory(system, static_traj(1, t_1), t_1), atol=1e-12)


def test_recover_trajectory_one_switch_oracle():
    # v=2 so t_1 = pi; one switch up at t_1/2 accumulates phase
    # 2*(pi/2) = pi, hence a correction phase of pi - 2*pi = -pi
    system = system_for(1.0, v=2.0)  # any finite g; trajectory is explicit
    traj = noise.RTTrajectory(0, np.array([math.pi / 2.0]), horizon=math.pi)
    t_1 = math.pi

    evolved = engine.evolve_trajectory(system, traj, t_1)
    with_phase = np.array([1.0, 0.0, 0.0, np.exp(-1j * math.pi)]) / math.sqrt(2.0)
    np.testing.assert_allclose(evolved, with_phase, atol=1e-12)

    corrected = engine.recover_trajectory(system, traj, t_1)
    # hand computation: exp(-i*(-pi)/2*sigma_zA) on the evolved 4-vector
    vartheta = -math.pi
    factors = np.exp(-0.5j * vartheta * np.array([1.0, 1.0, -1.0, -1.0]))
    np.testing.assert_allclose(corrected, factors * with_phase, atol=1e-12)
    assert states.concurrence(states.density_of(corrected)) == pytest.approx(1.0, abs=1e-12)


def test_recover_trajectory_rejects_non_revival_times():
    system = system_for(5.0)
    traj = static_traj(0, 10.0)
    with pytest.raises(ValueError):
        engine.recover_trajectory(system, traj, math.pi)  # odd half revival
    with pytest.raises(ValueError):
        engine.recover_trajectory(system, traj, 0.0)


def test_recovery_is_idempotent():
    # after correction the leftover phase is zero, so a second correction
    # with the recomputed residual is the identity
    system = system_for(1.0, v=2.0)
    traj = noise.RTTrajectory(0, np.array([math.pi / 2.0]), horizon=math.pi)
    t_1 = math.pi
    corrected = engine.recover_trajectory(system, traj, t_1)
    residual = (
        noise.accumulated_phase(traj, t_1, v=2.0)
        - (noise.accumulated_phase(traj, t_1, v=2.0) - TWO_PI)
        - TWO_PI
    )
    assert residual == 0.0
    np.testing.assert_allclose(
        states.apply_local_phase(corrected, residual, "A"), corrected, atol=1e-12
    )


def test_recovered_ensemble_concurrence():
    static_config = engine.RunConfig(
        system=system_for(math.inf), t_grid=np.array([TWO_PI]), n_trajectories=64, master_seed=5
    )
    assert engine.recovered_ensemble_concurrence(static_config, 1) == pytest.approx(1.0, abs=1e-9)

    config = engine.RunConfig(
        system=system_for(5.0), t_grid=np.array([TWO_PI]), n_trajectories=400, master_seed=5
    )
    report = engine.recovery_report(config, 1)
    assert report.concurrence_after == pytest.approx(1.0, abs=1e-9)
    assert report.concurrence_before == pytest.approx(math.exp(-0.1 * TWO_PI), abs=0.1)
    assert report.concurrence_before < 0.7


def test_recovery_report_consistent_with_run_ensemble():
    # same seed, same horizon: the uncorrected concurrence is the ensemble
    # concurrence at the revival time
    config = engine.RunConfig(
        system=system_for(5.0), t_grid=np.array([0.5 * TWO_PI, TWO_PI]), n_trajectories=300, master_seed=9
    )
    result = engine.run_ensemble(config)
    report = engine.recovery_report(config, 1)
    assert report.concurrence_before == pytest.approx(
        states.concurrence(result.rho[-1]), abs=1e-12
    )


def test_recovery_report_rejects_bad_index():
    config = engine.RunConfig(
        system=system_for(5.0), t_grid=np.array([TWO_PI]), n_trajectories=10, master_seed=0
    )
    with pytest.raises(ValueError):
        engine.recovery_report(config, 0)
