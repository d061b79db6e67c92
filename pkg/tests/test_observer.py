import dataclasses

import numpy as np
import pytest

from aphisim import scenario_io, sim_engine
from aphisim.dynamics import gravity_vector, mass_matrix
from aphisim.observer import ObserverGains, ObserverState, disturbance_estimate, observer_rates


def test_equilibrium_cancellation(nominal, obs_gains):
    # zeta = q_dot = 0, chi = M^-1 G, tau = G: the estimate vanishes.
    g = gravity_vector(nominal)
    chi = np.linalg.solve(mass_matrix(np.zeros(3), nominal), g)
    obs = ObserverState(zeta=np.zeros(6), chi=chi)
    d_hat = disturbance_estimate(obs, np.zeros(6), np.zeros(3), nominal, obs_gains)
    np.testing.assert_allclose(d_hat, np.zeros(6), atol=1e-12)


def test_gravity_estimate_with_empty_filters(nominal, obs_gains):
    obs = ObserverState(zeta=np.zeros(6), chi=np.zeros(6))
    d_hat = disturbance_estimate(obs, np.zeros(6), np.zeros(3), nominal, obs_gains)
    np.testing.assert_allclose(d_hat, gravity_vector(nominal), atol=1e-12)


def test_rates_zero_at_filter_equilibrium(rng, nominal, obs_gains):
    q_dot = rng.uniform(-1, 1, 6)
    phi = rng.uniform(-0.4, 0.4, 3)
    tau = rng.uniform(-5, 5, 6)
    M = mass_matrix(phi, nominal)
    obs = ObserverState(zeta=q_dot.copy(), chi=np.linalg.solve(M, tau))
    zeta_dot, chi_dot = observer_rates(obs, q_dot, tau, phi, nominal, obs_gains)
    np.testing.assert_allclose(zeta_dot, np.zeros(6), atol=1e-12)
    np.testing.assert_allclose(chi_dot, np.zeros(6), atol=1e-12)


def test_rate_direct_substitution(nominal):
    # unit mismatch on axis 1 with mu_1 = 0.95, gamma_zeta_11 = 1.0
    gains = ObserverGains()
    obs = ObserverState(zeta=np.eye(6)[0], chi=np.zeros(6))
    zeta_dot, _ = observer_rates(
        obs, np.zeros(6), np.zeros(6), np.zeros(3), nominal, gains
    )
    assert zeta_dot[0] == pytest.approx(-1.0 / 0.95)
    np.testing.assert_allclose(zeta_dot[1:], np.zeros(5), atol=1e-15)


def test_zeta_step_response_matches_analytic(nominal, obs_gains):
    # First-order filter: zeta tracks a frozen q_dot with per-axis time
    # constant mu_i / gamma_zeta_ii.
    from aphisim.sim_engine import rk4_step

    q_dot = np.array([1.0, -2.0, 0.5, 0.3, -0.8, 1.4])
    rate = obs_gains.zeta_rate

    def deriv(t, zeta):
        return -rate * (zeta - q_dot)

    zeta = np.zeros(6)
    dt = 1e-3
    n = 3000
    for i in range(n):
        zeta = rk4_step(deriv, i * dt, zeta, dt)
    analytic = q_dot * (1.0 - np.exp(-rate * n * dt))
    np.testing.assert_allclose(zeta, analytic, atol=1e-6)


def test_settling_matches_time_constant(nominal, obs_gains):
    # At t = mu/gamma the step response of each axis reaches 1 - e^-1
    # within 1%.
    from aphisim.sim_engine import rk4_step

    rate = obs_gains.zeta_rate
    q_dot = np.ones(6)
    dt = 1e-3
    t_axis = 1.0 / rate
    n = int(round(t_axis[0] / dt))
    zeta = np.zeros(6)
    for i in range(n):
        zeta = rk4_step(lambda t, z: -rate * (z - q_dot), i * dt, zeta, dt)
    assert zeta[0] == pytest.approx(1 - np.exp(-1), rel=0.01)


def _hover_disturbance_scenario(force, duration):
    sc = scenario_io.scenario_from_dict(
        {
            "scenario": "custom",
            "duration": duration,
            "controller": "filter",
            "initial": {"q": [0, 0, 1.0, 0, 0, 0]},
            "wind": {
                "mean_force": list(force),
                "gust_amplitude": [0, 0, 0],
                "noise_std": 0.0,
            },
        }
    )
    # Matched model so the injected wrench is the whole lumped disturbance.
    return dataclasses.replace(sc, plant=sc.nominal)


def test_disturbance_estimate_converges_to_injected_force():
    # Constant 2 N on x from t=0; d_hat_1 within 1% of 2 N after
    # 5 * mu_1 / gamma_zeta_11 = 4.75 s.
    sc = _hover_disturbance_scenario([2.0, 0.0, 0.0], duration=6.0)
    log = sim_engine.run(sc)
    gains = sc.obs_gains
    t_conv = 5.0 * gains.mu[0] / gains.gamma_zeta[0]
    after = log.t >= t_conv
    assert np.all(np.abs(log.d_hat[after, 0] - 2.0) < 0.02)


def test_disturbance_error_monotone_after_transient():
    sc = _hover_disturbance_scenario([1.5, 0.0, 0.0], duration=6.0)
    log = sim_engine.run(sc)
    err = np.abs(log.d_hat[:, 0] - 1.5)
    start = int(0.5 / sc.dt)
    assert np.all(np.diff(err[start:]) <= 1e-9)
    t5 = int(5.0 / sc.dt)
    assert err[t5] < 0.05 * 1.5


def test_observer_gains_invariants():
    with pytest.raises(ValueError):
        ObserverGains(mu=np.full(6, 1.0))
    with pytest.raises(ValueError):
        ObserverGains(mu=np.full(6, 0.0))
    with pytest.raises(ValueError):
        ObserverGains(gamma_zeta=np.zeros(6))
