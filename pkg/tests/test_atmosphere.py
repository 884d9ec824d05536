import math

import numpy as np
import pytest

from glidersim.atmosphere import (DrydenState, WindConfig, dryden_step,
                                  wind_at)


def turbulent_config(**kw):
    defaults = dict(mean_wind_ned=np.zeros(3),
                    turbulence_intensity=np.array([1.06, 1.06, 0.7]),
                    scale_lengths=np.array([200.0, 200.0, 50.0]),
                    enabled=True)
    defaults.update(kw)
    return WindConfig(**defaults)


def run_gusts(cfg, n, seed, airspeed=13.0, dt=0.01):
    state = DrydenState.initial(cfg, airspeed, np.random.default_rng(seed))
    out = np.empty((n, 3))
    for i in range(n):
        gust, state = dryden_step(state, cfg, airspeed, dt)
        out[i] = gust
    return out


class TestDrydenStep:
    def test_zero_intensity_yields_zero_gust(self):
        cfg = turbulent_config(turbulence_intensity=np.zeros(3))
        gusts = run_gusts(cfg, 500, seed=0)
        np.testing.assert_allclose(gusts, np.zeros_like(gusts), atol=0)

    def test_disabled_turbulence_yields_zero(self):
        cfg = WindConfig(enabled=False)
        gusts = run_gusts(cfg, 100, seed=0)
        np.testing.assert_allclose(gusts, np.zeros_like(gusts), atol=0)

    def test_statistics_match_configured_intensity(self):
        cfg = turbulent_config()
        n = 1_000_000
        gusts = run_gusts(cfg, n, seed=42)
        sigma = cfg.turbulence_intensity
        for axis in range(3):
            mean = gusts[:, axis].mean()
            # effective sample count shrinks with the autocorrelation time
            assert abs(mean) < 5.0 * sigma[axis] / math.sqrt(n / 100)
            var = gusts[:, axis].var()
            assert var == pytest.approx(sigma[axis] ** 2, rel=0.10)

    def test_bit_exact_reproducibility(self):
        cfg = turbulent_config()
        a = run_gusts(cfg, 2000, seed=7)
        b = run_gusts(cfg, 2000, seed=7)
        assert np.array_equal(a, b)

    def test_different_seeds_differ(self):
        cfg = turbulent_config()
        a = run_gusts(cfg, 100, seed=1)
        b = run_gusts(cfg, 100, seed=2)
        assert not np.array_equal(a, b)

    def test_autocorrelation_time_constant(self):
        # the north channel is an exact first-order process with time
        # constant L_u / V
        cfg = turbulent_config()
        airspeed, dt = 13.0, 0.01
        gusts = run_gusts(cfg, 400_000, seed=3, airspeed=airspeed, dt=dt)
        u = gusts[:, 0] - gusts[:, 0].mean()
        lag = 200
        rho = (u[:-lag] @ u[lag:]) / (u @ u)
        tau_est = -lag * dt / math.log(rho)
        tau_expected = cfg.scale_lengths[0] / airspeed
        assert tau_est == pytest.approx(tau_expected, rel=0.20)

    def test_rejects_nonpositive_dt(self):
        cfg = turbulent_config()
        state = DrydenState.initial(cfg, 13.0, np.random.default_rng(0))
        with pytest.raises(ValueError):
            dryden_step(state, cfg, 13.0, 0.0)


class TestWindAt:
    def test_no_wind(self):
        cfg = WindConfig()
        np.testing.assert_allclose(wind_at(cfg, np.zeros(3)), np.zeros(3),
                                   atol=0)

    def test_east_wind(self):
        cfg = WindConfig(mean_wind_ned=np.array([0.0, 3.0, 0.0]))
        np.testing.assert_allclose(wind_at(cfg, np.zeros(3)),
                                   [0.0, 3.0, 0.0], atol=0)

    def test_superposition(self):
        cfg = WindConfig(mean_wind_ned=np.array([1.0, -2.0, 0.5]))
        gust = np.array([0.3, 0.1, -0.2])
        np.testing.assert_allclose(wind_at(cfg, gust) - wind_at(cfg, np.zeros(3)),
                                   gust, atol=0)


class TestWindConfigValidation:
    def test_negative_intensity_rejected(self):
        with pytest.raises(ValueError):
            WindConfig(turbulence_intensity=np.array([-1.0, 0.0, 0.0]))

    def test_nonpositive_scale_rejected_when_enabled(self):
        with pytest.raises(ValueError):
            turbulent_config(scale_lengths=np.array([0.0, 200.0, 50.0]))
