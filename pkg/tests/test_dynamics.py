import math

import numpy as np
import pytest

from glidersim.aerodynamics import Wrench
from glidersim.dynamics import (ActuatorState, MassProperties,
                                NoTrimFoundError, RigidBodyState, rk4_step,
                                state_derivative, trim_longitudinal,
                                trim_state)
from glidersim.frames import EulerAngles, GimbalLockError, wrap_angle

MP = MassProperties(mass=2.0, inertia=np.diag([0.003, 0.006, 0.008]))
ZERO_WRENCH = Wrench(np.zeros(3), np.zeros(3))


def make_state(pos=(0, 0, 0), att=(0, 0, 0), vel=(0, 0, 0), rates=(0, 0, 0)):
    return RigidBodyState(np.array(pos, dtype=float), EulerAngles(*att),
                          np.array(vel, dtype=float),
                          np.array(rates, dtype=float))


def zero_wrench(state):
    return ZERO_WRENCH


class TestStateDerivative:
    def test_free_fall_from_rest(self):
        d = state_derivative(make_state(), ZERO_WRENCH, MP)
        np.testing.assert_allclose(d.velocity_rate, [0.0, 0.0, 9.81],
                                   atol=0)
        np.testing.assert_allclose(d.position_rate, np.zeros(3), atol=0)
        np.testing.assert_allclose(d.attitude_rate, np.zeros(3), atol=0)
        np.testing.assert_allclose(d.rates_rate, np.zeros(3), atol=0)

    def test_gravity_rotated_by_pitch(self):
        d = state_derivative(make_state(att=(0.0, -0.5, 0.0)), ZERO_WRENCH,
                             MP)
        assert d.velocity_rate[0] == pytest.approx(9.81 * math.sin(0.5),
                                                   abs=1e-12)
        assert d.velocity_rate[1] == pytest.approx(0.0, abs=1e-15)
        assert d.velocity_rate[2] == pytest.approx(9.81 * math.cos(0.5),
                                                   abs=1e-12)

    def test_coriolis_term(self):
        d = state_derivative(make_state(vel=(10, 0, 0), rates=(0, 0, 1.0)),
                             ZERO_WRENCH, MP, gravity=0.0)
        np.testing.assert_allclose(d.velocity_rate, [0.0, -10.0, 0.0],
                                   atol=1e-12)

    def test_force_divided_by_mass(self):
        w = Wrench(np.array([4.0, 0.0, 0.0]), np.zeros(3))
        d = state_derivative(make_state(), w, MP, gravity=0.0)
        np.testing.assert_allclose(d.velocity_rate, [2.0, 0.0, 0.0],
                                   atol=0)

    def test_euler_coupling_torque_free(self):
        # omega x (I omega) reshuffles rates between the asymmetric axes
        d = state_derivative(make_state(rates=(2.0, 1.0, 0.5)), ZERO_WRENCH,
                             MP, gravity=0.0)
        w = np.array([2.0, 1.0, 0.5])
        oracle = np.linalg.inv(MP.inertia) @ (
            -np.cross(w, MP.inertia @ w))
        np.testing.assert_allclose(d.rates_rate, oracle, atol=1e-12)

    def test_gimbal_lock_raises(self):
        state = make_state(att=(0.0, math.pi / 2 - 1e-5, 0.0))
        with pytest.raises(GimbalLockError):
            state_derivative(state, ZERO_WRENCH, MP)


class TestRk4Step:
    def test_ballistic_drop(self):
        state = make_state()
        for _ in range(100):
            state = rk4_step(state, 0.01, zero_wrench, MP)
        assert state.velocity_body[2] == pytest.approx(9.81, abs=1e-9)
        assert state.position_ned[2] == pytest.approx(4.905, abs=1e-9)

    def test_constant_velocity_translation(self):
        state = make_state(vel=(1.0, 0.0, 0.0))
        for _ in range(100):
            state = rk4_step(state, 0.01, zero_wrench, MP, gravity=0.0)
        assert state.position_ned[0] == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_allclose(state.position_ned[1:], [0.0, 0.0],
                                   atol=1e-12)

    def test_pure_roll_rate_advances_roll(self):
        state = make_state(rates=(math.pi, 0.0, 0.0))
        for _ in range(100):
            state = rk4_step(state, 0.01, zero_wrench, MP, gravity=0.0)
        assert abs(wrap_angle(state.attitude.phi - math.pi)) < 1e-6

    def test_wrapping_after_step(self):
        state = make_state(att=(3.1, 0.0, -3.1), rates=(10.0, 0.0, -10.0))
        for _ in range(20):
            state = rk4_step(state, 0.01, zero_wrench, MP, gravity=0.0)
            assert -math.pi < state.attitude.phi <= math.pi
            assert -math.pi < state.attitude.psi <= math.pi

    def test_order_four_convergence(self):
        # nonlinear coupled spin + translation; reference from an
        # independent high-accuracy integrator
        from scipy.integrate import solve_ivp

        x0 = make_state(vel=(10.0, 0.0, 0.0), rates=(4.0, 2.0, 1.0))
        inv_inertia = np.linalg.inv(MP.inertia)

        def f(t, x):
            phi, theta, psi = x[3:6]
            u, v, w = x[6:9]
            p, q, r = x[9:12]
            cph, sph = math.cos(phi), math.sin(phi)
            cth, sth = math.cos(theta), math.sin(theta)
            cps, sps = math.cos(psi), math.sin(psi)
            b = np.array([
                [cps * cth, cps * sth * sph - sps * cph,
                 cps * sth * cph + sps * sph],
                [sps * cth, sps * sth * sph + cps * cph,
                 sps * sth * cph - cps * sph],
                [-sth, cth * sph, cth * cph]])
            h = np.array([
                [1.0, sph * sth / cth, cph * sth / cth],
                [0.0, cph, -sph],
                [0.0, sph / cth, cph / cth]])
            om = np.array([p, q, r])
            vel = np.array([u, v, w])
            return np.concatenate([
                b @ vel, h @ om, -np.cross(om, vel),
                inv_inertia @ (-np.cross(om, MP.inertia @ om))])

        ref = solve_ivp(f, (0.0, 1.0), x0.as_vector(), method="DOP853",
                        rtol=1e-12, atol=1e-13).y[:, -1]

        def error(x):
            diff = x - ref
            for i in (3, 5):  # roll/yaw are wrapped by the stepper
                diff[i] = wrap_angle(diff[i])
            return np.abs(diff).max()

        errors = []
        for dt in (0.02, 0.01, 0.005):
            state = x0
            for _ in range(round(1.0 / dt)):
                state = rk4_step(state, dt, zero_wrench, MP, gravity=0.0)
            errors.append(error(state.as_vector()))
        r1 = errors[0] / errors[1]
        r2 = errors[1] / errors[2]
        assert 12.0 < r1 < 20.0
        assert 12.0 < r2 < 20.0

    def test_energy_conservation_torque_free(self):
        state = make_state(vel=(5.0, 0.0, 0.0), rates=(2.0, 1.0, 0.5))

        def energy(s):
            return (0.5 * MP.mass * s.velocity_body @ s.velocity_body
                    + 0.5 * s.rates_body @ MP.inertia @ s.rates_body)

        e0 = energy(state)
        for _ in range(1000):
            state = rk4_step(state, 0.01, zero_wrench, MP, gravity=0.0)
        assert abs(energy(state) - e0) / e0 < 1e-8

    def test_rejects_nonpositive_dt(self):
        with pytest.raises(ValueError):
            rk4_step(make_state(), 0.0, zero_wrench, MP)


class TestTrim:
    def test_residuals_are_small(self, default_glider):
        from glidersim.aerodynamics import total_wrench

        airspeed, pitch, gamma = trim_longitudinal(default_glider, 1.225)
        state = trim_state(airspeed, pitch, gamma)
        mp = MassProperties(default_glider.mass, default_glider.inertia)
        wrench = total_wrench(state, ActuatorState(), default_glider,
                              np.zeros(3), 1.225)
        deriv = state_derivative(state, wrench, mp)
        assert np.abs(deriv.velocity_rate).max() < 1e-4
        assert np.abs(deriv.rates_rate).max() < 1e-4

    def test_descending_glide(self, default_glider):
        airspeed, pitch, gamma = trim_longitudinal(default_glider, 1.225)
        assert 3.0 < airspeed < 60.0
        assert gamma < 0.0
        assert -math.radians(30) < pitch < 0.0

    def test_cg_shift_changes_trim(self, default_glider):
        import dataclasses

        from glidersim.aerodynamics import LiftingSurface
        from glidersim.frames import SurfaceMounting

        shifted_surfaces = []
        for s in default_glider.surfaces:
            mounting = SurfaceMounting(
                s.mounting.position_body + np.array([0.05, 0.0, 0.0]),
                s.mounting.orientation_body, s.mounting.hinge)
            shifted_surfaces.append(dataclasses.replace(s,
                                                        mounting=mounting))
        shifted = dataclasses.replace(default_glider,
                                      surfaces=shifted_surfaces,
                                      _packed=None)
        a0 = trim_longitudinal(default_glider, 1.225)
        a1 = trim_longitudinal(shifted, 1.225)
        alpha0 = a0[1] - a0[2]
        alpha1 = a1[1] - a1[2]
        assert abs(alpha1 - alpha0) > 1e-4

    def test_zero_tail_has_no_trim(self, default_glider):
        import dataclasses

        # remove the whole empennage (elevons and vertical stabilizer)
        surfaces = []
        for s in default_glider.surfaces:
            if s.mounting.position_body[0] < -0.1:
                s = dataclasses.replace(s, area=1e-9)
            surfaces.append(s)
        degenerate = dataclasses.replace(default_glider, surfaces=surfaces,
                                         _packed=None)
        with pytest.raises(NoTrimFoundError):
            trim_longitudinal(degenerate, 1.225)
