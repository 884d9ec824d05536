"""Rigid-body 6-DOF state, RK4 stepping and longitudinal trim."""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .aerodynamics import GliderModel, Wrench, total_wrench
from .frames import EulerAngles, GimbalLockError

GRAVITY = 9.81
DT_DEFAULT = 0.01  # 100 Hz simulation loop


class NoTrimFoundError(RuntimeError):
    """No statically stable gliding equilibrium within the search box."""


@dataclass
class RigidBodyState:
    """Position (NED, z down), attitude, body velocity and body rates."""

    position_ned: np.ndarray
    attitude: EulerAngles
    velocity_body: np.ndarray
    rates_body: np.ndarray

    def __post_init__(self):
        self.position_ned = np.asarray(self.position_ned, dtype=float)
        self.velocity_body = np.asarray(self.velocity_body, dtype=float)
        self.rates_body = np.asarray(self.rates_body, dtype=float)

    def as_vector(self) -> np.ndarray:
        """Flat 12-vector [p(3), Theta(3), v_b(3), omega_b(3)]."""
        x = np.empty(12)
        x[0:3] = self.position_ned
        x[3] = self.attitude.phi
        x[4] = self.attitude.theta
        x[5] = self.attitude.psi
        x[6:9] = self.velocity_body
        x[9:12] = self.rates_body
        return x

    @classmethod
    def from_vector(cls, x) -> "RigidBodyState":
        x = np.asarray(x, dtype=float)
        return cls(x[0:3].copy(), EulerAngles(x[3], x[4], x[5]),
                   x[6:9].copy(), x[9:12].copy())


@dataclass(frozen=True)
class MassProperties:
    mass: float
    inertia: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "inertia",
                           np.asarray(self.inertia, dtype=float))
        if self.mass <= 0.0:
            raise ValueError("mass must be > 0")
        if self.inertia.shape != (3, 3):
            raise ValueError("inertia must be 3x3")
        if np.any(np.linalg.eigvalsh(0.5 * (self.inertia + self.inertia.T))
                  <= 0.0):
            raise ValueError("inertia must be positive definite")


@dataclass(frozen=True)
class ActuatorState:
    """Symmetric/asymmetric elevon deflections in radians."""

    delta_el: float = 0.0
    delta_ail: float = 0.0


@dataclass
class StateDerivative:
    position_rate: np.ndarray
    attitude_rate: np.ndarray
    velocity_rate: np.ndarray
    rates_rate: np.ndarray

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.position_rate, self.attitude_rate,
                               self.velocity_rate, self.rates_rate])


def state_derivative(state: RigidBodyState, wrench: Wrench,
                     mp: MassProperties,
                     gravity: float = GRAVITY) -> StateDerivative:
    """Flat-earth 6-DOF derivative for the given applied wrench."""
    x = state.as_vector()
    out = np.empty(12)
    inv_inertia = np.linalg.inv(mp.inertia)
    status = _kernels.state_derivative(
        x, np.asarray(wrench.force_body, dtype=float),
        np.asarray(wrench.moment_body, dtype=float),
        mp.mass, mp.inertia, inv_inertia, gravity, out)
    if status == _kernels.STATUS_GIMBAL_LOCK:
        raise GimbalLockError(f"pitch {state.attitude.theta:.6f} rad at the "
                              "Euler-kinematics singularity")
    return StateDerivative(out[0:3], out[3:6], out[6:9], out[9:12])


def rk4_step(state: RigidBodyState, dt: float, wrench_provider,
             mp: MassProperties, gravity: float = GRAVITY) -> RigidBodyState:
    """One classical RK4 step; the wrench is re-evaluated per sub-stage.

    `wrench_provider` maps a RigidBodyState to the applied Wrench.  Roll
    and yaw are re-wrapped into (-pi, pi] after the step.
    """
    if dt <= 0.0:
        raise ValueError("dt must be > 0")

    def f(x: np.ndarray) -> np.ndarray:
        if abs(x[4]) >= 0.5 * math.pi - _kernels.GIMBAL_MARGIN:
            raise GimbalLockError(
                f"pitch {x[4]:.6f} rad reached the singularity mid-step")
        s = RigidBodyState.from_vector(_wrapped(x))
        return state_derivative(s, wrench_provider(s), mp, gravity).as_vector()

    x0 = state.as_vector()
    k1 = f(x0)
    k2 = f(x0 + 0.5 * dt * k1)
    k3 = f(x0 + 0.5 * dt * k2)
    k4 = f(x0 + dt * k3)
    x1 = x0 + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return RigidBodyState.from_vector(_wrapped(x1))


def _wrapped(x: np.ndarray) -> np.ndarray:
    x = x.copy()
    x[3] = _kernels.wrap_angle(x[3])
    x[5] = _kernels.wrap_angle(x[5])
    return x


def trim_longitudinal(glider: GliderModel, rho: float = 1.225,
                      gravity: float = GRAVITY):
    """Steady wings-level glide with zero elevon deflection.

    Returns (airspeed, pitch, gamma).  The pitch-moment zero is found by
    bisection on the angle of attack (the zero is independent of speed
    because every aerodynamic term scales with dynamic pressure), then
    airspeed and flight-path angle follow in closed form from the force
    balance.  Raises NoTrimFoundError when the configuration has no
    statically stable equilibrium in the search box.
    """
    stall = min(s.stall_alpha for s in glider.surfaces)
    a_lo, a_hi = -stall + 1e-6, stall - 1e-6
    v_probe = 10.0
    controls = ActuatorState(0.0, 0.0)
    wind = np.zeros(3)

    def pitch_moment(alpha: float) -> float:
        state = _level_state(v_probe, alpha)
        return total_wrench(state, controls, glider, wind, rho).moment_body[1]

    m_lo = pitch_moment(a_lo)
    m_hi = pitch_moment(a_hi)
    if m_lo * m_hi > 0.0:
        raise NoTrimFoundError(
            "pitch moment has no zero crossing inside the stall envelope")
    if m_lo < 0.0 < m_hi:
        raise NoTrimFoundError(
            "pitch-moment slope is destabilizing (statically unstable)")

    for _ in range(200):
        a_mid = 0.5 * (a_lo + a_hi)
        m_mid = pitch_moment(a_mid)
        if m_mid > 0.0:
            a_lo = a_mid
        else:
            a_hi = a_mid
        if a_hi - a_lo < 1e-14:
            break
    alpha = 0.5 * (a_lo + a_hi)

    # force balance: F_aero = V^2 f(alpha); weight closes the triangle
    f_unit = total_wrench(_level_state(1.0, alpha), controls, glider, wind,
                          rho).force_body
    fx, fz = f_unit[0], f_unit[2]
    if fz >= 0.0:
        raise NoTrimFoundError("aerodynamic force has no lift component")
    fmag = math.hypot(fx, fz)
    airspeed = math.sqrt(glider.mass * gravity / fmag)
    pitch = math.atan2(fx, -fz)
    if not 3.0 < airspeed < 60.0:
        raise NoTrimFoundError(f"trim airspeed {airspeed:.2f} m/s outside "
                               "the 3-60 m/s search box")
    gamma = pitch - alpha

    # residual check against the full dynamics (N and N*m, absolute)
    state = trim_state(airspeed, pitch, gamma)
    mp = MassProperties(glider.mass, glider.inertia)
    wrench = total_wrench(state, controls, glider, wind, rho)
    deriv = state_derivative(state, wrench, mp, gravity)
    if (np.abs(deriv.velocity_rate).max() * glider.mass > 1e-6
            or abs(wrench.moment_body[1]) > 1e-6):
        raise NoTrimFoundError("trim residuals failed to converge")
    return airspeed, pitch, gamma


def trim_state(airspeed: float, pitch: float, gamma: float,
               position_ned=(0.0, 0.0, 0.0), psi: float = 0.0) -> RigidBodyState:
    """Rigid-body state flying the given trim point, heading psi."""
    alpha = pitch - gamma
    v_body = np.array([airspeed * math.cos(alpha), 0.0,
                       airspeed * math.sin(alpha)])
    return RigidBodyState(np.asarray(position_ned, dtype=float),
                          EulerAngles(0.0, pitch, psi), v_body, np.zeros(3))


def _level_state(airspeed: float, alpha: float) -> RigidBodyState:
    v_body = np.array([airspeed * math.cos(alpha), 0.0,
                       airspeed * math.sin(alpha)])
    return RigidBodyState(np.zeros(3), EulerAngles(0.0, 0.0, 0.0), v_body,
                          np.zeros(3))
