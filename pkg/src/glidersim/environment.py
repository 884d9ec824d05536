"""Episodic environment: randomized reset, 100 Hz stepping, LOS reward.

Episodes start from a randomized engagement geometry (range, bearing
cone, altitude tied to range), with the glider trimmed for a steady
glide and heading north toward the target at the NED origin.  Each step
de-normalizes the two-component action into elevon deflections,
advances the 6-DOF dynamics by one RK4 step at 100 Hz, and scores the
seeker tracking error plus an actuator-effort penalty.
"""

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import _kernels
from .aerodynamics import GliderModel
from .atmosphere import RHO_SEA_LEVEL, WindConfig, DrydenState
from .dynamics import DT_DEFAULT, GRAVITY, trim_longitudinal, trim_state
from .seeker import ImagePoint, SeekerModel
from .dynamics import RigidBodyState

P_RATE_MAX = 2.0 * math.pi
Q_RATE_MAX = 2.0 * math.pi


class InfeasibleScenarioError(RuntimeError):
    """Reset could not draw a geometry with the target in view."""


class StepAfterTerminationError(RuntimeError):
    """step() called on an episode that has already ended."""


class Observation(NamedTuple):
    """Six normalized components, each clamped to [-1, 1]."""

    phi_n: float
    theta_n: float
    p_n: float
    q_n: float
    u_cam: float
    v_cam: float

    def as_array(self) -> np.ndarray:
        return np.array(self, dtype=float)


class Action(NamedTuple):
    """Normalized symmetric/asymmetric elevon commands in [-1, 1]."""

    delta_el_n: float
    delta_ail_n: float


@dataclass(frozen=True)
class RewardWeights:
    """Tracking-error and actuator-effort weights (all >= 0, w1 > 0)."""

    w1: float = 1.0
    w2: float = 0.1
    w3: float = 0.1

    def __post_init__(self):
        if self.w1 <= 0.0:
            raise ValueError("w1 must be > 0")
        if self.w2 < 0.0 or self.w3 < 0.0:
            raise ValueError("w2/w3 must be >= 0")


@dataclass(frozen=True)
class InitConditions:
    """Randomized engagement geometry (uniform draws within the ranges)."""

    range_mean: float = 150.0
    range_spread: float = 50.0
    cone_half_angle: float = math.radians(45.0)
    altitude_ratio: float = 0.5     # altitude mean = ratio * drawn range
    altitude_spread: float = 20.0


@dataclass
class ScenarioConfig:
    """Everything needed to run reproducible episodes."""

    glider: GliderModel
    seeker: SeekerModel
    wind: WindConfig = field(default_factory=WindConfig)
    weights: RewardWeights = field(default_factory=RewardWeights)
    init: InitConditions = field(default_factory=InitConditions)
    rho: float = RHO_SEA_LEVEL
    gravity: float = GRAVITY
    dt: float = DT_DEFAULT
    max_duration: float = 60.0
    terminal_penalty: float = 10.0
    lock_loss_grace: float = 0.5   # seconds out of frame before target_lost
    pixel_noise_std: float = 0.0
    target_ned: np.ndarray = field(default_factory=lambda: np.zeros(3))
    default_seed: int = 0
    controllers: dict = field(default_factory=dict)

    def __post_init__(self):
        self.target_ned = np.asarray(self.target_ned, dtype=float)
        if self.dt <= 0.0:
            raise ValueError("dt must be > 0")
        if self.max_duration <= 0.0:
            raise ValueError("max_duration must be > 0")
        if self.init.range_mean - self.init.range_spread <= 0.0:
            raise ValueError("initial range can reach zero")


@dataclass
class StepResult:
    observation: Observation
    reward: float
    terminated: bool
    cause: str | None
    truncated: bool
    info: dict


CAUSE_NAMES = {
    _kernels.CAUSE_IMPACT: "impact",
    _kernels.CAUSE_TARGET_LOST: "target_lost",
    _kernels.CAUSE_GIMBAL_FAULT: "gimbal_fault",
}


def observe(state: RigidBodyState, image: ImagePoint) -> Observation:
    """Normalize attitude, rates and the image point into [-1, 1]."""
    c = _kernels.clamp_unit
    return Observation(
        c(state.attitude.phi / math.pi),
        c(state.attitude.theta / (0.5 * math.pi)),
        c(state.rates_body[0] / P_RATE_MAX),
        c(state.rates_body[1] / Q_RATE_MAX),
        c(image.u),
        c(image.v),
    )


def reward(image: ImagePoint, action_n: Action,
           weights: RewardWeights) -> float:
    """Negative tracking distance plus actuator cost; always <= 0."""
    r_camera = weights.w1 * math.hypot(image.u, image.v)
    r_actuator = (weights.w2 * action_n.delta_el_n ** 2
                  + weights.w3 * action_n.delta_ail_n ** 2)
    return -(r_camera + r_actuator)


def discounted_return(rewards, gamma: float) -> float:
    """Sum of gamma^i * reward_i (diagnostic; training is external)."""
    if not 0.0 < gamma < 1.0:
        raise ValueError("gamma must be in (0, 1)")
    total = 0.0
    factor = 1.0
    for r in rewards:
        total += factor * r
        factor *= gamma
    return total


class GliderEnv:
    """One independent episodic environment instance.

    reset(seed) -> (observation array, info dict)
    step(action) -> StepResult

    Identical (seed, config, action sequence) produce bit-identical
    trajectories, observations and rewards.
    """

    MAX_RESET_ATTEMPTS = 100

    def __init__(self, config: ScenarioConfig):
        self.config = config
        sp, swb, sgeo, fus, inertia, inv_inertia = config.glider.packed()
        self._sp, self._swb, self._sgeo, self._fus = sp, swb, sgeo, fus
        self._inertia, self._inv_inertia = inertia, inv_inertia
        self._ccb = config.seeker.camera_dcm()
        self._cam_par = config.seeker.packed()
        self._envp = np.array([
            config.rho, config.gravity, config.dt,
            config.weights.w1, config.weights.w2, config.weights.w3,
            config.glider.actuator_limit, config.terminal_penalty,
            P_RATE_MAX, Q_RATE_MAX,
            max(1.0, round(config.lock_loss_grace / config.dt)),
        ])
        self._mean_wind = config.wind.mean_wind_ned.astype(float)
        self._turb_enabled = 1 if config.wind.enabled else 0
        self._turb_scale = config.wind.scale_lengths.astype(float)
        self._turb_sigma = config.wind.turbulence_intensity.astype(float)
        self.max_steps = int(round(config.max_duration / config.dt))

        # trim depends only on the airframe and air density: solve once
        self.trim_airspeed, self.trim_pitch, self.trim_gamma = \
            trim_longitudinal(config.glider, config.rho, config.gravity)

        self._x = np.empty(12)
        self._x_next = np.empty(12)
        self._obs = np.empty(6)
        self._misc = np.empty(12)
        self._proj = np.empty(4)
        self._noise = np.zeros(5)
        self._dryden: DrydenState | None = None
        self._rng: np.random.Generator | None = None
        self._steps = 0
        self._lost_streak = 0
        self._done = False
        self._ready = False

    # -- episode lifecycle -------------------------------------------------

    def reset(self, seed: int | None = None):
        """Start a fresh episode; returns (observation array, info)."""
        if seed is None:
            seed = self.config.default_seed
        rng = np.random.default_rng(seed)
        init = self.config.init

        attempt = 0
        while True:
            attempt += 1
            if attempt > self.MAX_RESET_ATTEMPTS:
                raise InfeasibleScenarioError(
                    f"target not visible after {self.MAX_RESET_ATTEMPTS} "
                    "initial-geometry draws")
            r = rng.uniform(init.range_mean - init.range_spread,
                            init.range_mean + init.range_spread)
            cone = rng.uniform(-init.cone_half_angle, init.cone_half_angle)
            altitude = rng.uniform(init.altitude_ratio * r - init.altitude_spread,
                                   init.altitude_ratio * r + init.altitude_spread)
            if altitude <= 0.0:
                continue
            self._x[0] = self.config.target_ned[0] - r * math.cos(cone)
            self._x[1] = self.config.target_ned[1] - r * math.sin(cone)
            self._x[2] = -altitude
            self._x[3] = 0.0
            self._x[4] = self.trim_pitch
            self._x[5] = 0.0
            alpha = self.trim_pitch - self.trim_gamma
            self._x[6] = self.trim_airspeed * math.cos(alpha)
            self._x[7] = 0.0
            self._x[8] = self.trim_airspeed * math.sin(alpha)
            self._x[9:12] = 0.0
            self._project(self._x)
            if self._proj[2] != 0.0:
                break

        self._rng = rng
        self._dryden = DrydenState.initial(self.config.wind,
                                           self.trim_airspeed, rng)
        self._steps = 0
        self._done = False
        self._ready = True
        self._lost_streak = 0
        self._misc[:] = 0.0

        self._obs[0] = _kernels.clamp_unit(self._x[3] / math.pi)
        self._obs[1] = _kernels.clamp_unit(self._x[4] / (0.5 * math.pi))
        self._obs[2] = _kernels.clamp_unit(self._x[9] / P_RATE_MAX)
        self._obs[3] = _kernels.clamp_unit(self._x[10] / Q_RATE_MAX)
        self._obs[4] = _kernels.clamp_unit(self._proj[0])
        self._obs[5] = _kernels.clamp_unit(self._proj[1])
        info = self._info_dict(cause=None)
        info.update(range=r, cone_angle=cone, altitude=altitude,
                    reset_attempts=attempt,
                    trim_airspeed=self.trim_airspeed,
                    trim_pitch=self.trim_pitch)
        return self._obs.copy(), info

    def step(self, action) -> StepResult:
        """Advance one 0.01 s physics step under the normalized action."""
        if not self._ready:
            raise StepAfterTerminationError("reset() must be called first")
        if self._done:
            raise StepAfterTerminationError("episode already ended")

        a_el = float(action[0])
        a_ail = float(action[1])
        if self._turb_enabled:
            self._noise = self._rng.standard_normal(5)

        _kernels.env_step(
            self._x, self._dryden.filters, self._noise, a_el, a_ail,
            self._mean_wind, self._turb_enabled, self._turb_scale,
            self._turb_sigma, self._sp, self._swb, self._sgeo, self._fus,
            self.config.glider.mass, self._inertia, self._inv_inertia,
            self.config.target_ned, self._ccb, self._cam_par, self._envp,
            self._lost_streak, self._x_next, self._obs, self._misc)

        self._x, self._x_next = self._x_next, self._x
        self._steps += 1
        self._lost_streak = int(self._misc[2])

        cause_code = int(self._misc[1])
        terminated = cause_code != _kernels.CAUSE_NONE
        truncated = (not terminated) and self._steps >= self.max_steps
        self._done = terminated or truncated
        cause = CAUSE_NAMES.get(cause_code)

        info = self._info_dict(cause)
        if cause_code == _kernels.CAUSE_IMPACT:
            info["impact_xy"] = (self._misc[3], self._misc[4])
        return StepResult(Observation(*self._obs), float(self._misc[0]),
                          terminated, cause, truncated, info)

    # -- helpers -----------------------------------------------------------

    @property
    def time(self) -> float:
        return self._steps * self.config.dt

    @property
    def state(self) -> RigidBodyState:
        return RigidBodyState.from_vector(self._x)

    def _project(self, x) -> None:
        _kernels.project_target(
            x, self.config.target_ned, self._ccb, self._cam_par[0],
            self._cam_par[1], self._cam_par[2], self._cam_par[3],
            self._cam_par[4], self._proj)

    def _info_dict(self, cause) -> dict:
        dx = self._x[0] - self.config.target_ned[0]
        dy = self._x[1] - self.config.target_ned[1]
        return {
            "t": self._steps * self.config.dt,
            "state": self._x.tolist(),
            "delta_el": float(self._misc[6]),
            "delta_ail": float(self._misc[7]),
            "miss_so_far": math.hypot(dx, dy),
            "cause": cause,
        }
