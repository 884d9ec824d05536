"""Classical controller: de-rotated seeker output into three PIDs.

The camera error is de-rotated around the roll axis to decouple the
channels, the vertical channel feeds a longitudinal PID producing the
symmetric elevon command, and the horizontal channel drives a cascaded
heading-to-roll PID pair producing the asymmetric command.
"""

import math
from dataclasses import dataclass

import numpy as np

from .environment import Action, Observation


@dataclass(frozen=True)
class PidConfig:
    kp: float = 0.0
    ki: float = 0.0
    kd: float = 0.0
    output_limit: float = 1.0
    integrator_limit: float = 0.0

    def __post_init__(self):
        if self.output_limit <= 0.0:
            raise ValueError("output_limit must be > 0")
        if self.integrator_limit < 0.0:
            raise ValueError("integrator_limit must be >= 0")


@dataclass
class PidState:
    integrator: float = 0.0
    previous_error: float = 0.0
    initialized: bool = False


def pid_step(cfg: PidConfig, state: PidState, error: float, dt: float):
    """One PID sample; returns (output, state).

    The derivative is a first difference (zero on the first sample) and
    the integrator is clamped for anti-windup.  The state is updated in
    place and returned for chaining.
    """
    if dt <= 0.0:
        raise ValueError("dt must be > 0")
    integrator = state.integrator + error * dt
    if integrator > cfg.integrator_limit:
        integrator = cfg.integrator_limit
    elif integrator < -cfg.integrator_limit:
        integrator = -cfg.integrator_limit
    if state.initialized:
        derivative = (error - state.previous_error) / dt
    else:
        derivative = 0.0
    state.integrator = integrator
    state.previous_error = error
    state.initialized = True
    out = cfg.kp * error + cfg.ki * integrator + cfg.kd * derivative
    if out > cfg.output_limit:
        out = cfg.output_limit
    elif out < -cfg.output_limit:
        out = -cfg.output_limit
    return out, state


def derotate(u_n: float, v_n: float, phi: float):
    """Rotate the camera error by the roll angle to stabilized axes."""
    c = math.cos(phi)
    s = math.sin(phi)
    return c * u_n - s * v_n, s * u_n + c * v_n


# gains found by the shipped grid search (tools/tune_gains.py) against
# the default airframe; overridable per scenario
DEFAULT_GAINS = {
    "longitudinal": PidConfig(kp=2.0, ki=0.6, kd=0.5, output_limit=1.0,
                              integrator_limit=0.4),
    "heading": PidConfig(kp=1.6, ki=0.05, kd=0.7,
                         output_limit=math.radians(45.0),
                         integrator_limit=0.3),
    "roll": PidConfig(kp=4.0, ki=0.2, kd=0.4, output_limit=1.0,
                      integrator_limit=0.3),
}


class ClassicController:
    """Roll de-rotation, longitudinal PID and heading->roll cascade.

    The heading PID turns the stabilized horizontal image error into a
    roll-angle command (limited by its output_limit); the roll PID
    tracks it on the (roll_cmd - phi)/pi error.  An optional pitch-rate
    damping term can be blended into the elevator channel.
    """

    def __init__(self, longitudinal: PidConfig | None = None,
                 heading: PidConfig | None = None,
                 roll: PidConfig | None = None,
                 dt: float = 0.01, q_damping: float = 0.0,
                 v_bias: float = 0.0):
        self.cfg_long = longitudinal or DEFAULT_GAINS["longitudinal"]
        self.cfg_head = heading or DEFAULT_GAINS["heading"]
        self.cfg_roll = roll or DEFAULT_GAINS["roll"]
        self.dt = dt
        self.q_damping = q_damping
        # vertical aim-point setpoint: holding the target slightly below
        # the image center compensates the gap between the boresight and
        # the velocity vector (the wing incidence minus terminal alpha)
        self.v_bias = v_bias
        self.reset()

    def reset(self):
        self._long = PidState()
        self._head = PidState()
        self._roll = PidState()

    def act(self, obs) -> Action:
        obs = Observation(*obs)
        phi = obs.phi_n * math.pi
        u_stab, v_stab = derotate(obs.u_cam, obs.v_cam, phi)

        delta_el, _ = pid_step(self.cfg_long, self._long,
                               v_stab - self.v_bias, self.dt)
        if self.q_damping != 0.0:
            delta_el -= self.q_damping * obs.q_n
        roll_cmd, _ = pid_step(self.cfg_head, self._head, u_stab, self.dt)
        delta_ail, _ = pid_step(self.cfg_roll, self._roll,
                                (roll_cmd - phi) / math.pi, self.dt)

        clamp = lambda x: min(1.0, max(-1.0, x))
        return Action(clamp(delta_el), clamp(delta_ail))


class ScriptedZeroController:
    """Holds both commands at zero; useful as a free-glide reference."""

    def reset(self):
        pass

    def act(self, obs) -> Action:
        return Action(0.0, 0.0)
