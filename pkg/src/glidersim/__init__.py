"""6-DOF gliding-projectile simulation engine.

Rigid-body dynamics with a procedural per-surface aerodynamic model,
Dryden turbulence, a strap-down pinhole seeker, an episodic RL-style
environment, a cascaded-PID baseline controller and Monte-Carlo
dispersion evaluation.
"""

__version__ = "0.1.0"

from .aerodynamics import (DegenerateAirflowError, FuselageDrag, GliderModel,
                           LiftingSurface, LocalAirflow, Wrench,
                           fuselage_drag_coefficient, lift_slope,
                           local_airflow, surface_coefficients,
                           surface_wrench, total_wrench)
from .atmosphere import DrydenState, WindConfig, dryden_step, wind_at
from .baseline import (ClassicController, PidConfig, PidState,
                       ScriptedZeroController, derotate, pid_step)
from .config import ConfigError, load_scenario
from .dynamics import (ActuatorState, MassProperties, NoTrimFoundError,
                       RigidBodyState, rk4_step, state_derivative,
                       trim_longitudinal, trim_state)
from .environment import (Action, GliderEnv, InfeasibleScenarioError,
                          InitConditions, Observation, RewardWeights,
                          ScenarioConfig, StepAfterTerminationError,
                          StepResult, discounted_return, observe, reward)
from .evaluation import (AllEpisodesFailedError, CampaignStats,
                         EpisodeOutcome, campaign_stats, make_controller,
                         run_campaign, run_episode)
from .frames import (EulerAngles, GimbalLockError, SurfaceMounting,
                     dcm_to_euler, euler_rate_matrix, euler_to_dcm,
                     mounting_from_euler, skew, wind_frame_dcm, wrap_angle)
from .seeker import (ImagePoint, NotVisibleError, SeekerModel,
                     normalized_to_pixels, pixels_to_normalized, project)
