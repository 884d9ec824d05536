"""Episode runner and Monte-Carlo dispersion statistics.

A campaign runs n independently seeded episodes (seed = base_seed + i)
and reduces the impact points to mean miss distance, CEP radii and
per-axis 2-sigma dispersion.  Episodes that do not end in ground impact
are excluded from the distance statistics but kept in the cause
histogram; results are bit-identical for any worker count because the
reduction is over seed-ordered outcomes.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .baseline import ClassicController, ScriptedZeroController
from .environment import GliderEnv, ScenarioConfig


class AllEpisodesFailedError(RuntimeError):
    """A campaign produced no ground impacts at all."""


@dataclass
class EpisodeOutcome:
    """Result of one episode; miss is inf when it did not impact."""

    seed: int
    impact_ned: tuple[float, float] | None
    miss: float
    cause: str
    duration: float
    total_reward: float
    steps: int
    trajectory: list | None = None


@dataclass
class CampaignStats:
    n: int
    mmd: float
    cep50: float
    cep90: float
    sigma2_x: float
    sigma2_y: float
    mean_impact: tuple[float, float]
    causes: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "mmd": self.mmd,
            "cep50": self.cep50,
            "cep90": self.cep90,
            "sigma2_x": self.sigma2_x,
            "sigma2_y": self.sigma2_y,
            "mean_impact_x": self.mean_impact[0],
            "mean_impact_y": self.mean_impact[1],
            "causes": dict(self.causes),
        }


def make_controller(name: str, scenario: ScenarioConfig):
    """Instantiate a named controller bound to the scenario's gains."""
    if name == "scripted-zero":
        return ScriptedZeroController()
    if name == "pid":
        gains = scenario.controllers.get("pid", {})
        return ClassicController(
            longitudinal=gains.get("longitudinal"),
            heading=gains.get("heading"),
            roll=gains.get("roll"),
            dt=scenario.dt,
            q_damping=gains.get("q_damping", 0.0),
            v_bias=gains.get("v_bias", 0.0),
        )
    raise ValueError(f"unknown controller {name!r}")


def run_episode(controller, scenario: ScenarioConfig, seed: int,
                record: bool = False, env: GliderEnv | None = None
                ) -> EpisodeOutcome:
    """Run one seeded episode to termination or the time limit.

    `controller` needs reset() and act(obs) -> 2-sequence.  Pass an
    existing env to amortize construction across episodes.
    """
    if env is None:
        env = GliderEnv(scenario)
    controller.reset()
    obs, info = env.reset(seed)
    trajectory = None
    total_reward = 0.0
    if record:
        trajectory = [_trajectory_row(0.0, info["state"], (0.0, 0.0), obs,
                                      0.0, info)]

    result = None
    while True:
        action = controller.act(obs)
        result = env.step(action)
        obs = result.observation.as_array()
        total_reward += result.reward
        if record:
            trajectory.append(_trajectory_row(
                result.info["t"], result.info["state"], action, obs,
                result.reward, result.info))
        if result.terminated or result.truncated:
            break

    if result.cause == "impact":
        impact = result.info["impact_xy"]
        miss = math.hypot(impact[0] - scenario.target_ned[0],
                          impact[1] - scenario.target_ned[1])
        cause = "impact"
    else:
        impact = None
        miss = math.inf
        cause = result.cause if result.terminated else "timeout"
    return EpisodeOutcome(seed=seed, impact_ned=impact, miss=miss,
                          cause=cause, duration=result.info["t"],
                          total_reward=total_reward, steps=env._steps,
                          trajectory=trajectory)


def _trajectory_row(t, state, action, obs, reward, info):
    return ([t] + list(state) + [float(action[0]), float(action[1])]
            + list(obs) + [reward, info.get("miss_so_far", math.nan)])


TRAJECTORY_COLUMNS = (
    ["t", "pn", "pe", "pd", "phi", "theta", "psi", "u", "v", "w",
     "p", "q", "r", "act_el", "act_ail",
     "obs_phi", "obs_theta", "obs_p", "obs_q", "obs_u", "obs_v",
     "reward", "miss_so_far"])


def _campaign_worker(args) -> EpisodeOutcome:
    scenario, controller_name, seed = args
    controller = make_controller(controller_name, scenario)
    return run_episode(controller, scenario, seed)


def run_campaign(controller_name: str, scenario: ScenarioConfig, n: int,
                 base_seed: int = 0, workers: int = 1):
    """n seeded episodes reduced to CampaignStats + per-episode outcomes."""
    if n < 1:
        raise ValueError("campaign size must be >= 1")
    seeds = [base_seed + i for i in range(n)]
    jobs = [(scenario, controller_name, s) for s in seeds]
    if workers <= 1:
        env = GliderEnv(scenario)
        outcomes = []
        for s in seeds:
            controller = make_controller(controller_name, scenario)
            outcomes.append(run_episode(controller, scenario, s, env=env))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_campaign_worker, jobs,
                                     chunksize=max(1, n // (4 * workers))))
    outcomes.sort(key=lambda o: o.seed)
    return campaign_stats(outcomes, scenario), outcomes


def campaign_stats(outcomes, scenario: ScenarioConfig) -> CampaignStats:
    """Reduce outcomes to MMD / CEP / 2-sigma dispersion statistics."""
    causes: dict[str, int] = {}
    for o in outcomes:
        causes[o.cause] = causes.get(o.cause, 0) + 1
    impacts = [o for o in outcomes if o.cause == "impact"]
    if not impacts:
        raise AllEpisodesFailedError("no episode ended in ground impact")

    misses = np.array([o.miss for o in impacts])
    xs = np.array([o.impact_ned[0] for o in impacts])
    ys = np.array([o.impact_ned[1] for o in impacts])

    mmd = float(misses.mean())
    cep50 = _cep_radius(misses, 0.5)
    cep90 = _cep_radius(misses, 0.9)
    if len(impacts) > 1:
        sigma2_x = 2.0 * float(xs.std(ddof=1))
        sigma2_y = 2.0 * float(ys.std(ddof=1))
    else:
        sigma2_x = sigma2_y = 0.0
    return CampaignStats(n=len(outcomes), mmd=mmd, cep50=cep50, cep90=cep90,
                         sigma2_x=sigma2_x, sigma2_y=sigma2_y,
                         mean_impact=(float(xs.mean()), float(ys.mean())),
                         causes=causes)


def _cep_radius(misses: np.ndarray, fraction: float) -> float:
    """Smallest radius about the target containing `fraction` of impacts."""
    ordered = np.sort(misses)
    k = math.ceil(fraction * len(ordered))
    return float(ordered[max(k - 1, 0)])
