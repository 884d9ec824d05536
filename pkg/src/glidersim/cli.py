"""Command-line entry point.

Subcommands: trim report, single episodes (with CSV recording and
deterministic replay), Monte-Carlo campaigns, scenario validation, and a
line-delimited JSON server exposing reset/step over stdin/stdout for
out-of-process trainers and bindings.

Exit codes: 0 ok, 1 runtime failure, 2 usage error.
"""

import json
import math
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from .config import ConfigError, load_scenario
from .dynamics import NoTrimFoundError
from .environment import GliderEnv, StepAfterTerminationError
from .evaluation import (AllEpisodesFailedError, TRAJECTORY_COLUMNS,
                         make_controller, run_campaign, run_episode)


def _fmt(x: float) -> str:
    """Shortest round-trip decimal form, bit-exact on re-parse."""
    return repr(float(x))


def _load(scenario_path):
    try:
        return load_scenario(scenario_path)
    except ConfigError as exc:
        raise click.ClickException(f"scenario error: {exc}") from exc


@click.group()
@click.version_option(__version__)
def main():
    """Gliding-projectile simulation engine."""


@main.command()
@click.option("--scenario", required=True, type=click.Path(exists=True))
def trim(scenario):
    """Solve and report the zero-deflection gliding equilibrium."""
    cfg = _load(scenario)
    try:
        airspeed, pitch, gamma = _trim_report(cfg)
    except NoTrimFoundError as exc:
        raise click.ClickException(f"no trim: {exc}") from exc
    click.echo(f"airspeed_ms = {_fmt(airspeed)}")
    click.echo(f"pitch_rad = {_fmt(pitch)}")
    click.echo(f"pitch_deg = {_fmt(math.degrees(pitch))}")
    click.echo(f"glide_angle_rad = {_fmt(gamma)}")
    click.echo(f"glide_angle_deg = {_fmt(math.degrees(gamma))}")
    click.echo(f"glide_ratio = {_fmt(-1.0 / math.tan(gamma))}")


def _trim_report(cfg):
    from .dynamics import trim_longitudinal
    return trim_longitudinal(cfg.glider, cfg.rho, cfg.gravity)


CONTROLLER_NAMES = ("pid", "scripted-zero", "external")


@main.command()
@click.option("--scenario", required=True, type=click.Path(exists=True))
@click.option("--controller", default="pid",
              type=click.Choice(CONTROLLER_NAMES))
@click.option("--seed", default=0, type=int)
@click.option("--record", is_flag=True, help="write the trajectory CSV")
@click.option("--out", type=click.Path(), default=None,
              help="trajectory CSV path (required with --record)")
def fly(scenario, controller, seed, record, out):
    """Run one episode and print a summary line."""
    if record and out is None:
        raise click.UsageError("--record requires --out PATH")
    cfg = _load(scenario)
    ctl = (_ExternalController() if controller == "external"
           else make_controller(controller, cfg))
    outcome = run_episode(ctl, cfg, seed, record=record)
    click.echo(f"cause = {outcome.cause}")
    click.echo(f"duration_s = {_fmt(outcome.duration)}")
    click.echo(f"steps = {outcome.steps}")
    click.echo(f"miss_m = {_fmt(outcome.miss)}")
    click.echo(f"total_reward = {_fmt(outcome.total_reward)}")
    if record:
        meta = {"scenario": str(scenario), "controller": controller,
                "seed": str(seed), "version": __version__}
        Path(out).write_text(trajectory_csv_text(outcome.trajectory, meta))
        click.echo(f"trajectory = {out}")


def trajectory_csv_text(rows, metadata: dict) -> str:
    lines = [f"# {k}={v}" for k, v in metadata.items()]
    lines.append(",".join(TRAJECTORY_COLUMNS))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


@main.command()
@click.option("--scenario", required=True, type=click.Path(exists=True))
@click.option("--controller", default="pid",
              type=click.Choice(("pid", "scripted-zero")))
@click.option("--seed", "base_seed", default=0, type=int,
              help="base seed; episode i uses base+i")
@click.option("--n", default=500, type=click.IntRange(min=1))
@click.option("--workers", default=1, type=click.IntRange(min=1))
@click.option("--out", type=click.Path(), default=None,
              help="impact scatter CSV path")
@click.option("--stats-out", type=click.Path(), default=None,
              help="statistics JSON path")
def campaign(scenario, controller, base_seed, n, workers, out, stats_out):
    """Monte-Carlo dispersion campaign; prints key = value statistics."""
    cfg = _load(scenario)
    try:
        stats, outcomes = run_campaign(controller, cfg, n, base_seed,
                                       workers)
    except AllEpisodesFailedError as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(f"n = {stats.n}")
    click.echo(f"mmd_m = {_fmt(stats.mmd)}")
    click.echo(f"cep50_m = {_fmt(stats.cep50)}")
    click.echo(f"cep90_m = {_fmt(stats.cep90)}")
    click.echo(f"sigma2_x_m = {_fmt(stats.sigma2_x)}")
    click.echo(f"sigma2_y_m = {_fmt(stats.sigma2_y)}")
    click.echo(f"mean_impact_x_m = {_fmt(stats.mean_impact[0])}")
    click.echo(f"mean_impact_y_m = {_fmt(stats.mean_impact[1])}")
    for cause in sorted(stats.causes):
        click.echo(f"cause_{cause} = {stats.causes[cause]}")
    if out is not None:
        Path(out).write_text(scatter_csv_text(outcomes))
    if stats_out is not None:
        Path(stats_out).write_text(json.dumps(stats.as_dict(), indent=2)
                                   + "\n")


def scatter_csv_text(outcomes) -> str:
    lines = ["seed,impact_x,impact_y,miss,cause"]
    for o in outcomes:
        if o.impact_ned is None:
            x, y = "", ""
        else:
            x, y = _fmt(o.impact_ned[0]), _fmt(o.impact_ned[1])
        lines.append(f"{o.seed},{x},{y},{_fmt(o.miss)},{o.cause}")
    return "\n".join(lines) + "\n"


@main.command()
@click.argument("recording", type=click.Path(exists=True))
@click.option("--scenario", type=click.Path(exists=True), default=None,
              help="override the scenario path stored in the recording")
def replay(recording, scenario):
    """Re-run a recorded episode and verify it reproduces bit-exactly."""
    text = Path(recording).read_text()
    meta = {}
    for line in text.splitlines():
        if not line.startswith("# "):
            break
        key, _, value = line[2:].partition("=")
        meta[key] = value
    for key in ("scenario", "controller", "seed"):
        if key not in meta:
            raise click.ClickException(
                f"recording is missing '# {key}=' metadata")
    if meta["controller"] == "external":
        raise click.ClickException("external-controller episodes cannot "
                                   "be replayed")
    scenario_path = scenario or meta["scenario"]
    if not Path(scenario_path).exists():
        raise click.ClickException(
            f"scenario file {scenario_path} not found; pass --scenario")
    cfg = _load(scenario_path)
    ctl = make_controller(meta["controller"], cfg)
    outcome = run_episode(ctl, cfg, int(meta["seed"]), record=True)
    regenerated = trajectory_csv_text(outcome.trajectory, meta)
    if regenerated == text:
        click.echo(f"replay ok ({outcome.steps} steps identical)")
    else:
        old = text.splitlines()
        new = regenerated.splitlines()
        for i, (a, b) in enumerate(zip(old, new)):
            if a != b:
                raise click.ClickException(
                    f"replay mismatch at line {i + 1}:\n  recorded: {a}\n"
                    f"  replayed: {b}")
        raise click.ClickException(
            f"replay mismatch: {len(old)} recorded lines vs {len(new)} "
            "replayed")


@main.command("validate-config")
@click.option("--scenario", required=True, type=click.Path(exists=True))
def validate_config(scenario):
    """Validate a scenario file and summarize it."""
    try:
        cfg = load_scenario(scenario)
    except ConfigError as exc:
        raise click.ClickException(f"invalid scenario: {exc}") from exc
    click.echo(f"ok: {scenario}")
    click.echo(f"surfaces = {len(cfg.glider.surfaces)}")
    click.echo(f"mass_kg = {_fmt(cfg.glider.mass)}")
    click.echo(f"turbulence = {'on' if cfg.wind.enabled else 'off'}")
    click.echo(f"mean_wind_ned_ms = {cfg.wind.mean_wind_ned.tolist()}")


@main.command()
@click.option("--scenario", required=True, type=click.Path(exists=True))
def serve(scenario):
    """Expose reset/step as line-delimited JSON over stdin/stdout.

    Requests: {"op": "hello"} | {"op": "reset", "seed": N} |
    {"op": "step", "action": [el, ail]} | {"op": "close"}.
    """
    cfg = _load(scenario)
    env = GliderEnv(cfg)
    stdout = sys.stdout
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        try:
            request = json.loads(line)
        except json.JSONDecodeError as exc:
            request = {}
            response = {"ok": False, "error": "JSONDecodeError",
                        "message": str(exc)}
        else:
            try:
                response = _serve_dispatch(env, request)
            except StepAfterTerminationError as exc:
                response = {"ok": False, "error": "StepAfterTermination",
                            "message": str(exc)}
            except Exception as exc:  # request errors must not kill the loop
                response = {"ok": False, "error": type(exc).__name__,
                            "message": str(exc)}
        stdout.write(json.dumps(response) + "\n")
        stdout.flush()
        if isinstance(request, dict) and request.get("op") == "close":
            break


def _serve_dispatch(env: GliderEnv, request: dict) -> dict:
    op = request.get("op")
    if op == "hello":
        return {"ok": True, "version": __version__, "obs_size": 6,
                "act_size": 2, "dt": env.config.dt,
                "max_steps": env.max_steps}
    if op == "reset":
        obs, info = env.reset(int(request.get("seed", 0)))
        return {"ok": True, "obs": obs.tolist(), "info": info}
    if op == "step":
        action = request.get("action")
        if (not isinstance(action, (list, tuple)) or len(action) != 2):
            raise ValueError("'action' must be a 2-element list")
        result = env.step((float(action[0]), float(action[1])))
        return {"ok": True, "obs": result.observation.as_array().tolist(),
                "reward": result.reward, "terminated": result.terminated,
                "truncated": result.truncated, "info": result.info}
    if op == "close":
        return {"ok": True}
    raise ValueError(f"unknown op {op!r}")


class _ExternalController:
    """Policy living on the other side of stdin/stdout.

    For every step the engine writes {"op": "act", "obs": [...]} and
    expects one line {"action": [el, ail]} back.
    """

    def reset(self):
        pass

    def act(self, obs):
        sys.stdout.write(json.dumps(
            {"op": "act", "obs": np.asarray(obs, dtype=float).tolist()})
            + "\n")
        sys.stdout.flush()
        line = sys.stdin.readline()
        if not line:
            raise click.ClickException("external controller closed stdin")
        reply = json.loads(line)
        action = reply["action"]
        return float(action[0]), float(action[1])


if __name__ == "__main__":
    main()
