"""Scenario-file loading and validation.

Scenario files are YAML with degree-valued angles and SI units; see
scenarios/default.yaml for the full schema.  Validation errors always
name the offending key path so the CLI can point at the exact field.
"""

import math
from pathlib import Path

import numpy as np
import yaml

from .aerodynamics import FuselageDrag, GliderModel, LiftingSurface
from .atmosphere import WindConfig
from .baseline import PidConfig
from .environment import InitConditions, RewardWeights, ScenarioConfig
from .frames import EulerAngles, mounting_from_euler
from .seeker import SeekerModel, mounting_from_euler as seeker_mounting


class ConfigError(ValueError):
    """Scenario file failed to parse or validate; message names the key."""


def _require(mapping, key, path, kind=None):
    if not isinstance(mapping, dict) or key not in mapping:
        raise ConfigError(f"missing required key '{path}{key}'")
    return _typed(mapping[key], key, path, kind)


def _optional(mapping, key, path, default, kind=None):
    if not isinstance(mapping, dict) or key not in mapping:
        return default
    return _typed(mapping[key], key, path, kind)


def _typed(value, key, path, kind):
    if kind is None:
        return value
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"key '{path}{key}' must be a number, "
                              f"got {type(value).__name__}")
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"key '{path}{key}' must be an integer, "
                              f"got {type(value).__name__}")
        return value
    if kind is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"key '{path}{key}' must be a boolean, "
                              f"got {type(value).__name__}")
        return value
    if kind is list:
        if not isinstance(value, list):
            raise ConfigError(f"key '{path}{key}' must be a list, "
                              f"got {type(value).__name__}")
        return value
    if kind is dict:
        if not isinstance(value, dict):
            raise ConfigError(f"key '{path}{key}' must be a mapping, "
                              f"got {type(value).__name__}")
        return value
    if kind is str:
        if not isinstance(value, str):
            raise ConfigError(f"key '{path}{key}' must be a string, "
                              f"got {type(value).__name__}")
        return value
    raise AssertionError(kind)


def _vector(mapping, key, path, size, default=None):
    if default is not None and key not in mapping:
        return np.asarray(default, dtype=float)
    raw = _require(mapping, key, path, list)
    if len(raw) != size or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool)
            for v in raw):
        raise ConfigError(f"key '{path}{key}' must be a list of "
                          f"{size} numbers")
    return np.asarray(raw, dtype=float)


def load_scenario(path) -> ScenarioConfig:
    """Parse and validate a scenario YAML file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read scenario file {path}: {exc}") from exc
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("scenario file must contain a top-level mapping")
    return scenario_from_dict(doc)


def scenario_from_dict(doc: dict) -> ScenarioConfig:
    glider = _parse_glider(_require(doc, "glider", "", dict))
    atmo = _optional(doc, "atmosphere", "", {}, dict)
    envd = _optional(doc, "environment", "", {}, dict)
    seeker = _parse_seeker(_optional(doc, "seeker", "", {}, dict))
    wind = _parse_wind(atmo)
    controllers = _parse_controllers(_optional(doc, "controllers", "", {},
                                               dict))
    try:
        return ScenarioConfig(
            glider=glider,
            seeker=seeker,
            wind=wind,
            weights=_parse_weights(_optional(envd, "reward_weights",
                                             "environment.", {}, dict)),
            init=_parse_init(_optional(envd, "init", "environment.", {},
                                       dict)),
            rho=_optional(atmo, "rho_kgm3", "atmosphere.", 1.225, float),
            dt=_optional(envd, "dt_s", "environment.", 0.01, float),
            max_duration=_optional(envd, "max_duration_s", "environment.",
                                   60.0, float),
            terminal_penalty=_optional(envd, "terminal_penalty",
                                       "environment.", 10.0, float),
            lock_loss_grace=_optional(envd, "lock_loss_grace_s",
                                      "environment.", 0.5, float),
            pixel_noise_std=_optional(envd, "pixel_noise_std",
                                      "environment.", 0.0, float),
            default_seed=_optional(envd, "seed", "environment.", 0, int),
            controllers=controllers,
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc


def _parse_glider(d: dict) -> GliderModel:
    path = "glider."
    mass = _require(d, "mass_kg", path, float)
    inertia_diag = _vector(d, "inertia_diag_kgm2", path, 3)
    limit = math.radians(_optional(d, "actuator_limit_deg", path, 20.0,
                                   float))
    fus = _require(d, "fuselage", path, dict)
    fpath = path + "fuselage."
    try:
        fuselage = FuselageDrag(
            form_factor=_require(fus, "form_factor", fpath, float),
            skin_friction=_require(fus, "skin_friction", fpath, float),
            wet_area=_require(fus, "wet_area_m2", fpath, float),
            ref_area=_require(fus, "ref_area_m2", fpath, float),
        )
    except ValueError as exc:
        _reraise(exc, fpath)

    raw_surfaces = _require(d, "surfaces", path, list)
    if not raw_surfaces:
        raise ConfigError("key 'glider.surfaces' must list at least one "
                          "surface")
    surfaces = []
    for i, s in enumerate(raw_surfaces):
        spath = f"glider.surfaces[{i}]."
        if not isinstance(s, dict):
            raise ConfigError(f"key 'glider.surfaces[{i}]' must be a mapping")
        known = {"name", "position_m", "mounting_deg", "area_m2", "chord_m",
                 "aspect_ratio", "cl0", "cd0", "cm0", "oswald", "stall_deg",
                 "deflection_sign", "hinge"}
        for k in s:
            if k not in known:
                raise ConfigError(f"unknown key '{spath}{k}'")
        name = _optional(s, "name", spath, f"surface_{i}", str)
        mount_deg = _vector(s, "mounting_deg", spath, 3,
                            default=(0.0, 0.0, 0.0))
        angles = EulerAngles(*np.radians(mount_deg))
        sign = _optional(s, "deflection_sign", spath, 0, int)
        hinge = _optional(s, "hinge", spath, "y" if sign != 0 else None)
        if hinge is not None and hinge != "y":
            raise ConfigError(f"key '{spath}hinge' must be 'y' or null")
        try:
            surfaces.append(LiftingSurface(
                name=name,
                mounting=mounting_from_euler(
                    _vector(s, "position_m", spath, 3), angles, hinge),
                area=_require(s, "area_m2", spath, float),
                chord=_require(s, "chord_m", spath, float),
                aspect_ratio=_require(s, "aspect_ratio", spath, float),
                cl0=_optional(s, "cl0", spath, 0.0, float),
                cd0=_optional(s, "cd0", spath, 0.02, float),
                cm0=_optional(s, "cm0", spath, 0.0, float),
                oswald=_optional(s, "oswald", spath, 0.75, float),
                stall_alpha=math.radians(
                    _optional(s, "stall_deg", spath, 15.0, float)),
                deflection_sign=sign,
            ))
        except ValueError as exc:
            _reraise(exc, spath)

    try:
        return GliderModel(mass=mass, inertia=np.diag(inertia_diag),
                           surfaces=surfaces, fuselage=fuselage,
                           actuator_limit=limit)
    except ValueError as exc:
        _reraise(exc, path)


def _parse_seeker(d: dict) -> SeekerModel:
    path = "seeker."
    resolution = _vector(d, "resolution_px", path, 2, default=(640, 480))
    fov_h = math.radians(_optional(d, "fov_h_deg", path, 120.0, float))
    if not 0.0 < fov_h < math.pi:
        raise ConfigError("key 'seeker.fov_h_deg' must be in (0, 180)")
    mount_deg = _vector(d, "mounting_deg", path, 3, default=(0.0, 0.0, 0.0))
    try:
        return SeekerModel.from_fov(
            fov_h, resolution=(int(resolution[0]), int(resolution[1])),
            mounting_body=seeker_mounting(EulerAngles(*np.radians(mount_deg))))
    except ValueError as exc:
        _reraise(exc, path)


def _parse_wind(atmo: dict) -> WindConfig:
    path = "atmosphere."
    mean = _vector(atmo, "mean_wind_ned_ms", path, 3,
                   default=(0.0, 0.0, 0.0))
    turb = _optional(atmo, "turbulence", path, {}, dict)
    tpath = path + "turbulence."
    try:
        return WindConfig(
            mean_wind_ned=mean,
            turbulence_intensity=_vector(turb, "intensity_ms", tpath, 3,
                                         default=(1.06, 1.06, 0.7)),
            scale_lengths=_vector(turb, "scale_m", tpath, 3,
                                  default=(200.0, 200.0, 50.0)),
            enabled=_optional(turb, "enabled", tpath, False, bool),
        )
    except ValueError as exc:
        _reraise(exc, tpath)


def _parse_weights(d: dict) -> RewardWeights:
    path = "environment.reward_weights."
    try:
        return RewardWeights(
            w1=_optional(d, "w1", path, 1.0, float),
            w2=_optional(d, "w2", path, 0.1, float),
            w3=_optional(d, "w3", path, 0.1, float),
        )
    except ValueError as exc:
        _reraise(exc, path)


def _parse_init(d: dict) -> InitConditions:
    path = "environment.init."
    return InitConditions(
        range_mean=_optional(d, "range_mean_m", path, 150.0, float),
        range_spread=_optional(d, "range_spread_m", path, 50.0, float),
        cone_half_angle=math.radians(
            _optional(d, "cone_half_angle_deg", path, 45.0, float)),
        altitude_ratio=_optional(d, "altitude_ratio", path, 0.5, float),
        altitude_spread=_optional(d, "altitude_spread_m", path, 20.0, float),
    )


def _parse_controllers(d: dict) -> dict:
    out: dict = {}
    pid = _optional(d, "pid", "controllers.", None, dict)
    if pid is not None:
        parsed = {}
        for channel in ("longitudinal", "heading", "roll"):
            block = _optional(pid, channel, "controllers.pid.", None, dict)
            if block is not None:
                parsed[channel] = _parse_pid(
                    block, f"controllers.pid.{channel}.")
        parsed["q_damping"] = _optional(pid, "q_damping", "controllers.pid.",
                                        0.0, float)
        parsed["v_bias"] = _optional(pid, "v_bias", "controllers.pid.",
                                     0.0, float)
        out["pid"] = parsed
    return out


def _parse_pid(d: dict, path: str) -> PidConfig:
    limit = _optional(d, "output_limit", path, None, float)
    limit_deg = _optional(d, "output_limit_deg", path, None, float)
    if limit is not None and limit_deg is not None:
        raise ConfigError(f"keys '{path}output_limit' and "
                          f"'{path}output_limit_deg' are mutually exclusive")
    if limit_deg is not None:
        limit = math.radians(limit_deg)
    if limit is None:
        limit = 1.0
    try:
        return PidConfig(
            kp=_optional(d, "kp", path, 0.0, float),
            ki=_optional(d, "ki", path, 0.0, float),
            kd=_optional(d, "kd", path, 0.0, float),
            output_limit=limit,
            integrator_limit=_optional(d, "integrator_limit", path, 0.0,
                                       float),
        )
    except ValueError as exc:
        _reraise(exc, path)


def _reraise(exc: ValueError, path: str):
    if isinstance(exc, ConfigError):
        raise exc
    raise ConfigError(f"in '{path.rstrip('.')}': {exc}") from exc
