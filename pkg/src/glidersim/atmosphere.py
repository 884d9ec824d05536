"""Constant wind plus Dryden turbulence gusts.

Gusts are generated in the NED frame (u -> north, v -> east, w -> down)
and rotated into the body frame where they are consumed; the glider span
is far below the turbulence scale lengths, so all surfaces see the same
gust.  The shaping filters are exact discretizations of the Dryden
spectra, so the stationary variance of each axis equals the configured
intensity squared for any timestep.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _kernels

RHO_SEA_LEVEL = 1.225

# low-altitude light-turbulence preset
DEFAULT_SCALE_LENGTHS = (200.0, 200.0, 50.0)
DEFAULT_INTENSITIES = (1.06, 1.06, 0.7)


@dataclass(frozen=True)
class WindConfig:
    """Mean wind in NED plus Dryden turbulence parameters."""

    mean_wind_ned: np.ndarray = field(
        default_factory=lambda: np.zeros(3))
    turbulence_intensity: np.ndarray = field(
        default_factory=lambda: np.array(DEFAULT_INTENSITIES))
    scale_lengths: np.ndarray = field(
        default_factory=lambda: np.array(DEFAULT_SCALE_LENGTHS))
    enabled: bool = False

    def __post_init__(self):
        object.__setattr__(self, "mean_wind_ned",
                           np.asarray(self.mean_wind_ned, dtype=float))
        object.__setattr__(self, "turbulence_intensity",
                           np.asarray(self.turbulence_intensity, dtype=float))
        object.__setattr__(self, "scale_lengths",
                           np.asarray(self.scale_lengths, dtype=float))
        if np.any(self.turbulence_intensity < 0.0):
            raise ValueError("turbulence intensities must be >= 0")
        if self.enabled and np.any(self.scale_lengths <= 0.0):
            raise ValueError("scale lengths must be > 0 when turbulence is on")


@dataclass
class DrydenState:
    """Internal shaping-filter memories plus the driving generator.

    filters[0] is the first-order u channel; filters[1:3] and
    filters[3:5] are the two-state v and w channels.
    """

    filters: np.ndarray
    rng: np.random.Generator

    @classmethod
    def initial(cls, cfg: WindConfig, airspeed: float,
                rng: np.random.Generator) -> "DrydenState":
        """State drawn from the stationary distribution of the filters."""
        xs = np.zeros(5)
        if cfg.enabled:
            v = max(airspeed, 0.5)
            draws = rng.standard_normal(5)
            xs[0] = cfg.turbulence_intensity[0] * draws[0]
            for ch in range(2):
                a = v / cfg.scale_lengths[ch + 1]
                # stationary covariance of the canonical 2-state filter
                xs[1 + 2 * ch] = np.sqrt(1.0 / (4.0 * a ** 3)) * draws[1 + 2 * ch]
                xs[2 + 2 * ch] = np.sqrt(1.0 / (4.0 * a)) * draws[2 + 2 * ch]
        return cls(xs, rng)


def dryden_step(state: DrydenState, cfg: WindConfig, airspeed: float,
                dt: float):
    """Advance the gust filters one sample; returns (gust_ned, state).

    Zero configured intensity yields exactly zero gust.  The state is
    updated in place and returned for call-chaining.
    """
    if dt <= 0.0:
        raise ValueError("dt must be > 0")
    if not cfg.enabled:
        return np.zeros(3), state
    noise = state.rng.standard_normal(5)
    gn, ge, gd = _kernels.dryden_update(
        state.filters, noise, airspeed, dt, cfg.scale_lengths,
        cfg.turbulence_intensity)
    return np.array([gn, ge, gd]), state


def wind_at(cfg: WindConfig, gust) -> np.ndarray:
    """Total NED wind: configured mean plus the current gust sample."""
    return cfg.mean_wind_ned + np.asarray(gust, dtype=float)
