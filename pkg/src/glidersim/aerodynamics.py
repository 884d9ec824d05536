"""Per-surface aerodynamic build-up.

The glider is modeled as a set of lifting surfaces (left/right main
wing, left/right all-moving elevon, vertical stabilizer) plus a
drag-only fuselage.  Each surface sees the local airspeed at its
neutral point, produces lift/drag/pitching moment in its own wind
frame, and the contributions are rotated to the body frame and
transported to the CG.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .frames import SurfaceMounting

FULL_LIFT_SLOPE = 2.0 * math.pi


class DegenerateAirflowError(RuntimeError):
    """Local airflow has no usable forward component in the wing frame."""

    def __init__(self, message: str, surface: str | None = None):
        super().__init__(message)
        self.surface = surface


@dataclass(frozen=True)
class LiftingSurface:
    """Geometry and coefficient parameters of one lifting surface.

    deflection_sign maps the two normalized commands onto this surface:
    an elevon deflects by delta_el + deflection_sign * delta_ail, while
    surfaces with deflection_sign == 0 never move.
    """

    name: str
    mounting: SurfaceMounting
    area: float
    chord: float
    aspect_ratio: float
    cl0: float = 0.0
    cd0: float = 0.02
    cm0: float = 0.0
    oswald: float = 0.75
    stall_alpha: float = math.radians(15.0)
    deflection_sign: int = 0

    def __post_init__(self):
        if self.area <= 0.0:
            raise ValueError(f"surface {self.name}: area must be > 0")
        if self.chord <= 0.0:
            raise ValueError(f"surface {self.name}: chord must be > 0")
        if self.aspect_ratio <= 0.0:
            raise ValueError(f"surface {self.name}: aspect_ratio must be > 0")
        if not 0.0 < self.oswald <= 1.0:
            raise ValueError(f"surface {self.name}: oswald must be in (0, 1]")
        if not 0.0 < self.stall_alpha < 0.5 * math.pi:
            raise ValueError(f"surface {self.name}: stall_alpha out of range")
        if self.deflection_sign not in (-1, 0, 1):
            raise ValueError(f"surface {self.name}: deflection_sign not in -1/0/+1")
        if self.deflection_sign != 0 and self.mounting.hinge is None:
            raise ValueError(f"surface {self.name}: deflectable surface needs a hinge")


@dataclass(frozen=True)
class FuselageDrag:
    """Flat-plate style fuselage drag parameters."""

    form_factor: float
    skin_friction: float
    wet_area: float
    ref_area: float

    def __post_init__(self):
        for name in ("form_factor", "skin_friction", "wet_area", "ref_area"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"fuselage {name} must be > 0")


@dataclass(frozen=True)
class LocalAirflow:
    """Airspeed state of one surface expressed in its wing frame."""

    velocity_wing: np.ndarray
    alpha: float
    beta: float
    dynamic_pressure: float


@dataclass(frozen=True)
class Wrench:
    """Force and moment in body axes, moment about the CG."""

    force_body: np.ndarray
    moment_body: np.ndarray


@dataclass
class GliderModel:
    """Complete airframe description consumed by the simulation."""

    mass: float
    inertia: np.ndarray
    surfaces: list[LiftingSurface]
    fuselage: FuselageDrag
    actuator_limit: float = math.radians(20.0)

    _packed: tuple | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.inertia = np.asarray(self.inertia, dtype=float)
        if self.mass <= 0.0:
            raise ValueError("mass must be > 0")
        if self.inertia.shape != (3, 3):
            raise ValueError("inertia must be 3x3")
        if np.abs(self.inertia - self.inertia.T).max() > 1e-12:
            raise ValueError("inertia must be symmetric")
        if np.any(np.linalg.eigvalsh(self.inertia) <= 0.0):
            raise ValueError("inertia must be positive definite")
        if not self.surfaces:
            raise ValueError("at least one lifting surface is required")

    def packed(self) -> tuple:
        """Contiguous arrays for the compiled kernels (cached)."""
        if self._packed is None:
            n = len(self.surfaces)
            sp = np.empty((n, 3))
            swb = np.empty((n, 3, 3))
            sgeo = np.empty((n, _kernels.GEO_NCOLS))
            for i, s in enumerate(self.surfaces):
                sp[i] = s.mounting.position_body
                swb[i] = s.mounting.orientation_body
                sgeo[i, _kernels.GEO_AREA] = s.area
                sgeo[i, _kernels.GEO_CHORD] = s.chord
                sgeo[i, _kernels.GEO_CLA] = lift_slope(s.aspect_ratio)
                sgeo[i, _kernels.GEO_CL0] = s.cl0
                sgeo[i, _kernels.GEO_CD0] = s.cd0
                sgeo[i, _kernels.GEO_CM0] = s.cm0
                sgeo[i, _kernels.GEO_INV_PEAR] = 1.0 / (
                    math.pi * s.oswald * s.aspect_ratio)
                sgeo[i, _kernels.GEO_STALL] = s.stall_alpha
                sgeo[i, _kernels.GEO_DSIGN] = float(s.deflection_sign)
            fus = np.array([self.fuselage.ref_area,
                            fuselage_drag_coefficient(self.fuselage)])
            inv_inertia = np.linalg.inv(self.inertia)
            self._packed = (sp, swb, sgeo, fus, self.inertia.copy(),
                            inv_inertia)
        return self._packed


def lift_slope(aspect_ratio: float) -> float:
    """3-D lift-curve slope per radian from the planform aspect ratio."""
    if aspect_ratio <= 0.0:
        raise ValueError("aspect_ratio must be > 0")
    return (math.pi * aspect_ratio
            / (1.0 + math.sqrt(1.0 + (0.5 * aspect_ratio) ** 2)))


def surface_coefficients(alpha: float, surface: LiftingSurface):
    """(cl, cd, cm) for one surface; lift plateaus beyond stall."""
    cla = lift_slope(surface.aspect_ratio)
    inv_pear = 1.0 / (math.pi * surface.oswald * surface.aspect_ratio)
    return _kernels.surface_coefficients(
        alpha, cla, surface.cl0, surface.cd0, surface.cm0, inv_pear,
        surface.stall_alpha)


def fuselage_drag_coefficient(fus: FuselageDrag) -> float:
    """Fuselage drag coefficient referenced to fus.ref_area."""
    return fus.form_factor * fus.skin_friction * fus.wet_area / fus.ref_area


def local_airflow(v_body, omega_body, mounting: SurfaceMounting, wind_body,
                  rho: float, deflection: float = 0.0) -> LocalAirflow:
    """Airflow state at a surface's neutral point in its wing frame."""
    v_body = np.asarray(v_body, dtype=float)
    omega_body = np.asarray(omega_body, dtype=float)
    wind_body = np.asarray(wind_body, dtype=float)
    v_pt = v_body + np.cross(omega_body, mounting.position_body) - wind_body
    cwb = mounting.orientation_body
    if deflection != 0.0:
        ddcm = np.empty((3, 3))
        _kernels.deflection_dcm(deflection, ddcm)
        cwb = ddcm @ cwb
    v_wing = cwb @ v_pt
    if abs(v_wing[0]) <= 0.1:
        raise DegenerateAirflowError(
            f"|u_S| = {abs(v_wing[0]):.4f} m/s <= 0.1 m/s in the wing frame")
    vmag = float(np.linalg.norm(v_wing))
    alpha = math.atan2(v_wing[2], v_wing[0])
    beta = math.asin(v_wing[1] / vmag)
    return LocalAirflow(v_wing, alpha, beta, 0.5 * rho * vmag * vmag)


def surface_wrench(flow: LocalAirflow, surface: LiftingSurface) -> Wrench:
    """Dimensional force/moment of one surface, body axes, about the CG.

    Lift acts along -z_wind, drag along -x_wind (opposing the motion
    through the air) and the pitching moment about y_wind; the result is
    rotated wind->wing->body and transported to the CG.
    """
    qbar = flow.dynamic_pressure
    if qbar == 0.0:
        return Wrench(np.zeros(3), np.zeros(3))
    cl, cd, cm = surface_coefficients(flow.alpha, surface)
    lift = qbar * surface.area * cl
    drag = qbar * surface.area * cd
    pitch = qbar * surface.area * surface.chord * cm

    csw = np.empty((3, 3))
    _kernels.wind_frame_dcm(flow.alpha, flow.beta, csw)
    f_wing = csw.T @ np.array([-drag, 0.0, -lift])
    m_wing = csw.T @ np.array([0.0, pitch, 0.0])

    cwb = surface.mounting.orientation_body
    f_body = cwb.T @ f_wing
    m_body = cwb.T @ m_wing + np.cross(surface.mounting.position_body, f_body)
    return Wrench(f_body, m_body)


def total_wrench(state, controls, glider: GliderModel, wind_body,
                 rho: float) -> Wrench:
    """Whole-glider aerodynamic wrench in body axes about the CG.

    `state` is a RigidBodyState, `controls` an ActuatorState; the elevon
    pair receives delta_el +- delta_ail (clamped to the actuator limit)
    and the fuselage adds pure drag anti-parallel to the CG airflow.
    """
    sp, swb, sgeo, fus, _, _ = glider.packed()
    force = np.empty(3)
    moment = np.empty(3)
    status = _kernels.total_wrench(
        np.asarray(state.velocity_body, dtype=float),
        np.asarray(state.rates_body, dtype=float),
        np.asarray(wind_body, dtype=float),
        rho, controls.delta_el, controls.delta_ail, glider.actuator_limit,
        sp, swb, sgeo, fus, force, moment)
    if status >= _kernels.STATUS_DEGENERATE_BASE:
        idx = status - _kernels.STATUS_DEGENERATE_BASE
        name = glider.surfaces[idx].name
        raise DegenerateAirflowError(
            f"degenerate airflow on surface {name!r}", surface=name)
    return Wrench(force, moment)
