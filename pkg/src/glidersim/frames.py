"""Attitude representations and frame rotations.

Conventions used everywhere in the package:

- NED earth frame, z positive down.
- Body frame: x forward, y right, z down, origin at the CG.
- Euler angles follow the ZYX (yaw-pitch-roll) sequence; ``euler_to_dcm``
  returns the matrix B mapping body components to NED components.
- Per-surface wing frames are located at the surface neutral point; the
  wind frame has x aligned with the local airspeed vector.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels


class GimbalLockError(RuntimeError):
    """Pitch too close to +-90 deg for the Euler kinematics."""


GIMBAL_MARGIN = _kernels.GIMBAL_MARGIN


@dataclass(frozen=True)
class EulerAngles:
    """Roll/pitch/yaw in radians; pitch strictly inside (-pi/2, pi/2)."""

    phi: float
    theta: float
    psi: float

    def __post_init__(self):
        if not (-math.pi < self.phi <= math.pi):
            raise ValueError(f"phi {self.phi} outside (-pi, pi]")
        if not (-math.pi < self.psi <= math.pi):
            raise ValueError(f"psi {self.psi} outside (-pi, pi]")
        if abs(self.theta) >= 0.5 * math.pi:
            raise ValueError(f"theta {self.theta} outside (-pi/2, pi/2)")

    def as_array(self) -> np.ndarray:
        return np.array([self.phi, self.theta, self.psi])


def wrap_angle(angle: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    return _kernels.wrap_angle(angle)


def euler_to_dcm(angles: EulerAngles) -> np.ndarray:
    """Body->NED direction cosine matrix for the given attitude."""
    out = np.empty((3, 3))
    _kernels.euler_to_dcm(angles.phi, angles.theta, angles.psi, out)
    return out


def dcm_to_euler(dcm: np.ndarray) -> EulerAngles:
    """Extract ZYX Euler angles from a body->NED DCM."""
    theta = -math.asin(min(1.0, max(-1.0, dcm[2, 0])))
    phi = math.atan2(dcm[2, 1], dcm[2, 2])
    psi = math.atan2(dcm[1, 0], dcm[0, 0])
    return EulerAngles(phi, theta, psi)


def euler_rate_matrix(angles: EulerAngles) -> np.ndarray:
    """Matrix H with Euler-angle rates = H @ body rates.

    Raises GimbalLockError when |theta| >= pi/2 - 1e-3.
    """
    out = np.empty((3, 3))
    status = _kernels.euler_rate_matrix(angles.phi, angles.theta, out)
    if status == _kernels.STATUS_GIMBAL_LOCK:
        raise GimbalLockError(
            f"pitch {angles.theta:.6f} rad within {GIMBAL_MARGIN} of singularity")
    return out


def skew(omega) -> np.ndarray:
    """3x3 matrix S with S @ v == omega x v."""
    wx, wy, wz = float(omega[0]), float(omega[1]), float(omega[2])
    return np.array([
        [0.0, -wz, wy],
        [wz, 0.0, -wx],
        [-wy, wx, 0.0],
    ])


def wind_frame_dcm(alpha_s: float, beta_s: float) -> np.ndarray:
    """Wing->wind DCM from local incidence and sideslip.

    Rows are the wind-frame axes in wing coordinates; the x axis is
    aligned with the local airspeed vector, so lift along -z_wind is
    perpendicular to the flow and drag along -x_wind opposes it.
    """
    if not (abs(alpha_s) < 0.5 * math.pi and abs(beta_s) < 0.5 * math.pi):
        raise ValueError("alpha/beta must lie inside (-pi/2, pi/2)")
    out = np.empty((3, 3))
    _kernels.wind_frame_dcm(alpha_s, beta_s, out)
    return out


def deflection_dcm(delta: float) -> np.ndarray:
    """Wing-frame rotation for an all-moving surface hinged on y_W.

    Positive delta raises the leading edge (trailing edge down),
    increasing the local incidence the surface sees.
    """
    out = np.empty((3, 3))
    _kernels.deflection_dcm(delta, out)
    return out


@dataclass(frozen=True)
class SurfaceMounting:
    """Placement of one lifting surface relative to the CG.

    position_body    : neutral point in body coordinates (m)
    orientation_body : body->wing DCM at zero deflection
    hinge            : 'y' for all-moving surfaces, None for fixed ones
    """

    position_body: np.ndarray
    orientation_body: np.ndarray
    hinge: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "position_body",
                           np.asarray(self.position_body, dtype=float))
        object.__setattr__(self, "orientation_body",
                           np.asarray(self.orientation_body, dtype=float))
        if self.position_body.shape != (3,):
            raise ValueError("position_body must be a 3-vector")
        check_dcm(self.orientation_body)
        if self.hinge not in (None, "y"):
            raise ValueError(f"unsupported hinge axis {self.hinge!r}")


def mounting_from_euler(position_body, angles: EulerAngles,
                        hinge: str | None = None) -> SurfaceMounting:
    """Mounting whose wing frame is the body frame rotated by `angles`."""
    return SurfaceMounting(np.asarray(position_body, dtype=float),
                           euler_to_dcm(angles).T, hinge)


def check_dcm(dcm: np.ndarray, tol: float = 1e-9) -> None:
    """Validate orthonormality and det +1; raises ValueError otherwise."""
    dcm = np.asarray(dcm, dtype=float)
    if dcm.shape != (3, 3):
        raise ValueError("DCM must be 3x3")
    err = np.abs(dcm.T @ dcm - np.eye(3)).max()
    if err > tol:
        raise ValueError(f"matrix is not orthonormal (deviation {err:.3e})")
    det = np.linalg.det(dcm)
    if abs(det - 1.0) > tol:
        raise ValueError(f"matrix determinant {det} is not +1")
