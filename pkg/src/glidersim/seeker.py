"""Strap-down pinhole camera seeker.

The camera is rigidly mounted with its boresight along body +x by
default; image x points along body +y (right) and image y along body +z
(down).  Projection divides by the boresight depth and normalizes pixel
coordinates by the half-resolution, so the sensor edges map to +-1.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .frames import EulerAngles, check_dcm, euler_to_dcm

# camera-frame axes (x right, y down, z boresight) in "mount" axes
# (x boresight, y right, z down)
_CAMERA_AXES = np.array([
    [0.0, 1.0, 0.0],
    [0.0, 0.0, 1.0],
    [1.0, 0.0, 0.0],
])


class NotVisibleError(RuntimeError):
    """Pixel conversion requested for a point outside the image."""


@dataclass(frozen=True)
class SeekerModel:
    """Intrinsics plus rigid mounting of the strap-down camera.

    focal/principal_point are in pixels; fov is the derived (horizontal,
    vertical) field of view and must agree with focal and resolution to
    within 1%.  mounting_body maps body coordinates into the mount frame
    whose +x is the boresight.
    """

    focal: float
    resolution: tuple[int, int] = (640, 480)
    principal_point: tuple[float, float] | None = None
    mounting_body: np.ndarray = field(default_factory=lambda: np.eye(3))
    fov: tuple[float, float] | None = None

    def __post_init__(self):
        if self.focal <= 0.0:
            raise ValueError("focal must be > 0")
        object.__setattr__(self, "mounting_body",
                           np.asarray(self.mounting_body, dtype=float))
        check_dcm(self.mounting_body)
        if self.principal_point is None:
            object.__setattr__(self, "principal_point",
                               (self.resolution[0] / 2.0,
                                self.resolution[1] / 2.0))
        derived = (2.0 * math.atan(self.resolution[0] / 2.0 / self.focal),
                   2.0 * math.atan(self.resolution[1] / 2.0 / self.focal))
        if self.fov is None:
            object.__setattr__(self, "fov", derived)
        else:
            for got, want, axis in zip(self.fov, derived, "hv"):
                if abs(got - want) > 0.01 * want:
                    raise ValueError(
                        f"fov_{axis} {math.degrees(got):.2f} deg inconsistent "
                        f"with focal/resolution ({math.degrees(want):.2f} deg)")

    @classmethod
    def from_fov(cls, fov_horizontal: float, resolution=(640, 480),
                 mounting_body=None) -> "SeekerModel":
        """Build intrinsics from a horizontal field of view in radians."""
        focal = resolution[0] / 2.0 / math.tan(fov_horizontal / 2.0)
        if mounting_body is None:
            mounting_body = np.eye(3)
        return cls(focal=focal, resolution=tuple(resolution),
                   mounting_body=mounting_body)

    def camera_dcm(self) -> np.ndarray:
        """Body->camera DCM (camera x right, y down, z boresight)."""
        return _CAMERA_AXES @ self.mounting_body

    def packed(self) -> np.ndarray:
        """[f, cx, cy, half_w, half_h] for the compiled kernels."""
        return np.array([self.focal, self.principal_point[0],
                         self.principal_point[1],
                         self.resolution[0] / 2.0, self.resolution[1] / 2.0])


@dataclass(frozen=True)
class ImagePoint:
    """Normalized image coordinates; +-1 at the sensor edges.

    u and v keep their projected values when the target is in front of
    the camera but out of frame, and are zeroed when it is behind.
    """

    u: float
    v: float
    visible: bool


def project(target_ned, glider_position_ned, glider_attitude: EulerAngles,
            seeker: SeekerModel) -> ImagePoint:
    """Project a world point into normalized image coordinates."""
    ccb = seeker.camera_dcm()
    x = np.zeros(12)
    x[0:3] = np.asarray(glider_position_ned, dtype=float)
    x[3] = glider_attitude.phi
    x[4] = glider_attitude.theta
    x[5] = glider_attitude.psi
    par = seeker.packed()
    out = np.empty(4)
    _kernels.project_target(x, np.asarray(target_ned, dtype=float), ccb,
                            par[0], par[1], par[2], par[3], par[4], out)
    return ImagePoint(out[0], out[1], out[2] != 0.0)


def normalized_to_pixels(p: ImagePoint, seeker: SeekerModel) -> np.ndarray:
    """Map a visible normalized point back onto the pixel grid."""
    if not p.visible:
        raise NotVisibleError("point is not visible on the sensor")
    cx, cy = seeker.principal_point
    return np.array([cx + p.u * seeker.resolution[0] / 2.0,
                     cy + p.v * seeker.resolution[1] / 2.0])


def pixels_to_normalized(pixels, seeker: SeekerModel) -> tuple[float, float]:
    """Inverse of normalized_to_pixels (visibility not re-evaluated)."""
    cx, cy = seeker.principal_point
    u = (float(pixels[0]) - cx) / (seeker.resolution[0] / 2.0)
    v = (float(pixels[1]) - cy) / (seeker.resolution[1] / 2.0)
    return u, v


def mounting_from_euler(angles: EulerAngles) -> np.ndarray:
    """Body->mount DCM for a camera rotated by `angles` from body axes."""
    return euler_to_dcm(angles).T
