"""Pinhole camera poses framing the target window."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core.geometry import Scope
from ..core.params import Sampler
from ..core.rng import RandomStream

STANDOFF = 5.0
MARGIN_RANGE = (1.1, 1.6)
UP = np.array([0.0, 0.0, 1.0])


class CameraError(ValueError):
    pass


@dataclass(frozen=True)
class CameraPose:
    position: np.ndarray
    look_at: np.ndarray
    vfov: float  # degrees
    aspect: float = 1.0  # width / height

    def __post_init__(self):
        object.__setattr__(self, "position", np.asarray(self.position, float).reshape(3))
        object.__setattr__(self, "look_at", np.asarray(self.look_at, float).reshape(3))

    def validate(self) -> None:
        if not 0.0 < self.vfov < 180.0:
            raise CameraError(f"vertical fov must be in (0, 180) degrees, got {self.vfov}")
        if np.linalg.norm(self.look_at - self.position) < 1e-9:
            raise CameraError("camera looks at its own position")

    def basis(self) -> np.ndarray:
        """Rows: right, up, forward (world coordinates)."""
        f = self.look_at - self.position
        f = f / np.linalg.norm(f)
        up = UP if abs(f @ UP) < 0.999999 else np.array([0.0, 1.0, 0.0])
        r = np.cross(f, up)
        r /= np.linalg.norm(r)
        u = np.cross(r, f)
        return np.stack([r, u, f])

    def to_camera(self, points) -> np.ndarray:
        """World points -> (x right, y up, z depth along the view axis)."""
        return (np.asarray(points, float) - self.position) @ self.basis().T

    def focal_px(self, height: int) -> float:
        return 0.5 * height / np.tan(np.radians(self.vfov) / 2)

    def project(self, points, width: int, height: int) -> np.ndarray:
        """Continuous pixel coordinates (x right, y down; pixel centers at +0.5)."""
        c = self.to_camera(points)
        f = self.focal_px(height)
        x = width / 2 + f * c[:, 0] / c[:, 2]
        y = height / 2 - f * c[:, 1] / c[:, 2]
        return np.column_stack([x, y])

    def pixel_rays(self, px, py, width: int, height: int) -> np.ndarray:
        """Ray directions through pixel centers, scaled so their view-axis component is 1."""
        r, u, f = self.basis()
        fp = self.focal_px(height)
        dx = (np.asarray(px, float) + 0.5 - width / 2) / fp
        dy = (np.asarray(py, float) + 0.5 - height / 2) / fp
        return f[None, :] + dx[:, None] * r[None, :] - dy[:, None] * u[None, :]

    def to_dict(self) -> dict:
        return {
            "position": [float(v) for v in self.position],
            "look_at": [float(v) for v in self.look_at],
            "vfov": float(self.vfov),
            "aspect": float(self.aspect),
        }


def _draw(rng, name: str, low: float, high: float) -> float:
    if isinstance(rng, Sampler):
        return rng.uniform(name, low, high)
    return float(rng.uniform(low, high))


def required_half_tan(pose_pos, look_at, corners, aspect: float) -> float:
    """tan(vfov/2) at which the corners exactly touch the frame border."""
    cam = CameraPose(pose_pos, look_at, 60.0, aspect)
    c = cam.to_camera(corners)
    if np.any(c[:, 2] <= 0):
        raise CameraError("window corner behind the camera")
    return float(max(np.max(np.abs(c[:, 1] / c[:, 2])), np.max(np.abs(c[:, 0] / c[:, 2])) / aspect))


def sample_camera(
    window_bound: Scope, radius: float, rng: RandomStream | Sampler, aspect: float = 1.0, max_tries: int = 10_000
) -> CameraPose:
    """Camera on a disc of ``radius`` parallel to the façade, 5 m in front of the window.

    Positions below the floor plane (z < 0) are redrawn. The field of view is
    set so the window's projected extent fills 1/margin of the frame.
    """
    if not 0.0 <= radius <= 96.0:
        raise CameraError(f"camera radius must be in [0, 96], got {radius}")
    center = window_bound.center
    ex, ey, normal = window_bound.axes
    disc_center = center + STANDOFF * normal
    pos = None
    for k in range(max_tries):
        u = _draw(rng, f"radius_u{k}", 0.0, 1.0)
        phi = _draw(rng, f"angle{k}", 0.0, 2 * np.pi)
        r = radius * np.sqrt(u)
        p = disc_center + r * (np.cos(phi) * ex + np.sin(phi) * ey)
        if p[2] >= 0.0:
            pos = p
            break
    if pos is None:
        raise CameraError("could not place the camera above the floor plane")
    margin = _draw(rng, "margin", *MARGIN_RANGE)
    corners = window_bound.corners()[:4] if window_bound.size[2] == 0 else window_bound.corners()
    half = margin * required_half_tan(pos, center, corners, aspect)
    vfov = float(np.degrees(2 * np.arctan(half)))
    return CameraPose(pos, center.copy(), vfov, aspect)
