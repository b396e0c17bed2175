"""Profile sweeps along window loops."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..core.geometry import Mesh, Scope
from ..core.labels import WINDOW_FRAME
from .bezier import CurveLoop, bezier_derivative, bezier_points, polygon_area, segment_intersections


class DegenerateProfileError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Profile:
    """Closed cross-section in (inward, outward) meters relative to the swept loop.

    ``points[:, 0]`` runs inward across the frame, ``points[:, 1]`` along the
    façade's outward normal.
    """

    points: np.ndarray
    name: str = ""

    def __post_init__(self):
        p = np.asarray(self.points, float).reshape(-1, 2)
        if len(p) < 2:
            raise DegenerateProfileError("a profile needs at least 2 points")
        p.setflags(write=False)
        object.__setattr__(self, "points", p)

    @property
    def depth(self) -> float:
        return float(np.ptp(self.points[:, 1]))

    @property
    def width(self) -> float:
        return float(np.ptp(self.points[:, 0]))

    @property
    def area(self) -> float:
        return abs(polygon_area(self.points))

    def scaled(self, width: float | None = None, depth: float | None = None) -> "Profile":
        p = self.points - self.points.min(axis=0)
        sx = 1.0 if width is None or self.width == 0 else width / self.width
        sy = 1.0 if depth is None or self.depth == 0 else depth / self.depth
        return Profile(p * [sx, sy], self.name)

    def shifted(self, du: float = 0.0, dw: float = 0.0) -> "Profile":
        return Profile(self.points + [du, dw], self.name)


def load_profile(path) -> Profile:
    """Read a ``.prof`` file: one ``x y`` pair per line, ``#`` comments."""
    pts = []
    path = Path(path)
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'x y', got {line!r}")
            pts.append((float(parts[0]), float(parts[1])))
    return Profile(np.array(pts), path.stem)


def save_profile(profile: Profile, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for x, y in profile.points:
            f.write(f"{x:.6g} {y:.6g}\n")


def load_profile_hierarchy(root) -> dict[str, dict[str, list[Profile]]]:
    """``root/<family>/<role>[_variant].prof`` -> {family: {role: [profiles]}}."""
    tree: dict[str, dict[str, list[Profile]]] = {}
    for fam in sorted(p for p in Path(root).iterdir() if p.is_dir()):
        roles: dict[str, list[Profile]] = {}
        for f in sorted(fam.glob("*.prof")):
            role = f.stem.split("_", 1)[0]
            roles.setdefault(role, []).append(load_profile(f))
        if roles:
            tree[fam.name] = roles
    return tree


def loop_frames(loop: CurveLoop, samples_per_segment: int):
    """Sample points, unit tangents and miter scales along a loop.

    Joints take the bisector of the incoming and outgoing tangents; the miter
    scale ``1 / cos(half turn)`` keeps the swept width constant at corners.
    """
    k = samples_per_segment
    t = np.arange(k) / k
    segs = loop.segments
    pts = bezier_points(segs, t).reshape(-1, 2)
    d = bezier_derivative(segs, t)
    d = d / np.linalg.norm(d, axis=-1, keepdims=True)
    t_in = d.copy()
    end = bezier_derivative(segs, np.array([1.0]))[:, 0]
    end = end / np.linalg.norm(end, axis=-1, keepdims=True)
    t_in[:, 0] = np.roll(end, 1, axis=0)
    t_in = t_in.reshape(-1, 2)
    t_out = d.reshape(-1, 2)
    tan = t_in + t_out
    norm = np.linalg.norm(tan, axis=1, keepdims=True)
    tan = np.where(norm > 1e-9, tan / np.where(norm == 0, 1, norm), t_out)
    cos_half = np.clip(np.sum(tan * t_out, axis=1), 0.2, 1.0)
    return pts, tan, 1.0 / cos_half


def rotation_minimizing_frames(points: np.ndarray, tangents: np.ndarray, r0: np.ndarray, closed=True):
    """Double-reflection frames along a 3D polyline; closure twist is spread evenly."""
    n = len(points)
    r = np.empty_like(points)
    r[0] = r0 - tangents[0] * (r0 @ tangents[0])
    r[0] /= np.linalg.norm(r[0])
    rng = range(n) if closed else range(n - 1)
    out = r.copy()
    cur = r[0]
    for i in rng:
        j = (i + 1) % n
        v1 = points[j] - points[i]
        c1 = v1 @ v1
        if c1 < 1e-30:
            cur_next = cur
        else:
            rl = cur - (2 / c1) * (v1 @ cur) * v1
            tl = tangents[i] - (2 / c1) * (v1 @ tangents[i]) * v1
            v2 = tangents[j] - tl
            c2 = v2 @ v2
            cur_next = rl if c2 < 1e-30 else rl - (2 / c2) * (v2 @ rl) * v2
        if j == 0:
            cur = cur_next
            break
        out[j] = cur_next
        cur = cur_next
    if closed:
        # angle between the transported frame and the start frame, about t0
        a = np.arctan2(np.cross(out[0], cur) @ tangents[0], out[0] @ cur)
        phi = -a * np.arange(n) / n
        b = np.cross(tangents, out)
        out = np.cos(phi)[:, None] * out + np.sin(phi)[:, None] * b
    return out


def extrude_profile(
    loop: CurveLoop,
    profile: Profile,
    samples_per_segment: int = 8,
    placement: Scope | None = None,
    z: float = 0.0,
    label=WINDOW_FRAME,
    material_id: str = "",
    instance_id: int = 0,
) -> Mesh:
    """Watertight tube sweeping the closed ``profile`` around ``loop``.

    The loop lies in the placement's local xy plane at outward offset ``z``.
    Triangle count is ``2 * len(loop) * samples_per_segment * len(profile)``.
    """
    if samples_per_segment < 2:
        raise ValueError("samples_per_segment must be >= 2")
    prof = profile.points
    if len(prof) < 3 or profile.area <= 1e-12:
        raise DegenerateProfileError("profile encloses no area")
    if polygon_area(prof) < 0:
        prof = prof[::-1]
    if len(segment_intersections(prof)[0]):
        raise DegenerateProfileError("profile is self-intersecting")
    if placement is None:
        placement = Scope(np.zeros(3), np.eye(3), np.zeros(3))
    pts2, tan2, miter = loop_frames(loop, samples_per_segment)
    n = len(pts2)
    ax = placement.axes
    centers = placement.point(np.column_stack([pts2, np.full(n, z)]))
    tangents = np.column_stack([tan2, np.zeros(n)]) @ ax
    inward0 = np.array([-tan2[0, 1], tan2[0, 0], 0.0]) @ ax
    normals = rotation_minimizing_frames(centers, tangents, inward0)
    binormals = np.cross(tangents, normals)
    u = prof[:, 0]
    w = prof[:, 1]
    verts = (
        centers[:, None, :]
        + (u[None, :, None] * miter[:, None, None]) * normals[:, None, :]
        + w[None, :, None] * binormals[:, None, :]
    ).reshape(-1, 3)
    m = len(prof)
    i = np.arange(n)[:, None]
    j = np.arange(m)[None, :]
    a = i * m + j
    b = ((i + 1) % n) * m + j
    c = ((i + 1) % n) * m + (j + 1) % m
    d = i * m + (j + 1) % m
    tris = np.concatenate([np.stack([a, d, c], -1).reshape(-1, 3), np.stack([a, c, b], -1).reshape(-1, 3)])
    return Mesh(verts, tris, label, material_id, instance_id)
