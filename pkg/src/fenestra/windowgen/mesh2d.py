"""Triangulation of planar window regions and placement in 3D."""

from __future__ import annotations

import numpy as np

from ..core.geometry import Mesh, Scope
from .bezier import CurveLoop, polygon_area


def loop_polygon(loop: CurveLoop, per_segment: int = 16) -> np.ndarray:
    """Polyline approximation; straight segments contribute only their start point."""
    from .bezier import bezier_points, is_straight

    out = []
    for seg in loop.segments:
        if is_straight(seg):
            out.append(seg[:1])
        else:
            out.append(bezier_points(seg, np.arange(per_segment) / per_segment))
    pts = np.concatenate(out)
    keep = np.hypot(*(pts - np.roll(pts, 1, axis=0)).T) > 1e-12
    return pts[keep]


def _is_convex(pts: np.ndarray) -> bool:
    e = np.roll(pts, -1, axis=0) - pts
    cross = e[:, 0] * np.roll(e[:, 1], -1) - e[:, 1] * np.roll(e[:, 0], -1)
    return bool(np.all(cross >= -1e-15))


def triangulate_polygon(pts: np.ndarray) -> np.ndarray:
    """Ear-clipping triangulation of a simple CCW polygon; fan for convex input."""
    n = len(pts)
    if n < 3:
        return np.zeros((0, 3), int)
    if _is_convex(pts):
        return np.array([(0, k, k + 1) for k in range(1, n - 1)])
    idx = list(range(n))
    tris = []
    guard = 0
    while len(idx) > 3 and guard < 10 * n * n:
        guard += 1
        m = len(idx)
        for k in range(m):
            a, b, c = idx[k - 1], idx[k], idx[(k + 1) % m]
            pa, pb, pc = pts[a], pts[b], pts[c]
            cross = (pb[0] - pa[0]) * (pc[1] - pa[1]) - (pb[1] - pa[1]) * (pc[0] - pa[0])
            if cross <= 1e-18:
                continue
            others = pts[[i for i in idx if i not in (a, b, c)]]
            if len(others) and np.any(_in_triangle(others, pa, pb, pc)):
                continue
            tris.append((a, b, c))
            idx.pop(k)
            break
        else:
            break  # numerically degenerate remainder
    if len(idx) == 3:
        tris.append(tuple(idx))
    return np.array(tris, int).reshape(-1, 3)


def _in_triangle(p, a, b, c):
    def side(u, v):
        return (v[0] - u[0]) * (p[:, 1] - u[1]) - (v[1] - u[1]) * (p[:, 0] - u[0])

    s1, s2, s3 = side(a, b), side(b, c), side(c, a)
    return (s1 >= 0) & (s2 >= 0) & (s3 >= 0)


def annulus_triangles(outer: np.ndarray, inner: np.ndarray, center) -> tuple[np.ndarray, np.ndarray]:
    """Strip between two CCW rings that are star-shaped about ``center``.

    Returns ``(points, triangles)`` with outer points first.
    """
    c = np.asarray(center, float)
    outer = _densify_outer(outer, inner, c)

    def angles(p):
        return np.arctan2(p[:, 1] - c[1], p[:, 0] - c[0])

    ao, ai = angles(outer), angles(inner)
    so, si = int(np.argmin(ao)), int(np.argmin(ai))
    outer = np.roll(outer, -so, axis=0)
    inner = np.roll(inner, -si, axis=0)
    ao = np.unwrap(np.roll(ao, -so))
    ai = np.unwrap(np.roll(ai, -si))
    no, ni = len(outer), len(inner)
    ao = np.append(ao, ao[0] + 2 * np.pi)
    ai = np.append(ai, ai[0] + 2 * np.pi)
    tris = []
    i = j = 0
    while i < no or j < ni:
        a_o = i % no
        a_i = no + (j % ni)
        if j >= ni or (i < no and ao[i + 1] <= ai[j + 1]):
            tris.append((a_o, (i + 1) % no, a_i))
            i += 1
        else:
            tris.append((a_o, no + (j + 1) % ni, a_i))
            j += 1
    pts = np.concatenate([outer, inner])
    tris = np.array(tris, int)
    # the strip runs counter-clockwise; flip triangles that came out clockwise
    p = pts[tris]
    cross = (p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1]) - (p[:, 1, 1] - p[:, 0, 1]) * (
        p[:, 2, 0] - p[:, 0, 0]
    )
    tris[cross < 0] = tris[cross < 0][:, [0, 2, 1]]
    return pts, tris


def _ray_hits(ring: np.ndarray, c: np.ndarray, dirs: np.ndarray) -> np.ndarray:
    """First crossing of rays from ``c`` with a star-shaped ring."""
    a = ring
    e = np.roll(ring, -1, axis=0) - ring
    ac = a - c
    # solve c + s*dir = a + t*e
    den = dirs[:, None, 0] * e[None, :, 1] - dirs[:, None, 1] * e[None, :, 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        s = (ac[None, :, 0] * e[None, :, 1] - ac[None, :, 1] * e[None, :, 0]) / den
        t = (ac[None, :, 0] * dirs[:, None, 1] - ac[None, :, 1] * dirs[:, None, 0]) / den
    ok = (np.abs(den) > 1e-15) & (t >= -1e-12) & (t <= 1 + 1e-12) & (s > 0)
    s = np.where(ok, s, np.inf)
    return c + s.min(axis=1)[:, None] * dirs


def _densify_outer(outer: np.ndarray, inner: np.ndarray, c: np.ndarray) -> np.ndarray:
    dirs = inner - c
    dirs = dirs / np.linalg.norm(dirs, axis=1, keepdims=True)
    hits = _ray_hits(outer, c, dirs)
    pts = np.concatenate([outer, hits[np.isfinite(hits).all(axis=1)]])
    ang = np.arctan2(pts[:, 1] - c[1], pts[:, 0] - c[0])
    pts = pts[np.argsort(ang, kind="stable")]
    keep = np.hypot(*(pts - np.roll(pts, 1, axis=0)).T) > 1e-12
    return pts[keep]


def rect_ring(lo, hi) -> np.ndarray:
    return np.array([[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]], float)


def place(points2d: np.ndarray, placement: Scope, z: float) -> np.ndarray:
    """Lift façade-plane points (u, v) at outward offset ``z`` into world space."""
    p = np.asarray(points2d, float)
    local = np.column_stack([p[:, 0], p[:, 1], np.full(len(p), z)])
    return placement.point(local)


def planar_mesh(points2d, tris, placement: Scope, z: float, label, material_id="", instance_id=0) -> Mesh:
    return Mesh.clean(place(points2d, placement, z), tris, label, material_id, instance_id)


def loop_mesh(loop: CurveLoop, placement: Scope, z: float, label, material_id="", instance_id=0) -> Mesh:
    pts = loop_polygon(loop)
    if polygon_area(pts) < 0:
        pts = pts[::-1]
    return planar_mesh(pts, triangulate_polygon(pts), placement, z, label, material_id, instance_id)


def strip_mesh(ring: np.ndarray, placement: Scope, z0: float, z1: float, label, material_id="", instance_id=0) -> Mesh:
    """Side wall swept from a closed 2D ring between two outward offsets."""
    n = len(ring)
    v = np.concatenate([place(ring, placement, z0), place(ring, placement, z1)])
    k = np.arange(n)
    k1 = (k + 1) % n
    tris = np.concatenate([np.stack([k, k1, n + k1], 1), np.stack([k, n + k1, n + k], 1)])
    return Mesh.clean(v, tris, label, material_id, instance_id)
