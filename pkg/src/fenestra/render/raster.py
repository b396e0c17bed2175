"""Deterministic z-buffer rasterizer and a ray-casting oracle.

Conventions: pixel (x, y) has its center at (x + 0.5, y + 0.5) with y
pointing down; vertices are snapped to 1/16 pixel and coverage uses integer
edge functions with the top-left fill rule, so shared edges are covered
exactly once. Depth is camera z-depth (distance along the view axis) in
meters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core.labels import UNLABELED
from ..scenegen.camera import CameraPose

NEAR = 0.1
SUBPIXEL = 16
GUARD = 2.0  # guard band, in multiples of the half screen
CHUNK = 1 << 21  # candidate pixels per rasterization chunk


@dataclass(frozen=True, eq=False)
class PassBundle:
    width: int
    height: int
    color: np.ndarray  # (H, W, 3) float32 in [0, 1]
    label: np.ndarray  # (H, W) uint8
    depth: np.ndarray  # (H, W) float64, inf on background
    normal: np.ndarray  # (H, W, 3) float32, zero on background
    edge: np.ndarray  # (H, W) uint8
    instance: np.ndarray  # (H, W) int32, -1 on background

    def __post_init__(self):
        shape = (self.height, self.width)
        for name in ("label", "depth", "edge", "instance"):
            if getattr(self, name).shape != shape:
                raise ValueError(f"{name} buffer has shape {getattr(self, name).shape}, expected {shape}")
        for name in ("color", "normal"):
            if getattr(self, name).shape != shape + (3,):
                raise ValueError(f"{name} buffer has wrong shape")


@dataclass(frozen=True)
class TriangleSoup:
    verts: np.ndarray  # (T, 3, 3) world
    label: np.ndarray  # (T,) label index
    mesh: np.ndarray  # (T,) mesh index
    alpha: np.ndarray  # (T,)
    albedo: np.ndarray  # (T, 3)


def gather(scene) -> TriangleSoup:
    meshes = scene.meshes
    if not meshes:
        z = np.zeros(0)
        return TriangleSoup(np.zeros((0, 3, 3)), z.astype(np.int64), z.astype(np.int64), z, np.zeros((0, 3)))
    verts = np.concatenate([m.vertices[m.triangles] for m in meshes]).reshape(-1, 3, 3)
    counts = np.array([m.n_triangles for m in meshes])
    mats = scene.materials
    return TriangleSoup(
        verts,
        np.repeat([m.label.index for m in meshes], counts),
        np.repeat(np.arange(len(meshes)), counts),
        np.repeat([mats.alpha_of(m) for m in meshes], counts).astype(float),
        np.repeat(np.array([mats.color_of(m) for m in meshes], float).reshape(-1, 3), counts, axis=0),
    )


def _clip(tris: np.ndarray, src: np.ndarray, s: np.ndarray):
    """Clip camera-space triangles to the half-space ``s >= 0`` (``s`` per vertex)."""
    inside = s >= 0
    n_in = inside.sum(axis=1)
    keep = [tris[n_in == 3]]
    keep_src = [src[n_in == 3]]

    def lerp(p, q, sp, sq):
        t = (sp / (sp - sq))[:, None]
        return p + t * (q - p)

    for count in (1, 2):
        sel = np.flatnonzero(n_in == count)
        if not len(sel):
            continue
        t, ss, ins = tris[sel], s[sel], inside[sel]
        # roll so that the lone inside (count 1) or lone outside (count 2) vertex comes first
        lone = np.argmax(ins if count == 1 else ~ins, axis=1)
        order = (lone[:, None] + np.arange(3)) % 3
        t = np.take_along_axis(t, order[:, :, None], axis=1)
        ss = np.take_along_axis(ss, order, axis=1)
        a, b, c = t[:, 0], t[:, 1], t[:, 2]
        sa, sb, sc = ss[:, 0], ss[:, 1], ss[:, 2]
        if count == 1:
            ab, ac = lerp(a, b, sa, sb), lerp(a, c, sa, sc)
            keep.append(np.stack([a, ab, ac], axis=1))
            keep_src.append(src[sel])
        else:
            # a is outside, b and c inside: quad (ab, b, c, ca)
            ab, ca = lerp(b, a, sb, sa), lerp(c, a, sc, sa)
            keep.append(np.stack([ab, b, c], axis=1))
            keep.append(np.stack([ab, c, ca], axis=1))
            keep_src.extend([src[sel], src[sel]])
    return np.concatenate(keep), np.concatenate(keep_src)


def _camera_setup(camera: CameraPose, width: int, height: int):
    if width < 16 or height < 16:
        raise ValueError("image must be at least 16x16 pixels")
    camera.validate()
    return camera.basis(), camera.focal_px(height)


def _fragments(xy: np.ndarray, inv_z: np.ndarray, width: int, height: int):
    """Covered pixels of screen triangles.

    ``xy``: (T, 3, 2) integer sub-pixel coordinates; returns (pixel, depth, tri).
    """
    x, y = xy[..., 0], xy[..., 1]
    area = (x[:, 1] - x[:, 0]) * (y[:, 2] - y[:, 0]) - (y[:, 1] - y[:, 0]) * (x[:, 2] - x[:, 0])
    flip = area < 0
    x[flip, 1], x[flip, 2] = x[flip, 2].copy(), x[flip, 1].copy()
    y[flip, 1], y[flip, 2] = y[flip, 2].copy(), y[flip, 1].copy()
    inv_z = inv_z.copy()
    inv_z[flip, 1], inv_z[flip, 2] = inv_z[flip, 2].copy(), inv_z[flip, 1].copy()
    area = np.abs(area)
    half = SUBPIXEL // 2
    x0 = np.maximum(0, -((half - x.min(axis=1)) // SUBPIXEL))
    x1 = np.minimum(width - 1, (x.max(axis=1) - half) // SUBPIXEL)
    y0 = np.maximum(0, -((half - y.min(axis=1)) // SUBPIXEL))
    y1 = np.minimum(height - 1, (y.max(axis=1) - half) // SUBPIXEL)
    nx = np.maximum(0, x1 - x0 + 1)
    ny = np.maximum(0, y1 - y0 + 1)
    counts = np.where(area > 0, nx * ny, 0)
    live = np.flatnonzero(counts)
    # edge i runs from vertex i to vertex i+1; top-left edges own their boundary pixels
    xa, ya = x, y
    xb, yb = np.roll(x, -1, axis=1), np.roll(y, -1, axis=1)
    top_left = ((ya == yb) & (xb > xa)) | (yb < ya)
    # edge function e_i(cx, cy) = A_i cx + B_i cy + C_i, with the fill-rule bias folded into C
    ea = -(yb - ya)
    eb = xb - xa
    ec = (yb - ya) * xa - (xb - xa) * ya
    bias = (~top_left).astype(np.int64)

    out_pix, out_z, out_tri = [], [], []
    cum = np.cumsum(counts[live])
    start = 0
    while start < len(live):
        base = cum[start - 1] if start else 0
        stop = int(np.searchsorted(cum, base + CHUNK, side="right"))
        stop = max(stop, start + 1)
        ids = live[start:stop]
        c = counts[ids]
        rep = np.repeat(np.arange(len(ids)), c)
        off = np.arange(int(c.sum())) - np.repeat(np.cumsum(c) - c, c)
        t = ids[rep]
        w = nx[t]
        px = x0[t] + off % w
        py = y0[t] + off // w
        cx = px * SUBPIXEL + half
        cy = py * SUBPIXEL + half
        e = [None, None, None]
        for i in range(3):
            ei = ea[t, i] * cx + eb[t, i] * cy + ec[t, i]
            ok = ei >= bias[t, i]
            t, px, py, cx, cy, ei = t[ok], px[ok], py[ok], cx[ok], cy[ok], ei[ok]
            e = [None if v is None else v[ok] for v in e]
            e[i] = ei
        # barycentric weight of vertex k is the edge opposite to it
        ar = area[t]
        iz = e[1] / ar * inv_z[t, 0] + e[2] / ar * inv_z[t, 1] + e[0] / ar * inv_z[t, 2]
        out_pix.append(py * width + px)
        out_z.append(1.0 / iz)
        out_tri.append(t)
        start = stop
    if not out_pix:
        return np.zeros(0, np.int64), np.zeros(0), np.zeros(0, np.int64)
    return np.concatenate(out_pix), np.concatenate(out_z), np.concatenate(out_tri)


def _resolve(n_pix: int, pix, z, tri, sentinel: int):
    """Front-most fragment per pixel; ties go to the lowest triangle index."""
    zbuf = np.full(n_pix, np.inf)
    np.minimum.at(zbuf, pix, z)
    win = z == zbuf[pix]
    tbuf = np.full(n_pix, sentinel, np.int64)
    np.minimum.at(tbuf, pix[win], tri[win])
    return zbuf, tbuf


def shade(normals, points, albedo, lights, albedo_only: bool) -> np.ndarray:
    """Lambert sun + ambient sky + interior point lights; ``normals`` face the viewer."""
    if albedo_only:
        return albedo.copy()
    light = np.full(len(normals), lights.sky_intensity)
    light += lights.sun_intensity * np.clip(normals @ lights.sun_direction, 0.0, None)
    for pos, strength in lights.interior:
        d = np.asarray(pos) - points
        dist2 = np.einsum("ij,ij->i", d, d)
        cos = np.einsum("ij,ij->i", normals, d) / np.sqrt(np.maximum(dist2, 1e-12))
        light += strength * np.clip(cos, 0.0, None) / (1.0 + dist2)
    return np.clip(albedo * light[:, None], 0.0, 1.0)


def rasterize(scene, width: int, height: int) -> PassBundle:
    """Render the color, label, depth, normal and edge passes of ``scene``."""
    camera = scene.camera
    basis, f = _camera_setup(camera, width, height)
    soup = gather(scene)
    n_pix = width * height
    cam = (soup.verts - camera.position) @ basis.T
    src = np.arange(len(cam))
    tx = GUARD * (width / 2) / f
    ty = GUARD * (height / 2) / f
    cam, src = _clip(cam, src, cam[..., 2] - NEAR)
    for sx, sy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        if not len(cam):
            break
        s = cam[..., 2] * (tx if sx else ty) - (sx * cam[..., 0] + sy * cam[..., 1])
        cam, src = _clip(cam, src, s)

    if len(cam):
        z = cam[..., 2]
        sx = width / 2 + f * cam[..., 0] / z
        sy = height / 2 - f * cam[..., 1] / z
        xy = np.stack([np.rint(sx * SUBPIXEL), np.rint(sy * SUBPIXEL)], axis=-1).astype(np.int64)
        pix, depth, ctri = _fragments(xy, 1.0 / z, width, height)
        tri = src[ctri]
    else:
        pix, depth, tri = np.zeros(0, np.int64), np.zeros(0), np.zeros(0, np.int64)

    sentinel = len(soup.verts)
    zall, front = _resolve(n_pix, pix, depth, tri, sentinel)
    opaque = soup.alpha[tri] >= 1.0 if len(tri) else np.zeros(0, bool)
    zop, back = _resolve(n_pix, pix[opaque], depth[opaque], tri[opaque], sentinel)

    hit = front < sentinel
    label = np.full(n_pix, UNLABELED.index, np.uint8)
    instance = np.full(n_pix, -1, np.int32)
    normal = np.zeros((n_pix, 3), np.float32)
    sky = np.asarray(scene.lights.sky_color, float)
    color = np.tile(sky, (n_pix, 1))

    # per-triangle attributes for the triangles that are visible anywhere
    used = np.unique(np.concatenate([front[hit], back[back < sentinel]]))
    v = soup.verts[used]
    n = np.cross(v[:, 1] - v[:, 0], v[:, 2] - v[:, 0])
    n /= np.linalg.norm(n, axis=1, keepdims=True)
    centroid = v.mean(axis=1)
    facing = np.einsum("ij,ij->i", n, centroid - camera.position) > 0
    n[facing] *= -1
    tri_color = shade(n, centroid, soup.albedo[used], scene.lights, scene.materials.albedo_only)
    lookup = np.full(sentinel + 1, -1, np.int64)
    lookup[used] = np.arange(len(used))

    fr = front[hit]
    label[hit] = soup.label[fr]
    instance[hit] = scene_instance_ids(scene)[soup.mesh[fr]]
    normal[hit] = n[lookup[fr]]
    behind = back < sentinel
    color[behind] = tri_color[lookup[back[behind]]]
    glass = np.zeros(n_pix, bool)
    glass[hit] = soup.alpha[fr] < 1.0
    if glass.any():
        a = soup.alpha[front[glass]][:, None]
        color[glass] = a * tri_color[lookup[front[glass]]] + (1 - a) * color[glass]

    lab2 = label.reshape(height, width)
    return PassBundle(
        width,
        height,
        color.reshape(height, width, 3).astype(np.float32),
        lab2,
        zall.reshape(height, width),
        normal.reshape(height, width, 3),
        edge_pass(lab2),
        instance.reshape(height, width),
    )


def scene_instance_ids(scene) -> np.ndarray:
    return np.array([m.instance_id for m in scene.meshes], np.int32)


def edge_pass(labels: np.ndarray) -> np.ndarray:
    """1 where any 4-neighbor carries a different label."""
    lab = np.asarray(labels)
    e = np.zeros(lab.shape, bool)
    dx = lab[:, 1:] != lab[:, :-1]
    dy = lab[1:, :] != lab[:-1, :]
    e[:, 1:] |= dx
    e[:, :-1] |= dx
    e[1:, :] |= dy
    e[:-1, :] |= dy
    return e.astype(np.uint8)


def raycast(scene, px, py, width: int, height: int, chunk: int = 1 << 22):
    """Nearest hit along pixel-center rays, by brute-force ray/triangle tests.

    Returns ``(labels, depths)`` arrays; misses give (unlabeled, inf).
    """
    camera = scene.camera
    _camera_setup(camera, width, height)
    px = np.atleast_1d(np.asarray(px))
    py = np.atleast_1d(np.asarray(py))
    if np.any((px < 0) | (px >= width) | (py < 0) | (py >= height)):
        raise ValueError("pixel out of bounds")
    soup = gather(scene)
    d = camera.pixel_rays(px, py, width, height)  # view-axis component 1 => t is z-depth
    o = camera.position
    best_t = np.full(len(d), np.inf)
    best_i = np.full(len(d), len(soup.verts), np.int64)
    a = soup.verts[:, 0]
    e1 = soup.verts[:, 1] - a
    e2 = soup.verts[:, 2] - a
    step = max(1, chunk // max(1, len(d)))
    for s0 in range(0, len(a), step):
        A, E1, E2 = a[s0 : s0 + step], e1[s0 : s0 + step], e2[s0 : s0 + step]
        p = np.cross(d[:, None, :], E2[None])
        det = np.einsum("rtk,tk->rt", p, E1)
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = 1.0 / det
            tv = o - A
            u = np.einsum("rtk,tk->rt", p, tv) * inv
            q = np.cross(tv, E1)
            v = np.einsum("rk,tk->rt", d, q) * inv
            t = np.einsum("tk,tk->t", q, E2)[None, :] * inv
        ok = (np.abs(det) > 1e-14) & (u >= 0) & (v >= 0) & (u + v <= 1) & (t >= NEAR)
        t = np.where(ok, t, np.inf)
        k = np.argmin(t, axis=1)
        tk = t[np.arange(len(d)), k]
        better = tk < best_t
        best_t[better] = tk[better]
        best_i[better] = s0 + k[better]
    labels = np.full(len(d), UNLABELED.index, np.int64)
    hit = np.isfinite(best_t)
    labels[hit] = soup.label[best_i[hit]]
    return labels, best_t


def raycast_label(scene, pixel, width: int, height: int) -> tuple[int, float]:
    """Label index and z-depth of the first surface through ``pixel`` = (x, y)."""
    lab, dep = raycast(scene, [pixel[0]], [pixel[1]], width, height)
    return int(lab[0]), float(dep[0])
