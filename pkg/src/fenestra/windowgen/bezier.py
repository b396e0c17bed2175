"""Closed loops of planar cubic Bézier segments."""

from __future__ import annotations

import numpy as np
from scipy.spatial import cKDTree

CLOSE_TOL = 1e-9
# circle quarter-arc control distance, as a fraction of the radius
KAPPA = 4.0 * (np.sqrt(2.0) - 1.0) / 3.0

_GL_X, _GL_W = np.polynomial.legendre.leggauss(6)
_GL_T = 0.5 * (_GL_X + 1.0)
_GL_W = 0.5 * _GL_W


class CurveError(ValueError):
    pass


def bezier_points(ctrl: np.ndarray, t) -> np.ndarray:
    """Evaluate cubic segments ``ctrl`` (..., 4, 2) at parameters ``t`` (m,) -> (..., m, 2)."""
    t = np.asarray(t, dtype=float)[:, None]
    s = 1.0 - t
    c = np.asarray(ctrl, dtype=float)
    return (
        (s**3) * c[..., None, 0, :]
        + (3 * s * s * t) * c[..., None, 1, :]
        + (3 * s * t * t) * c[..., None, 2, :]
        + (t**3) * c[..., None, 3, :]
    )


def bezier_derivative(ctrl: np.ndarray, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)[:, None]
    s = 1.0 - t
    c = np.asarray(ctrl, dtype=float)
    d = np.diff(c, axis=-2)
    return 3 * (
        (s * s) * d[..., None, 0, :] + (2 * s * t) * d[..., None, 1, :] + (t * t) * d[..., None, 2, :]
    )


def bezier_second(ctrl: np.ndarray, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)[:, None]
    c = np.asarray(ctrl, dtype=float)
    dd = np.diff(c, n=2, axis=-2)
    return 6 * ((1 - t) * dd[..., None, 0, :] + t * dd[..., None, 1, :])


def line_segment(p0, p1) -> np.ndarray:
    p0, p1 = np.asarray(p0, float), np.asarray(p1, float)
    return np.stack([p0, p0 + (p1 - p0) / 3, p0 + 2 * (p1 - p0) / 3, p1])


def elliptic_quarter(center, a0: float, rx: float, ry: float) -> np.ndarray:
    """Quarter ellipse starting at angle ``a0`` (multiple of pi/2), counter-clockwise."""
    c = np.asarray(center, float)
    u = np.array([np.cos(a0), np.sin(a0)])
    v = np.array([-np.sin(a0), np.cos(a0)])
    scale = np.array([rx, ry])
    p0 = c + scale * u
    p3 = c + scale * v
    return np.stack([p0, p0 + KAPPA * scale * v, p3 + KAPPA * scale * u, p3])


def split_segment(ctrl: np.ndarray, t: float) -> tuple[np.ndarray, np.ndarray]:
    """De Casteljau split of one cubic at ``t``."""
    p = np.asarray(ctrl, float)
    a = p[:-1] + t * (p[1:] - p[:-1])
    b = a[:-1] + t * (a[1:] - a[:-1])
    m = b[0] + t * (b[1] - b[0])
    return np.stack([p[0], a[0], b[0], m]), np.stack([m, b[1], a[2], p[3]])


def sub_segment(ctrl: np.ndarray, t0: float, t1: float) -> np.ndarray:
    if t0 <= 0 and t1 >= 1:
        return np.asarray(ctrl, float)
    right = split_segment(ctrl, t0)[1] if t0 > 0 else np.asarray(ctrl, float)
    if t1 >= 1:
        return right
    return split_segment(right, (t1 - t0) / (1 - t0))[0]


def is_straight(ctrl: np.ndarray, rel_tol: float = 1e-12) -> bool:
    p0, p3 = ctrl[0], ctrl[3]
    chord = p3 - p0
    L = np.hypot(*chord)
    if L == 0:
        return False
    n = np.array([-chord[1], chord[0]]) / L
    dev = np.abs((ctrl[1:3] - p0) @ n)
    return bool(np.all(dev <= rel_tol * max(L, 1.0)))


class CurveLoop:
    """Closed, counter-clockwise chain of cubic Bézier segments in the plane."""

    def __init__(self, segments, check: bool = True):
        seg = np.array(segments, dtype=float).reshape(-1, 4, 2)
        if len(seg) == 0:
            raise CurveError("a curve loop needs at least one segment")
        nxt = np.roll(seg[:, 0], -1, axis=0)
        gap = np.max(np.hypot(*(seg[:, 3] - nxt).T))
        if gap > CLOSE_TOL:
            raise CurveError(f"loop is not closed (endpoint gap {gap:.3g} m)")
        # snap endpoints so the chain is exactly closed
        seg[:, 3] = nxt
        seg.setflags(write=False)
        self.segments = seg
        if check and not self.area > 0:
            raise CurveError("loop must be counter-clockwise with positive area")

    def __len__(self) -> int:
        return len(self.segments)

    def __repr__(self) -> str:
        lo, hi = self.bounds()
        return f"CurveLoop({len(self)} segments, bbox={lo.round(4).tolist()}..{hi.round(4).tolist()})"

    @property
    def signed_area(self) -> float:
        # Green's theorem with 6-point Gauss-Legendre: exact for the degree-5 integrand
        p = bezier_points(self.segments, _GL_T)
        dp = bezier_derivative(self.segments, _GL_T)
        integrand = p[..., 0] * dp[..., 1] - p[..., 1] * dp[..., 0]
        return float(0.5 * np.sum(integrand * _GL_W))

    @property
    def area(self) -> float:
        return self.signed_area

    def perimeter(self, n: int = 64) -> float:
        pts = self.sample(n)
        return float(np.sum(np.hypot(*(np.roll(pts, -1, axis=0) - pts).T)))

    def sample(self, per_segment: int = 64) -> np.ndarray:
        """Polyline vertices: ``per_segment`` points per segment, t in [0, 1)."""
        t = np.arange(per_segment) / per_segment
        return bezier_points(self.segments, t).reshape(-1, 2)

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        pts = self.sample(32)
        return pts.min(axis=0), pts.max(axis=0)

    def centroid(self) -> np.ndarray:
        p = bezier_points(self.segments, _GL_T)
        dp = bezier_derivative(self.segments, _GL_T)
        cross = p[..., 0] * dp[..., 1] - p[..., 1] * dp[..., 0]
        a = 0.5 * np.sum(cross * _GL_W)
        # centroid moments are degree 8; use a denser rule
        x, w = np.polynomial.legendre.leggauss(8)
        t, w = 0.5 * (x + 1), 0.5 * w
        p = bezier_points(self.segments, t)
        dp = bezier_derivative(self.segments, t)
        cx = np.sum(0.5 * p[..., 0] ** 2 * dp[..., 1] * w)
        cy = -np.sum(0.5 * p[..., 1] ** 2 * dp[..., 0] * w)
        return np.array([cx, cy]) / a

    def transformed(self, scale=1.0, offset=(0.0, 0.0)) -> "CurveLoop":
        return CurveLoop(self.segments * scale + np.asarray(offset, float))

    def is_simple(self, per_segment: int = 64) -> bool:
        return polyline_is_simple(self.sample(per_segment))

    def contains(self, points, per_segment: int = 64) -> np.ndarray:
        return points_in_polygon(points, self.sample(per_segment))

    def distance(self, points) -> np.ndarray:
        return loop_distance(self, points)


# ---------------------------------------------------------------- polylines

def polygon_area(pts: np.ndarray) -> float:
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def points_in_polygon(points, poly: np.ndarray) -> np.ndarray:
    """Even-odd test of ``points`` (m, 2) against a closed polygon (n, 2)."""
    pts = np.atleast_2d(np.asarray(points, float))
    a = poly
    b = np.roll(poly, -1, axis=0)
    px, py = pts[:, 0:1], pts[:, 1:2]
    ay, by = a[None, :, 1], b[None, :, 1]
    straddle = (ay > py) != (by > py)
    with np.errstate(divide="ignore", invalid="ignore"):
        xcross = a[None, :, 0] + (py - ay) * (b[None, :, 0] - a[None, :, 0]) / (by - ay)
    hits = straddle & (px < xcross)
    return np.count_nonzero(hits, axis=1) % 2 == 1


def segment_intersections(pts: np.ndarray, closed: bool = True, chunk: int = 512):
    """All proper crossings between non-adjacent edges of a polyline.

    Returns arrays ``(i, j, s, t)`` with ``i < j``: edge i at parameter s meets
    edge j at parameter t.
    """
    p = np.asarray(pts, float)
    q = np.roll(p, -1, axis=0) if closed else p[1:]
    if not closed:
        p = p[:-1]
    n = len(p)
    lo = np.minimum(p, q)
    hi = np.maximum(p, q)
    d = q - p
    out_i, out_j, out_s, out_t = [], [], [], []
    for start in range(0, n, chunk):
        ii = np.arange(start, min(n, start + chunk))
        ov = (
            (lo[None, :, 0] <= hi[ii, None, 0])
            & (hi[None, :, 0] >= lo[ii, None, 0])
            & (lo[None, :, 1] <= hi[ii, None, 1])
            & (hi[None, :, 1] >= lo[ii, None, 1])
        )
        jj = np.arange(n)[None, :]
        ov &= jj > ii[:, None] + 1
        if closed:
            ov &= ~((ii[:, None] == 0) & (jj == n - 1))
        a_idx, b_idx = np.nonzero(ov)
        if not len(a_idx):
            continue
        i = ii[a_idx]
        j = b_idx
        r, sdir = d[i], d[j]
        denom = r[:, 0] * sdir[:, 1] - r[:, 1] * sdir[:, 0]
        qp = p[j] - p[i]
        with np.errstate(divide="ignore", invalid="ignore"):
            s = (qp[:, 0] * sdir[:, 1] - qp[:, 1] * sdir[:, 0]) / denom
            t = (qp[:, 0] * r[:, 1] - qp[:, 1] * r[:, 0]) / denom
        ok = (denom != 0) & (s >= 0) & (s < 1) & (t >= 0) & (t < 1)
        out_i.append(i[ok])
        out_j.append(j[ok])
        out_s.append(s[ok])
        out_t.append(t[ok])
    if not out_i:
        e = np.zeros(0)
        return e.astype(int), e.astype(int), e, e
    return (np.concatenate(out_i), np.concatenate(out_j), np.concatenate(out_s), np.concatenate(out_t))


def polyline_is_simple(pts: np.ndarray) -> bool:
    i, _, _, _ = segment_intersections(pts, closed=True)
    return len(i) == 0


# ---------------------------------------------------------------- distance

def _closest_on_segment(ctrl: np.ndarray, q: np.ndarray, t0: np.ndarray, iters: int = 4):
    """Newton refinement of the closest parameter on per-query segments."""
    p0, p1, p2, p3 = (ctrl[:, i] for i in range(4))
    d0, d1_, d2 = 3 * (p1 - p0), 3 * (p2 - p1), 3 * (p3 - p2)
    e0, e1 = 2 * (d1_ - d0), 2 * (d2 - d1_)
    t = t0.copy()

    def point(t):
        s = (1 - t)[:, None]
        tt = t[:, None]
        return s**3 * p0 + 3 * s * s * tt * p1 + 3 * s * tt * tt * p2 + tt**3 * p3

    for _ in range(iters):
        s = (1 - t)[:, None]
        tt = t[:, None]
        diff = point(t) - q
        g1 = s * s * d0 + 2 * s * tt * d1_ + tt * tt * d2
        g2 = s * e0 + tt * e1
        f = np.einsum("ij,ij->i", diff, g1)
        fp = np.einsum("ij,ij->i", g1, g1) + np.einsum("ij,ij->i", diff, g2)
        step = np.where(np.abs(fp) > 1e-300, f / np.where(fp == 0, 1, fp), 0.0)
        t = np.clip(t - step, 0.0, 1.0)
    return t, np.linalg.norm(point(t) - q, axis=1)


def _eval_each(ctrl: np.ndarray, t: np.ndarray) -> np.ndarray:
    s = 1 - t
    w = np.stack([s**3, 3 * s * s * t, 3 * s * t * t, t**3], axis=1)
    return np.einsum("nk,nkd->nd", w, ctrl)


def _eval_each_deriv(ctrl: np.ndarray, t: np.ndarray, order: int) -> np.ndarray:
    s = 1 - t
    if order == 1:
        d = np.diff(ctrl, axis=1)
        w = np.stack([s * s, 2 * s * t, t * t], axis=1)
        return 3 * np.einsum("nk,nkd->nd", w, d)
    dd = np.diff(ctrl, n=2, axis=1)
    w = np.stack([s, t], axis=1)
    return 6 * np.einsum("nk,nkd->nd", w, dd)


class _DistanceIndex:
    def __init__(self, loop: CurveLoop, per_segment: int = 48, k: int = 3):
        self.loop = loop
        self.per = per_segment
        self.k = k
        self.tree = cKDTree(loop.sample(per_segment))

    def __call__(self, points) -> np.ndarray:
        q = np.atleast_2d(np.asarray(points, float))
        k = min(self.k, self.tree.n)
        _, idx = self.tree.query(q, k=k)
        idx = idx.reshape(len(q), -1)
        best = np.full(len(q), np.inf)
        n_seg = len(self.loop.segments)
        for col in range(idx.shape[1]):
            flat = idx[:, col]
            seg = flat // self.per
            t0 = (flat % self.per) / self.per
            _, dist = _closest_on_segment(self.loop.segments[seg], q, t0)
            best = np.minimum(best, dist)
            # a sample at t=0 is also the end of the previous segment
            at0 = np.flatnonzero(flat % self.per == 0)
            if len(at0):
                prev = (seg[at0] - 1) % n_seg
                _, dist = _closest_on_segment(self.loop.segments[prev], q[at0], np.ones(len(at0)))
                best[at0] = np.minimum(best[at0], dist)
        return best


def loop_distance(loop: CurveLoop, points) -> np.ndarray:
    """Euclidean distance from each point to the loop boundary."""
    return _DistanceIndex(loop)(points)


def distance_index(loop: CurveLoop) -> _DistanceIndex:
    return _DistanceIndex(loop)
