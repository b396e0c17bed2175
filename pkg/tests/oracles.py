"""Independent reference computations used by the tests."""

import numpy as np
from scipy.spatial import cKDTree

from fenestra.windowgen import CurveLoop


def random_loop(rng: np.random.Generator, n: int | None = None) -> CurveLoop:
    """Star-shaped closed Catmull-Rom loop (CCW, simple by construction)."""
    n = n or int(rng.integers(5, 11))
    th = np.linspace(0, 2 * np.pi, n, endpoint=False) + rng.uniform(-0.2, 0.2, n) * 2 * np.pi / n
    r = rng.uniform(0.5, 1.5, n)
    p = np.stack([r * np.cos(th), r * np.sin(th)], 1)
    segs = []
    for i in range(n):
        p0, p1, pm, p2 = p[i], p[(i + 1) % n], p[i - 1], p[(i + 2) % n]
        segs.append([p0, p0 + (p1 - pm) / 6, p1 - (p2 - p0) / 6, p1])
    return CurveLoop(segs)


def dense_curve(loop: CurveLoop, per_segment: int = 4000) -> np.ndarray:
    """Direct Bernstein evaluation of every segment at ``per_segment`` parameters."""
    t = np.linspace(0.0, 1.0, per_segment, endpoint=False)[:, None]
    b = [(1 - t) ** 3, 3 * t * (1 - t) ** 2, 3 * t**2 * (1 - t), t**3]
    out = []
    for seg in loop.segments:
        seg = np.asarray(seg, float)
        out.append(sum(bk * seg[k] for k, bk in enumerate(b)))
    return np.concatenate(out)


def curve_distance(loop: CurveLoop, points, per_segment: int = 4000) -> np.ndarray:
    """Distance from ``points`` to the densely sampled boundary of ``loop``."""
    return cKDTree(dense_curve(loop, per_segment)).query(np.asarray(points, float))[0]


def shoelace(pts: np.ndarray) -> float:
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def ray_parity(points, poly) -> np.ndarray:
    """Even-odd point-in-polygon test written out point by point."""
    pts = np.asarray(points, float)
    inside = np.zeros(len(pts), bool)
    n = len(poly)
    for i in range(n):
        (x0, y0), (x1, y1) = poly[i], poly[(i + 1) % n]
        cond = (y0 > pts[:, 1]) != (y1 > pts[:, 1])
        with np.errstate(divide="ignore", invalid="ignore"):
            xc = x0 + (pts[:, 1] - y0) * (x1 - x0) / (y1 - y0)
        inside ^= cond & (pts[:, 0] < xc)
    return inside


def brute_force_iou(pred: np.ndarray, gt: np.ndarray, labels=range(1, 11)) -> dict:
    """Per-label IoU by explicit pixel loops; labels absent from both are omitted."""
    out = {}
    for k in labels:
        inter = union = 0
        for p, g in zip(pred.ravel().tolist(), gt.ravel().tolist()):
            inter += p == k and g == k
            union += p == k or g == k
        if union:
            out[k] = inter / union
    return out


def mesh_edges_ok(triangles: np.ndarray) -> bool:
    """Every directed edge appears once and its reverse exactly once."""
    seen = {}
    for a, b, c in np.asarray(triangles).tolist():
        for e in ((a, b), (b, c), (c, a)):
            seen[e] = seen.get(e, 0) + 1
    return all(v == 1 for v in seen.values()) and all((b, a) in seen for a, b in seen)


def surface_samples(vertices: np.ndarray, triangles: np.ndarray, k: int = 8) -> np.ndarray:
    """Barycentric grid points on every triangle."""
    i, j = np.meshgrid(np.arange(k + 1), np.arange(k + 1), indexing="ij")
    m = (i + j) <= k
    u, v = i[m] / k, j[m] / k
    tri = vertices[triangles]
    return (tri[:, None, 0] * (1 - u - v)[None, :, None] + tri[:, None, 1] * u[None, :, None]
            + tri[:, None, 2] * v[None, :, None]).reshape(-1, 3)


def polyline_distance(points, poly: np.ndarray, chunk: int = 256) -> np.ndarray:
    """Exact distance from ``points`` to the closed polyline ``poly``."""
    pts = np.asarray(points, float)
    a, b = poly, np.roll(poly, -1, axis=0)
    ab = b - a
    L2 = np.maximum(np.einsum("ij,ij->i", ab, ab), 1e-300)
    out = np.empty(len(pts))
    for s in range(0, len(pts), chunk):
        p = pts[s:s + chunk, None, :]
        t = np.clip(np.einsum("pmj,mj->pm", p - a, ab) / L2, 0.0, 1.0)
        q = a + t[..., None] * ab
        out[s:s + chunk] = np.sqrt(((p - q) ** 2).sum(-1)).min(1)
    return out
