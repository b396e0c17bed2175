"""Inward offsetting of Bézier loops.

The loop is sampled, each sample pushed along the inward normal, reflex
corners are bridged with circular arcs, and the self-intersecting parts of
the raw offset (swallowtails, overlaps at convex corners) are trimmed away by
their distance to the input. The surviving polyline is refit with cubic
Béziers, one smooth run at a time.
"""

from __future__ import annotations

import numpy as np

from .bezier import (
    CurveError,
    CurveLoop,
    bezier_derivative,
    bezier_points,
    bezier_second,
    distance_index,
    is_straight,
    line_segment,
    segment_intersections,
)

ARC_STEP = np.radians(4.0)
VERIFY_ROUNDS = 3


class OffsetCollapseError(CurveError):
    """The offset would vanish or change topology."""


def offset_tolerance(d: float) -> float:
    return 1e-3 * d + 1e-6


def _unit(v: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(v, axis=-1, keepdims=True)
    return v / np.where(n == 0, 1, n)


def _segment_tangents(seg: np.ndarray, t: np.ndarray) -> np.ndarray:
    d = bezier_derivative(seg, t)
    small = np.linalg.norm(d, axis=1) < 1e-12
    if np.any(small):
        # coincident control points: fall back to the second derivative, then the chord
        dd = bezier_second(seg, t[small])
        sign = np.where(t[small] > 0.5, -1.0, 1.0)[:, None]
        d[small] = sign * dd
        still = np.linalg.norm(d, axis=1) < 1e-12
        d[still] = seg[3] - seg[0]
    return _unit(d)


def _raw_offset(loop: CurveLoop, d: float, samples: int):
    pts, tans, src, par = [], [], [], []
    segs = loop.segments
    n = len(segs)
    starts = []
    for i, seg in enumerate(segs):
        t = np.array([0.0, 1.0]) if is_straight(seg) else np.linspace(0.0, 1.0, samples + 1)
        p = bezier_points(seg, t)
        tan = _segment_tangents(seg, t)
        normal = np.stack([-tan[:, 1], tan[:, 0]], axis=1)
        pts.append(p + d * normal)
        tans.append(tan)
        src.append(np.full(len(t), 2 * i))
        par.append(t)
        starts.append(tan[0])
        # reflex joint to the next segment: bridge the gap with an arc about the vertex
        nxt = segs[(i + 1) % n]
        t_next = _segment_tangents(nxt, np.array([0.0]))[0]
        t_end = tan[-1]
        cross = t_end[0] * t_next[1] - t_end[1] * t_next[0]
        dot = float(t_end @ t_next)
        if cross < -1e-12 or (dot < 0 and abs(cross) <= 1e-12):
            a0 = np.arctan2(t_end[0], -t_end[1])  # angle of the inward normal
            a1 = np.arctan2(t_next[0], -t_next[1])
            sweep = (a1 - a0) % (2 * np.pi) - 2 * np.pi  # clockwise
            k = int(np.ceil(abs(sweep) / ARC_STEP))
            if k > 1:
                ang = a0 + sweep * np.arange(1, k) / k
                c = seg[3]
                pts.append(c + d * np.stack([np.cos(ang), np.sin(ang)], axis=1))
                tans.append(np.stack([np.sin(ang), -np.cos(ang)], axis=1))
                src.append(np.full(k - 1, 2 * i + 1))
                par.append(np.arange(1, k) / k)
    return np.concatenate(pts), np.concatenate(tans), np.concatenate(src), np.concatenate(par)


def _fit_run(pts: np.ndarray, tans: np.ndarray, tol: float, depth: int = 0, u=None) -> list[np.ndarray]:
    p0, p3 = pts[0], pts[-1]
    chord = p3 - p0
    L = float(np.hypot(*chord))
    if len(pts) == 2 or L == 0 and len(pts) < 3:
        return [line_segment(p0, p3)]
    if L > 0:
        nrm = np.array([-chord[1], chord[0]]) / L
        if np.max(np.abs((pts - p0) @ nrm)) <= 1e-12 * max(1.0, L):
            return [line_segment(p0, p3)]
    t0 = tans[0]
    t1 = -tans[-1]
    if u is None or not np.all(np.diff(u) > 0):
        seglen = np.hypot(*np.diff(pts, axis=0).T)
        u = np.concatenate([[0.0], np.cumsum(seglen)])
    u = (u - u[0]) / (u[-1] - u[0])
    ctrl = _generate(pts, u, t0, t1)
    err, idx = _max_error(ctrl, pts, u)
    for _ in range(12):
        if err <= tol:
            return [ctrl]
        u2 = _reparameterize(ctrl, pts, u)
        c2 = _generate(pts, u2, t0, t1)
        e2, i2 = _max_error(c2, pts, u2)
        if e2 >= err * 0.98:
            break
        u, ctrl, err, idx = u2, c2, e2, i2
    if err <= tol or len(pts) < 3 or depth > 40:
        return [ctrl]
    idx = min(max(idx, 1), len(pts) - 2)
    return _fit_run(pts[: idx + 1], tans[: idx + 1], tol, depth + 1, u[: idx + 1]) + _fit_run(
        pts[idx:], tans[idx:], tol, depth + 1, u[idx:]
    )


def _generate(pts, u, t0, t1):
    s = 1 - u
    b0, b1, b2, b3 = s**3, 3 * s * s * u, 3 * s * u * u, u**3
    p0, p3 = pts[0], pts[-1]
    a1 = b1[:, None] * t0
    a2 = b2[:, None] * t1
    c = np.array([[np.sum(a1 * a1), np.sum(a1 * a2)], [np.sum(a1 * a2), np.sum(a2 * a2)]])
    tmp = pts - (np.outer(b0 + b1, p0) + np.outer(b2 + b3, p3))
    x = np.array([np.sum(tmp * a1), np.sum(tmp * a2)])
    dist = float(np.hypot(*(p3 - p0)))
    det = c[0, 0] * c[1, 1] - c[0, 1] ** 2
    alpha = None
    if abs(det) > 1e-18:
        alpha = np.linalg.solve(c, x)
    eps = 1e-6 * dist
    if alpha is None or min(alpha) < eps or max(alpha) > dist:
        alpha = np.array([dist / 3, dist / 3])
    return np.stack([p0, p0 + alpha[0] * t0, p3 + alpha[1] * t1, p3])


def _max_error(ctrl, pts, u):
    b = bezier_points(ctrl, u)
    err = np.hypot(*(b - pts).T)
    i = int(np.argmax(err))
    return float(err[i]), i


def _reparameterize(ctrl, pts, u):
    b = bezier_points(ctrl, u)
    d1 = bezier_derivative(ctrl, u)
    d2 = bezier_second(ctrl, u)
    diff = b - pts
    num = np.sum(diff * d1, axis=1)
    den = np.sum(d1 * d1, axis=1) + np.sum(diff * d2, axis=1)
    step = np.where(np.abs(den) > 1e-300, num / np.where(den == 0, 1, den), 0)
    new = np.clip(u - step, 0, 1)
    new[0], new[-1] = 0.0, 1.0
    return np.maximum.accumulate(new)


def offset_inward(loop: CurveLoop, d: float, samples: int = 64) -> CurveLoop:
    """Loop whose boundary lies at distance ``d`` inside ``loop``.

    Raises :class:`OffsetCollapseError` if the offset vanishes, splits, or
    inverts (``d`` at or beyond the loop's inradius).
    """
    if d < 0:
        raise ValueError("offset distance must be non-negative")
    if d == 0:
        return loop
    tol = offset_tolerance(d)
    dist = distance_index(loop)
    # the fit is controlled at the samples only; verify between them and densify if needed
    for attempt in range(VERIFY_ROUNDS):
        out = _offset_once(loop, d, samples * 2**attempt, tol / 2 ** (attempt + 1), dist)
        got = dist(out.sample(64))
        if got.min() >= d - tol and got.max() <= d + tol:
            break
    return out


def _offset_once(loop: CurveLoop, d: float, samples: int, fit_tol: float, dist) -> CurveLoop:
    tol = offset_tolerance(d)
    raw, tans, src, par = _raw_offset(loop, d, samples)
    n = len(raw)
    ii, jj, ss, tt = _proper_crossings(raw, *segment_intersections(raw))
    tau = 1e-8 * max(1.0, d)

    raw_dist = dist(raw)
    if len(ii) == 0:
        if np.all(raw_dist >= d - tau) and _poly_area(raw) > 0:
            verts = [(raw[k], tans[k], tans[k], src[k], False, par[k]) for k in range(n)]
            return _refit(verts, fit_tol)
        raise OffsetCollapseError(f"offset by {d:g} m collapses the loop")

    cuts = np.concatenate([ii + ss, jj + tt])
    partner = np.concatenate([np.arange(len(ii)) + len(ii), np.arange(len(ii))])
    order = np.argsort(cuts, kind="stable")
    cpos = cuts[order]
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    partner_rank = rank[partner[order]]
    m = len(cpos)

    def point_at(pos):
        k = int(np.floor(pos)) % n
        f = pos - np.floor(pos)
        a, b = raw[k], raw[(k + 1) % n]
        ta, tb = tans[k], tans[(k + 1) % n]
        return a + f * (b - a), _unit((1 - f) * ta + f * tb)

    def param_at(pos, toward):
        # parameter of a cut point within the source of the raw vertex ``toward``
        k = int(np.floor(pos)) % n
        f = pos - np.floor(pos)
        k2 = (k + 1) % n
        if src[k] == src[k2]:
            return (1 - f) * par[k] + f * par[k2]
        return par[toward]

    pieces = []
    for r in range(m):
        a = cpos[r]
        b = cpos[(r + 1) % m] + (n if r == m - 1 else 0)
        idx = np.arange(int(np.floor(a)) + 1, int(np.floor(b)) + 1)
        idx = idx[(idx > a) & (idx < b)] % n
        if len(idx):
            valid = bool(np.min(raw_dist[idx]) >= d - tau)
        else:
            mid, _ = point_at(0.5 * (a + b))
            valid = bool(dist(mid[None])[0] >= d - tol)
        pieces.append((r, idx, valid))

    valid_pieces = [p for p in pieces if p[2]]
    if not valid_pieces:
        raise OffsetCollapseError(f"offset by {d:g} m collapses the loop")
    # every valid piece must hand over to the piece starting at its end cut's partner
    starts = {p[0]: p for p in valid_pieces}
    first = valid_pieces[0]
    chain = [first]
    seen = {first[0]}
    cur = first
    while True:
        end_rank = (cur[0] + 1) % m
        nxt_rank = int(partner_rank[end_rank])
        if nxt_rank not in starts:
            raise OffsetCollapseError(f"offset by {d:g} m changes the loop topology")
        if nxt_rank == first[0]:
            break
        if nxt_rank in seen:
            raise OffsetCollapseError(f"offset by {d:g} m changes the loop topology")
        cur = starts[nxt_rank]
        chain.append(cur)
        seen.add(nxt_rank)
    if len(chain) != len(valid_pieces):
        raise OffsetCollapseError(f"offset by {d:g} m splits the loop")

    verts = []
    for r, idx, _ in chain:
        pos = cpos[r]
        x, t_out = point_at(pos)
        # incoming tangent: along the edge that reaches the partner cut
        _, t_in = point_at(cpos[int(partner_rank[r])])
        after = int(idx[0]) if len(idx) else (int(np.floor(pos)) + 1) % n
        verts.append((x, t_in, t_out, -1, True, param_at(pos, after)))
        for k in idx:
            verts.append((raw[k], tans[k], tans[k], src[k], False, par[k]))
    pts = np.array([v[0] for v in verts])
    if _poly_area(pts) <= 1e-14:
        raise OffsetCollapseError(f"offset by {d:g} m collapses the loop")
    return _refit(verts, fit_tol)


def _proper_crossings(pts, ii, jj, ss, tt, eps=1e-9):
    """Drop end-to-end contacts of edges separated only by zero-length edges.

    Samples at segment joins are duplicated, so the edges on either side of a
    join touch at a shared endpoint without crossing.
    """
    if len(ii) == 0:
        return ii, jj, ss, tt
    n = len(pts)
    scale = max(1.0, float(np.abs(pts).max()))
    edge_len = np.linalg.norm(np.roll(pts, -1, axis=0) - pts, axis=1)
    keep = np.ones(len(ii), bool)
    for q, (i, j, s_, t_) in enumerate(zip(ii, jj, ss, tt)):
        for a, b, sa, tb in ((i, j, s_, t_), (j, i, t_, s_)):
            gap = (b - a) % n
            if sa >= 1 - eps and tb <= eps and gap >= 2 and np.all(edge_len[(a + np.arange(1, gap)) % n] <= 1e-12 * scale):
                keep[q] = False
    return ii[keep], jj[keep], ss[keep], tt[keep]


def _poly_area(pts: np.ndarray) -> float:
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def _refit(verts, tol: float) -> CurveLoop:
    scale = max(1.0, float(np.max(np.abs([v[0] for v in verts]))))
    # merge coincident neighbours, marking a break where tangent or source changes
    merged = []
    for v in verts:
        if merged and np.hypot(*(merged[-1][0] - v[0])) <= 1e-12 * scale:
            p, t_in, _, s, brk, u = merged[-1]
            kink = float(t_in @ v[2]) < 1 - 1e-12 or s != v[3]
            merged[-1] = (p, t_in, v[2], v[3], brk or v[4] or kink, v[5])
        else:
            merged.append(v)
    if len(merged) > 1 and np.hypot(*(merged[-1][0] - merged[0][0])) <= 1e-12 * scale:
        p, t_in, _, s, brk, u = merged.pop()
        v0 = merged[0]
        merged[0] = (v0[0], t_in, v0[2], v0[3], True, v0[5])
    n = len(merged)
    if n < 3:
        raise OffsetCollapseError("offset degenerates to fewer than three points")
    brk = [v[4] for v in merged]
    for k in range(n):
        if merged[k][3] != merged[(k + 1) % n][3] and merged[(k + 1) % n][3] != -1 and merged[k][3] != -1:
            brk[(k + 1) % n] = True
    if not any(brk):
        brk[0] = True
    first = brk.index(True)
    order = [(first + k) % n for k in range(n)] + [first]
    segments = []
    run = [order[0]]
    for k in order[1:]:
        run.append(k)
        if brk[k]:
            pts = np.array([merged[j][0] for j in run])
            tans = np.array([merged[run[0]][2]] + [merged[j][1] for j in run[1:-1]] + [merged[run[-1]][1]])
            u = np.array([merged[j][5] for j in run], float)
            if u[-1] <= u[0]:
                u[-1] = 1.0  # the run ends on the next source's t=0 vertex
            segments.extend(_fit_run(pts, tans, tol, u=u))
            run = [k]
    loop = CurveLoop(segments, check=False)
    if not loop.area > 0:
        raise OffsetCollapseError("offset inverted the loop orientation")
    return loop
