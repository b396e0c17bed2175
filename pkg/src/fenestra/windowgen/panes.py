"""Grid subdivision of a window loop into glass panes."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bezier import CurveLoop, bezier_points, line_segment, sub_segment

MIN_PANE_AREA = 1e-8
MIN_PANE_WIDTH = 1e-4


@dataclass(frozen=True)
class PaneGrid:
    rows: int
    cols: int
    mullion: float
    cells: tuple[CurveLoop, ...]
    # (row, col) of each cell; several loops can share a cell for non-convex outlines
    cell_index: tuple[tuple[int, int], ...] = field(default=())

    @property
    def area(self) -> float:
        return sum(c.area for c in self.cells)


def _axis_roots(ctrl: np.ndarray, axis: int, c: float) -> list[float]:
    p = ctrl[:, axis] - c
    # Bernstein -> power basis
    a = -p[0] + 3 * p[1] - 3 * p[2] + p[3]
    b = 3 * p[0] - 6 * p[1] + 3 * p[2]
    cc = -3 * p[0] + 3 * p[1]
    d = p[0]
    coeffs = np.array([a, b, cc, d])
    scale = np.max(np.abs(coeffs))
    if scale == 0:
        return []
    coeffs = coeffs / scale
    nz = np.flatnonzero(np.abs(coeffs) > 1e-14)
    if len(nz) == 0:
        return []
    roots = np.roots(coeffs[nz[0]:])
    out = []
    for r in roots:
        if abs(r.imag) < 1e-9 and 1e-9 < r.real < 1 - 1e-9:
            out.append(float(r.real))
    return sorted(out)


def clip_halfplane(loop: CurveLoop, axis: int, c: float, keep_below: bool) -> list[CurveLoop]:
    """Intersect a loop with ``x[axis] <= c`` (or ``>= c``); may return several loops."""
    sign = 1.0 if keep_below else -1.0

    def inside(pt) -> bool:
        return sign * (pt[axis] - c) <= 1e-12

    pieces = []  # (ctrl, inside)
    for seg in loop.segments:
        ts = [0.0] + _axis_roots(seg, axis, c) + [1.0]
        for t0, t1 in zip(ts[:-1], ts[1:]):
            sub = sub_segment(seg, t0, t1)
            m = bezier_points(sub, np.array([0.5]))[0]
            pieces.append((sub, inside(m)))
    flags = [f for _, f in pieces]
    if all(flags):
        return [loop]
    if not any(flags):
        return []
    # rotate so the list starts at an entry into the kept side
    n = len(pieces)
    start = next(k for k in range(n) if flags[k] and not flags[k - 1])
    pieces = pieces[start:] + pieces[:start]
    chains = []
    cur = None
    for ctrl, f in pieces:
        if f:
            if cur is None:
                cur = []
            cur.append(ctrl)
        elif cur is not None:
            chains.append(cur)
            cur = None
    if cur is not None:
        chains.append(cur)
    other = 1 - axis
    # pair chain ends along the cut line: kept intervals are (1st,2nd), (3rd,4th), ...
    ends = []
    for k, ch in enumerate(chains):
        ends.append((ch[0][0][other], "in", k))
        ends.append((ch[-1][-1][other], "out", k))
    ends.sort(key=lambda e: e[0])
    partner = {}
    for a in range(0, len(ends) - 1, 2):
        partner[(ends[a][1], ends[a][2])] = ends[a + 1]
        partner[(ends[a + 1][1], ends[a + 1][2])] = ends[a]
    loops = []
    used = set()
    for k0 in range(len(chains)):
        if k0 in used:
            continue
        segs = []
        k = k0
        while k not in used:
            used.add(k)
            segs.extend(chains[k])
            nxt = partner.get(("out", k))
            if nxt is None or nxt[1] != "in":
                break
            exit_pt = chains[k][-1][-1]
            k = nxt[2]
            entry_pt = chains[k][0][0]
            if np.hypot(*(entry_pt - exit_pt)) > 1e-12:
                segs.append(line_segment(exit_pt, entry_pt))
        try:
            cl = CurveLoop(segs, check=False)
        except ValueError:
            continue
        if cl.area > MIN_PANE_AREA:
            loops.append(cl)
    return loops


def subdivide_panes(loop: CurveLoop, rows: int, cols: int, mullion: float) -> PaneGrid:
    """Cut ``loop`` by a rows x cols grid over its bounding box.

    Interior grid lines become mullions of width ``mullion``: each cell is
    inset by ``mullion / 2`` from every shared grid line. Cells that collapse
    are dropped.
    """
    if rows < 1 or cols < 1:
        raise ValueError("rows and cols must be >= 1")
    if mullion < 0:
        raise ValueError("mullion width must be non-negative")
    lo, hi = loop.bounds()
    xs = np.linspace(lo[0], hi[0], cols + 1)
    ys = np.linspace(lo[1], hi[1], rows + 1)
    h = mullion / 2
    cells, index = [], []
    for r in range(rows):
        for c in range(cols):
            cuts = []
            if c > 0:
                cuts.append((0, xs[c] + h, False))
            if c < cols - 1:
                cuts.append((0, xs[c + 1] - h, True))
            if r > 0:
                cuts.append((1, ys[r] + h, False))
            if r < rows - 1:
                cuts.append((1, ys[r + 1] - h, True))
            if any(
                (not below and val >= (hi[ax])) or (below and val <= lo[ax]) for ax, val, below in cuts
            ):
                continue
            parts = [loop]
            for ax, val, below in cuts:
                parts = [q for p in parts for q in clip_halfplane(p, ax, val, below)]
            for p in parts:
                plo, phi = p.bounds()
                if p.area > MIN_PANE_AREA and np.all(phi - plo > MIN_PANE_WIDTH):
                    cells.append(p)
                    index.append((r, c))
    return PaneGrid(rows, cols, float(mullion), tuple(cells), tuple(index))
