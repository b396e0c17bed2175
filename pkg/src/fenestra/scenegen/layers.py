"""Procedural street clutter, wall decorations and interiors around windows.

All helpers work in a façade-local frame (x along the façade, y up, z
outward) given by a Scope and return world-space meshes.
"""

from __future__ import annotations

import numpy as np

from ..core.geometry import Mesh, Scope, box_mesh
from ..core.labels import BALCONY, MISC_OBJECT, SHUTTER
from ..core.params import Sampler


def local_box(frame: Scope, lo, hi, label, material: str) -> Mesh:
    lo = np.asarray(lo, float)
    hi = np.asarray(hi, float)
    return box_mesh(Scope(frame.point(lo), frame.axes, np.maximum(hi - lo, 0.0)), label, material)


def prism(frame: Scope, center, radius: float, height: float, label, material: str, sides: int = 10) -> Mesh:
    """Closed vertical n-gon prism standing on local point ``center`` (y up)."""
    a = 2 * np.pi * np.arange(sides) / sides
    ring = np.column_stack([radius * np.cos(a), np.zeros(sides), radius * np.sin(a)])
    c = np.asarray(center, float)
    local = np.concatenate([ring + c, ring + c + [0, height, 0]])
    k = np.arange(sides)
    k1 = (k + 1) % sides
    # ring is clockwise seen from +y, so these windings face outward
    walls = np.concatenate([np.stack([k, k1, sides + k1], 1), np.stack([k, sides + k1, sides + k], 1)])
    bottom = np.array([(0, j + 1, j) for j in range(1, sides - 1)])
    top = np.array([(sides, sides + j, sides + j + 1) for j in range(1, sides - 1)])
    return Mesh.clean(frame.point(local), np.concatenate([walls, bottom, top]), label, material)


def sample_decor_style(s: Sampler) -> dict:
    return {
        "shutters": s.bernoulli("shutters", 0.45),
        "balcony_p": s.uniform("balcony_p", 0.0, 0.6),
        "balcony_depth": s.uniform("balcony_depth", 0.6, 1.2),
        "rail_height": s.uniform("rail_height", 0.8, 1.1),
        "pipe": s.bernoulli("pipe", 0.5),
        "pipe_offset": s.uniform("pipe_offset", 0.08, 0.3),
        "ac_p": s.uniform("ac_p", 0.0, 0.3),
    }


def window_decor(bound: Scope, lo, hi, trim_height: float, kind: str, decor: dict, s: Sampler, level: int):
    """Shutters (lvl 5), balcony (lvl 6) and wall clutter (lvl 7) for one window.

    ``lo``/``hi`` bound the window outline in the bound's local frame. Every
    parameter is drawn regardless of ``level`` so streams stay aligned.
    """
    closed = s.bernoulli("shutters_closed", 0.2)
    balcony = s.bernoulli("balcony", decor["balcony_p"])
    ac = s.bernoulli("ac_unit", decor["ac_p"])
    out = []
    w = hi[0] - lo[0]
    z0 = trim_height + 0.005
    if level >= 5 and decor["shutters"] and kind in ("rectangle", "arched"):
        sw = 0.5 * w
        if closed:
            spans = [(lo[0], lo[0] + sw), (hi[0] - sw, hi[0])]
            z0 += 0.05
        else:
            spans = [(lo[0] - sw, lo[0]), (hi[0], hi[0] + sw)]
        for x0, x1 in spans:
            out.append(local_box(bound, (x0, lo[1], z0), (x1, hi[1], z0 + 0.03), SHUTTER, "shutter"))
    if level >= 6 and balcony and bound.origin[2] > 1.5:
        d = decor["balcony_depth"]
        rh = decor["rail_height"]
        x0, x1 = lo[0] - 0.3, hi[0] + 0.3
        y0 = lo[1]
        out.append(local_box(bound, (x0, y0 - 0.15, 0.0), (x1, y0, d), BALCONY, "balcony"))
        out.append(local_box(bound, (x0, y0, d - 0.05), (x1, y0 + rh, d), BALCONY, "balcony"))
        out.append(local_box(bound, (x0, y0, 0.0), (x0 + 0.05, y0 + rh, d - 0.05), BALCONY, "balcony"))
        out.append(local_box(bound, (x1 - 0.05, y0, 0.0), (x1, y0 + rh, d - 0.05), BALCONY, "balcony"))
    if level >= 7 and ac and not balcony:
        out.append(local_box(bound, (hi[0] - 0.7, lo[1] - 0.65, 0.0), (hi[0], lo[1] - 0.2, 0.3), MISC_OBJECT, "misc"))
    return out


def facade_pipe(facade: Scope, target: Scope, decor: dict, level: int):
    if level < 7 or not decor["pipe"]:
        return []
    x = float(facade.to_local(target.origin)[0] + target.size[0] + decor["pipe_offset"])
    x = min(max(x, 0.05), facade.size[0] - 0.15)
    return [local_box(facade, (x, 0.0, 0.04), (x + 0.1, facade.size[1], 0.14), MISC_OBJECT, "misc")]


CLUTTER = {
    # kind: (length, height, depth)
    "car": (4.2, 1.45, 1.8),
    "shrub": (1.1, 1.0, 0.8),
    "bin": (0.6, 1.1, 0.6),
    "bollard": (0.12, 0.9, 0.12),
}


def street_clutter(facade: Scope, target: Scope, s: Sampler, level: int):
    n = s.integer("count", 0, 6)
    tx = float(facade.to_local(target.center)[0])
    out = []
    for k in range(n):
        kind = s.choice(f"o{k}/kind", sorted(CLUTTER))
        x = s.uniform(f"o{k}/x", tx - 8.0, tx + 8.0)
        dist = s.uniform(f"o{k}/dist", 0.6, 4.0)
        scale = s.uniform(f"o{k}/scale", 0.8, 1.2)
        if level < 7:
            continue
        ln, ht, dp = (scale * v for v in CLUTTER[kind])
        if kind == "bollard":
            out.append(prism(facade, (x, 0.0, dist), ln, ht, MISC_OBJECT, "misc"))
        else:
            out.append(local_box(facade, (x - ln / 2, 0.0, dist - dp / 2), (x + ln / 2, ht, dist + dp / 2), MISC_OBJECT, "misc"))
    return out


def interior(bound: Scope, back: float, s: Sampler, level: int):
    """Open room box behind a window plus optional curtains (full model only)."""
    depth = s.uniform("room_depth", 2.5, 5.0)
    curtains = s.bernoulli("curtains", 0.5)
    cw = s.uniform("curtain_width", 0.2, 0.4)
    if level < 10:
        return []
    w, h = float(bound.size[0]), float(bound.size[1])
    x0, x1, y0, y1 = -1.0, w + 1.0, -1.0, h + 0.6
    zb = back - depth
    out = [
        local_box(bound, (x0, y0, zb), (x1, y1, zb), MISC_OBJECT, "interior"),
        local_box(bound, (x0, y0, zb), (x1, y0, back), MISC_OBJECT, "interior"),
        local_box(bound, (x0, y1, zb), (x1, y1, back), MISC_OBJECT, "interior"),
        local_box(bound, (x0, y0, zb), (x0, y1, back), MISC_OBJECT, "interior"),
        local_box(bound, (x1, y0, zb), (x1, y1, back), MISC_OBJECT, "interior"),
    ]
    if curtains:
        z = back - 0.08
        out.append(local_box(bound, (0.0, 0.0, z), (cw * w, h, z), MISC_OBJECT, "curtain"))
        out.append(local_box(bound, ((1 - cw) * w, 0.0, z), (w, h, z), MISC_OBJECT, "curtain"))
    return out


def room_center(bound: Scope, back: float) -> np.ndarray:
    return bound.point(np.array([bound.size[0] / 2, bound.size[1] / 2, back - 1.5]))
