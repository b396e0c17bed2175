"""Complete window assemblies inside a window-bound rectangle.

Local frame of a window: x to the right and y up across the bound, z along
the façade's outward normal, origin at the bound's lower-left corner. Depth
layout, front to back: bars, trim (wall frame), wall plane at z = 0, blind
in the reveal, frame and sash around the pane plane at z = -recess, and the
open-window aperture just behind the frame.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache
from importlib import resources

import numpy as np

from ..core.geometry import Mesh, Scope, box_mesh
from ..core.labels import (
    BARS,
    BLIND,
    OPEN_WINDOW,
    WALL,
    WALL_FRAME,
    WINDOW_FRAME,
    WINDOW_PANE,
)
from ..core.params import Sampler
from .bezier import CurveError, CurveLoop
from .extrude import Profile, extrude_profile, load_profile_hierarchy
from .mesh2d import annulus_triangles, loop_mesh, loop_polygon, planar_mesh, rect_ring, strip_mesh
from .offset import offset_inward
from .opening import OpeningSpec, Part, apply_opening
from .outline import KINDS, make_outline
from .panes import subdivide_panes

FULL_LEVEL = 10
DEFAULT_KIND_WEIGHTS = {"rectangle": 0.6, "trapezoid": 0.1, "arched": 0.2, "circular": 0.1}
SWEEP_SAMPLES = 6


@lru_cache(maxsize=None)
def profile_library() -> dict:
    root = resources.files("fenestra") / "data" / "profiles"
    with resources.as_file(root) as path:
        return load_profile_hierarchy(path)


@dataclass(frozen=True)
class WindowStyle:
    """Parameters shared by every window on a façade."""

    kind: str
    square: bool
    margin: float
    trim_width: float
    trim_height: float
    recess: float
    family: str
    frame_profile: Profile
    frame_width: float
    frame_depth: float
    has_sash: bool
    sash_profile: Profile
    sash_width: float
    rows: int
    cols: int
    mullion: float
    mechanism: str
    top_ratio: float
    rise_fraction: float


@dataclass(frozen=True)
class WindowInstance:
    """Per-window parameters."""

    open_fraction: float = 0.0
    blind: float = 0.0
    bars: bool = False
    bar_spacing: float = 0.12


def sample_style(s: Sampler, kind_weights: dict | None = None, square: bool = False) -> WindowStyle:
    weights = kind_weights or DEFAULT_KIND_WEIGHTS
    kinds = [k for k in KINDS if weights.get(k, 0) > 0]
    kind = s.choice("kind", kinds, [weights[k] for k in kinds])
    lib = profile_library()
    family = s.choice("family", sorted(lib))
    frames = lib[family]["frame"]
    sashes = lib[family]["sash"]
    frame_profile = s.choice("frame_profile", frames)
    sash_profile = s.choice("sash_profile", sashes)
    operable = kind in ("rectangle", "arched")
    mech_options = ["hinged", "sliding"] if kind == "rectangle" else ["hinged"]
    mechanism = s.choice("mechanism", mech_options)
    return WindowStyle(
        kind=kind,
        square=bool(square),
        margin=s.uniform("margin", 0.0, 0.08),
        trim_width=s.uniform("trim_width", 0.05, 0.14),
        trim_height=s.uniform("trim_height", 0.015, 0.04),
        recess=s.uniform("recess", 0.08, 0.25),
        family=family,
        frame_profile=frame_profile,
        frame_width=s.uniform("frame_width", 0.04, 0.09),
        frame_depth=s.uniform("frame_depth", 0.05, 0.10),
        has_sash=s.bernoulli("has_sash", 0.8),
        sash_profile=sash_profile,
        sash_width=s.uniform("sash_width", 0.03, 0.06),
        rows=s.integer("rows", 1, 3),
        cols=s.integer("cols", 1, 3),
        mullion=s.uniform("mullion", 0.015, 0.04),
        mechanism=mechanism if operable else "closed",
        top_ratio=s.uniform("top_ratio", 0.5, 0.9),
        rise_fraction=s.uniform("rise", 0.5, 1.0),
    )


def sample_instance(s: Sampler) -> WindowInstance:
    is_open = s.bernoulli("open", 0.3)
    fraction = s.uniform("open_fraction", 0.1, 1.0)
    has_blind = s.bernoulli("blind", 0.35)
    coverage = s.uniform("blind_cover", 0.15, 0.9)
    bars = s.bernoulli("bars", 0.25)
    spacing = s.uniform("bar_spacing", 0.09, 0.16)
    return WindowInstance(
        open_fraction=fraction if is_open else 0.0,
        blind=coverage if has_blind else 0.0,
        bars=bars,
        bar_spacing=spacing,
    )


@dataclass(frozen=True)
class WindowGeometry:
    """Instance-independent geometry of one style at one bound size (local frame)."""

    size: tuple[float, float]
    outline: CurveLoop  # outer edge of the trim
    opening: CurveLoop  # inner edge of the trim = outer edge of the frame
    frame_inner: CurveLoop | None
    glazing: CurveLoop | None  # region subdivided into panes
    panes: tuple[CurveLoop, ...]
    root: Part
    hinge: tuple | None = None
    track: float = 0.0
    info: dict = field(default_factory=dict)


def _safe_offset(loop: CurveLoop, d: float) -> CurveLoop | None:
    try:
        return offset_inward(loop, d)
    except CurveError:
        return None


def _outline(style: WindowStyle, w: float, h: float) -> CurveLoop:
    m = style.margin * min(w, h)
    ow, oh = w - 2 * m, h - 2 * m
    ox, oy = m, m
    if style.square:
        side = min(ow, oh)
        ox += (ow - side) / 2
        oy += (oh - side) / 2
        ow = oh = side
    rise = style.rise_fraction * min(ow / 2, 0.6 * oh)
    loop = make_outline(style.kind, ow, oh, top_ratio=style.top_ratio, rise=rise)
    return loop.transformed(1.0, (ox, oy))


def _scaled(profile: Profile, width: float, depth: float) -> Profile:
    p = profile.scaled(width, depth)
    return p.shifted(0.0, -depth / 2)


def build_geometry(style: WindowStyle, w: float, h: float, level: int) -> WindowGeometry:
    """Static window parts for a ``w`` x ``h`` bound at label ``level``."""
    ident = Scope(np.zeros(3), np.eye(3), np.zeros(3))
    bound = rect_ring((0, 0), (w, h))
    if level <= 1:
        wall = planar_mesh(bound, [(0, 1, 2), (0, 2, 3)], ident, 0.0, WALL, "wall")
        root = Part("window", children=(Part("wall", (wall,)),))
        empty = make_outline("rectangle", w, h)
        return WindowGeometry((w, h), empty, empty, None, None, (), root)

    outline = _outline(style, w, h)
    scale = min(outline.bounds()[1] - outline.bounds()[0])
    trim_w = min(style.trim_width, 0.12 * scale)
    opening = _safe_offset(outline, trim_w) or outline
    center = opening.centroid()
    parts = []

    outer_poly = loop_polygon(outline)
    pts, tris = annulus_triangles(bound, outer_poly, center)
    parts.append(Part("wall", (planar_mesh(pts, tris, ident, 0.0, WALL, "wall"),)))

    trim_label = WALL_FRAME if level >= 3 else WALL
    trim_material = "trim" if level >= 3 else "wall"
    front = style.trim_height if opening is not outline else 0.0
    open_poly = loop_polygon(opening)
    trim = []
    if opening is not outline:
        pts, tris = annulus_triangles(outer_poly, open_poly, center)
        trim.append(planar_mesh(pts, tris, ident, front, trim_label, trim_material))
        trim.append(strip_mesh(outer_poly, ident, 0.0, front, trim_label, trim_material))
    recess = max(style.recess, style.frame_depth / 2 + 0.03)
    back = -recess - style.frame_depth / 2 - 0.05
    reveal = strip_mesh(open_poly, ident, front, back, WALL, "wall")
    parts.append(Part("trim", tuple(trim) + (reveal,)))

    if level < 4:
        pane = loop_mesh(opening, ident, -recess, WINDOW_PANE, "glass")
        parts.append(Part("glazing", (pane,)))
        root = Part("window", children=tuple(parts))
        return WindowGeometry((w, h), outline, opening, None, opening, (opening,), root, info={"recess": recess})

    fd = style.frame_depth
    frame_w = min(style.frame_width, 0.1 * scale)
    frame = extrude_profile(
        opening, _scaled(style.frame_profile, frame_w, fd), SWEEP_SAMPLES, ident, -recess, WINDOW_FRAME, "frame"
    )
    parts.append(Part("frame", (frame,)))
    inner = _safe_offset(opening, frame_w)
    if inner is None:
        root = Part("window", children=tuple(parts))
        return WindowGeometry((w, h), outline, opening, None, None, (), root, info={"recess": recess})

    sash_meshes = []
    glazing = inner
    if style.has_sash:
        sash_w = min(style.sash_width, 0.08 * scale)
        sd = 0.7 * fd
        sash_meshes.append(
            extrude_profile(
                inner, _scaled(style.sash_profile, sash_w, sd), SWEEP_SAMPLES, ident, -recess, WINDOW_FRAME, "sash"
            )
        )
        glazing = _safe_offset(inner, sash_w) or inner
    grid = subdivide_panes(glazing, style.rows, style.cols, style.mullion)
    cells = grid.cells or (glazing,)
    for cell in cells:
        sash_meshes.append(loop_mesh(cell, ident, -recess, WINDOW_PANE, "glass"))
    if len(cells) > 1:
        mull = _scaled(style.frame_profile, style.mullion / 2, 0.5 * fd).shifted(-style.mullion / 2, 0.0)
        for cell in cells:
            sash_meshes.append(
                extrude_profile(cell, mull, SWEEP_SAMPLES, ident, -recess, WINDOW_FRAME, "sash" if style.has_sash else "frame")
            )
    parts.append(Part("sash", tuple(sash_meshes)))

    aperture = loop_mesh(inner, ident, -recess - fd / 2 - 0.01, OPEN_WINDOW, "aperture")
    parts.append(Part("aperture", (aperture,), visible=False))

    lo, hi = inner.bounds()
    hinge = None
    if style.has_sash and style.mechanism == "hinged":
        # hinge on the swept sash's own left edge (its samples, not the curve hull)
        sx = np.concatenate([m.vertices for m in sash_meshes])
        hinge = (float(sx[:, 0].min()), float((lo[1] + hi[1]) / 2), -recess)
    root = Part("window", children=tuple(parts))
    return WindowGeometry(
        (w, h),
        outline,
        opening,
        inner,
        glazing,
        tuple(cells),
        root,
        hinge=hinge,
        track=float(hi[0] - lo[0]),
        info={"recess": recess},
    )


def opening_spec(style: WindowStyle, geom: WindowGeometry, fraction: float) -> OpeningSpec:
    if fraction <= 0 or not style.has_sash or style.mechanism == "closed" or geom.frame_inner is None:
        return OpeningSpec()
    if style.mechanism == "hinged":
        # sash swings outward: axis = (into the sash) x (outward normal)
        axis = np.cross([1.0, 0.0, 0.0], [0.0, 0.0, 1.0])
        return OpeningSpec("hinged", fraction, geom.hinge, tuple(axis))
    return OpeningSpec("sliding", fraction, slide_axis=(1.0, 0.0, 0.0), track=geom.track)


def _dressing(style: WindowStyle, geom: WindowGeometry, inst: WindowInstance, level: int, spec: OpeningSpec):
    ident = Scope(np.zeros(3), np.eye(3), np.zeros(3))
    parts = []
    recess = geom.info.get("recess", style.recess)
    if level >= 8 and inst.blind > 0 and geom.frame_inner is not None and spec.mechanism != "hinged":
        lo, hi = geom.opening.bounds()
        y0 = hi[1] - inst.blind * (hi[1] - lo[1])
        z = -recess + style.frame_depth / 2 + 0.35 * (recess - style.frame_depth / 2)
        ring = rect_ring((lo[0], y0), (hi[0], hi[1]))
        parts.append(Part("blind", (planar_mesh(ring, [(0, 1, 2), (0, 2, 3)], ident, z, BLIND, "blind"),)))
    if level >= 9 and inst.bars and geom.frame_inner is not None:
        lo, hi = geom.opening.bounds()
        t = 0.016
        z0 = style.trim_height + 0.01
        n = max(1, int((hi[0] - lo[0]) / inst.bar_spacing))
        xs = np.linspace(lo[0], hi[0], n + 2)[1:-1]
        bars = [
            box_mesh(Scope(np.array([x - t / 2, lo[1], z0]), np.eye(3), np.array([t, hi[1] - lo[1], t])), BARS, "bars")
            for x in xs
        ]
        for y in (lo[1] + 0.15 * (hi[1] - lo[1]), hi[1] - 0.15 * (hi[1] - lo[1])):
            bars.append(
                box_mesh(
                    Scope(np.array([lo[0], y - t / 2, z0 + t]), np.eye(3), np.array([hi[0] - lo[0], t, t])), BARS, "bars"
                )
            )
        parts.append(Part("bars", tuple(bars)))
    return parts


@dataclass(frozen=True)
class WindowAssembly:
    root: Part
    opening: OpeningSpec
    geometry: WindowGeometry

    def meshes(self) -> list[Mesh]:
        return self.root.all_meshes()


def assemble_window(
    bound: Scope, style: WindowStyle, inst: WindowInstance, level: int, geom: WindowGeometry | None = None
) -> WindowAssembly:
    """Window for a façade-plane ``bound`` scope (local z outward), in world coordinates."""
    w, h = float(bound.size[0]), float(bound.size[1])
    if geom is None:
        geom = build_geometry(style, w, h, level)
    spec = opening_spec(style, geom, inst.open_fraction) if level >= FULL_LEVEL else OpeningSpec()
    root = apply_opening(geom.root, spec)
    extra = _dressing(style, geom, inst, level, spec)
    if extra:
        root = replace(root, children=root.children + tuple(extra))
    world = root.transformed(bound.axes.T, bound.origin)
    return WindowAssembly(world, spec, geom)
