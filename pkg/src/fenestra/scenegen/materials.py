"""Flat albedo materials with optional reuse between parts."""

from __future__ import annotations

import colorsys
from dataclasses import dataclass, field

import numpy as np

from ..core.geometry import Mesh
from ..core.params import Sampler

GLASS_ALPHA = 0.35
# alpha per material role; everything else is opaque
ALPHA = {"glass": GLASS_ALPHA, "aperture": 0.0}

# (hue range, saturation range, value range) per material role
FAMILIES = {
    "wall": ((0.02, 0.14), (0.05, 0.45), (0.45, 0.92)),  # stucco, brick, stone
    "trim": ((0.05, 0.15), (0.0, 0.2), (0.7, 0.97)),
    "frame": ((0.0, 1.0), (0.0, 0.35), (0.25, 0.98)),
    "sash": ((0.0, 1.0), (0.0, 0.35), (0.25, 0.98)),
    "glass": ((0.5, 0.62), (0.1, 0.35), (0.15, 0.45)),
    "aperture": ((0.0, 0.15), (0.1, 0.4), (0.05, 0.25)),
    "blind": ((0.0, 1.0), (0.0, 0.4), (0.5, 0.95)),
    "bars": ((0.0, 1.0), (0.0, 0.2), (0.05, 0.35)),
    "shutter": ((0.0, 1.0), (0.2, 0.6), (0.25, 0.8)),
    "balcony": ((0.0, 0.2), (0.0, 0.15), (0.3, 0.8)),
    "misc": ((0.0, 1.0), (0.1, 0.8), (0.2, 0.9)),
    "interior": ((0.05, 0.15), (0.05, 0.35), (0.4, 0.9)),
}
MODES = ("baseline-flat", "uniform-gray", "random-per-object", "single-random", "albedo-only")


@dataclass(frozen=True)
class MaterialTable:
    colors: dict  # role -> rgb
    per_mesh: dict = field(default_factory=dict)  # instance id -> rgb (random-per-object)
    albedo_only: bool = False
    mode: str = "baseline-flat"

    def color_of(self, mesh: Mesh) -> tuple:
        if mesh.instance_id in self.per_mesh:
            return self.per_mesh[mesh.instance_id]
        return self.colors.get(mesh.material_id, (0.5, 0.5, 0.5))

    @staticmethod
    def alpha_of(mesh: Mesh) -> float:
        return ALPHA.get(mesh.material_id, 1.0)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "albedo_only": self.albedo_only,
            "colors": {k: list(v) for k, v in sorted(self.colors.items())},
            "per_mesh": {str(k): list(v) for k, v in sorted(self.per_mesh.items())},
        }


def _family_color(s: Sampler, role: str) -> tuple:
    (h0, h1), (s0, s1), (v0, v1) = FAMILIES.get(role, FAMILIES["misc"])
    h = s.uniform(f"{role}/h", h0, h1)
    sat = s.uniform(f"{role}/s", s0, s1)
    val = s.uniform(f"{role}/v", v0, v1)
    return tuple(round(c, 6) for c in colorsys.hsv_to_rgb(h, sat, val))


def _rgb(s: Sampler, name: str) -> tuple:
    return tuple(s.uniform(f"{name}/{c}", 0.0, 1.0) for c in "rgb")


def assign_materials(meshes, mode: str, s: Sampler, frame_wall_reuse: float = 0.3) -> MaterialTable:
    """Colors for every material role (or mesh) used by ``meshes``."""
    if mode not in MODES:
        raise ValueError(f"unknown material mode {mode!r}")
    roles = sorted({m.material_id for m in meshes} | {"wall"})
    if mode == "uniform-gray":
        return MaterialTable({r: (0.5, 0.5, 0.5) for r in roles}, mode=mode)
    if mode == "single-random":
        c = _rgb(s, "scene")
        return MaterialTable({r: c for r in roles}, mode=mode)
    if mode == "random-per-object":
        per = {m.instance_id: _rgb(s, f"mesh{m.instance_id}") for m in meshes}
        return MaterialTable({r: (0.5, 0.5, 0.5) for r in roles}, per, mode=mode)
    colors = {}
    colors["wall"] = _family_color(s, "wall")
    s.fixed("wall/color", list(colors["wall"]))
    for role in roles:
        if role == "wall":
            continue
        if role in ("frame", "trim", "sash") and s.bernoulli(f"{role}/reuse_wall", frame_wall_reuse):
            # frames painted like the wall
            colors[role] = tuple(s.reuse(f"{role}/color", s.full_path("wall/color")))
            continue
        colors[role] = _family_color(s, role)
        if role in ("frame", "trim", "sash"):
            s.fixed(f"{role}/color", list(colors[role]))
    return MaterialTable(colors, albedo_only=mode == "albedo-only", mode=mode)
