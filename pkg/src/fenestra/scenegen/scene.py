"""Scene assembly: grammar building, windows, decorations, camera, lights, materials."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np

from ..core.geometry import Mesh, Scope, meshes_digest
from ..core.labels import LABELS, OPEN_WINDOW, UNLABELED, SemanticLabel
from ..core.params import ParamRegistry, Sampler
from ..core.rng import RandomStream
from ..grammar import RuleSet, derive, parse_rules
from ..windowgen.window import assemble_window, build_geometry, sample_instance, sample_style
from .camera import CameraPose, sample_camera
from .config import FULL, SceneConfig
from .layers import facade_pipe, interior, room_center, sample_decor_style, street_clutter, window_decor
from .lighting import LightRig, sample_lighting
from .materials import MaterialTable, assign_materials

# the order in which label levels switch classes on
PROGRESSION = tuple(LABELS[1:10])

GEOMETRY_MODES = {
    "baseline": (None, False),
    "square-only": ({"rectangle": 1.0}, True),
    "rectangles-only": ({"rectangle": 1.0}, False),
    "non-rectangular-boost": ({"rectangle": 0.2, "trapezoid": 0.2, "arched": 0.35, "circular": 0.25}, False),
}
# subsystem streams, forked in the camera-outward layer order
LAYERS = ("clutter", "decor", "building", "windows", "dressing", "interior")


class LevelViolation(AssertionError):
    pass


def allowed_labels(level: int) -> frozenset[SemanticLabel]:
    """Labels a scene at ``level`` may contain (unlabeled is the background)."""
    labels = set(PROGRESSION[: min(level, 9)]) | {UNLABELED}
    if level >= FULL:
        labels.add(OPEN_WINDOW)
    return frozenset(labels)


@lru_cache(maxsize=None)
def baseline_rules() -> RuleSet:
    text = (resources.files("fenestra") / "data" / "baseline.sg").read_text(encoding="utf-8")
    return parse_rules(text)


@dataclass(frozen=True, eq=False)
class Scene:
    meshes: tuple[Mesh, ...]
    camera: CameraPose
    lights: LightRig
    registry: ParamRegistry
    config: SceneConfig
    materials: MaterialTable
    target: Scope
    window_count: int

    @property
    def labels(self) -> set[SemanticLabel]:
        return {m.label for m in self.meshes}

    def geometry_digest(self) -> str:
        return meshes_digest(self.meshes)

    def target_meshes(self) -> list[Mesh]:
        return [m for m in self.meshes if "target" in m.tags]


def build_scene(config: SceneConfig, replay: ParamRegistry | None = None, rules: RuleSet | None = None) -> Scene:
    """Generate the scene for ``config``; ``replay`` re-uses a recorded registry."""
    level = config.level
    root = Sampler(RandomStream(config.seed, "scene"), replay)
    s = {name: root.child(name) for name in LAYERS}
    s_cam, s_light, s_mat = root.child("camera"), root.child("lighting"), root.child("materials")

    deriv = derive(rules or baseline_rules(), Scope.box(), s["building"], share_values=True)
    walls = deriv.meshes
    target_node = deriv.target
    facade = target_node.facade.scope if target_node.facade is not None else target_node.scope

    weights, square = GEOMETRY_MODES[config.geometry_mode]
    style = sample_style(s["windows"].child("style"), weights, square)
    decor_style = sample_decor_style(s["decor"].child("style"))

    windows, decor, rooms, lights_at = [], [], [], []
    cache: dict = {}
    for k, node in enumerate(deriv.window_bounds):
        bound = node.scope
        inst = sample_instance(s["windows"].child(f"w{k}"))
        key = (round(float(bound.size[0]), 6), round(float(bound.size[1]), 6))
        if key not in cache:
            cache[key] = build_geometry(style, float(bound.size[0]), float(bound.size[1]), level)
        geom = cache[key]
        asm = assemble_window(bound, style, inst, level, geom)
        tags = ("target",) if node is target_node else ()
        windows.append([m.relabeled(instance_id=0, tags=tags) for m in asm.meshes()])
        lo, hi = geom.outline.bounds()
        decor.extend(window_decor(bound, lo, hi, style.trim_height, style.kind, decor_style, s["decor"].child(f"w{k}"), level))
        back = -geom.info.get("recess", style.recess) - style.frame_depth / 2 - 0.05
        rooms.extend(interior(bound, back, s["interior"].child(f"w{k}"), level))
        lights_at.append(room_center(bound, back))
    decor.extend(facade_pipe(facade, target_node.scope, decor_style, level))
    clutter = street_clutter(facade, target_node.scope, s["clutter"], level)
    # window dressing (blinds) is part of each window assembly

    ordered = clutter + decor + walls + [m for w in windows for m in w] + rooms
    meshes = tuple(m.relabeled(instance_id=i) for i, m in enumerate(ordered))
    allowed = allowed_labels(level)
    bad = {m.label.name for m in meshes} - {lab.name for lab in allowed}
    if bad:
        raise LevelViolation(f"labels {sorted(bad)} not permitted at level {config.label_level}")

    camera = sample_camera(target_node.scope, config.camera_radius, s_cam)
    lights = sample_lighting(config.lighting_mode, s_light, config.night_probability)
    if lights.interior_on and level >= FULL:
        strengths = [s_light.uniform(f"interior{k}", 0.3, 1.0) for k in range(len(lights_at))]
        lights = LightRig(
            lights.sun_direction,
            lights.sun_intensity,
            lights.sky_color,
            lights.sky_intensity,
            tuple((tuple(float(v) for v in p), i) for p, i in zip(lights_at, strengths)),
            True,
            lights.mode,
        )
    materials = assign_materials(meshes, config.material_mode, s_mat, config.frame_wall_reuse)
    return Scene(meshes, camera, lights, root.registry(), config, materials, target_node.scope, len(windows))


def scene_bytes(scene: Scene) -> bytes:
    """Canonical serialization: JSON header followed by raw mesh buffers."""
    header = {
        "config": scene.config.to_dict(),
        "camera": scene.camera.to_dict(),
        "lights": scene.lights.to_dict(),
        "materials": scene.materials.to_dict(),
        "registry": scene.registry.to_json(),
        "target": {
            "origin": scene.target.origin.tolist(),
            "axes": scene.target.axes.tolist(),
            "size": scene.target.size.tolist(),
        },
        "meshes": [
            {
                "label": m.label.index,
                "material": m.material_id,
                "instance": m.instance_id,
                "tags": list(m.tags),
                "vertices": len(m.vertices),
                "triangles": len(m.triangles),
            }
            for m in scene.meshes
        ],
    }
    parts = [json.dumps(header, sort_keys=True).encode(), b"\n"]
    for m in scene.meshes:
        parts.append(np.ascontiguousarray(m.vertices, "<f8").tobytes())
        parts.append(np.ascontiguousarray(m.triangles, "<i8").tobytes())
    return b"".join(parts)


def scene_digest(scene: Scene) -> str:
    return hashlib.sha256(scene_bytes(scene)).hexdigest()
