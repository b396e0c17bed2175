"""Part hierarchy of a window and rigid opening transforms."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ..core.geometry import Mesh
from ..core.labels import OPEN_WINDOW

MECHANISMS = ("closed", "hinged", "sliding")
MAX_HINGE_DEG = 80.0
OPEN_THRESHOLD = 0.05


@dataclass(frozen=True)
class OpeningSpec:
    """How a sash moves.

    ``hinge_axis`` is oriented so that a positive rotation swings the sash
    outward; ``slide_axis`` is the unit direction of travel along a track of
    length ``track``.
    """

    mechanism: str = "closed"
    fraction: float = 0.0
    hinge_point: tuple = (0.0, 0.0, 0.0)
    hinge_axis: tuple = (0.0, 0.0, 1.0)
    slide_axis: tuple = (1.0, 0.0, 0.0)
    track: float = 1.0
    max_angle: float = MAX_HINGE_DEG

    def __post_init__(self):
        if self.mechanism not in MECHANISMS:
            raise ValueError(f"unknown opening mechanism {self.mechanism!r}")
        if not 0.0 <= self.fraction <= 1.0:
            raise ValueError(f"open fraction must be in [0, 1], got {self.fraction}")

    @property
    def angle(self) -> float:
        """Hinge angle in degrees."""
        return self.fraction * self.max_angle if self.mechanism == "hinged" else 0.0

    @property
    def is_open(self) -> bool:
        return self.mechanism != "closed" and self.fraction > OPEN_THRESHOLD


@dataclass(frozen=True)
class Part:
    name: str
    meshes: tuple = ()
    children: tuple = ()
    visible: bool = True

    def walk(self):
        yield self
        for c in self.children:
            yield from c.walk()

    def find(self, name: str) -> "Part | None":
        return next((p for p in self.walk() if p.name == name), None)

    def all_meshes(self) -> list[Mesh]:
        out = []
        stack = [self]
        while stack:
            p = stack.pop()
            if not p.visible:
                continue
            out.extend(p.meshes)
            stack.extend(reversed(p.children))
        return out

    def transformed(self, rotation, translation) -> "Part":
        return replace(
            self,
            meshes=tuple(m.transformed(rotation, translation) for m in self.meshes),
            children=tuple(c.transformed(rotation, translation) for c in self.children),
        )

    def replaced(self, name: str, fn) -> "Part":
        if self.name == name:
            return fn(self)
        return replace(self, children=tuple(c.replaced(name, fn) for c in self.children))


def rotation_about(axis, degrees: float) -> np.ndarray:
    a = np.asarray(axis, float)
    a = a / np.linalg.norm(a)
    th = np.radians(degrees)
    k = np.array([[0, -a[2], a[1]], [a[2], 0, -a[0]], [-a[1], a[0], 0]])
    return np.eye(3) + np.sin(th) * k + (1 - np.cos(th)) * (k @ k)


def opening_transform(spec: OpeningSpec) -> tuple[np.ndarray, np.ndarray]:
    """``(R, t)`` with ``x' = R x + t``."""
    if spec.mechanism == "hinged":
        r = rotation_about(spec.hinge_axis, spec.angle)
        p = np.asarray(spec.hinge_point, float)
        return r, p - r @ p
    if spec.mechanism == "sliding":
        d = np.asarray(spec.slide_axis, float)
        return np.eye(3), d / np.linalg.norm(d) * spec.fraction * spec.track
    return np.eye(3), np.zeros(3)


def _check_hinge(sash: Part, point, tol=1e-6):
    verts = [m.vertices for m in sash.all_meshes()]
    if not verts:
        return
    v = np.concatenate(verts)
    lo, hi = v.min(axis=0), v.max(axis=0)
    p = np.asarray(point, float)
    inside = np.all(p >= lo - tol) and np.all(p <= hi + tol)
    on_face = np.any(np.isclose(p, lo, atol=tol) | np.isclose(p, hi, atol=tol))
    if not (inside and on_face):
        raise ValueError("hinge edge does not lie on the sash boundary")


def apply_opening(tree: Part, spec: OpeningSpec, sash: str = "sash", aperture: str = "aperture") -> Part:
    """Move the ``sash`` subtree rigidly and reveal the ``aperture`` part.

    The aperture becomes visible and labelled open-window when the window is
    open past the threshold fraction; a closed spec returns ``tree`` as is.
    """
    if spec.mechanism == "closed" or spec.fraction == 0.0:
        return tree
    node = tree.find(sash)
    if node is None:
        raise KeyError(f"no part named {sash!r}")
    if spec.mechanism == "hinged":
        _check_hinge(node, spec.hinge_point)
    r, t = opening_transform(spec)
    out = tree.replaced(sash, lambda p: p.transformed(r, t))
    if spec.is_open and out.find(aperture) is not None:
        out = out.replaced(
            aperture,
            lambda p: replace(p, visible=True, meshes=tuple(m.relabeled(OPEN_WINDOW) for m in p.meshes)),
        )
    return out
