"""Oriented scopes and labeled triangle meshes."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .labels import SemanticLabel

AXIS_INDEX = {"x": 0, "y": 1, "z": 2}
MIN_TRIANGLE_AREA = 1e-12


@dataclass(frozen=True, eq=False)
class Scope:
    """Oriented box. ``axes`` rows are the local x, y, z unit vectors in world space."""

    origin: np.ndarray
    axes: np.ndarray
    size: np.ndarray

    def __post_init__(self):
        origin = np.asarray(self.origin, dtype=float).reshape(3)
        axes = np.asarray(self.axes, dtype=float).reshape(3, 3)
        size = np.asarray(self.size, dtype=float).reshape(3)
        if np.any(size < 0):
            raise ValueError(f"scope size must be non-negative, got {size}")
        if not np.allclose(axes @ axes.T, np.eye(3), atol=1e-9):
            raise ValueError("scope axes are not orthonormal")
        for name, val in (("origin", origin), ("axes", axes), ("size", size)):
            val.setflags(write=False)
            object.__setattr__(self, name, val)

    @classmethod
    def box(cls, origin=(0, 0, 0), size=(1, 1, 1)) -> "Scope":
        return cls(np.asarray(origin, float), np.eye(3), np.asarray(size, float))

    def point(self, local) -> np.ndarray:
        """World position of local (meters) coordinates; accepts (..., 3)."""
        local = np.asarray(local, dtype=float)
        return self.origin + local @ self.axes

    def to_local(self, world) -> np.ndarray:
        return (np.asarray(world, dtype=float) - self.origin) @ self.axes.T

    @property
    def center(self) -> np.ndarray:
        return self.point(self.size / 2)

    @property
    def volume(self) -> float:
        return float(np.prod(self.size))

    def measure(self) -> float:
        """Product of the non-zero extents (area for planar scopes)."""
        nz = self.size[self.size > 0]
        return float(np.prod(nz)) if nz.size else 0.0

    def corners(self) -> np.ndarray:
        idx = np.array([[i, j, k] for k in (0, 1) for j in (0, 1) for i in (0, 1)], float)
        return self.point(idx * self.size)

    def with_(self, origin=None, axes=None, size=None) -> "Scope":
        if axes is not None:
            return Scope(self.origin if origin is None else origin, axes, self.size if size is None else size)
        # axes are already validated; only a new size needs checking
        o = self.origin if origin is None else np.array(origin, dtype=float).reshape(3)
        z = self.size if size is None else np.array(size, dtype=float).reshape(3)
        if np.any(z < 0):
            raise ValueError(f"scope size must be non-negative, got {z}")
        out = object.__new__(Scope)
        for name, val in (("origin", o), ("axes", self.axes), ("size", z)):
            val.setflags(write=False)
            object.__setattr__(out, name, val)
        return out

    def translated(self, local_offset) -> "Scope":
        return self.with_(origin=self.point(local_offset))


class MeshError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Mesh:
    vertices: np.ndarray
    triangles: np.ndarray
    label: SemanticLabel
    material_id: str = ""
    instance_id: int = 0
    tags: tuple = field(default=())

    def __post_init__(self):
        v = np.ascontiguousarray(self.vertices, dtype=np.float64).reshape(-1, 3)
        t = np.ascontiguousarray(self.triangles, dtype=np.int64).reshape(-1, 3)
        if t.size and (t.min() < 0 or t.max() >= len(v)):
            raise MeshError("triangle index out of range")
        if t.size and np.any(triangle_areas(v, t) <= MIN_TRIANGLE_AREA):
            raise MeshError("mesh contains a degenerate triangle")
        v.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "triangles", t)

    @classmethod
    def clean(cls, vertices, triangles, label, material_id="", instance_id=0, tags=()) -> "Mesh":
        """Build a mesh, silently dropping degenerate triangles."""
        v = np.asarray(vertices, dtype=float).reshape(-1, 3)
        t = np.asarray(triangles, dtype=np.int64).reshape(-1, 3)
        if t.size and (t.min() < 0 or t.max() >= len(v)):
            raise MeshError("triangle index out of range")
        if t.size:
            t = t[triangle_areas(v, t) > MIN_TRIANGLE_AREA]
        t = np.ascontiguousarray(t)
        t.setflags(write=False)
        return cls._trusted(v, t, label, material_id, instance_id, tuple(tags))

    @classmethod
    def _trusted(cls, vertices, triangles, label, material_id, instance_id, tags) -> "Mesh":
        # copies of an already validated mesh under a rigid motion skip the checks
        m = object.__new__(cls)
        v = np.ascontiguousarray(vertices, dtype=np.float64)
        v.setflags(write=False)
        for name, value in zip(
            ("vertices", "triangles", "label", "material_id", "instance_id", "tags"),
            (v, triangles, label, material_id, instance_id, tags),
        ):
            object.__setattr__(m, name, value)
        return m

    def transformed(self, rotation, translation=(0, 0, 0)) -> "Mesh":
        r = np.asarray(rotation, float)
        if not np.allclose(r @ r.T, np.eye(3), atol=1e-9):
            raise MeshError("transformed() expects a rotation matrix")
        v = self.vertices @ r.T + np.asarray(translation, float)
        return Mesh._trusted(v, self.triangles, self.label, self.material_id, self.instance_id, self.tags)

    def relabeled(self, label=None, material_id=None, instance_id=None, tags=None) -> "Mesh":
        return Mesh._trusted(
            self.vertices,
            self.triangles,
            self.label if label is None else label,
            self.material_id if material_id is None else material_id,
            self.instance_id if instance_id is None else instance_id,
            self.tags if tags is None else tuple(tags),
        )

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    def face_normals(self) -> np.ndarray:
        a, b, c = (self.vertices[self.triangles[:, i]] for i in range(3))
        n = np.cross(b - a, c - a)
        return n / np.linalg.norm(n, axis=1, keepdims=True)


def triangle_areas(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    a, b, c = (vertices[triangles[:, i]] for i in range(3))
    u, w = b - a, c - a
    cx = u[:, 1] * w[:, 2] - u[:, 2] * w[:, 1]
    cy = u[:, 2] * w[:, 0] - u[:, 0] * w[:, 2]
    cz = u[:, 0] * w[:, 1] - u[:, 1] * w[:, 0]
    return 0.5 * np.sqrt(cx * cx + cy * cy + cz * cz)


def box_mesh(scope: Scope, label, material_id="", instance_id=0) -> Mesh:
    """Closed box over a scope, or a single quad if one extent is zero."""
    zero = np.flatnonzero(scope.size <= 1e-12)
    if len(zero) >= 2:
        raise MeshError("cannot emit geometry for a scope with fewer than two extents")
    if len(zero) == 1:
        return quad_mesh(scope, int(zero[0]), label, material_id, instance_id)
    c = scope.corners()
    # corner index = i + 2j + 4k; faces wound outward
    faces = [
        (0, 2, 3, 1), (4, 5, 7, 6),  # -z, +z
        (0, 1, 5, 4), (2, 6, 7, 3),  # -y, +y
        (0, 4, 6, 2), (1, 3, 7, 5),  # -x, +x
    ]
    tris = [t for a, b, cc, d in faces for t in ((a, b, cc), (a, cc, d))]
    return Mesh.clean(c, tris, label, material_id, instance_id)


def quad_mesh(scope: Scope, flat_axis: int, label, material_id="", instance_id=0) -> Mesh:
    u, v = [a for a in range(3) if a != flat_axis]
    local = np.zeros((4, 3))
    local[1, u] = local[2, u] = scope.size[u]
    local[2, v] = local[3, v] = scope.size[v]
    return Mesh.clean(scope.point(local), [(0, 1, 2), (0, 2, 3)], label, material_id, instance_id)


def meshes_digest(meshes) -> str:
    """SHA-256 over vertex/index bytes, labels and material ids."""
    h = hashlib.sha256()
    for m in meshes:
        h.update(m.vertices.tobytes())
        h.update(m.triangles.tobytes())
        h.update(f"{m.label.index}|{m.material_id}|{m.instance_id}|{m.tags}".encode())
    return h.hexdigest()
