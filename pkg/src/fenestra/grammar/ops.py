"""Scope operations: axis splits, repeats and the component split."""

from __future__ import annotations

import numpy as np

from ..core.geometry import AXIS_INDEX, Scope
from .dsl import FACES, Num, RepeatSpec, SplitSpec

TOL = 1e-9


class InfeasibleSplitError(ValueError):
    pass


def _value(v, resolve):
    return v.value if isinstance(v, Num) else resolve(v)


def _slice(scope: Scope, axis: int, start: float, length: float) -> Scope:
    offset = np.zeros(3)
    offset[axis] = start
    size = scope.size.copy()
    size[axis] = length
    return scope.with_(origin=scope.point(offset), size=size)


def split_sizes(extent: float, terms, resolve=None) -> list[tuple[float, int]]:
    """Resolve split terms to ``(length, term index)`` cells along the axis.

    ``terms`` is a sequence of :class:`SizeTerm`. Absolute terms are taken as
    given; relative terms share the residual by weight; a repeat marker fills
    the residual with ``max(1, round(residual / size))`` equal cells. With
    neither, the residual is spread over the absolute terms proportionally so
    the children still tile the parent.
    """
    if resolve is None:
        def resolve(v):
            raise ValueError("split term needs a sampler to resolve rand()")
    vals = [_value(t.value, resolve) for t in terms]
    absolute = sum(v for t, v in zip(terms, vals) if t.kind == "abs")
    if absolute > extent + TOL:
        raise InfeasibleSplitError(
            f"absolute split terms sum to {absolute:g} m, exceeding the extent {extent:g} m"
        )
    residual = max(0.0, extent - absolute)
    rel_total = sum(v for t, v in zip(terms, vals) if t.kind == "rel")
    has_repeat = any(t.kind == "repeat" for t in terms)
    out: list[tuple[float, int]] = []
    for k, (t, v) in enumerate(zip(terms, vals)):
        if t.kind == "abs":
            if rel_total == 0 and not has_repeat and absolute > 0:
                out.append((v * extent / absolute, k))
            else:
                out.append((v, k))
        elif t.kind == "rel":
            out.append((residual * v / rel_total, k))
        else:
            n = repeat_count(residual, v) if residual > 0 else 1
            out.extend([(residual / n, k)] * n)
    return out


def split_parts(scope: Scope, spec: SplitSpec, resolve=None) -> list[tuple[Scope, str]]:
    """Split and pair every child scope with its successor symbol."""
    axis = AXIS_INDEX[spec.axis]
    cells = split_sizes(float(scope.size[axis]), [t for t, _ in spec.parts], resolve)
    scopes = _tile(scope, axis, [length for length, _ in cells])
    return [(s, spec.parts[k][1]) for s, (_, k) in zip(scopes, cells)]


def split_scope(scope: Scope, spec: SplitSpec, resolve=None) -> list[Scope]:
    return [s for s, _ in split_parts(scope, spec, resolve)]


def _tile(scope: Scope, axis: int, lengths) -> list[Scope]:
    out, pos = [], 0.0
    extent = float(scope.size[axis])
    for k, length in enumerate(lengths):
        if k == len(lengths) - 1:
            # pin the last cell to the far face so rounding never opens a gap
            length = max(0.0, extent - pos)
        out.append(_slice(scope, axis, pos, length))
        pos += length
    return out


def repeat_count(extent: float, size: float) -> int:
    return max(1, int(round(extent / size)))


def repeat_split(scope: Scope, spec: RepeatSpec, resolve=None) -> list[Scope]:
    axis = AXIS_INDEX[spec.axis]
    size = _value(spec.size, resolve)
    if size <= 0:
        raise ValueError("repeat cell size must be positive")
    extent = float(scope.size[axis])
    n = repeat_count(extent, size)
    return _tile(scope, axis, [extent / n] * n)


# (origin corner in units of size, local x, local y, local z) per face, in the
# parent's frame; z is the outward normal.
_FACE_FRAMES = {
    "front": ((0, 0, 0), (1, 0, 0), (0, 0, 1), (0, -1, 0)),
    "back": ((1, 1, 0), (-1, 0, 0), (0, 0, 1), (0, 1, 0)),
    "left": ((0, 1, 0), (0, -1, 0), (0, 0, 1), (-1, 0, 0)),
    "right": ((1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 0, 0)),
    "top": ((0, 0, 1), (1, 0, 0), (0, 1, 0), (0, 0, 1)),
    "bottom": ((0, 1, 0), (1, 0, 0), (0, -1, 0), (0, 0, -1)),
}


def component_split(scope: Scope) -> dict[str, Scope]:
    """Six planar face scopes with local z pointing outward."""
    faces = {}
    for name in FACES:
        corner, fx, fy, fz = (np.asarray(a, float) for a in _FACE_FRAMES[name])
        local_axes = np.stack([fx, fy, fz])
        axes = local_axes @ scope.axes
        w = float(np.abs(fx) @ scope.size)
        h = float(np.abs(fy) @ scope.size)
        faces[name] = Scope(scope.point(corner * scope.size), axes, np.array([w, h, 0.0]))
    return faces
