"""Window outlines inscribed in a rectangular bound."""

from __future__ import annotations

import numpy as np

from ..core.params import Sampler
from ..core.rng import RandomStream
from .bezier import CurveLoop, elliptic_quarter, line_segment

KINDS = ("rectangle", "trapezoid", "arched", "circular")


def _draw(rng, name, low, high):
    if rng is None:
        return 0.5 * (low + high)
    if isinstance(rng, Sampler):
        return rng.uniform(name, low, high)
    return float(rng.uniform(low, high))


def make_outline(
    kind: str,
    width: float,
    height: float,
    rng: RandomStream | Sampler | None = None,
    *,
    top_ratio: float | None = None,
    rise: float | None = None,
) -> CurveLoop:
    """Closed outline of ``kind`` inscribed in the box [0, width] x [0, height].

    ``top_ratio`` (trapezoid top width / bottom width) and ``rise`` (arch
    height in meters) are drawn from ``rng`` when not given.
    """
    if not (width > 0 and height > 0):
        raise ValueError("outline bound must have positive extent")
    w, h = float(width), float(height)
    if kind == "rectangle":
        corners = [(0, 0), (w, 0), (w, h), (0, h)]
        return CurveLoop([line_segment(corners[i], corners[(i + 1) % 4]) for i in range(4)])
    if kind == "trapezoid":
        r = top_ratio if top_ratio is not None else _draw(rng, "top_ratio", 0.5, 0.9)
        tw = r * w
        corners = [(0, 0), (w, 0), ((w + tw) / 2, h), ((w - tw) / 2, h)]
        return CurveLoop([line_segment(corners[i], corners[(i + 1) % 4]) for i in range(4)])
    if kind == "arched":
        max_rise = min(w / 2, 0.6 * h)
        a = rise if rise is not None else _draw(rng, "rise", 0.5 * max_rise, max_rise)
        a = min(a, 0.999 * h)
        hb = h - a
        c = (w / 2, hb)
        return CurveLoop(
            [
                line_segment((0, 0), (w, 0)),
                line_segment((w, 0), (w, hb)),
                elliptic_quarter(c, 0.0, w / 2, a),
                elliptic_quarter(c, np.pi / 2, w / 2, a),
                line_segment((0, hb), (0, 0)),
            ]
        )
    if kind == "circular":
        r = min(w, h) / 2
        c = (w / 2, h / 2)
        return CurveLoop([elliptic_quarter(c, k * np.pi / 2, r, r) for k in range(4)])
    raise ValueError(f"unknown outline kind {kind!r}; expected one of {KINDS}")
