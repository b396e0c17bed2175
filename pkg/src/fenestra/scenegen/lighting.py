"""Sun, sky and interior lights."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..core.params import Sampler
from ..core.rng import RandomStream

SUN_ELEVATION = (10.0, 80.0)


@dataclass(frozen=True)
class LightRig:
    sun_direction: np.ndarray  # unit vector pointing from the scene toward the sun
    sun_intensity: float
    sky_color: tuple[float, float, float]
    sky_intensity: float
    interior: tuple = field(default=())  # ((x, y, z), intensity) pairs, filled in per window
    interior_on: bool = False
    mode: str = "day"

    def __post_init__(self):
        object.__setattr__(self, "sun_direction", np.asarray(self.sun_direction, float).reshape(3))
        if self.sun_intensity < 0 or self.sky_intensity < 0 or any(i < 0 for _, i in self.interior):
            raise ValueError("light intensities must be non-negative")

    @property
    def sun_elevation(self) -> float:
        return float(np.degrees(np.arcsin(np.clip(self.sun_direction[2], -1, 1))))

    def to_dict(self) -> dict:
        return {
            "sun_direction": [float(v) for v in self.sun_direction],
            "sun_intensity": float(self.sun_intensity),
            "sky_color": [float(v) for v in self.sky_color],
            "sky_intensity": float(self.sky_intensity),
            "interior": [[list(map(float, p)), float(i)] for p, i in self.interior],
            "interior_on": bool(self.interior_on),
            "mode": self.mode,
        }


def _u(rng, name, lo, hi):
    return rng.uniform(name, lo, hi) if isinstance(rng, Sampler) else float(rng.uniform(lo, hi))


def _b(rng, name, p):
    return rng.bernoulli(name, p) if isinstance(rng, Sampler) else bool(rng.random() < p)


def sample_lighting(mode: str, rng: RandomStream | Sampler, night_probability: float = 0.2) -> LightRig:
    """Light rig for ``mode`` in day | night | interior-on | baseline-mixed."""
    if mode == "baseline-mixed":
        mode = "night" if _b(rng, "night", night_probability) else "day"
    elif mode not in ("day", "night", "interior-on"):
        raise ValueError(f"unknown lighting mode {mode!r}")
    elev = np.radians(_u(rng, "sun_elevation", *SUN_ELEVATION))
    # azimuth around the front half-space so the façade (facing -y) is often lit
    az = np.radians(_u(rng, "sun_azimuth", 180.0, 360.0))
    sun = np.array([np.cos(elev) * np.cos(az), np.cos(elev) * np.sin(az), np.sin(elev)])
    sun_i = _u(rng, "sun_intensity", 0.6, 1.0)
    sky_i = _u(rng, "sky_intensity", 0.25, 0.45)
    tint = _u(rng, "sky_tint", 0.0, 1.0)
    interior_draw = _b(rng, "interior_on", 0.5)
    if mode == "night":
        return LightRig(
            sun, 0.0, (0.05 + 0.05 * tint, 0.06 + 0.05 * tint, 0.14 + 0.08 * tint), 0.25 * sky_i, (), True, "night"
        )
    sky = (0.55 + 0.15 * tint, 0.7 + 0.1 * tint, 0.92)
    interior = True if mode == "interior-on" else interior_draw
    return LightRig(sun, sun_i, sky, sky_i, (), interior, mode)
