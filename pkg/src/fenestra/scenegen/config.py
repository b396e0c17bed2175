"""Scene configuration and its ``key = value`` file format."""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

LEVELS = tuple(range(1, 10)) + ("full",)
GEOMETRY_MODES = ("baseline", "square-only", "rectangles-only", "non-rectangular-boost")
MATERIAL_MODES = ("baseline-flat", "uniform-gray", "random-per-object", "single-random", "albedo-only")
LIGHTING_MODES = ("day", "night", "interior-on", "baseline-mixed")
MAX_RADIUS = 96.0
FULL = 10


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SceneConfig:
    seed: int = 0
    label_level: int | str = "full"
    camera_radius: float = 12.0
    geometry_mode: str = "baseline"
    material_mode: str = "baseline-flat"
    lighting_mode: str = "baseline-mixed"
    # documented knobs
    night_probability: float = 0.2
    frame_wall_reuse: float = 0.3

    def __post_init__(self):
        lvl = self.label_level
        if isinstance(lvl, str) and lvl != "full":
            try:
                lvl = int(lvl)
            except ValueError:
                raise ConfigError(f"label_level must be 1-9 or 'full', got {self.label_level!r}") from None
            object.__setattr__(self, "label_level", lvl)
        if self.label_level not in LEVELS:
            raise ConfigError(f"label_level must be 1-9 or 'full', got {self.label_level!r}")
        if not 0.0 <= float(self.camera_radius) <= MAX_RADIUS:
            raise ConfigError(f"camera_radius must be in [0, {MAX_RADIUS:g}], got {self.camera_radius}")
        for name, allowed in (
            ("geometry_mode", GEOMETRY_MODES),
            ("material_mode", MATERIAL_MODES),
            ("lighting_mode", LIGHTING_MODES),
        ):
            if getattr(self, name) not in allowed:
                raise ConfigError(f"{name} must be one of {', '.join(allowed)}; got {getattr(self, name)!r}")
        for name in ("night_probability", "frame_wall_reuse"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigError(f"{name} must be a probability")

    @property
    def level(self) -> int:
        """Numeric label level; the full model is level 10."""
        return FULL if self.label_level == "full" else int(self.label_level)

    def with_(self, **changes) -> "SceneConfig":
        changes = {k: v for k, v in changes.items() if v is not None}
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_text(self) -> str:
        return "".join(f"{k} = {v}\n" for k, v in self.to_dict().items())


_TYPES = {f.name: f.type for f in fields(SceneConfig)}


def _coerce(key: str, raw: str):
    t = _TYPES[key]
    if key == "label_level":
        return raw if raw == "full" else int(raw)
    if t == "int":
        return int(raw)
    if t == "float":
        return float(raw)
    return raw


def parse_config(text: str, source: str = "<config>") -> SceneConfig:
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, raw = (p.strip() for p in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _TYPES:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        try:
            values[key] = _coerce(key, raw)
        except ValueError:
            raise ConfigError(f"{source}:{lineno}: bad value {raw!r} for {key}") from None
    return SceneConfig(**values)


def load_config(path) -> SceneConfig:
    path = Path(path)
    return parse_config(path.read_text(encoding="utf-8"), str(path))
