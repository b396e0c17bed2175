"""Parameter registry: every sampled value in a scene, in draw order.

Generators never touch a :class:`RandomStream` directly; they go through a
:class:`Sampler`, which records each value under a unique hierarchical path.
A sampler built in replay mode answers from a recorded registry instead, so
regenerating from the registry reproduces the scene exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

from .rng import RandomStream


class RegistryError(ValueError):
    pass


@dataclass(frozen=True)
class ParamEntry:
    path: str
    value: Any
    dist: str
    reuse_source: str | None = None


@dataclass(frozen=True)
class ParamRegistry:
    entries: tuple[ParamEntry, ...] = ()

    def __post_init__(self):
        seen: set[str] = set()
        for e in self.entries:
            if e.path in seen:
                raise RegistryError(f"duplicate parameter path {e.path!r}")
            if e.reuse_source is not None and e.reuse_source not in seen:
                raise RegistryError(
                    f"{e.path!r} reuses {e.reuse_source!r}, which is not an earlier entry"
                )
            seen.add(e.path)

    def __len__(self) -> int:
        return len(self.entries)

    def as_dict(self) -> dict[str, Any]:
        return {e.path: e.value for e in self.entries}

    def to_json(self) -> list[dict]:
        return [
            {"path": e.path, "value": e.value, "dist": e.dist, "reuse": e.reuse_source}
            for e in self.entries
        ]

    @classmethod
    def from_json(cls, records: Sequence[dict]) -> "ParamRegistry":
        return cls(
            tuple(ParamEntry(r["path"], r["value"], r["dist"], r.get("reuse")) for r in records)
        )


def registry_replay(registry: ParamRegistry) -> list[Any]:
    """Values in recorded order, with reused entries resolved to their source's value."""
    values: dict[str, Any] = {}
    out = []
    for e in registry.entries:
        if e.reuse_source is not None:
            if e.reuse_source not in values:
                raise RegistryError(f"dangling reuse source {e.reuse_source!r} for {e.path!r}")
            v = values[e.reuse_source]
        else:
            v = e.value
        values[e.path] = v
        out.append(v)
    return out


class _Log:
    def __init__(self, replay: ParamRegistry | None):
        self.entries: list[ParamEntry] = []
        self.paths: dict[str, ParamEntry] = {}
        self.replay = None
        if replay is not None:
            self.replay = dict(zip((e.path for e in replay.entries), registry_replay(replay)))

    def add(self, entry: ParamEntry):
        if entry.path in self.paths:
            raise RegistryError(f"parameter path sampled twice: {entry.path!r}")
        self.paths[entry.path] = entry
        self.entries.append(entry)


class Sampler:
    """Records (or replays) named draws from a random stream."""

    def __init__(self, stream: RandomStream, replay: ParamRegistry | None = None, _log=None, _prefix=""):
        self.stream = stream
        self._log = _log if _log is not None else _Log(replay)
        self.prefix = _prefix

    def child(self, name: str) -> "Sampler":
        prefix = f"{self.prefix}/{name}" if self.prefix else name
        return Sampler(self.stream.fork(name), _log=self._log, _prefix=prefix)

    def registry(self) -> ParamRegistry:
        return ParamRegistry(tuple(self._log.entries))

    @property
    def replaying(self) -> bool:
        return self._log.replay is not None

    def _full(self, name: str) -> str:
        return f"{self.prefix}/{name}" if self.prefix else name

    def _draw(self, name: str, dist: str, fresh):
        path = self._full(name)
        if self._log.replay is not None:
            try:
                value = self._log.replay[path]
            except KeyError:
                raise RegistryError(f"registry has no entry for {path!r}") from None
        else:
            value = fresh()
        self._log.add(ParamEntry(path, value, dist))
        return value

    def uniform(self, name: str, low: float, high: float) -> float:
        return self._draw(name, f"uniform({low},{high})", lambda: float(self.stream.uniform(low, high)))

    def integer(self, name: str, low: int, high: int) -> int:
        """Uniform integer in the closed range [low, high]."""
        return self._draw(name, f"integer({low},{high})", lambda: int(self.stream.integers(low, high + 1)))

    def bernoulli(self, name: str, p: float) -> bool:
        return self._draw(name, f"bernoulli({p})", lambda: bool(self.stream.random() < p))

    def choice(self, name: str, options: Sequence, weights: Sequence[float] | None = None):
        """Weighted choice; the registry stores the chosen index."""
        n = len(options)
        if weights is None:
            weights = [1.0] * n
        total = float(sum(weights))

        def fresh():
            u = self.stream.random() * total
            acc = 0.0
            for i, w in enumerate(weights):
                acc += w
                if u < acc:
                    return i
            return n - 1

        idx = self._draw(name, f"choice({n})", fresh)
        return options[idx]

    def fixed(self, name: str, value) -> Any:
        """Record a derived, non-random value so it counts as a scene parameter."""
        return self._draw(name, "fixed", lambda: value)

    def reuse(self, name: str, source: str):
        """Record ``name`` as sharing the value already sampled at ``source`` (a full path)."""
        path = self._full(name)
        values = self._log.paths
        if source not in values:
            raise RegistryError(f"reuse source {source!r} has not been sampled")
        value = values[source].value
        src = values[source]
        while src.reuse_source is not None:
            src = values[src.reuse_source]
            value = src.value
        self._log.add(ParamEntry(path, value, "reuse", source))
        return value

    def full_path(self, name: str) -> str:
        return self._full(name)
