"""Hierarchical, counter-based random streams.

A stream is keyed by ``(seed, path)``. Forking hashes the extended path into a
fresh Philox key, so siblings never share state and the order in which they
are forked is irrelevant.
"""

from __future__ import annotations

import hashlib

import numpy as np


class RandomStream:
    def __init__(self, seed: int, path: str = ""):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self.path = path
        digest = hashlib.blake2b(f"{self.seed}|{path}".encode(), digest_size=16).digest()
        key = int.from_bytes(digest, "little")
        self._gen = np.random.Generator(np.random.Philox(key=key))

    def __repr__(self) -> str:
        return f"RandomStream(seed={self.seed}, path={self.path!r})"

    def fork(self, child_path: str) -> "RandomStream":
        return fork_stream(self, child_path)

    # thin delegation to the underlying generator
    def random(self, size=None):
        return self._gen.random(size)

    def uniform(self, low=0.0, high=1.0, size=None):
        return self._gen.uniform(low, high, size)

    def integers(self, low, high=None, size=None):
        return self._gen.integers(low, high, size)

    def normal(self, loc=0.0, scale=1.0, size=None):
        return self._gen.normal(loc, scale, size)

    @property
    def generator(self) -> np.random.Generator:
        return self._gen


def fork_stream(parent: RandomStream, child_path: str) -> RandomStream:
    if not child_path:
        raise ValueError("child_path must be non-empty")
    path = f"{parent.path}/{child_path}" if parent.path else child_path
    return RandomStream(parent.seed, path)
