"""Seeded train/test splits, global or stratified by locale."""

from __future__ import annotations

from dataclasses import replace

from ..core.rng import RandomStream
from .io import ManifestEntry

SCHEMES = ("global", "per-locale")


class InsufficientSamplesError(ValueError):
    def __init__(self, stratum: str, have: int, need: int):
        super().__init__(f"stratum {stratum!r} has {have} samples, {need} requested")
        self.stratum = stratum


def _draw(entries: list[ManifestEntry], train_n: int, test_n: int, stream: RandomStream, stratum: str):
    need = train_n + test_n
    if len(entries) < need:
        raise InsufficientSamplesError(stratum, len(entries), need)
    ordered = sorted(entries, key=lambda e: e.sample_id)
    perm = stream.generator.permutation(len(ordered))
    picked = [ordered[i] for i in perm[:need]]
    return [replace(e, split="train") for e in picked[:train_n]] + [replace(e, split="test") for e in picked[train_n:]]


def make_splits(
    entries, scheme: str = "global", train_n: int = 1024, test_n: int = 300, seed: int = 0
) -> list[ManifestEntry]:
    """Tag ``train_n`` train and ``test_n`` test entries (per locale for ``per-locale``).

    Only selected entries are returned, so the tags partition the result.
    The assignment depends only on ``seed`` and the set of sample ids.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown split scheme {scheme!r}; choose from {', '.join(SCHEMES)}")
    if train_n < 0 or test_n < 0:
        raise ValueError("split sizes must be non-negative")
    entries = list(entries)
    ids = [e.sample_id for e in entries]
    if len(set(ids)) != len(ids):
        raise ValueError("sample ids must be unique")
    root = RandomStream(seed, "splits")
    if scheme == "global":
        return _draw(entries, train_n, test_n, root.fork("global"), "global")
    out = []
    for loc in sorted({e.locale for e in entries}):
        group = [e for e in entries if e.locale == loc]
        out.extend(_draw(group, train_n, test_n, root.fork(f"locale={loc}"), loc or "<none>"))
    return out
