"""Scene -> rendered sample driver used by the ``generate`` command."""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from ..render import rasterize
from ..grammar import parse_rules
from ..scenegen import SceneConfig, build_scene
from .io import MANIFEST, ManifestEntry, write_manifest, write_sample


def sample_seed(base: int, index: int) -> int:
    """Per-sample scene seed; distinct base seeds give unrelated sample sets."""
    h = hashlib.blake2b(f"{base}/{index}".encode(), digest_size=8).digest()
    return int.from_bytes(h, "little") >> 1


def registry_digest(registry) -> str:
    return hashlib.sha256(json.dumps(registry.to_json(), sort_keys=True).encode()).hexdigest()


def render_sample(
    config: SceneConfig, sample_id: str, out_root, size: int = 512, edges: bool = False, grammar: str | None = None
) -> ManifestEntry:
    scene = build_scene(config, rules=parse_rules(grammar) if grammar else None)
    bundle = rasterize(scene, size, size)
    meta = {
        "id": sample_id,
        "seed": config.seed,
        "config": config.to_dict(),
        "registry_digest": registry_digest(scene.registry),
        "registry_entries": len(scene.registry),
        "geometry_digest": scene.geometry_digest(),
        "camera": scene.camera.to_dict(),
        "lights": scene.lights.to_dict(),
        "windows": scene.window_count,
        "size": size,
    }
    files = write_sample(bundle, meta, Path(out_root) / sample_id, edges=edges)
    rel = {k: str(Path(sample_id) / p.name) for k, p in files.items()}
    return ManifestEntry(sample_id, rel, {"kind": "synthetic", "seed": config.seed, "config": config.to_dict()})


def _job(args):
    return render_sample(*args)


def generate_samples(
    config: SceneConfig,
    count: int,
    out_root,
    size: int = 512,
    jobs: int = 1,
    edges: bool = False,
    grammar: str | None = None,
) -> list[ManifestEntry]:
    """Render ``count`` scenes into ``out_root/<id>/`` and write the manifest.

    ``grammar`` is optional grammar source text replacing the baseline rules.
    """
    if grammar:
        parse_rules(grammar)  # fail early, before spawning workers
    out = Path(out_root)
    out.mkdir(parents=True, exist_ok=True)
    tasks = [
        (config.with_(seed=sample_seed(config.seed, i)), f"{i:06d}", out, size, edges, grammar) for i in range(count)
    ]
    if jobs > 1 and count > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            entries = list(pool.map(_job, tasks))
    else:
        entries = [_job(t) for t in tasks]
    write_manifest(entries, out / MANIFEST)
    return entries
