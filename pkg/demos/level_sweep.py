"""Render one seed at label levels 1..9 and full, side by side (label maps)."""

import argparse

import numpy as np
from PIL import Image

from fenestra.core.labels import PALETTE
from fenestra.render import rasterize
from fenestra.scenegen import SceneConfig, build_scene


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=3)
    ap.add_argument("--size", type=int, default=192)
    ap.add_argument("--out", default="level_sweep.png")
    a = ap.parse_args()

    tiles = []
    for level in list(range(1, 10)) + ["full"]:
        scene = build_scene(SceneConfig(seed=a.seed, label_level=level))
        lab = rasterize(scene, a.size, a.size).label
        tiles.append(np.asarray(PALETTE, np.uint8)[lab])
        print(f"level {level}: labels {sorted(set(np.unique(lab).tolist()))}")
    top = np.concatenate(tiles[:5], axis=1)
    bottom = np.concatenate(tiles[5:], axis=1)
    Image.fromarray(np.concatenate([top, bottom], axis=0)).save(a.out)
    print(f"wrote {a.out}")


if __name__ == "__main__":
    main()
