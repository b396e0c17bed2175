"""``fenestra`` command line: generate, crop, split, stats, miou, compare."""

from __future__ import annotations

import argparse
import json
import csv
import io
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np
from PIL import Image

from .dataset.crop import crop_and_resize, load_annotations
from .dataset.generate import generate_samples
from .dataset.io import (
    MANIFEST,
    DatasetError,
    ManifestEntry,
    label_sources,
    read_label_map,
    read_manifest,
    write_label_map,
    write_manifest,
)
from .dataset.metrics import ShapeMismatchError, miou, per_image_miou
from .dataset.splits import SCHEMES, make_splits
from .dataset.stats import compute_stats
from .scenegen.config import GEOMETRY_MODES, LIGHTING_MODES, MATERIAL_MODES, SceneConfig, load_config


def _level(text: str):
    if text == "full":
        return "full"
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("level must be 1-9 or 'full'") from None
    if not 1 <= v <= 9:
        raise argparse.ArgumentTypeError("level must be 1-9 or 'full'")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fenestra", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="render synthetic samples")
    g.add_argument("--out", type=Path, default=Path("synthetic"))
    g.add_argument("--config", type=Path, help="key = value scene config file")
    g.add_argument("--grammar", type=Path, help="building grammar (.sg) replacing the baseline")
    g.add_argument("--count", type=_positive, default=1)
    g.add_argument("--seed", type=int)
    g.add_argument("--level", type=_level)
    g.add_argument("--radius", type=float)
    g.add_argument("--material-mode", choices=MATERIAL_MODES)
    g.add_argument("--lighting", choices=LIGHTING_MODES)
    g.add_argument("--geometry-mode", choices=GEOMETRY_MODES)
    g.add_argument("--size", type=int, default=512)
    g.add_argument("--edges", action="store_true", help="also write edges.png")
    g.add_argument("--jobs", type=_positive, default=1)

    c = sub.add_parser("crop", help="turn annotated photos into samples")
    c.add_argument("--annotations", type=Path, required=True, help="JSON file or directory of JSON files")
    c.add_argument("--images", type=Path, required=True, help="directory holding the original photos")
    c.add_argument("--out", type=Path, required=True)
    c.add_argument("--size", type=int, default=512)
    c.add_argument("--jobs", type=_positive, default=1)

    s = sub.add_parser("split", help="tag a manifest with train/test splits")
    s.add_argument("manifest", type=Path)
    s.add_argument("--scheme", choices=SCHEMES, default="global")
    s.add_argument("--train", type=int, default=1024)
    s.add_argument("--test", type=int, default=300)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", type=Path, help="output manifest (default: split.jsonl next to the input)")
    s.add_argument("--jobs", type=_positive, default=1)

    st = sub.add_parser("stats", help="label usage and area table")
    st.add_argument("dataset", type=Path, help="dataset directory, manifest or directory of label maps")
    st.add_argument("--format", choices=("table", "csv"), default="table")
    st.add_argument("--split", choices=("train", "test"), help="restrict to one split of a manifest")
    st.add_argument("--jobs", type=_positive, default=1)

    m = sub.add_parser("miou", help="mIoU of predicted label maps against ground truth")
    m.add_argument("pred", type=Path)
    m.add_argument("gt", type=Path)
    m.add_argument("--per-label", action="store_true")
    m.add_argument("--per-image", type=Path, help="write per-image mIoU CSV here")
    m.add_argument("--jobs", type=_positive, default=1)

    cm = sub.add_parser("compare", help="mIoU matrix: PRED_ROOT/<train>/<test>/ against GT_ROOT/<test>/")
    cm.add_argument("pred_root", type=Path)
    cm.add_argument("gt_root", type=Path)
    cm.add_argument("--out", type=Path, help="CSV output (default: stdout)")
    cm.add_argument("--jobs", type=_positive, default=1)
    return p


def _load_maps(path: Path, split: str | None = None):
    if split is not None:
        mpath = path if path.suffix == ".jsonl" else path / MANIFEST
        root = mpath.parent
        return [(e.sample_id, read_label_map(root / e.files["labels"])) for e in read_manifest(mpath) if e.split == split]
    return [(sid, read_label_map(f)) for sid, f in label_sources(path)]


def _paired(pred: Path, gt: Path):
    p = dict(label_sources(pred))
    g = dict(label_sources(gt))
    if set(p) != set(g):
        missing = sorted(set(g) ^ set(p))[:5]
        raise ShapeMismatchError(f"prediction and ground-truth sample ids differ (e.g. {missing})")
    ids = sorted(g)
    return ids, [read_label_map(p[i]) for i in ids], [read_label_map(g[i]) for i in ids]


def cmd_generate(a) -> int:
    cfg = load_config(a.config) if a.config else SceneConfig()
    cfg = cfg.with_(
        seed=a.seed,
        label_level=a.level,
        camera_radius=a.radius,
        material_mode=a.material_mode,
        lighting_mode=a.lighting,
        geometry_mode=a.geometry_mode,
    )
    if a.size < 16:
        raise ValueError("--size must be at least 16")
    grammar = a.grammar.read_text(encoding="utf-8") if a.grammar else None
    entries = generate_samples(cfg, a.count, a.out, a.size, a.jobs, a.edges, grammar)
    print(f"wrote {len(entries)} samples to {a.out}")
    return 0


def _crop_one(args):
    ann, image_root, out, size = args
    path = image_root / (ann.image or f"{ann.image_id}.jpg")
    try:
        with Image.open(path) as im:
            color, lab = crop_and_resize(ann, im, size)
    except OSError as e:
        raise DatasetError(f"{path}: {e}") from e
    d = out / ann.image_id
    d.mkdir(parents=True, exist_ok=True)
    Image.fromarray(color).save(d / "color.png")
    write_label_map(lab, d / "labels.png")
    prov = {"kind": "photo", "image": str(path), "crop": list(ann.crop)}
    (d / "meta.json").write_text(
        json.dumps({"id": ann.image_id, "locale": ann.locale, **prov}, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    files = {"color": f"{ann.image_id}/color.png", "labels": f"{ann.image_id}/labels.png", "meta": f"{ann.image_id}/meta.json"}
    return ManifestEntry(ann.image_id, files, prov, None, ann.locale)


def cmd_crop(a) -> int:
    anns = load_annotations(a.annotations)
    a.out.mkdir(parents=True, exist_ok=True)
    tasks = [(ann, a.images, a.out, a.size) for ann in anns]
    if a.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=a.jobs) as pool:
            entries = list(pool.map(_crop_one, tasks))
    else:
        entries = [_crop_one(t) for t in tasks]
    write_manifest(entries, a.out / MANIFEST)
    print(f"wrote {len(entries)} cropped samples to {a.out}")
    return 0


def cmd_split(a) -> int:
    mpath = a.manifest if a.manifest.suffix == ".jsonl" else a.manifest / MANIFEST
    entries = make_splits(read_manifest(mpath), a.scheme, a.train, a.test, a.seed)
    out = a.out or mpath.parent / "split.jsonl"
    write_manifest(entries, out)
    n_train = sum(e.split == "train" for e in entries)
    print(f"train {n_train} test {len(entries) - n_train} -> {out}")
    return 0


def cmd_stats(a) -> int:
    maps = [m for _, m in _load_maps(a.dataset, a.split)]
    stats = compute_stats(maps)
    print(stats.to_csv() if a.format == "csv" else stats.to_table(), end="\n" if a.format == "table" else "")
    return 0


def cmd_miou(a) -> int:
    ids, preds, gts = _paired(a.pred, a.gt)
    mean, per = miou(preds, gts)
    print(f"{mean:.4f}")
    if a.per_label:
        from .core.labels import LABELS

        for k, v in per.items():
            print(f"{LABELS[k].name:<14}{'-' if np.isnan(v) else f'{v:.4f}':>8}")
    if a.per_image:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["id", "miou"])
        for sid, v in zip(ids, per_image_miou(preds, gts)):
            w.writerow([sid, "" if np.isnan(v) else f"{v:.6f}"])
        a.per_image.write_text(buf.getvalue(), encoding="utf-8")
    return 0


def cmd_compare(a) -> int:
    trains = sorted(p for p in a.pred_root.iterdir() if p.is_dir())
    tests = sorted(p.name for p in a.gt_root.iterdir() if p.is_dir())
    if not trains or not tests:
        raise DatasetError("compare needs PRED_ROOT/<train>/<test>/ and GT_ROOT/<test>/ directories")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["train \\ test"] + tests)
    for tr in trains:
        row = [tr.name]
        for te in tests:
            pred = tr / te
            if not pred.is_dir():
                row.append("")
                continue
            _, preds, gts = _paired(pred, a.gt_root / te)
            row.append(f"{miou(preds, gts)[0]:.4f}")
        w.writerow(row)
    if a.out:
        a.out.write_text(buf.getvalue(), encoding="utf-8")
    else:
        print(buf.getvalue(), end="")
    return 0


COMMANDS = {
    "generate": cmd_generate,
    "crop": cmd_crop,
    "split": cmd_split,
    "stats": cmd_stats,
    "miou": cmd_miou,
    "compare": cmd_compare,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except KeyboardInterrupt:
        return 130
    except Exception as e:  # diagnostic instead of a traceback
        print(f"fenestra {args.command}: error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
