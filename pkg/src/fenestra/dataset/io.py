"""Sample directories, pass encodings and the line-delimited manifest.

Encodings: ``color.png`` 8-bit RGB; ``labels.png`` 8-bit palette image whose
indices are label indices; ``depth.png`` 16-bit millimeters (65535 marks
background, finite depths clamp at 65534); ``normal.png`` 8-bit RGB of
``(n + 1) / 2``; ``edges.png`` 0/255 gray; ``meta.json`` provenance.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from ..core.labels import NUM_LABELS, PALETTE

DEPTH_INF = 65535
DEPTH_MAX = 65534
PASS_FILES = {
    "color": "color.png",
    "labels": "labels.png",
    "depth": "depth.png",
    "normal": "normal.png",
    "edges": "edges.png",
    "meta": "meta.json",
}
MANIFEST = "manifest.jsonl"


class DatasetError(RuntimeError):
    pass


def _palette_bytes() -> list[int]:
    flat = [c for rgb in PALETTE for c in rgb]
    return flat + [0] * (768 - len(flat))


def encode_depth(depth: np.ndarray) -> np.ndarray:
    d = np.asarray(depth, float)
    mm = np.where(np.isfinite(d), np.clip(np.rint(d * 1000.0), 0, DEPTH_MAX), DEPTH_INF)
    return mm.astype(np.uint16)


def decode_depth(mm: np.ndarray) -> np.ndarray:
    mm = np.asarray(mm)
    return np.where(mm == DEPTH_INF, np.inf, mm.astype(float) / 1000.0)


def encode_normal(normal: np.ndarray) -> np.ndarray:
    return np.clip(np.rint((np.asarray(normal, float) + 1.0) * 0.5 * 255.0), 0, 255).astype(np.uint8)


def decode_normal(rgb: np.ndarray) -> np.ndarray:
    return np.asarray(rgb, float) / 255.0 * 2.0 - 1.0


def label_image(labels: np.ndarray) -> Image.Image:
    lab = np.asarray(labels)
    if lab.size and (lab.min() < 0 or lab.max() >= NUM_LABELS):
        raise DatasetError("label index out of range")
    im = Image.fromarray(lab.astype(np.uint8))
    im.putpalette(_palette_bytes())  # turns the gray image into a palette image
    return im


def write_label_map(labels: np.ndarray, path) -> None:
    label_image(labels).save(path, optimize=False)


def read_label_map(path) -> np.ndarray:
    path = Path(path)
    try:
        with Image.open(path) as im:
            if im.mode != "P":
                raise DatasetError(f"{path}: label map must be a palette image, got mode {im.mode}")
            return np.array(im, dtype=np.uint8)
    except OSError as e:
        raise DatasetError(f"{path}: {e}") from e


def _save(im: Image.Image, path: Path) -> None:
    try:
        im.save(path, optimize=False)
    except OSError as e:
        raise DatasetError(f"cannot write {path}: {e}") from e


def write_sample(bundle, meta: dict, out_dir, edges: bool = False) -> dict[str, Path]:
    """Write one rendered sample; returns the written file paths by pass name."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise DatasetError(f"cannot create {out}: {e}") from e
    files = {}
    color = np.clip(np.rint(np.asarray(bundle.color, float) * 255.0), 0, 255).astype(np.uint8)
    _save(Image.fromarray(color), out / PASS_FILES["color"])
    files["color"] = out / PASS_FILES["color"]
    _save(label_image(bundle.label), out / PASS_FILES["labels"])
    files["labels"] = out / PASS_FILES["labels"]
    _save(Image.fromarray(encode_depth(bundle.depth)), out / PASS_FILES["depth"])
    files["depth"] = out / PASS_FILES["depth"]
    _save(Image.fromarray(encode_normal(bundle.normal)), out / PASS_FILES["normal"])
    files["normal"] = out / PASS_FILES["normal"]
    if edges:
        _save(Image.fromarray((np.asarray(bundle.edge) > 0).astype(np.uint8) * 255), out / PASS_FILES["edges"])
        files["edges"] = out / PASS_FILES["edges"]
    try:
        (out / PASS_FILES["meta"]).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as e:
        raise DatasetError(f"cannot write {out / PASS_FILES['meta']}: {e}") from e
    files["meta"] = out / PASS_FILES["meta"]
    return files


def read_sample(sample_dir) -> dict:
    """Decode the passes of a sample directory (missing optional passes are skipped)."""
    d = Path(sample_dir)
    if not d.is_dir():
        raise DatasetError(f"{d}: not a sample directory")
    out: dict = {}
    try:
        if (d / PASS_FILES["color"]).exists():
            with Image.open(d / PASS_FILES["color"]) as im:
                out["color"] = np.array(im.convert("RGB"))
        out["labels"] = read_label_map(d / PASS_FILES["labels"])
        if (d / PASS_FILES["depth"]).exists():
            with Image.open(d / PASS_FILES["depth"]) as im:
                out["depth_mm"] = np.array(im).astype(np.uint16)
            out["depth"] = decode_depth(out["depth_mm"])
        if (d / PASS_FILES["normal"]).exists():
            with Image.open(d / PASS_FILES["normal"]) as im:
                out["normal"] = decode_normal(np.array(im))
        if (d / PASS_FILES["edges"]).exists():
            with Image.open(d / PASS_FILES["edges"]) as im:
                out["edges"] = (np.array(im) > 0).astype(np.uint8)
        if (d / PASS_FILES["meta"]).exists():
            out["meta"] = json.loads((d / PASS_FILES["meta"]).read_text(encoding="utf-8"))
    except OSError as e:
        raise DatasetError(f"{d}: {e}") from e
    return out


@dataclass
class ManifestEntry:
    sample_id: str
    files: dict = field(default_factory=dict)  # pass name -> path relative to the manifest root
    provenance: dict = field(default_factory=dict)
    split: str | None = None
    locale: str = ""

    def to_json(self) -> dict:
        return {
            "id": self.sample_id,
            "files": self.files,
            "provenance": self.provenance,
            "split": self.split,
            "locale": self.locale,
        }

    @classmethod
    def from_json(cls, rec: dict) -> "ManifestEntry":
        return cls(rec["id"], rec.get("files", {}), rec.get("provenance", {}), rec.get("split"), rec.get("locale", ""))


def write_manifest(entries, path) -> None:
    path = Path(path)
    ids = [e.sample_id for e in entries]
    if len(set(ids)) != len(ids):
        raise DatasetError("manifest sample ids must be unique")
    lines = [json.dumps(e.to_json(), sort_keys=True) for e in entries]
    try:
        path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    except OSError as e:
        raise DatasetError(f"cannot write {path}: {e}") from e


def read_manifest(path) -> list[ManifestEntry]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise DatasetError(f"cannot read {path}: {e}") from e
    entries = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            entries.append(ManifestEntry.from_json(json.loads(line)))
        except (json.JSONDecodeError, KeyError) as e:
            raise DatasetError(f"{path}:{lineno}: bad manifest record ({e})") from e
    return entries


def check_manifest(entries, root) -> None:
    """Raise unless ids are unique, files exist and split tags are train/test."""
    root = Path(root)
    seen = set()
    for e in entries:
        if e.sample_id in seen:
            raise DatasetError(f"duplicate sample id {e.sample_id!r}")
        seen.add(e.sample_id)
        for name, rel in e.files.items():
            if not (root / rel).exists():
                raise DatasetError(f"{e.sample_id}: missing {name} file {root / rel}")
        if e.split not in (None, "train", "test"):
            raise DatasetError(f"{e.sample_id}: bad split tag {e.split!r}")


def label_sources(path) -> list[tuple[str, Path]]:
    """(sample id, labels file) pairs for a dataset directory, manifest or label-map directory."""
    p = Path(path)
    if p.is_file() and p.suffix == ".jsonl":
        root = p.parent
        return [(e.sample_id, root / e.files["labels"]) for e in read_manifest(p)]
    if not p.is_dir():
        raise DatasetError(f"{p}: no such dataset")
    if (p / MANIFEST).exists():
        return label_sources(p / MANIFEST)
    nested = sorted(q for q in p.iterdir() if (q / PASS_FILES["labels"]).is_file())
    if nested:
        return [(q.name, q / PASS_FILES["labels"]) for q in nested]
    flat = sorted(p.glob("*.png"))
    if flat:
        return [(q.stem, q) for q in flat]
    raise DatasetError(f"{p}: no label maps found")
