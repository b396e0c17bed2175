"""Real-photo ingestion: crop annotations, polygon rasterization, resizing.

Annotation schema (JSON, one object per image)::

    {
      "image_id": "paris_0001",
      "image": "paris_0001.jpg",          # relative to the image root
      "locale": "paris",
      "crop": [x0, y0, x1, y1],           # pixels, x1/y1 exclusive
      "polygons": [                       # painted in order, later on top
        {"label": "window frame", "instance": 1, "points": [[x, y], ...]},
        {"label": "window pane", "instance": 2, "points": [[x, y], ...]}
      ]
    }

Polygon points are in original-image pixel coordinates and must lie inside
the crop; label names follow the taxonomy (case, space, hyphen and
underscore insensitive).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from ..core.labels import label_of_name
from ..windowgen.bezier import points_in_polygon

POLYGON_TOL = 0.5  # pixels


class AnnotationError(ValueError):
    pass


class CropOutOfBoundsError(AnnotationError):
    pass


@dataclass(frozen=True)
class PolygonLabel:
    label: int
    instance: int
    points: np.ndarray


@dataclass(frozen=True)
class CropAnnotation:
    image_id: str
    crop: tuple[int, int, int, int]
    locale: str = ""
    polygons: tuple[PolygonLabel, ...] = field(default=())
    image: str = ""

    def __post_init__(self):
        x0, y0, x1, y1 = self.crop
        if not (x1 > x0 and y1 > y0):
            raise AnnotationError(f"{self.image_id}: empty crop rectangle {self.crop}")
        ids = [p.instance for p in self.polygons]
        if len(set(ids)) != len(ids):
            raise AnnotationError(f"{self.image_id}: instance ids must be unique per image")
        for p in self.polygons:
            pts = p.points
            if (
                pts[:, 0].min() < x0 - POLYGON_TOL
                or pts[:, 0].max() > x1 + POLYGON_TOL
                or pts[:, 1].min() < y0 - POLYGON_TOL
                or pts[:, 1].max() > y1 + POLYGON_TOL
            ):
                raise AnnotationError(f"{self.image_id}: polygon of instance {p.instance} leaves the crop")

    def check_bounds(self, width: int, height: int) -> None:
        x0, y0, x1, y1 = self.crop
        if x0 < 0 or y0 < 0 or x1 > width or y1 > height:
            raise CropOutOfBoundsError(
                f"{self.image_id}: crop {self.crop} outside the {width}x{height} image"
            )

    @classmethod
    def from_json(cls, rec: dict) -> "CropAnnotation":
        try:
            polys = tuple(
                PolygonLabel(label_of_name(p["label"]).index, int(p["instance"]), np.asarray(p["points"], float).reshape(-1, 2))
                for p in rec.get("polygons", [])
            )
            return cls(str(rec["image_id"]), tuple(int(v) for v in rec["crop"]), rec.get("locale", ""), polys, rec.get("image", ""))
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, AnnotationError):
                raise
            raise AnnotationError(f"bad annotation record: {e}") from e


def load_annotations(path) -> list[CropAnnotation]:
    """A JSON file holding one record or a list, or a directory of such files."""
    p = Path(path)
    files = sorted(p.glob("*.json")) if p.is_dir() else [p]
    out = []
    for f in files:
        try:
            data = json.loads(f.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise AnnotationError(f"{f}: {e}") from e
        for rec in data if isinstance(data, list) else [data]:
            out.append(CropAnnotation.from_json(rec))
    return out


def rasterize_polygons(ann: CropAnnotation, size: int) -> np.ndarray:
    """Label map of the crop at ``size`` x ``size``, sampled at pixel centers."""
    x0, y0, x1, y1 = ann.crop
    sx = size / (x1 - x0)
    sy = size / (y1 - y0)
    out = np.zeros((size, size), np.uint8)
    for poly in ann.polygons:
        pts = (poly.points - [x0, y0]) * [sx, sy]
        lo = np.clip(np.floor(pts.min(axis=0)).astype(int), 0, size)
        hi = np.clip(np.ceil(pts.max(axis=0)).astype(int) + 1, 0, size)
        if np.any(hi <= lo):
            continue
        xs = np.arange(lo[0], hi[0]) + 0.5
        ys = np.arange(lo[1], hi[1]) + 0.5
        gx, gy = np.meshgrid(xs, ys)
        grid = np.column_stack([gx.ravel(), gy.ravel()])
        step = max(1, (1 << 22) // len(pts))
        inside = np.concatenate(
            [points_in_polygon(grid[k : k + step], pts) for k in range(0, len(grid), step)]
        ).reshape(gx.shape)
        region = out[lo[1] : hi[1], lo[0] : hi[0]]
        region[inside] = poly.label
    return out


def crop_and_resize(ann: CropAnnotation, image, size: int = 512, labels: np.ndarray | None = None):
    """Crop ``image`` to the annotation and resize to ``size`` x ``size``.

    Color is resampled bilinearly (aspect ratio is not kept); the label map
    comes from the annotation polygons, or from ``labels`` (nearest neighbor)
    when a full-resolution label image is supplied.
    """
    img = image if isinstance(image, Image.Image) else Image.fromarray(np.asarray(image, np.uint8))
    ann.check_bounds(*img.size)
    box = tuple(int(v) for v in ann.crop)
    color = np.array(img.convert("RGB").crop(box).resize((size, size), Image.Resampling.BILINEAR))
    if labels is not None:
        lab_img = Image.fromarray(np.asarray(labels, np.uint8)).crop(box)
        lab = np.array(lab_img.resize((size, size), Image.Resampling.NEAREST))
    else:
        lab = rasterize_polygons(ann, size)
    return color, lab
