"""Per-label usage and area statistics."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from ..core.labels import LABELS, NUM_LABELS


@dataclass(frozen=True)
class LabelStats:
    images: int
    images_using: tuple[int, ...]  # per label index
    pixels: tuple[int, ...]

    @property
    def area_percent(self) -> tuple[float, ...]:
        total = sum(self.pixels)
        if total == 0:
            return tuple(0.0 for _ in self.pixels)
        return tuple(100.0 * p / total for p in self.pixels)

    def rows(self) -> list[tuple[str, int, float]]:
        """(label, images using, area %) in label order."""
        pct = self.area_percent
        return [(LABELS[k].name, self.images_using[k], pct[k]) for k in range(NUM_LABELS)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["label", "images using", "area %"])
        for name, n, pct in self.rows():
            w.writerow([name, n, f"{pct:.2f}"])
        return buf.getvalue()

    def to_table(self) -> str:
        lines = [f"{'label':<14}{'images using':>14}{'area %':>10}"]
        for name, n, pct in self.rows():
            lines.append(f"{name:<14}{n:>14d}{pct:>9.2f}%")
        lines.append(f"{'total images':<14}{self.images:>14d}")
        return "\n".join(lines)


def compute_stats(label_maps) -> LabelStats:
    images = 0
    using = np.zeros(NUM_LABELS, np.int64)
    pixels = np.zeros(NUM_LABELS, np.int64)
    for lab in label_maps:
        counts = np.bincount(np.asarray(lab, np.int64).ravel(), minlength=NUM_LABELS)[:NUM_LABELS]
        pixels += counts
        using += counts > 0
        images += 1
    return LabelStats(images, tuple(int(v) for v in using), tuple(int(v) for v in pixels))
