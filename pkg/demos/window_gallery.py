"""Draw each outline kind with its inward offsets and pane grid to a PNG."""

import argparse

from PIL import Image, ImageDraw

from fenestra.core import RandomStream
from fenestra.windowgen import KINDS, OffsetCollapseError, make_outline, offset_inward, subdivide_panes

CELL = 320  # pixels per window
SCALE = 160  # pixels per meter


def polyline(loop, x0, y0):
    p = loop.sample(48)
    return [(x0 + 40 + SCALE * x, y0 + CELL - 40 - SCALE * y) for x, y in p] + [
        (x0 + 40 + SCALE * p[0, 0], y0 + CELL - 40 - SCALE * p[0, 1])
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="window_gallery.png")
    a = ap.parse_args()

    img = Image.new("RGB", (CELL * len(KINDS), CELL), "white")
    draw = ImageDraw.Draw(img)
    rng = RandomStream(a.seed, "gallery")
    for k, kind in enumerate(KINDS):
        outline = make_outline(kind, 1.2, 1.5, rng.fork(kind))
        x0 = k * CELL
        draw.line(polyline(outline, x0, 0), fill=(40, 40, 40), width=3)
        inner = outline
        for d, color in ((0.06, (200, 113, 55)), (0.12, (230, 200, 77))):
            try:
                inner = offset_inward(outline, d)
            except OffsetCollapseError:
                break
            draw.line(polyline(inner, x0, 0), fill=color, width=2)
        rows, cols = (2, 2) if kind != "circular" else (1, 2)
        for cell in subdivide_panes(inner, rows, cols, 0.04).cells:
            draw.polygon(polyline(cell, x0, 0), outline=(77, 179, 230))
        draw.text((x0 + 10, 8), f"{kind}  area {outline.area:.2f} m2", fill="black")
    img.save(a.out)
    print(f"wrote {a.out}")


if __name__ == "__main__":
    main()
