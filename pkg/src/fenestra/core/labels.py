"""The fixed 11-class label taxonomy and its palette."""

from __future__ import annotations

import re
from dataclasses import dataclass


@dataclass(frozen=True)
class SemanticLabel:
    index: int
    name: str
    palette_rgb: tuple[int, int, int]

    def __int__(self) -> int:
        return self.index


class UnknownLabelError(ValueError):
    pass


def _hex(code: str) -> tuple[int, int, int]:
    return tuple(int(code[i : i + 2], 16) for i in (1, 3, 5))  # type: ignore[return-value]


LABELS: tuple[SemanticLabel, ...] = tuple(
    SemanticLabel(i, name, _hex(code))
    for i, (name, code) in enumerate(
        [
            ("unlabeled", "#000000"),
            ("wall", "#9A9A9A"),
            ("window pane", "#4DB3E6"),
            ("wall frame", "#C87137"),
            ("window frame", "#E6C84D"),
            ("shutter", "#8C4DE6"),
            ("balcony", "#4DE68A"),
            ("misc object", "#E64D4D"),
            ("blind", "#4D5FE6"),
            ("bars", "#E64DB3"),
            ("open-window", "#B3E64D"),
        ]
    )
)

NUM_LABELS = len(LABELS)

UNLABELED, WALL, WINDOW_PANE, WALL_FRAME, WINDOW_FRAME, SHUTTER, BALCONY, MISC_OBJECT, BLIND, BARS, OPEN_WINDOW = LABELS

# Flat (11, 3) uint8 palette, indexable by label index.
PALETTE = tuple(lab.palette_rgb for lab in LABELS)


def _key(name: str) -> str:
    return re.sub(r"[\s_\-]+", "", name.strip().lower())


_BY_KEY = {_key(lab.name): lab for lab in LABELS}


def label_of_name(name: str) -> SemanticLabel:
    """Look up a label by name, ignoring case, spaces, hyphens and underscores."""
    try:
        return _BY_KEY[_key(name)]
    except KeyError:
        valid = ", ".join(lab.name for lab in LABELS)
        raise UnknownLabelError(f"unknown label {name!r}; valid names: {valid}") from None


def label_of_index(index: int) -> SemanticLabel:
    if not 0 <= index < NUM_LABELS:
        raise UnknownLabelError(f"label index {index} outside 0..{NUM_LABELS - 1}")
    return LABELS[index]


def label_of_rgb(rgb) -> SemanticLabel:
    rgb = tuple(int(c) for c in rgb)
    for lab in LABELS:
        if lab.palette_rgb == rgb:
            return lab
    raise UnknownLabelError(f"no label with palette colour {rgb}")
