"""Annotation and image record types plus the on-disk label format.

Label files hold one box per line, ASCII, LF-terminated:

    class_id cx cy w h

with all coordinates normalized to the image size and written at six
decimal places. class_id is 0 (clear), 1 (occluded by another fruit) or
2 (occluded by branch or leaf).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

__all__ = [
    "OCCLUSION_NONE",
    "OCCLUSION_FRUIT",
    "OCCLUSION_BRANCH_LEAF",
    "NUM_CLASSES",
    "CLASS_NAMES",
    "LabelFormatError",
    "BoxAnnotation",
    "ImageRecord",
    "read_labels",
    "write_labels",
]

OCCLUSION_NONE = 0
OCCLUSION_FRUIT = 1
OCCLUSION_BRANCH_LEAF = 2
NUM_CLASSES = 3
CLASS_NAMES = ("non_occluded", "fruit_occluded", "branch_leaf_occluded")


class LabelFormatError(ValueError):
    """Malformed label file content; carries the offending line number."""

    def __init__(self, path, line_no: int, message: str):
        self.path = path
        self.line_no = line_no
        super().__init__(f"{path}:{line_no}: {message}")


@dataclass(frozen=True)
class BoxAnnotation:
    """One normalized box with an occlusion class."""

    class_id: int
    cx: float
    cy: float
    w: float
    h: float

    def __post_init__(self):
        if self.class_id not in (OCCLUSION_NONE, OCCLUSION_FRUIT, OCCLUSION_BRANCH_LEAF):
            raise ValueError(f"class_id must be 0, 1 or 2, got {self.class_id}")
        if not (0.0 <= self.cx <= 1.0 and 0.0 <= self.cy <= 1.0):
            raise ValueError(f"box center ({self.cx}, {self.cy}) outside unit square")
        if not (0.0 < self.w <= 1.0 and 0.0 < self.h <= 1.0):
            raise ValueError(f"box size ({self.w}, {self.h}) outside (0, 1]")

    def to_pixels(self, width: int, height: int) -> tuple[float, float, float, float]:
        """Return (x1, y1, x2, y2) in pixel coordinates."""
        bw, bh = self.w * width, self.h * height
        x1 = self.cx * width - bw / 2
        y1 = self.cy * height - bh / 2
        return x1, y1, x1 + bw, y1 + bh

    @staticmethod
    def from_pixels(class_id: int, x1: float, y1: float, x2: float, y2: float,
                    width: int, height: int) -> "BoxAnnotation":
        return BoxAnnotation(
            class_id=class_id,
            cx=(x1 + x2) / 2 / width,
            cy=(y1 + y2) / 2 / height,
            w=(x2 - x1) / width,
            h=(y2 - y1) / height,
        )


@dataclass
class ImageRecord:
    """An image plus its annotations and provenance.

    pixels may be None for metadata-only records (e.g. when only the label
    bookkeeping matters); operations that need pixel data raise if absent.
    tile_origin records the (x, y) offset of a tile inside its source frame.
    """

    image_id: str
    pixel_size: tuple[int, int]  # (width, height)
    annotations: list[BoxAnnotation] = field(default_factory=list)
    provenance: str = "original"  # original | tiled | augmented | synthetic
    pixels: Optional[np.ndarray] = None  # (H, W, 3) uint8 when present
    tile_origin: Optional[tuple[int, int]] = None

    def __post_init__(self):
        w, h = self.pixel_size
        if w <= 0 or h <= 0:
            raise ValueError(f"pixel_size must be positive, got {self.pixel_size}")
        if self.provenance not in ("original", "tiled", "augmented", "synthetic"):
            raise ValueError(f"unknown provenance {self.provenance!r}")
        if self.pixels is not None:
            ph, pw = self.pixels.shape[:2]
            if (pw, ph) != (w, h):
                raise ValueError(
                    f"pixels shape {self.pixels.shape} disagrees with pixel_size {self.pixel_size}"
                )

    def require_pixels(self) -> np.ndarray:
        if self.pixels is None:
            raise ValueError(f"record {self.image_id!r} carries no pixel data")
        return self.pixels

    def with_(self, **changes) -> "ImageRecord":
        return replace(self, **changes)


def write_labels(path, annotations: list[BoxAnnotation]) -> None:
    path = Path(path)
    lines = [
        f"{a.class_id} {a.cx:.6f} {a.cy:.6f} {a.w:.6f} {a.h:.6f}\n" for a in annotations
    ]
    path.write_text("".join(lines), encoding="ascii", newline="\n")


def read_labels(path) -> list[BoxAnnotation]:
    path = Path(path)
    out: list[BoxAnnotation] = []
    for line_no, raw in enumerate(path.read_text(encoding="ascii").splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 5:
            raise LabelFormatError(path, line_no, f"expected 5 fields, got {len(parts)}")
        try:
            class_id = int(parts[0])
            cx, cy, w, h = (float(p) for p in parts[1:])
        except ValueError as exc:
            raise LabelFormatError(path, line_no, f"unparseable value: {exc}") from exc
        try:
            out.append(BoxAnnotation(class_id, cx, cy, w, h))
        except ValueError as exc:
            raise LabelFormatError(path, line_no, str(exc)) from exc
    return out
