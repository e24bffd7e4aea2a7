"""Target assignment: one positive cell per ground-truth box.

Each box goes to the grid cell containing its center, at the scale whose
cell size best fits the box: the largest stride not exceeding the box's
short side (stride 8 when even that is too coarse). If that cell is
already taken by an earlier box, the next-best stride (by |stride -
short side|, ties toward the smaller stride) is tried; a box whose every
candidate cell is occupied is dropped.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..datakit import BoxAnnotation

__all__ = ["AssignedTarget", "Assignment", "assign_targets", "encode_distances"]


@dataclass(frozen=True)
class AssignedTarget:
    gt_index: int
    class_id: int
    scale_index: int
    row: int
    col: int
    box_xyxy: tuple[float, float, float, float]
    distances: tuple[float, float, float, float]  # left, top, right, bottom


@dataclass
class Assignment:
    image_size: tuple[int, int]
    strides: tuple[int, ...]
    targets: list[AssignedTarget] = field(default_factory=list)
    dropped: list[int] = field(default_factory=list)

    def per_scale(self, scale_index: int) -> list[AssignedTarget]:
        return [t for t in self.targets if t.scale_index == scale_index]


def encode_distances(box_xyxy, stride: int, row: int, col: int):
    """Distances from the cell center to the box sides, clamped at 0."""
    x1, y1, x2, y2 = box_xyxy
    cx = (col + 0.5) * stride
    cy = (row + 0.5) * stride
    return (max(0.0, cx - x1), max(0.0, cy - y1), max(0.0, x2 - cx), max(0.0, y2 - cy))


def _stride_preference(short_side: float, strides) -> list[int]:
    fitting = [s for s in strides if s <= short_side]
    primary = max(fitting) if fitting else min(strides)
    rest = sorted(
        (s for s in strides if s != primary),
        key=lambda s: (abs(s - short_side), s),
    )
    return [primary] + rest


def assign_targets(
    gts: list[BoxAnnotation],
    image_size,
    strides=(8, 16, 32),
) -> Assignment:
    if isinstance(image_size, int):
        img_w = img_h = image_size
    else:
        img_w, img_h = image_size
    assignment = Assignment(image_size=(img_w, img_h), strides=tuple(strides))
    occupied: set[tuple[int, int, int]] = set()  # (scale_index, row, col)

    for gi, gt in enumerate(gts):
        x1, y1, x2, y2 = gt.to_pixels(img_w, img_h)
        if x2 <= x1 or y2 <= y1:
            raise ValueError(f"degenerate ground-truth box at index {gi}")
        cx, cy = (x1 + x2) / 2, (y1 + y2) / 2
        short = min(x2 - x1, y2 - y1)

        placed = False
        for stride in _stride_preference(short, strides):
            si = list(strides).index(stride)
            col = min(int(cx // stride), int(img_w) // stride - 1)
            row = min(int(cy // stride), int(img_h) // stride - 1)
            key = (si, row, col)
            if key in occupied:
                continue
            occupied.add(key)
            assignment.targets.append(
                AssignedTarget(
                    gt_index=gi,
                    class_id=gt.class_id,
                    scale_index=si,
                    row=row,
                    col=col,
                    box_xyxy=(x1, y1, x2, y2),
                    distances=encode_distances((x1, y1, x2, y2), stride, row, col),
                )
            )
            placed = True
            break
        if not placed:
            assignment.dropped.append(gi)
    return assignment
