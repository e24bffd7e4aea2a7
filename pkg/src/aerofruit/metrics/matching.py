"""Greedy IoU matching between detections and ground truth."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..detector.decode import Detection, box_iou_xyxy

__all__ = ["GroundTruthBox", "ConfusionCounts", "greedy_match", "match_detections"]


@dataclass(frozen=True)
class GroundTruthBox:
    class_id: int
    x1: float
    y1: float
    x2: float
    y2: float

    @property
    def bbox(self):
        return (self.x1, self.y1, self.x2, self.y2)


@dataclass
class ConfusionCounts:
    """TP/FP/FN tallies per class and pooled."""

    per_class: dict[int, dict[str, int]] = field(default_factory=dict)

    def _slot(self, class_id: int) -> dict[str, int]:
        return self.per_class.setdefault(class_id, {"tp": 0, "fp": 0, "fn": 0})

    def add_tp(self, class_id):
        self._slot(class_id)["tp"] += 1

    def add_fp(self, class_id):
        self._slot(class_id)["fp"] += 1

    def add_fn(self, class_id):
        self._slot(class_id)["fn"] += 1

    def merge(self, other: "ConfusionCounts") -> "ConfusionCounts":
        for cid, slot in other.per_class.items():
            mine = self._slot(cid)
            for k in ("tp", "fp", "fn"):
                mine[k] += slot[k]
        return self

    @property
    def tp(self) -> int:
        return sum(s["tp"] for s in self.per_class.values())

    @property
    def fp(self) -> int:
        return sum(s["fp"] for s in self.per_class.values())

    @property
    def fn(self) -> int:
        return sum(s["fn"] for s in self.per_class.values())


def greedy_match(
    dets: list[Detection],
    gts: list[GroundTruthBox],
    iou_thresh: float = 0.5,
    class_agnostic: bool = False,
) -> list[Optional[int]]:
    """Match detections (taken in descending score order) to ground truth.

    Each detection claims the unmatched ground-truth box of the same
    class (any class when class_agnostic) with the highest IoU at or
    above the threshold; one box can be claimed once. Returns, aligned
    with the score-sorted detections, the matched gt index or None.
    """
    order = sorted(range(len(dets)), key=lambda i: -dets[i].score)
    taken: set[int] = set()
    matched: list[Optional[int]] = []
    for di in order:
        det = dets[di]
        best_iou, best_gi = 0.0, None
        for gi, gt in enumerate(gts):
            if gi in taken:
                continue
            if not class_agnostic and gt.class_id != det.class_id:
                continue
            iou = box_iou_xyxy(det.bbox, gt.bbox)
            if iou >= iou_thresh and iou > best_iou:
                best_iou, best_gi = iou, gi
        if best_gi is not None:
            taken.add(best_gi)
        matched.append(best_gi)
    return matched


def match_detections(
    dets: list[Detection],
    gts: list[GroundTruthBox],
    iou_thresh: float = 0.5,
) -> ConfusionCounts:
    """Confusion counts for one image at a fixed IoU threshold."""
    counts = ConfusionCounts()
    for gt in gts:
        counts._slot(gt.class_id)
    order = sorted(range(len(dets)), key=lambda i: -dets[i].score)
    matched = greedy_match(dets, gts, iou_thresh)
    matched_gts = {gi for gi in matched if gi is not None}
    for di, gi in zip(order, matched):
        if gi is None:
            counts.add_fp(dets[di].class_id)
        else:
            counts.add_tp(dets[di].class_id)
    for gi, gt in enumerate(gts):
        if gi not in matched_gts:
            counts.add_fn(gt.class_id)
    return counts
