"""Occlusion-stratified miss rates.

A ground-truth fruit counts as detected when any detection overlaps it
at IoU >= 0.5 regardless of predicted class: the question is whether the
fruit was found at all, not whether its occlusion state was classified
correctly. The protocol is recorded in the table metadata.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..datakit.records import CLASS_NAMES
from ..detector.decode import Detection
from .matching import GroundTruthBox, greedy_match

__all__ = ["OcclusionRow", "OcclusionTable", "occlusion_breakdown", "miss_rate_percent"]

MATCH_PROTOCOL = "class-agnostic greedy matching at IoU 0.5"


def miss_rate_percent(undetected: int, actual: int) -> Optional[float]:
    """Miss rate as a percentage, or None when there is nothing to miss."""
    if actual == 0:
        return None
    return 100.0 * undetected / actual


@dataclass(frozen=True)
class OcclusionRow:
    class_id: int
    class_name: str
    actual: int
    undetected: int

    @property
    def miss_rate(self) -> Optional[float]:
        return miss_rate_percent(self.undetected, self.actual)


@dataclass(frozen=True)
class OcclusionTable:
    rows: tuple[OcclusionRow, ...]
    protocol: str = MATCH_PROTOCOL

    def row(self, class_id: int) -> OcclusionRow:
        for r in self.rows:
            if r.class_id == class_id:
                return r
        raise KeyError(class_id)


def occlusion_breakdown(
    dets_by_image: dict[str, list[Detection]],
    gts_by_image: dict[str, list[GroundTruthBox]],
    iou_thresh: float = 0.5,
) -> OcclusionTable:
    actual = {cid: 0 for cid in range(len(CLASS_NAMES))}
    undetected = {cid: 0 for cid in range(len(CLASS_NAMES))}
    for image_id, gts in gts_by_image.items():
        dets = dets_by_image.get(image_id, [])
        matched = greedy_match(dets, gts, iou_thresh, class_agnostic=True)
        found = {gi for gi in matched if gi is not None}
        for gi, gt in enumerate(gts):
            actual[gt.class_id] += 1
            if gi not in found:
                undetected[gt.class_id] += 1
    rows = tuple(
        OcclusionRow(cid, CLASS_NAMES[cid], actual[cid], undetected[cid])
        for cid in range(len(CLASS_NAMES))
    )
    return OcclusionTable(rows=rows)
