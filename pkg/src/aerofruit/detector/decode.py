"""Decoding head maps into pixel-space detections, plus greedy NMS."""

from __future__ import annotations

from dataclasses import dataclass

import torch

__all__ = ["Detection", "decode", "nms", "box_iou_xyxy"]


@dataclass(frozen=True)
class Detection:
    x1: float
    y1: float
    x2: float
    y2: float
    score: float
    class_id: int

    def __post_init__(self):
        if not (self.x1 < self.x2 and self.y1 < self.y2):
            raise ValueError(f"degenerate box ({self.x1}, {self.y1}, {self.x2}, {self.y2})")
        if not (0.0 <= self.score <= 1.0):
            raise ValueError(f"score must be in [0, 1], got {self.score}")

    @property
    def bbox(self) -> tuple[float, float, float, float]:
        return (self.x1, self.y1, self.x2, self.y2)

    @property
    def area(self) -> float:
        return (self.x2 - self.x1) * (self.y2 - self.y1)


def box_iou_xyxy(a, b) -> float:
    ix1, iy1 = max(a[0], b[0]), max(a[1], b[1])
    ix2, iy2 = min(a[2], b[2]), min(a[3], b[3])
    iw, ih = max(0.0, ix2 - ix1), max(0.0, iy2 - iy1)
    inter = iw * ih
    if inter == 0:
        return 0.0
    area_a = (a[2] - a[0]) * (a[3] - a[1])
    area_b = (b[2] - b[0]) * (b[3] - b[1])
    return inter / (area_a + area_b - inter)


def decode(head_outputs, image_size, strides=(8, 16, 32), conf_thresh: float = 0.0):
    """Turn per-stride (box_map, cls_map) pairs into per-image detections.

    Box maps hold pixel distances (left, top, right, bottom) from each
    cell center; negative values are clamped to zero. Class score is the
    sigmoid of the best class logit. Boxes are clipped to the image and
    dropped if clipping (or zero distances) degenerates them.

    Returns one list of Detection per batch element.
    """
    if len(head_outputs) != len(strides):
        raise ValueError(f"expected {len(strides)} scales, got {len(head_outputs)}")
    if isinstance(image_size, int):
        img_w = img_h = float(image_size)
    else:
        img_w, img_h = map(float, image_size)

    batch = head_outputs[0][0].shape[0]
    results = [[] for _ in range(batch)]
    for (box_map, cls_map), stride in zip(head_outputs, strides):
        n, _, h, w = box_map.shape
        if cls_map.shape[0] != n or cls_map.shape[2:] != box_map.shape[2:]:
            raise ValueError("box and class maps disagree in shape")
        dists = box_map.detach().clamp_min(0.0)
        scores_all = torch.sigmoid(cls_map.detach())
        best_score, best_cls = scores_all.max(dim=1)  # (n, h, w)

        ys = (torch.arange(h, dtype=torch.float32) + 0.5) * stride
        xs = (torch.arange(w, dtype=torch.float32) + 0.5) * stride
        cy = ys.view(1, h, 1).expand(n, h, w)
        cx = xs.view(1, 1, w).expand(n, h, w)

        x1 = (cx - dists[:, 0]).clamp(0.0, img_w)
        y1 = (cy - dists[:, 1]).clamp(0.0, img_h)
        x2 = (cx + dists[:, 2]).clamp(0.0, img_w)
        y2 = (cy + dists[:, 3]).clamp(0.0, img_h)

        keep = (best_score >= conf_thresh) & (x2 > x1) & (y2 > y1)
        for b in range(n):
            idx = keep[b].nonzero(as_tuple=False)
            for r, c in idx.tolist():
                results[b].append(
                    Detection(
                        x1=float(x1[b, r, c]),
                        y1=float(y1[b, r, c]),
                        x2=float(x2[b, r, c]),
                        y2=float(y2[b, r, c]),
                        score=float(best_score[b, r, c]),
                        class_id=int(best_cls[b, r, c]),
                    )
                )
    return results


def nms(dets: list[Detection], conf_thresh: float = 0.001, iou_thresh: float = 0.6):
    """Class-wise greedy suppression.

    Detections are pre-filtered by confidence, stably sorted by
    descending score (ties keep list order, so the lower index wins) and
    later same-class boxes overlapping a kept box beyond iou_thresh are
    dropped.
    """
    filtered = [(i, d) for i, d in enumerate(dets) if d.score >= conf_thresh]
    filtered.sort(key=lambda item: -item[1].score)  # stable: ties by original index
    kept: list[Detection] = []
    for _, cand in filtered:
        suppressed = any(
            k.class_id == cand.class_id and box_iou_xyxy(k.bbox, cand.bbox) > iou_thresh
            for k in kept
        )
        if not suppressed:
            kept.append(cand)
    return kept
