"""Precision/recall rates and interpolated average precision.

Rates use the 0/0 = 0 convention so empty inputs yield clean zeros.
Average precision samples the precision envelope at the 101 recall
points 0.00, 0.01, ..., 1.00; mAP averages classes that have ground
truth, and mAP@50:95 additionally averages IoU thresholds 0.50 to 0.95
in steps of 0.05.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from ..detector.decode import Detection
from .matching import ConfusionCounts, GroundTruthBox, greedy_match, match_detections

__all__ = [
    "precision",
    "recall",
    "f1_score",
    "PRCurve",
    "average_precision",
    "class_pr_curve",
    "DetectionEvaluation",
    "evaluate_detections",
    "IOU_5095",
]

IOU_5095 = tuple(round(0.5 + 0.05 * i, 2) for i in range(10))


def _safe_div(num: float, den: float) -> float:
    return num / den if den > 0 else 0.0


def precision(counts: ConfusionCounts) -> float:
    return _safe_div(counts.tp, counts.tp + counts.fp)


def recall(counts: ConfusionCounts) -> float:
    return _safe_div(counts.tp, counts.tp + counts.fn)


def f1_score(p: float, r: float) -> float:
    return _safe_div(2 * p * r, p + r)


@dataclass
class PRCurve:
    """Cumulative (recall, precision) sweep in descending confidence."""

    class_id: int
    recalls: list[float] = field(default_factory=list)
    precisions: list[float] = field(default_factory=list)
    num_gt: int = 0

    def __post_init__(self):
        for a, b in zip(self.recalls, self.recalls[1:]):
            if b < a - 1e-12:
                raise ValueError("recall must be non-decreasing along the sweep")
        if any(not (0 <= p <= 1) for p in self.precisions):
            raise ValueError("precision values must lie in [0, 1]")


def average_precision(curve: PRCurve) -> float:
    """101-point interpolated AP of one class curve."""
    if curve.num_gt == 0:
        return 0.0
    if not curve.recalls:
        return 0.0
    rec = np.asarray(curve.recalls)
    prec = np.asarray(curve.precisions)
    total = 0.0
    for r in np.linspace(0.0, 1.0, 101):
        mask = rec >= r - 1e-12
        total += float(prec[mask].max()) if mask.any() else 0.0
    return total / 101.0


def class_pr_curve(
    dets_by_image: dict[str, list[Detection]],
    gts_by_image: dict[str, list[GroundTruthBox]],
    class_id: int,
    iou_thresh: float = 0.5,
) -> PRCurve:
    """Pool one class's detections over all images into a PR sweep."""
    scored: list[tuple[float, bool]] = []
    num_gt = 0
    for image_id, gts in gts_by_image.items():
        class_gts = [g for g in gts if g.class_id == class_id]
        num_gt += len(class_gts)
        dets = [d for d in dets_by_image.get(image_id, []) if d.class_id == class_id]
        order = sorted(range(len(dets)), key=lambda i: -dets[i].score)
        matched = greedy_match(dets, class_gts, iou_thresh)
        for di, gi in zip(order, matched):
            scored.append((dets[di].score, gi is not None))

    scored.sort(key=lambda t: -t[0])
    curve = PRCurve(class_id=class_id, num_gt=num_gt)
    tp = fp = 0
    for _, is_tp in scored:
        tp += int(is_tp)
        fp += int(not is_tp)
        curve.recalls.append(_safe_div(tp, num_gt))
        curve.precisions.append(_safe_div(tp, tp + fp))
    return curve


@dataclass
class DetectionEvaluation:
    precision: float
    recall: float
    f1: float
    map50: float
    map5095: float
    per_class_ap: dict[int, float]
    curves: dict[int, PRCurve]
    counts: ConfusionCounts


def _pooled_best_f1(dets_by_image, gts_by_image, iou_thresh=0.5):
    """P/R/F1 at the confidence that maximizes F1 on the pooled sweep."""
    scored: list[tuple[float, bool]] = []
    num_gt = sum(len(g) for g in gts_by_image.values())
    for image_id, gts in gts_by_image.items():
        dets = dets_by_image.get(image_id, [])
        order = sorted(range(len(dets)), key=lambda i: -dets[i].score)
        matched = greedy_match(dets, gts, iou_thresh)
        for di, gi in zip(order, matched):
            scored.append((dets[di].score, gi is not None))
    scored.sort(key=lambda t: -t[0])
    best = (0.0, 0.0, 0.0)
    tp = fp = 0
    for _, is_tp in scored:
        tp += int(is_tp)
        fp += int(not is_tp)
        p = _safe_div(tp, tp + fp)
        r = _safe_div(tp, num_gt)
        f1 = f1_score(p, r)
        if f1 > best[2]:
            best = (p, r, f1)
    return best


def evaluate_detections(
    dets_by_image: dict[str, list[Detection]],
    gts_by_image: dict[str, list[GroundTruthBox]],
    num_classes: int = 3,
) -> DetectionEvaluation:
    """Full evaluation: AP per class, mAP@50, mAP@50:95, best-F1 P/R."""
    curves: dict[int, PRCurve] = {}
    per_class_ap: dict[int, float] = {}
    have_gt = []
    for cid in range(num_classes):
        curve = class_pr_curve(dets_by_image, gts_by_image, cid, iou_thresh=0.5)
        curves[cid] = curve
        if curve.num_gt == 0:
            warnings.warn(f"class {cid} has no ground truth; excluded from mAP")
            continue
        have_gt.append(cid)
        per_class_ap[cid] = average_precision(curve)
    map50 = float(np.mean([per_class_ap[c] for c in have_gt])) if have_gt else 0.0

    map_at = []
    for thr in IOU_5095:
        aps = []
        for cid in have_gt:
            aps.append(
                average_precision(class_pr_curve(dets_by_image, gts_by_image, cid, thr))
            )
        map_at.append(float(np.mean(aps)) if aps else 0.0)
    map5095 = float(np.mean(map_at)) if map_at else 0.0

    counts = ConfusionCounts()
    for image_id, gts in gts_by_image.items():
        counts.merge(match_detections(dets_by_image.get(image_id, []), gts, 0.5))
    p, r, f1 = _pooled_best_f1(dets_by_image, gts_by_image)
    return DetectionEvaluation(
        precision=p,
        recall=r,
        f1=f1,
        map50=map50,
        map5095=map5095,
        per_class_ap=per_class_ap,
        curves=curves,
        counts=counts,
    )
