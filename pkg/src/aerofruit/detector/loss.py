"""Detection loss: CIoU box regression plus binary cross-entropy class maps.

The box term averages 1 - CIoU over positive cells; the class term is
BCE over every cell of every scale with one-hot targets at positives,
summed and normalized by the positive count. Total is a weighted sum,
7.5 box + 0.5 cls by default.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import torch
import torch.nn.functional as F

from .assign import Assignment

__all__ = ["LossBreakdown", "LossDiverged", "ciou", "compute_loss"]

BOX_WEIGHT = 7.5
CLS_WEIGHT = 0.5


class LossDiverged(RuntimeError):
    pass


@dataclass(frozen=True)
class LossBreakdown:
    box_loss: float
    cls_loss: float
    total: float


def ciou(pred: torch.Tensor, target: torch.Tensor, eps: float = 1e-9) -> torch.Tensor:
    """Complete IoU between (..., 4) xyxy boxes."""
    px1, py1, px2, py2 = pred.unbind(-1)
    tx1, ty1, tx2, ty2 = target.unbind(-1)
    pw, ph = (px2 - px1).clamp_min(eps), (py2 - py1).clamp_min(eps)
    tw, th = (tx2 - tx1).clamp_min(eps), (ty2 - ty1).clamp_min(eps)

    ix1, iy1 = torch.maximum(px1, tx1), torch.maximum(py1, ty1)
    ix2, iy2 = torch.minimum(px2, tx2), torch.minimum(py2, ty2)
    inter = (ix2 - ix1).clamp_min(0) * (iy2 - iy1).clamp_min(0)
    union = pw * ph + tw * th - inter + eps
    iou = inter / union

    cw = torch.maximum(px2, tx2) - torch.minimum(px1, tx1)
    ch = torch.maximum(py2, ty2) - torch.minimum(py1, ty1)
    c2 = cw.pow(2) + ch.pow(2) + eps
    rho2 = ((px1 + px2 - tx1 - tx2).pow(2) + (py1 + py2 - ty1 - ty2).pow(2)) / 4
    v = (4 / math.pi**2) * (torch.atan(tw / th) - torch.atan(pw / ph)).pow(2)
    with torch.no_grad():
        alpha = v / (v - iou + 1 + eps)
    return iou - rho2 / c2 - alpha * v


def _positive_pred_boxes(box_map: torch.Tensor, targets, stride: int, batch_index: int):
    rows = torch.tensor([t.row for t in targets], dtype=torch.long)
    cols = torch.tensor([t.col for t in targets], dtype=torch.long)
    dists = box_map[batch_index, :, rows, cols].t()  # (n_pos, 4)
    cx = (cols.to(box_map.dtype) + 0.5) * stride
    cy = (rows.to(box_map.dtype) + 0.5) * stride
    return torch.stack(
        (cx - dists[:, 0], cy - dists[:, 1], cx + dists[:, 2], cy + dists[:, 3]), dim=-1
    )


def compute_loss(
    head_outputs,
    assignments: list[Assignment],
    num_classes: int = 3,
    box_weight: float = BOX_WEIGHT,
    cls_weight: float = CLS_WEIGHT,
) -> tuple[torch.Tensor, LossBreakdown]:
    """Loss over a batch; assignments[i] belongs to batch element i."""
    device = head_outputs[0][0].device
    dtype = head_outputs[0][0].dtype
    box_terms = []
    cls_sum = torch.zeros((), device=device, dtype=dtype)
    n_pos = 0

    for si, (box_map, cls_map) in enumerate(head_outputs):
        stride = assignments[0].strides[si] if assignments else None
        cls_target = torch.zeros_like(cls_map)
        for bi, assignment in enumerate(assignments):
            targets = assignment.per_scale(si)
            if not targets:
                continue
            n_pos += len(targets)
            pred = _positive_pred_boxes(box_map, targets, stride, bi)
            tgt = torch.tensor([t.box_xyxy for t in targets], dtype=dtype, device=device)
            box_terms.append(1.0 - ciou(pred, tgt))
            for t in targets:
                cls_target[bi, t.class_id, t.row, t.col] = 1.0
        cls_sum = cls_sum + F.binary_cross_entropy_with_logits(
            cls_map, cls_target, reduction="sum"
        )

    if box_terms:
        box_loss = torch.cat(box_terms).mean()
    else:
        box_loss = torch.zeros((), device=device, dtype=dtype)
    cls_loss = cls_sum / max(1, n_pos)
    total = box_weight * box_loss + cls_weight * cls_loss

    if not torch.isfinite(total):
        raise LossDiverged(
            f"non-finite loss: box={box_loss.item()!r} cls={cls_loss.item()!r} "
            f"positives={n_pos}"
        )
    breakdown = LossBreakdown(
        box_loss=float(box_loss.detach()),
        cls_loss=float(cls_loss.detach()),
        total=float(total.detach()),
    )
    return total, breakdown
