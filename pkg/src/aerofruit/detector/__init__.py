"""Detector assembly, decoding, assignment and loss."""

from .assign import AssignedTarget, Assignment, assign_targets, encode_distances
from .config import ModelConfig
from .decode import Detection, box_iou_xyxy, decode, nms
from .loss import LossBreakdown, LossDiverged, ciou, compute_loss
from .model import Detector, build_model

__all__ = [
    "AssignedTarget",
    "Assignment",
    "assign_targets",
    "encode_distances",
    "ModelConfig",
    "Detection",
    "box_iou_xyxy",
    "decode",
    "nms",
    "LossBreakdown",
    "LossDiverged",
    "ciou",
    "compute_loss",
    "Detector",
    "build_model",
]
