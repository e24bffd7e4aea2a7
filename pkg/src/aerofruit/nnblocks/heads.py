"""Detection heads.

Both heads emit, per scale, a 4-channel box map holding non-negative
pixel distances to the box sides (left, top, right, bottom, produced by
softplus scaled with the stride) and a raw-logit class map. The
occlusion-aware head runs one shared trunk per scale and splits only at
the final 1x1 projections; the baseline decoupled head keeps two full
branches.
"""

from __future__ import annotations

import math

import torch
import torch.nn as nn
import torch.nn.functional as F

from .attention import MultiPatchAttention
from .common import ConvBNAct, validate_feature_map

__all__ = ["DWSeparableConv", "OcclusionAwareHead", "DecoupledHead"]

# start class probabilities near 1% and distances near one stride
CLS_BIAS_INIT = -4.6
BOX_BIAS_INIT = 0.5


class DWSeparableConv(nn.Module):
    """Depthwise 3x3 followed by pointwise mixing, both BN+SiLU."""

    def __init__(self, c_in, c_out):
        super().__init__()
        self.dw = ConvBNAct(c_in, c_in, 3, g=c_in)
        self.pw = ConvBNAct(c_in, c_out, 1)

    def forward(self, x):
        return self.pw(self.dw(x))


def _init_projections(box_proj: nn.Conv2d, cls_proj: nn.Conv2d):
    nn.init.constant_(box_proj.bias, BOX_BIAS_INIT)
    nn.init.constant_(cls_proj.bias, CLS_BIAS_INIT)


class _HeadBase(nn.Module):
    def __init__(self, in_channels, strides, num_classes):
        super().__init__()
        if len(in_channels) != len(strides):
            raise ValueError(
                f"got {len(in_channels)} feature widths for {len(strides)} strides"
            )
        self.strides = tuple(strides)
        self.num_classes = num_classes

    def check_features(self, features):
        if len(features) != len(self.strides):
            raise ValueError(
                f"expected {len(self.strides)} feature maps, got {len(features)}"
            )
        for f in features:
            validate_feature_map(f)


class OcclusionAwareHead(_HeadBase):
    """Shared trunk (two separable convs, a 3x3 conv, patch attention)
    feeding both output projections, per scale."""

    def __init__(self, in_channels, strides=(8, 16, 32), num_classes=3, trunk_width=96):
        super().__init__(in_channels, strides, num_classes)
        self.trunks = nn.ModuleList()
        self.box_projs = nn.ModuleList()
        self.cls_projs = nn.ModuleList()
        for c in in_channels:
            t = max(16, min(c, trunk_width))
            self.trunks.append(
                nn.Sequential(
                    DWSeparableConv(c, t),
                    DWSeparableConv(t, t),
                    ConvBNAct(t, t, 3),
                    MultiPatchAttention(t),
                )
            )
            box = nn.Conv2d(t, 4, 1)
            cls = nn.Conv2d(t, num_classes, 1)
            _init_projections(box, cls)
            self.box_projs.append(box)
            self.cls_projs.append(cls)

    def forward(self, features):
        self.check_features(features)
        out = []
        for x, trunk, box, cls, stride in zip(
            features, self.trunks, self.box_projs, self.cls_projs, self.strides
        ):
            shared = trunk(x)
            box_map = F.softplus(box(shared)) * stride
            out.append((box_map, cls(shared)))
        return out


class DecoupledHead(_HeadBase):
    """Baseline two-branch head: separate conv stacks for box and class."""

    def __init__(self, in_channels, strides=(8, 16, 32), num_classes=3):
        super().__init__(in_channels, strides, num_classes)
        self.box_branches = nn.ModuleList()
        self.cls_branches = nn.ModuleList()
        self.box_projs = nn.ModuleList()
        self.cls_projs = nn.ModuleList()
        for c in in_channels:
            cb = max(16, c // 4)
            cc = max(32, min(c, 128))
            self.box_branches.append(
                nn.Sequential(ConvBNAct(c, cb, 3), ConvBNAct(cb, cb, 3))
            )
            self.cls_branches.append(
                nn.Sequential(ConvBNAct(c, cc, 3), ConvBNAct(cc, cc, 3))
            )
            box = nn.Conv2d(cb, 4, 1)
            cls = nn.Conv2d(cc, num_classes, 1)
            _init_projections(box, cls)
            self.box_projs.append(box)
            self.cls_projs.append(cls)

    def forward(self, features):
        self.check_features(features)
        out = []
        for x, bb, cb, bp, cp, stride in zip(
            features, self.box_branches, self.cls_branches,
            self.box_projs, self.cls_projs, self.strides,
        ):
            box_map = F.softplus(bp(bb(x))) * stride
            out.append((box_map, cp(cb(x))))
        return out
