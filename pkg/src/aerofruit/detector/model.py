"""Full detector assembly: backbone, neck and head wired by config toggles.

The backbone is a five-stage strided CSP stack ending in SPPF; stages
P3/P4/P5 (strides 8/16/32) feed the neck. Toggles swap, independently:

* backbone cross-stage blocks: bottleneck C3 vs multi-scale residual C3
* neck: PAN with C3 fusion vs the lightweight split-attend fusion (which
  also halves the fused widths, where its savings come from)
* head: decoupled two-branch head vs the shared-trunk occlusion head
"""

from __future__ import annotations

import torch
import torch.nn as nn
import torch.nn.functional as F

from ..nnblocks import (
    C3,
    C3MultiScale,
    ConvBNAct,
    DecoupledHead,
    LightFusionBlock,
    OcclusionAwareHead,
    SPPF,
    validate_feature_map,
)
from .config import ModelConfig

__all__ = ["Detector", "build_model"]


class Backbone(nn.Module):
    def __init__(self, cfg: ModelConfig):
        super().__init__()
        w = [cfg.width(c) for c in cfg.base_widths]
        n = [cfg.depth(d) for d in cfg.base_depths]
        block = C3MultiScale if cfg.use_c3msr else C3
        self.stem = ConvBNAct(3, w[0], 3, s=2)
        self.down1 = ConvBNAct(w[0], w[1], 3, s=2)
        self.c1 = block(w[1], w[1], n[0])
        self.down2 = ConvBNAct(w[1], w[2], 3, s=2)
        self.c2 = block(w[2], w[2], n[1])
        self.down3 = ConvBNAct(w[2], w[3], 3, s=2)
        self.c3 = block(w[3], w[3], n[2])
        self.down4 = ConvBNAct(w[3], w[4], 3, s=2)
        self.c4 = block(w[4], w[4], n[3])
        self.sppf = SPPF(w[4], w[4])
        self.out_channels = (w[2], w[3], w[4])

    def forward(self, x):
        x = self.stem(x)
        x = self.c1(self.down1(x))
        p3 = self.c2(self.down2(x))
        p4 = self.c3(self.down3(p3))
        p5 = self.sppf(self.c4(self.down4(p4)))
        return p3, p4, p5


class PanNeck(nn.Module):
    """Baseline top-down/bottom-up pyramid with C3 fusion blocks."""

    def __init__(self, cfg: ModelConfig, in_channels):
        super().__init__()
        c3_, c4_, c5_ = in_channels
        n = cfg.depth(cfg.neck_base_depth)
        block = C3MultiScale if cfg.use_c3msr else C3
        self.reduce5 = ConvBNAct(c5_, c4_, 1)
        self.td4 = block(c4_ * 2, c4_, n)
        self.reduce4 = ConvBNAct(c4_, c3_, 1)
        self.td3 = block(c3_ * 2, c3_, n)
        self.down3 = ConvBNAct(c3_, c3_, 3, s=2)
        self.bu4 = block(c3_ + c3_, c4_, n)
        self.down4 = ConvBNAct(c4_, c4_, 3, s=2)
        self.bu5 = block(c4_ * 2, c5_, n)
        self.out_channels = (c3_, c4_, c5_)

    def forward(self, feats):
        p3, p4, p5 = feats
        r5 = self.reduce5(p5)
        t4 = self.td4(torch.cat((F.interpolate(r5, scale_factor=2, mode="nearest"), p4), 1))
        r4 = self.reduce4(t4)
        n3 = self.td3(torch.cat((F.interpolate(r4, scale_factor=2, mode="nearest"), p3), 1))
        n4 = self.bu4(torch.cat((self.down3(n3), r4), 1))
        n5 = self.bu5(torch.cat((self.down4(n4), r5), 1))
        return n3, n4, n5


class LightNeck(nn.Module):
    """Split-attend fusion neck; fused maps run at half the PAN widths."""

    def __init__(self, cfg: ModelConfig, in_channels):
        super().__init__()
        c3_, c4_, c5_ = in_channels
        f3, f4, f5 = c3_ // 2, c4_ // 2, c5_ // 2
        self.lat5 = ConvBNAct(c5_, f4, 1)
        self.lat4 = ConvBNAct(c4_, f4, 1)
        self.td4 = LightFusionBlock(2 * f4, f4)
        self.lat3 = ConvBNAct(c3_, f3, 1)
        self.red4 = ConvBNAct(f4, f3, 1)
        self.td3 = LightFusionBlock(2 * f3, f3)
        self.down3 = ConvBNAct(f3, f3, 3, s=2)
        self.bu4 = LightFusionBlock(f3 + f4, f4)
        self.down4 = ConvBNAct(f4, f4, 3, s=2)
        self.bu5 = LightFusionBlock(2 * f4, f5)
        self.out_channels = (f3, f4, f5)

    def forward(self, feats):
        p3, p4, p5 = feats
        r5 = self.lat5(p5)
        t4 = self.td4(torch.cat((F.interpolate(r5, scale_factor=2, mode="nearest"), self.lat4(p4)), 1))
        n3 = self.td3(
            torch.cat((F.interpolate(self.red4(t4), scale_factor=2, mode="nearest"), self.lat3(p3)), 1)
        )
        n4 = self.bu4(torch.cat((self.down3(n3), t4), 1))
        n5 = self.bu5(torch.cat((self.down4(n4), r5), 1))
        return n3, n4, n5


class Detector(nn.Module):
    def __init__(self, cfg: ModelConfig):
        super().__init__()
        self.cfg = cfg
        self.backbone = Backbone(cfg)
        neck_cls = LightNeck if cfg.use_f3 else PanNeck
        self.neck = neck_cls(cfg, self.backbone.out_channels)
        head_cls = OcclusionAwareHead if cfg.use_litchi_head else DecoupledHead
        if cfg.use_litchi_head:
            self.head = head_cls(
                self.neck.out_channels, cfg.strides, cfg.num_classes,
                trunk_width=cfg.head_trunk_width,
            )
        else:
            self.head = head_cls(self.neck.out_channels, cfg.strides, cfg.num_classes)

    def forward_features(self, x):
        validate_feature_map(x)
        return self.neck(self.backbone(x))

    def forward(self, x):
        """Return [(box_map, cls_map)] per stride."""
        return self.head(list(self.forward_features(x)))

    def merge_reparam_(self):
        """Collapse every reparameterizable branch conv to its deploy form."""
        for m in self.modules():
            if hasattr(m, "merge_") and m is not self:
                m.merge_()
        return self

    @property
    def num_parameters(self) -> int:
        return sum(p.numel() for p in self.parameters())


def build_model(cfg: ModelConfig) -> Detector:
    return Detector(cfg)
