"""Lightweight fusion blocks: partial convolution, grouped multi-scale
attention and the split-attend-add fusion unit used in the neck."""

from __future__ import annotations

import math

import torch
import torch.nn as nn

from .common import ConvBNAct, validate_feature_map

__all__ = ["PartialConv", "EMAttention", "LightFusionBlock", "largest_group_divisor"]


class PartialConv(nn.Module):
    """3x3 conv over the first ceil(C*ratio) channels; the rest pass through.

    Touching only a quarter of the channels cuts the conv cost to
    ratio^2 of the dense equivalent while keeping the tensor layout.
    """

    def __init__(self, channels: int, ratio: float = 0.25):
        super().__init__()
        if not (0 < ratio <= 1):
            raise ValueError(f"ratio must be in (0, 1], got {ratio}")
        self.channels = channels
        self.conv_channels = max(1, math.ceil(channels * ratio))
        self.conv = nn.Conv2d(self.conv_channels, self.conv_channels, 3, padding=1, bias=False)

    def forward(self, x):
        validate_feature_map(x)
        if x.shape[1] != self.channels:
            raise ValueError(f"expected {self.channels} channels, got {x.shape[1]}")
        head, tail = x[:, : self.conv_channels], x[:, self.conv_channels :]
        return torch.cat((self.conv(head), tail), dim=1)


def largest_group_divisor(channels: int, preferred: int = 8) -> int:
    """Largest divisor of `channels` not exceeding `preferred`."""
    for g in range(min(preferred, channels), 0, -1):
        if channels % g == 0:
            return g
    return 1


class EMAttention(nn.Module):
    """Grouped attention combining directional pooling with a 3x3 route.

    Channels are regrouped into (N*g, C/g, H, W). Two global average
    pools (along H and along W) feed a shared 1x1 conv whose split
    outputs gate the group through sigmoids; a parallel 3x3 conv gives a
    local route. Cross products of the two routes' pooled, softmaxed
    descriptors against each other's pixels give a per-pixel map which
    re-weights the input after a final sigmoid.
    """

    def __init__(self, channels: int, groups: int = 8, strict_groups: bool = False):
        super().__init__()
        if strict_groups:
            if channels % groups:
                raise ValueError(f"channels {channels} not divisible by groups {groups}")
            self.groups = groups
        else:
            self.groups = largest_group_divisor(channels, groups)
        cg = channels // self.groups
        self.channels = channels
        self.softmax = nn.Softmax(dim=-1)
        self.agp = nn.AdaptiveAvgPool2d((1, 1))
        self.pool_h = nn.AdaptiveAvgPool2d((None, 1))
        self.pool_w = nn.AdaptiveAvgPool2d((1, None))
        self.gn = nn.GroupNorm(cg, cg)
        self.conv1x1 = nn.Conv2d(cg, cg, 1)
        # replicate padding keeps spatially-constant inputs constant at borders
        self.conv3x3 = nn.Conv2d(cg, cg, 3, padding=1, padding_mode="replicate")

    def gate_map(self, x):
        """Per-pixel attention in (0, 1), shaped (N*g, 1, H, W)."""
        b, c, h, w = x.shape
        g = self.groups
        cg = c // g
        gx = x.reshape(b * g, cg, h, w)

        xh = self.pool_h(gx)                          # (b*g, cg, h, 1)
        xw = self.pool_w(gx).permute(0, 1, 3, 2)      # (b*g, cg, w, 1)
        hw = self.conv1x1(torch.cat((xh, xw), dim=2))
        xh, xw = torch.split(hw, [h, w], dim=2)
        gated = self.gn(gx * xh.sigmoid() * xw.permute(0, 1, 3, 2).sigmoid())
        local = self.conv3x3(gx)

        d1 = self.softmax(self.agp(gated).reshape(b * g, cg, 1).permute(0, 2, 1))
        d2 = self.softmax(self.agp(local).reshape(b * g, cg, 1).permute(0, 2, 1))
        y1 = torch.matmul(d1, local.reshape(b * g, cg, h * w))
        y2 = torch.matmul(d2, gated.reshape(b * g, cg, h * w))
        return (y1 + y2).reshape(b * g, 1, h, w).sigmoid()

    def forward(self, x):
        validate_feature_map(x)
        if x.shape[1] != self.channels:
            raise ValueError(f"expected {self.channels} channels, got {x.shape[1]}")
        b, c, h, w = x.shape
        weights = self.gate_map(x)
        gx = x.reshape(b * self.groups, c // self.groups, h, w)
        return (gx * weights).reshape(b, c, h, w)


class LightFusionBlock(nn.Module):
    """Fusion unit: 3x3 stem, split, attend one half locally, add back.

    Stem widens to 2*c_out; one half keeps the stem features, the other
    passes through a partial conv plus grouped attention before the two
    are summed. Output width equals the split width, c_out.
    """

    def __init__(self, c_in: int, c_out: int, partial_ratio: float = 0.25, groups: int = 8):
        super().__init__()
        self.stem = ConvBNAct(c_in, 2 * c_out, 3)
        self.c_out = c_out
        self.local = nn.Sequential(
            PartialConv(c_out, partial_ratio),
            EMAttention(c_out, groups),
        )

    def forward(self, x):
        validate_feature_map(x)
        y = self.stem(x)
        keep, refine = torch.chunk(y, 2, dim=1)
        return keep + self.local(refine)
