"""Baseline cross-stage blocks: Bottleneck, C3 and SPPF."""

from __future__ import annotations

import torch
import torch.nn as nn

from .common import ConvBNAct

__all__ = ["Bottleneck", "C3", "SPPF"]


class Bottleneck(nn.Module):
    def __init__(self, c_in, c_out, shortcut=True):
        super().__init__()
        self.cv1 = ConvBNAct(c_in, c_out, 1)
        self.cv2 = ConvBNAct(c_out, c_out, 3)
        self.add = shortcut and c_in == c_out

    def forward(self, x):
        y = self.cv2(self.cv1(x))
        return x + y if self.add else y


class C3(nn.Module):
    """Two 1x1 stems, a stack of inner blocks on one stem, concat, 1x1 fuse."""

    def __init__(self, c_in, c_out, n=1, inner=None):
        super().__init__()
        c_ = max(2, (c_out // 2) // 2 * 2)  # hidden width, kept even for splits
        self.cv1 = ConvBNAct(c_in, c_, 1)
        self.cv2 = ConvBNAct(c_in, c_, 1)
        make = inner if inner is not None else (lambda c: Bottleneck(c, c))
        self.m = nn.Sequential(*(make(c_) for _ in range(n)))
        self.cv3 = ConvBNAct(2 * c_, c_out, 1)

    def forward(self, x):
        return self.cv3(torch.cat((self.m(self.cv1(x)), self.cv2(x)), dim=1))


class SPPF(nn.Module):
    """Spatial pyramid pooling (fast): three chained 5x5 max pools."""

    def __init__(self, c_in, c_out, k=5):
        super().__init__()
        c_ = c_in // 2
        self.cv1 = ConvBNAct(c_in, c_, 1)
        self.cv2 = ConvBNAct(c_ * 4, c_out, 1)
        self.pool = nn.MaxPool2d(kernel_size=k, stride=1, padding=k // 2)

    def forward(self, x):
        x = self.cv1(x)
        y1 = self.pool(x)
        y2 = self.pool(y1)
        y3 = self.pool(y2)
        return self.cv2(torch.cat((x, y1, y2, y3), dim=1))
