"""Multi-scale residual block and its cross-stage wrapper.

The block halves the channels, runs one half through three parallel
receptive-field paths (3x3; 3x3 merged with a dilated 3x3; 5x5 merged
with two dilated 3x3s), concatenates the paths, projects back down and
adds the other half residually. Re-concatenating the untouched half
restores the input width, so the block stacks like a bottleneck.

Path convs narrow to a quarter of the input width: the three-way concat
then costs roughly what a plain bottleneck does, keeping the multi-scale
context almost free.
"""

from __future__ import annotations

import torch
import torch.nn as nn

from .common import ConvBNAct, validate_feature_map
from .csp import C3
from .drb import DilatedReparamConv

__all__ = ["MultiScaleResidualBlock", "C3MultiScale", "MSR_PATHS"]

# (kernel, dilation) branch lists for the three paths
MSR_PATHS = (
    ((3, 1),),
    ((3, 1), (3, 2)),
    ((5, 1), (3, 2), (3, 3)),
)


class MultiScaleResidualBlock(nn.Module):
    def __init__(self, channels: int, paths=MSR_PATHS):
        super().__init__()
        if channels % 2:
            raise ValueError(f"channel count must be even to split, got {channels}")
        self.channels = channels
        half = channels // 2
        branch = max(1, channels // 4)
        self.paths = nn.ModuleList(
            DilatedReparamConv(half, branch, list(p)) for p in paths
        )
        self.act = nn.SiLU()
        self.project = ConvBNAct(branch * len(paths), half, 1)

    def forward(self, x):
        validate_feature_map(x)
        if x.shape[1] != self.channels:
            raise ValueError(f"expected {self.channels} channels, got {x.shape[1]}")
        x1, x2 = torch.chunk(x, 2, dim=1)
        multi = torch.cat([self.act(p(x1)) for p in self.paths], dim=1)
        fused = x2 + self.project(multi)
        return torch.cat((x1, fused), dim=1)

    def merge_(self):
        for p in self.paths:
            p.merge_()
        return self


class C3MultiScale(C3):
    """C3 with multi-scale residual inner blocks instead of bottlenecks."""

    def __init__(self, c_in, c_out, n=1):
        super().__init__(c_in, c_out, n, inner=lambda c: MultiScaleResidualBlock(c))
