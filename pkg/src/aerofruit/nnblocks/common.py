"""Shared conv building blocks and tensor validation."""

from __future__ import annotations

import torch
import torch.nn as nn

__all__ = ["validate_feature_map", "autopad", "ConvBNAct", "BN_EPS"]

BN_EPS = 1e-5


def validate_feature_map(x: torch.Tensor) -> torch.Tensor:
    if x.dim() != 4:
        raise ValueError(f"expected rank-4 (N, C, H, W) tensor, got rank {x.dim()}")
    if min(x.shape) < 1:
        raise ValueError(f"all dimensions must be >= 1, got {tuple(x.shape)}")
    if not torch.isfinite(x).all():
        raise ValueError("feature map contains non-finite values")
    return x


def autopad(k: int, d: int = 1) -> int:
    """Padding that keeps spatial size for stride-1 (possibly dilated) convs."""
    return ((k - 1) * d) // 2


class ConvBNAct(nn.Module):
    """Conv2d + BatchNorm + activation, the family's standard unit."""

    def __init__(self, c_in, c_out, k=1, s=1, g=1, act=True):
        super().__init__()
        self.conv = nn.Conv2d(c_in, c_out, k, s, autopad(k), groups=g, bias=False)
        self.bn = nn.BatchNorm2d(c_out, eps=BN_EPS)
        self.act = nn.SiLU() if act is True else (act if isinstance(act, nn.Module) else nn.Identity())

    def forward(self, x):
        return self.act(self.bn(self.conv(x)))
