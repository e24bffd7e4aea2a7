"""Occlusion attention: patch mixers and the exp-normalized channel gate.

Three patch mixers embed the map at patch sizes 6, 7 and 8, learn local
spatial/channel structure with depthwise and pointwise convs, and are
merged by a 1x1 conv. A two-layer FC head turns the pooled result into
per-channel logits whose exp(sigmoid(z)) gate lies strictly in (1, e) --
the lower bound keeps even fully-suppressed channels alive, which is what
makes partially-occluded targets recoverable.
"""

from __future__ import annotations

import torch
import torch.nn as nn
import torch.nn.functional as F

from .common import validate_feature_map

__all__ = ["PatchMixer", "MultiPatchAttention", "PATCH_SIZES"]

PATCH_SIZES = (6, 7, 8)


class PatchMixer(nn.Module):
    """Patch-embed, mix depthwise then pointwise, restore resolution.

    Embedding is a non-overlapping patch x patch strided conv, kept
    depthwise so the mixer stays near-free in parameters; channel mixing
    happens in the pointwise conv.
    """

    def __init__(self, channels: int, patch: int):
        super().__init__()
        if patch < 1:
            raise ValueError(f"patch size must be >= 1, got {patch}")
        self.patch = patch
        self.embed = nn.Conv2d(channels, channels, patch, stride=patch, groups=channels)
        self.embed_bn = nn.BatchNorm2d(channels)
        self.depthwise = nn.Conv2d(channels, channels, 3, padding=1, groups=channels)
        self.dw_bn = nn.BatchNorm2d(channels)
        self.pointwise = nn.Conv2d(channels, channels, 1)
        self.pw_bn = nn.BatchNorm2d(channels)

    def forward(self, x):
        validate_feature_map(x)
        h, w = x.shape[2:]
        pad_h = (-h) % self.patch
        pad_w = (-w) % self.patch
        if pad_h or pad_w:
            x = F.pad(x, (0, pad_w, 0, pad_h))
        y = F.gelu(self.embed_bn(self.embed(x)))
        y = F.gelu(self.dw_bn(self.depthwise(y)))
        y = F.gelu(self.pw_bn(self.pointwise(y)))
        y = F.interpolate(y, scale_factor=self.patch, mode="nearest")
        return y[:, :, :h, :w]


class MultiPatchAttention(nn.Module):
    """Three patch mixers -> 1x1 merge -> pooled FC -> exp(sigmoid) gate.

    Output is x + x * A with the per-channel gate A in (1, e); set
    residual=False for the pure x * A variant.
    """

    def __init__(self, channels: int, patches=PATCH_SIZES, reduction: int = 4,
                 residual: bool = True):
        super().__init__()
        self.channels = channels
        self.residual = residual
        self.mixers = nn.ModuleList(PatchMixer(channels, p) for p in patches)
        self.merge = nn.Conv2d(channels * len(patches), channels, 1)
        hidden = max(1, channels // reduction)
        self.fc = nn.Sequential(
            nn.Linear(channels, hidden),
            nn.SiLU(),
            nn.Linear(hidden, channels),
        )

    def channel_gate(self, x) -> torch.Tensor:
        """Per-channel attention values, strictly inside (1, e)."""
        merged = self.merge(torch.cat([m(x) for m in self.mixers], dim=1))
        pooled = merged.mean(dim=(2, 3))
        z = self.fc(pooled)
        return torch.exp(torch.sigmoid(z))

    def forward(self, x):
        validate_feature_map(x)
        if x.shape[1] != self.channels:
            raise ValueError(f"expected {self.channels} channels, got {x.shape[1]}")
        gate = self.channel_gate(x)[:, :, None, None]
        weighted = x * gate
        return x + weighted if self.residual else weighted
