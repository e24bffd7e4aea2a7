"""Dilated reparameterizable convolution.

Several parallel conv+BN branches with different kernel sizes and
dilation rates train together; for deployment they collapse into one
dense convolution that produces identical outputs. A k x k kernel at
dilation d is equivalent to a dense kernel of extent k + (k-1)(d-1)
whose taps sit on the dilation grid, so every branch can be expanded,
center-padded to the widest extent, and summed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import torch
import torch.nn as nn

from .common import BN_EPS, autopad

__all__ = [
    "ConvSpec",
    "BNStats",
    "fuse_conv_bn",
    "dilate_kernel",
    "pad_kernel_to_extent",
    "merge_branches",
    "DilatedReparamConv",
]


@dataclass(frozen=True)
class ConvSpec:
    """Static description of one branch convolution."""

    kernel: int
    dilation: int = 1
    in_channels: int = 1
    out_channels: int = 1
    groups: int = 1
    has_bn: bool = True

    def __post_init__(self):
        if self.kernel < 1 or self.kernel % 2 == 0:
            raise ValueError(
                f"kernel must be odd and positive (got {self.kernel}); an even "
                f"kernel gives an even equivalent extent that cannot center-align"
            )
        if self.dilation < 1:
            raise ValueError(f"dilation must be >= 1, got {self.dilation}")
        if self.in_channels % self.groups or self.out_channels % self.groups:
            raise ValueError("groups must divide both channel counts")

    @property
    def equivalent_extent(self) -> int:
        return self.kernel + (self.kernel - 1) * (self.dilation - 1)


@dataclass(frozen=True)
class BNStats:
    gamma: torch.Tensor
    beta: torch.Tensor
    mean: torch.Tensor
    var: torch.Tensor
    eps: float = BN_EPS

    @staticmethod
    def from_module(bn: nn.BatchNorm2d) -> "BNStats":
        return BNStats(bn.weight.data, bn.bias.data, bn.running_mean, bn.running_var, bn.eps)


def fuse_conv_bn(weight: torch.Tensor, bn: Optional[BNStats], bias: Optional[torch.Tensor] = None):
    """Fold BN stats into the kernel: w' = w*g/sqrt(v+eps), b' = b - m*g/sqrt(v+eps)."""
    if bn is None:
        b = bias if bias is not None else weight.new_zeros(weight.shape[0])
        return weight, b
    std = torch.sqrt(bn.var + bn.eps)
    scale = bn.gamma / std
    fused_w = weight * scale.reshape(-1, 1, 1, 1)
    conv_bias = bias if bias is not None else weight.new_zeros(weight.shape[0])
    fused_b = bn.beta + (conv_bias - bn.mean) * scale
    return fused_w, fused_b


def dilate_kernel(weight: torch.Tensor, dilation: int) -> torch.Tensor:
    """Expand a (O, I, k, k) kernel so tap (i, j) lands at (i*d, j*d)."""
    if dilation == 1:
        return weight
    o, i, k, _ = weight.shape
    extent = k + (k - 1) * (dilation - 1)
    dense = weight.new_zeros(o, i, extent, extent)
    dense[:, :, ::dilation, ::dilation] = weight
    return dense


def pad_kernel_to_extent(weight: torch.Tensor, target: int) -> torch.Tensor:
    """Zero-pad a dense kernel symmetrically up to the target extent."""
    extent = weight.shape[-1]
    if extent == target:
        return weight
    if extent > target:
        raise ValueError(f"kernel extent {extent} exceeds target {target}")
    if (target - extent) % 2:
        raise ValueError(f"cannot center extent {extent} inside {target}")
    pad = (target - extent) // 2
    return nn.functional.pad(weight, [pad] * 4)


def merge_branches(
    branches: Sequence[tuple[ConvSpec, torch.Tensor, Optional[BNStats]]],
) -> tuple[torch.Tensor, torch.Tensor]:
    """Collapse parallel conv(+BN) branches into one dense kernel and bias."""
    if not branches:
        raise ValueError("need at least one branch")
    specs = [b[0] for b in branches]
    c_in, c_out, groups = specs[0].in_channels, specs[0].out_channels, specs[0].groups
    for s in specs[1:]:
        if (s.in_channels, s.out_channels, s.groups) != (c_in, c_out, groups):
            raise ValueError(
                f"branches must share channel layout; got {(s.in_channels, s.out_channels, s.groups)} "
                f"vs {(c_in, c_out, groups)}"
            )
    target = max(s.equivalent_extent for s in specs)

    merged_w = None
    merged_b = None
    for spec, weight, bn in branches:
        if tuple(weight.shape) != (c_out, c_in // groups, spec.kernel, spec.kernel):
            raise ValueError(
                f"weight shape {tuple(weight.shape)} does not match spec {spec}"
            )
        w, b = fuse_conv_bn(weight, bn)
        w = pad_kernel_to_extent(dilate_kernel(w, spec.dilation), target)
        merged_w = w if merged_w is None else merged_w + w
        merged_b = b if merged_b is None else merged_b + b
    return merged_w, merged_b


class DilatedReparamConv(nn.Module):
    """Parallel dilated conv+BN branches with a dense deploy form.

    branches: sequence of (kernel, dilation) pairs. All branches map
    c_in -> c_out at stride 1 with "same" padding, so train-mode and
    deploy-mode outputs agree everywhere including borders.
    """

    def __init__(self, c_in, c_out, branches: Sequence[tuple[int, int]], groups: int = 1):
        super().__init__()
        if not branches:
            raise ValueError("need at least one (kernel, dilation) branch")
        self.specs = [
            ConvSpec(k, d, in_channels=c_in, out_channels=c_out, groups=groups)
            for k, d in branches
        ]
        self.convs = nn.ModuleList(
            nn.Conv2d(c_in, c_out, s.kernel, padding=autopad(s.kernel, s.dilation),
                      dilation=s.dilation, groups=groups, bias=False)
            for s in self.specs
        )
        self.bns = nn.ModuleList(nn.BatchNorm2d(c_out, eps=BN_EPS) for _ in self.specs)
        self.merged: Optional[nn.Conv2d] = None

    @property
    def mode(self) -> str:
        return "deploy_merged" if self.merged is not None else "train_multibranch"

    @property
    def target_extent(self) -> int:
        return max(s.equivalent_extent for s in self.specs)

    def forward(self, x):
        if self.merged is not None:
            return self.merged(x)
        out = None
        for conv, bn in zip(self.convs, self.bns):
            y = bn(conv(x))
            out = y if out is None else out + y
        return out

    def merge_(self) -> "DilatedReparamConv":
        """Switch to the dense deploy form in place."""
        if self.merged is not None:
            return self
        triples = [
            (spec, conv.weight.data, BNStats.from_module(bn))
            for spec, conv, bn in zip(self.specs, self.convs, self.bns)
        ]
        w, b = merge_branches(triples)
        extent = self.target_extent
        spec0 = self.specs[0]
        merged = nn.Conv2d(
            spec0.in_channels, spec0.out_channels, extent,
            padding=extent // 2, groups=spec0.groups, bias=True,
        )
        merged.weight.data = w
        merged.bias.data = b
        merged = merged.to(self.convs[0].weight.dtype)
        self.merged = merged
        # branch parameters are no longer part of the forward graph
        self.convs = nn.ModuleList()
        self.bns = nn.ModuleList()
        return self
