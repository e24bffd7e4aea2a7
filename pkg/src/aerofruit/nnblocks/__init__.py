"""Differentiable building blocks for the detector."""

from .attention import PATCH_SIZES, MultiPatchAttention, PatchMixer
from .checkpoint import CheckpointData, describe_blocks, load_checkpoint, save_checkpoint
from .common import BN_EPS, ConvBNAct, autopad, validate_feature_map
from .csp import C3, Bottleneck, SPPF
from .drb import (
    BNStats,
    ConvSpec,
    DilatedReparamConv,
    dilate_kernel,
    fuse_conv_bn,
    merge_branches,
    pad_kernel_to_extent,
)
from .fusion import EMAttention, LightFusionBlock, PartialConv, largest_group_divisor
from .heads import DecoupledHead, DWSeparableConv, OcclusionAwareHead
from .msr import MSR_PATHS, C3MultiScale, MultiScaleResidualBlock

__all__ = [
    "PATCH_SIZES",
    "MultiPatchAttention",
    "PatchMixer",
    "CheckpointData",
    "describe_blocks",
    "load_checkpoint",
    "save_checkpoint",
    "BN_EPS",
    "ConvBNAct",
    "autopad",
    "validate_feature_map",
    "C3",
    "Bottleneck",
    "SPPF",
    "BNStats",
    "ConvSpec",
    "DilatedReparamConv",
    "dilate_kernel",
    "fuse_conv_bn",
    "merge_branches",
    "pad_kernel_to_extent",
    "EMAttention",
    "LightFusionBlock",
    "PartialConv",
    "largest_group_divisor",
    "DecoupledHead",
    "DWSeparableConv",
    "OcclusionAwareHead",
    "MSR_PATHS",
    "C3MultiScale",
    "MultiScaleResidualBlock",
]
