"""Parameter and computational-cost counting.

Parameters are the exact tensor-element sum. GFLOPs counts two
operations per multiply-accumulate, over convolutions and linear layers
only (normalization and activations excluded, the common reporting
convention); output spatial sizes are measured with forward hooks on a
dummy input of the stated size.
"""

from __future__ import annotations

import torch
import torch.nn as nn

__all__ = ["count_params", "count_params_m", "count_gflops", "conv_macs", "linear_macs"]


def count_params(model: nn.Module) -> int:
    return sum(p.numel() for p in model.parameters())


def count_params_m(model: nn.Module) -> float:
    return count_params(model) / 1e6


def conv_macs(module: nn.Conv2d, out_h: int, out_w: int) -> int:
    kh, kw = module.kernel_size
    per_position = kh * kw * (module.in_channels // module.groups)
    return per_position * module.out_channels * out_h * out_w


def linear_macs(module: nn.Linear, batch_positions: int) -> int:
    return module.in_features * module.out_features * batch_positions


def count_gflops(model: nn.Module, input_size: int | tuple[int, int]) -> float:
    """GFLOPs (2*MACs/1e9) of one batch-1 forward at the given input size."""
    if isinstance(input_size, int):
        h = w = input_size
    else:
        w, h = input_size
    macs = 0

    def conv_hook(module, args, output):
        nonlocal macs
        macs += conv_macs(module, output.shape[-2], output.shape[-1]) * output.shape[0]

    def linear_hook(module, args, output):
        nonlocal macs
        positions = output.numel() // output.shape[-1]
        macs += linear_macs(module, positions)

    handles = []
    for m in model.modules():
        if isinstance(m, nn.Conv2d):
            handles.append(m.register_forward_hook(conv_hook))
        elif isinstance(m, nn.Linear):
            handles.append(m.register_forward_hook(linear_hook))
    was_training = model.training
    model.eval()
    try:
        with torch.no_grad():
            model(torch.zeros(1, 3, h, w))
    finally:
        for hd in handles:
            hd.remove()
        model.train(was_training)
    return 2.0 * macs / 1e9
