"""Shared test utilities: BN randomization and finite-difference checks."""

import torch
import torch.nn as nn


def randomize_bn_stats(module: nn.Module, seed: int = 0):
    """Give every BatchNorm non-trivial running stats and affine params."""
    gen = torch.Generator().manual_seed(seed)
    for m in module.modules():
        if isinstance(m, nn.BatchNorm2d):
            m.running_mean.copy_(torch.empty_like(m.running_mean).uniform_(-0.5, 0.5, generator=gen))
            m.running_var.copy_(torch.empty_like(m.running_var).uniform_(0.5, 1.5, generator=gen))
            m.weight.data.copy_(torch.empty_like(m.weight).uniform_(0.5, 1.5, generator=gen))
            m.bias.data.copy_(torch.empty_like(m.bias).uniform_(-0.5, 0.5, generator=gen))
    return module


def zero_convs_identity_bn(module: nn.Module):
    """Zero every conv weight and reset every BN to the identity transform."""
    for m in module.modules():
        if isinstance(m, nn.Conv2d):
            m.weight.data.zero_()
            if m.bias is not None:
                m.bias.data.zero_()
        elif isinstance(m, nn.BatchNorm2d):
            m.weight.data.fill_(1.0)
            m.bias.data.zero_()
            m.running_mean.zero_()
            m.running_var.fill_(1.0)
    return module


def input_gradient_max_rel_err(module: nn.Module, shape, seed: int = 0, eps: float = 1e-6):
    """Central finite-difference check of d(loss)/d(input) at float64.

    Returns the relative L2 error between the autograd gradient and the
    finite-difference gradient over every input coordinate.
    """
    torch.manual_seed(seed)
    module = module.double().eval()
    x = torch.randn(*shape, dtype=torch.float64)
    with torch.no_grad():
        probe = torch.randn_like(module(x))  # fixed projection to a scalar

    def loss_of(t):
        return (module(t) * probe).sum()

    x_var = x.clone().requires_grad_(True)
    loss_of(x_var).backward()
    analytic = x_var.grad.detach().clone()

    fd = torch.zeros_like(x)
    flat_x = x.view(-1)
    flat_fd = fd.view(-1)
    with torch.no_grad():
        for i in range(flat_x.numel()):
            orig = flat_x[i].item()
            flat_x[i] = orig + eps
            up = loss_of(x).item()
            flat_x[i] = orig - eps
            down = loss_of(x).item()
            flat_x[i] = orig
            flat_fd[i] = (up - down) / (2 * eps)

    denom = max(fd.norm().item(), 1e-12)
    return (analytic - fd).norm().item() / denom


def conv_param_count(c_in, c_out, k, groups=1, bias=False):
    return k * k * (c_in // groups) * c_out + (c_out if bias else 0)


def bn_param_count(c):
    return 2 * c  # affine weight + bias (running stats are buffers)
