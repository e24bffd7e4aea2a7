"""Self-describing weight checkpoints.

A checkpoint is a zip archive:

    manifest.json        format version, optional model config, a block
                         table (every conv/norm/linear with its static
                         spec) and the tensor table (name, shape, dtype)
    tensors/<name>.npy   one raw array per state_dict entry

Nothing in the archive depends on pickle, so checkpoints stay readable
from any tooling that can open a zip and parse npy.
"""

from __future__ import annotations

import io
import json
import zipfile
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
import torch
import torch.nn as nn

__all__ = ["save_checkpoint", "load_checkpoint", "CheckpointData", "describe_blocks"]

FORMAT_VERSION = 1


def describe_blocks(model: nn.Module) -> list[dict]:
    """Static spec for every parametric leaf module, keyed by module path."""
    blocks = []
    for name, mod in model.named_modules():
        if isinstance(mod, nn.Conv2d):
            blocks.append(
                {
                    "name": name,
                    "kind": "conv2d",
                    "kernel": list(mod.kernel_size),
                    "dilation": list(mod.dilation),
                    "stride": list(mod.stride),
                    "padding": list(mod.padding) if isinstance(mod.padding, tuple) else mod.padding,
                    "in_channels": mod.in_channels,
                    "out_channels": mod.out_channels,
                    "groups": mod.groups,
                    "has_bias": mod.bias is not None,
                }
            )
        elif isinstance(mod, nn.BatchNorm2d):
            blocks.append({"name": name, "kind": "batchnorm2d",
                           "num_features": mod.num_features, "eps": mod.eps})
        elif isinstance(mod, nn.GroupNorm):
            blocks.append({"name": name, "kind": "groupnorm",
                           "num_groups": mod.num_groups, "num_channels": mod.num_channels})
        elif isinstance(mod, nn.Linear):
            blocks.append({"name": name, "kind": "linear",
                           "in_features": mod.in_features, "out_features": mod.out_features})
    return blocks


@dataclass
class CheckpointData:
    state_dict: dict[str, torch.Tensor]
    config: Optional[dict]
    manifest: dict


def save_checkpoint(model: nn.Module, path, config: Optional[dict] = None) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    state = model.state_dict()
    manifest = {
        "format_version": FORMAT_VERSION,
        "model_config": config,
        "blocks": describe_blocks(model),
        "tensors": {
            k: {"shape": list(v.shape), "dtype": str(v.numpy().dtype)}
            for k, v in state.items()
        },
    }
    with zipfile.ZipFile(path, "w", compression=zipfile.ZIP_DEFLATED) as zf:
        zf.writestr("manifest.json", json.dumps(manifest, indent=1))
        for key, tensor in state.items():
            buf = io.BytesIO()
            np.save(buf, tensor.detach().cpu().numpy())
            zf.writestr(f"tensors/{key}.npy", buf.getvalue())


def load_checkpoint(path) -> CheckpointData:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"checkpoint not found: {path}")
    with zipfile.ZipFile(path) as zf:
        manifest = json.loads(zf.read("manifest.json"))
        if manifest.get("format_version") != FORMAT_VERSION:
            raise ValueError(
                f"unsupported checkpoint format {manifest.get('format_version')!r} in {path}"
            )
        state: dict[str, torch.Tensor] = {}
        for key, meta in manifest["tensors"].items():
            arr = np.load(io.BytesIO(zf.read(f"tensors/{key}.npy")))
            if list(arr.shape) != meta["shape"]:
                raise ValueError(f"tensor {key} shape mismatch in {path}")
            state[key] = torch.from_numpy(arr)
    return CheckpointData(state_dict=state, config=manifest.get("model_config"), manifest=manifest)
