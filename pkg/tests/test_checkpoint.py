import json
import zipfile

import pytest
import torch
import torch.nn as nn

from aerofruit.nnblocks import (
    LightFusionBlock,
    MultiScaleResidualBlock,
    load_checkpoint,
    save_checkpoint,
)


def small_model():
    return nn.Sequential(MultiScaleResidualBlock(8), LightFusionBlock(8, 4))


def test_round_trip_exact(tmp_path):
    torch.manual_seed(0)
    model = small_model()
    path = tmp_path / "weights.ckpt"
    save_checkpoint(model, path, config={"note": "test", "width": 0.5})

    data = load_checkpoint(path)
    assert data.config == {"note": "test", "width": 0.5}

    model2 = small_model()
    model2.load_state_dict(data.state_dict)
    for (k1, v1), (k2, v2) in zip(
        model.state_dict().items(), model2.state_dict().items()
    ):
        assert k1 == k2
        assert torch.equal(v1, v2)


def test_manifest_is_self_describing(tmp_path):
    model = small_model()
    path = tmp_path / "weights.ckpt"
    save_checkpoint(model, path)
    with zipfile.ZipFile(path) as zf:
        manifest = json.loads(zf.read("manifest.json"))
    kinds = {b["kind"] for b in manifest["blocks"]}
    assert "conv2d" in kinds and "batchnorm2d" in kinds
    convs = [b for b in manifest["blocks"] if b["kind"] == "conv2d"]
    # every conv records its full static spec
    for c in convs:
        for key in ("kernel", "dilation", "in_channels", "out_channels", "groups"):
            assert key in c
    # dilated branches visible in the manifest
    assert any(c["dilation"] != [1, 1] for c in convs)
    assert set(manifest["tensors"]) == set(model.state_dict().keys())


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_checkpoint(tmp_path / "absent.ckpt")


def test_forward_identical_after_reload(tmp_path):
    torch.manual_seed(1)
    model = small_model().eval()
    x = torch.randn(1, 8, 12, 12)
    ref = model(x)
    save_checkpoint(model, tmp_path / "w.ckpt")
    model2 = small_model().eval()
    model2.load_state_dict(load_checkpoint(tmp_path / "w.ckpt").state_dict)
    assert torch.equal(model2(x), ref)
