import pytest
import torch

from aerofruit.nnblocks import DecoupledHead, OcclusionAwareHead


def feature_pyramid(batch=1, widths=(32, 64, 128), sizes=(80, 40, 20)):
    return [torch.randn(batch, c, s, s) for c, s in zip(widths, sizes)]


def test_three_scales_shape_contract():
    head = OcclusionAwareHead((32, 64, 128), strides=(8, 16, 32), num_classes=3).eval()
    outs = head(feature_pyramid())
    assert len(outs) == 3
    for (box, cls), size in zip(outs, (80, 40, 20)):
        assert box.shape == (1, 4, size, size)
        assert cls.shape == (1, 3, size, size)


def test_box_map_values_are_positive_pixel_distances():
    head = OcclusionAwareHead((16,), strides=(8,), num_classes=3).eval()
    (box, _), = head([torch.randn(1, 16, 12, 12)])
    assert (box > 0).all()


def test_wrong_number_of_scales_rejected():
    head = OcclusionAwareHead((32, 64, 128)).eval()
    with pytest.raises(ValueError):
        head(feature_pyramid(widths=(32, 64), sizes=(80, 40)))
    with pytest.raises(ValueError):
        OcclusionAwareHead((32, 64), strides=(8, 16, 32))


def test_trunk_perturbation_moves_both_outputs():
    torch.manual_seed(0)
    head = OcclusionAwareHead((16,), strides=(8,), num_classes=3).eval()
    x = [torch.randn(1, 16, 16, 16)]
    box0, cls0 = head(x)[0]
    # poke one weight in the first trunk conv
    conv = head.trunks[0][0].dw.conv
    with torch.no_grad():
        conv.weight[0, 0, 1, 1] += 0.35
    box1, cls1 = head(x)[0]
    assert not torch.equal(box0, box1)
    assert not torch.equal(cls0, cls1)


def test_shared_trunk_head_is_smaller_than_two_branch_head():
    widths = (64, 128, 256)
    shared = OcclusionAwareHead(widths)
    two_branch = DecoupledHead(widths)
    n_shared = sum(p.numel() for p in shared.parameters())
    n_two = sum(p.numel() for p in two_branch.parameters())
    assert n_shared < n_two


def test_decoupled_head_contract():
    head = DecoupledHead((32, 64, 128), strides=(8, 16, 32), num_classes=3).eval()
    outs = head(feature_pyramid())
    assert len(outs) == 3
    for (box, cls), size in zip(outs, (80, 40, 20)):
        assert box.shape == (1, 4, size, size)
        assert cls.shape == (1, 3, size, size)
        assert (box > 0).all()


def test_deterministic_eval_forward():
    head = OcclusionAwareHead((16,), strides=(8,)).eval()
    x = [torch.randn(1, 16, 14, 14)]
    a = head(x)[0]
    b = head(x)[0]
    assert torch.equal(a[0], b[0]) and torch.equal(a[1], b[1])
