"""Shape and gradient contract of the reconstruction network."""

import pytest
import torch

from dsdtrainer import TrainerConfig, build_model, parameter_count


def test_semantics_model_shape():
    model = build_model(4, TrainerConfig(base_width=8))
    x = torch.randn(2, 12, 64, 64)
    assert model(x).shape == (2, 4, 64, 64)


def test_ablation_model_shape():
    model = build_model(4, TrainerConfig(base_width=8, use_semantics=False))
    x = torch.randn(2, 4, 64, 64)
    assert model(x).shape == (2, 4, 64, 64)


def test_reference_widths_channel_plan():
    model = build_model(4, TrainerConfig())
    assert model.enc1.conv1.out_channels == 64
    assert model.enc2.conv1.out_channels == 128
    assert model.enc3.conv1.out_channels == 256
    assert model.bottleneck.conv1.out_channels == 512
    assert model.head.out_channels == 4
    # duplicated-input skip: decoder level 1 sees encoder + upsample + observations
    assert model.dec1.conv1.in_channels == 64 + 64 + 4


def test_gradients_reach_semantic_channels():
    model = build_model(4, TrainerConfig(base_width=8))
    x = torch.randn(2, 12, 64, 64, requires_grad=True)
    loss = model(x).square().mean()
    loss.backward()
    city_grad = x.grad[:, 4:8]
    receiver_grad = x.grad[:, 8:12]
    assert float(city_grad.abs().sum()) > 0.0
    assert float(receiver_grad.abs().sum()) > 0.0


def test_build_deterministic_for_seed():
    config = TrainerConfig(base_width=8, seed=123)
    a = build_model(4, config)
    b = build_model(4, config)
    assert parameter_count(a) == parameter_count(b)
    for pa, pb in zip(a.parameters(), b.parameters()):
        assert torch.equal(pa, pb)
    c = build_model(4, TrainerConfig(base_width=8, seed=124))
    assert any(
        not torch.equal(pa, pc) for pa, pc in zip(a.parameters(), c.parameters())
    )


def test_grid_must_be_divisible_by_eight():
    model = build_model(4, TrainerConfig(base_width=8))
    with pytest.raises(ValueError):
        model(torch.randn(1, 12, 60, 60))


def test_config_validation():
    with pytest.raises(ValueError):
        TrainerConfig(norm_lo_dbm=0.0, norm_hi_dbm=0.0)
    with pytest.raises(ValueError):
        TrainerConfig(epochs=0)
