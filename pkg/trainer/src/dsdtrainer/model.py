"""Encoder-decoder reconstruction network with a duplicated-input skip.

Four resolution levels (64 -> 32 -> 16 -> 8 for a 64-cell grid), two 3x3
convolutions with ReLU per level, channel widths growing 64/128/256/512,
transposed-convolution upsampling, and an encoder skip at every decoder
level. On the third skip counting up from the bottleneck (the full
resolution level) the normalized observation cube is resized and
concatenated alongside the encoder features, feeding the raw measurements
back in next to the learned features. A final 1x1 convolution emits one
channel per frequency layer, including the never-observed target layer.

The semantics-aided variant takes the observation cube plus the stacked
city and receiver-location maps (3*(K+1) channels); the ablation takes the
observation cube alone.
"""

from dataclasses import dataclass

import torch
import torch.nn as nn
import torch.nn.functional as F


@dataclass(frozen=True)
class TrainerConfig:
    """Training hyperparameters; defaults follow the reference experiment."""

    epochs: int = 30
    batch_size: int = 4
    learning_rate: float = 3e-4
    norm_lo_dbm: float = -150.0
    norm_hi_dbm: float = 0.0
    use_semantics: bool = True
    seed: int = 0
    base_width: int = 64  # 64 reproduces the reference widths 64/128/256/512

    def __post_init__(self):
        if self.norm_lo_dbm >= self.norm_hi_dbm:
            raise ValueError("norm_lo_dbm must be below norm_hi_dbm")
        if self.epochs < 1 or self.batch_size < 1:
            raise ValueError("epochs and batch_size must be at least 1")
        if self.base_width < 1:
            raise ValueError("base_width must be positive")


class ConvBlock(nn.Module):
    def __init__(self, c_in, c_out):
        super().__init__()
        self.conv1 = nn.Conv2d(c_in, c_out, 3, padding=1)
        self.conv2 = nn.Conv2d(c_out, c_out, 3, padding=1)

    def forward(self, x):
        x = F.relu(self.conv1(x))
        return F.relu(self.conv2(x))


class SpectrumUNet(nn.Module):
    """Maps (batch, C_in, N, N) to (batch, K+1, N, N).

    ``C_in`` is ``3 * n_layers`` with semantics (observations, city stack,
    receiver stack) or ``n_layers`` without; the observation cube always
    occupies the first ``n_layers`` channels and is the tensor duplicated
    into the third skip connection.
    """

    def __init__(self, n_layers: int, use_semantics: bool = True, base_width: int = 64):
        super().__init__()
        self.n_layers = n_layers
        self.use_semantics = use_semantics
        w = base_width
        c_in = 3 * n_layers if use_semantics else n_layers

        self.enc1 = ConvBlock(c_in, w)
        self.enc2 = ConvBlock(w, 2 * w)
        self.enc3 = ConvBlock(2 * w, 4 * w)
        self.bottleneck = ConvBlock(4 * w, 8 * w)
        self.pool = nn.MaxPool2d(2)

        self.up3 = nn.ConvTranspose2d(8 * w, 4 * w, 2, stride=2)
        self.dec3 = ConvBlock(8 * w, 4 * w)
        self.up2 = nn.ConvTranspose2d(4 * w, 2 * w, 2, stride=2)
        self.dec2 = ConvBlock(4 * w, 2 * w)
        self.up1 = nn.ConvTranspose2d(2 * w, w, 2, stride=2)
        # third skip from the bottom: encoder features + duplicated observations
        self.dec1 = ConvBlock(2 * w + n_layers, w)
        self.head = nn.Conv2d(w, n_layers, 1)

    def forward(self, x):
        n = x.shape[-1]
        if n % 8 != 0:
            raise ValueError(f"grid size {n} must be divisible by 8")
        observed = x[:, :self.n_layers]

        e1 = self.enc1(x)
        e2 = self.enc2(self.pool(e1))
        e3 = self.enc3(self.pool(e2))
        b = self.bottleneck(self.pool(e3))

        d3 = self.dec3(torch.cat([self.up3(b), e3], dim=1))
        d2 = self.dec2(torch.cat([self.up2(d3), e2], dim=1))
        u1 = self.up1(d2)
        if observed.shape[-2:] != u1.shape[-2:]:
            observed = F.interpolate(observed, size=u1.shape[-2:], mode="nearest")
        d1 = self.dec1(torch.cat([u1, e1, observed], dim=1))
        return self.head(d1)


def build_model(n_layers: int, config: TrainerConfig) -> SpectrumUNet:
    """Construct the network with seed-deterministic initialization."""
    torch.manual_seed(config.seed)
    return SpectrumUNet(n_layers=n_layers, use_semantics=config.use_semantics,
                        base_width=config.base_width)


def parameter_count(model: nn.Module) -> int:
    return sum(p.numel() for p in model.parameters())
