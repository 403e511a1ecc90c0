"""Normalization and tensor assembly from container samples."""

import numpy as np
import torch

from .container import ScenarioSet
from .model import TrainerConfig

# Unsampled cells keep the exact value 0; sampled values land in
# [UNSAMPLED_FLOOR, 1] so zero stays uniquely the "no measurement" code.
UNSAMPLED_FLOOR = 1.0 / 255.0


def normalize(values: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """Affine map [lo, hi] -> [floor, 1]."""
    return UNSAMPLED_FLOOR + (values - lo) / (hi - lo) * (1.0 - UNSAMPLED_FLOOR)


def denormalize(values: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """Inverse of :func:`normalize`."""
    return lo + (values - UNSAMPLED_FLOOR) * (hi - lo) / (1.0 - UNSAMPLED_FLOOR)


def normalize_observed(observed: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """Normalize measurements, preserving the zero sentinel of unsampled cells."""
    scaled = normalize(observed, lo, hi)
    return np.where(observed == 0.0, 0.0, scaled).astype(np.float32)


def assemble_tensors(data: ScenarioSet, config: TrainerConfig):
    """Model inputs and normalized targets for a whole scenario set.

    Returns (inputs, targets) shaped (R, C, N, N) and (R, K+1, N, N) in
    channels-first order. Inputs stack the normalized observation cube and,
    when semantics are on, the frequency-stacked binary city and receiver
    maps; the binary channels stay unnormalized.
    """
    lo, hi = config.norm_lo_dbm, config.norm_hi_dbm
    k1 = data.n_layers
    inputs = []
    targets = []
    for sample in data.samples:
        obs = normalize_observed(sample.observed, lo, hi)
        obs = np.moveaxis(obs, 2, 0)  # (K+1, N, N)
        if config.use_semantics:
            city = np.repeat(sample.city[None, :, :], k1, axis=0).astype(np.float32)
            recv = np.repeat(sample.receivers[None, :, :], k1, axis=0).astype(np.float32)
            inputs.append(np.concatenate([obs, city, recv], axis=0))
        else:
            inputs.append(obs)
        truth = normalize(sample.truth, lo, hi).astype(np.float32)
        targets.append(np.moveaxis(truth, 2, 0))
    return (
        torch.from_numpy(np.stack(inputs)),
        torch.from_numpy(np.stack(targets)),
    )
