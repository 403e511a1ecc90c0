"""Semantics-aided UNet training for spectrum map reconstruction.

Consumes the experiment's binary scenario files, trains either the
semantics-aided network (observations + binary city and receiver maps) or
the observations-only ablation, and emits prediction files the evaluation
side understands.
"""

from .container import (
    ContainerError,
    Sample,
    ScenarioSet,
    read_predictions,
    read_scenarios,
    write_predictions,
)
from .data import assemble_tensors, denormalize, normalize, normalize_observed
from .model import SpectrumUNet, TrainerConfig, build_model, parameter_count
from .train import evaluate_rmse, load_checkpoint, predict, train

__version__ = "0.1.0"
