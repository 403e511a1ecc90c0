"""Training and prediction over container files."""

import os
from dataclasses import asdict

import numpy as np
import torch

from .container import ScenarioSet, read_scenarios, write_predictions
from .data import assemble_tensors, denormalize
from .model import TrainerConfig, build_model


def train(dataset_path: str, config: TrainerConfig, out_dir: str,
          log=print) -> str:
    """Train on a scenario file; writes checkpoint and per-epoch loss CSV.

    Optimizes the mean squared error between the normalized estimate and
    the normalized truth over all cells and layers with Adam at a constant
    learning rate. Deterministic for a fixed seed up to backend kernel
    nondeterminism. Returns the checkpoint path.
    """
    os.makedirs(out_dir, exist_ok=True)
    data = read_scenarios(dataset_path)
    inputs, targets = assemble_tensors(data, config)

    torch.manual_seed(config.seed)
    model = build_model(data.n_layers, config)
    optimizer = torch.optim.Adam(model.parameters(), lr=config.learning_rate)
    shuffler = torch.Generator().manual_seed(config.seed)

    n_records = inputs.shape[0]
    losses = []
    model.train()
    for epoch in range(config.epochs):
        order = torch.randperm(n_records, generator=shuffler)
        epoch_loss = 0.0
        n_batches = 0
        for start in range(0, n_records, config.batch_size):
            idx = order[start:start + config.batch_size]
            optimizer.zero_grad()
            out = model(inputs[idx])
            loss = torch.mean((out - targets[idx]) ** 2)
            loss.backward()
            optimizer.step()
            epoch_loss += float(loss.detach())
            n_batches += 1
        mean_loss = epoch_loss / n_batches
        losses.append(mean_loss)
        log(f"epoch {epoch + 1}/{config.epochs}: mean loss {mean_loss:.6f}")

    loss_csv = os.path.join(out_dir, "loss.csv")
    with open(loss_csv, "w", encoding="ascii") as fh:
        fh.write("epoch,mean_loss\n")
        for epoch, value in enumerate(losses, start=1):
            fh.write(f"{epoch},{value:.8f}\n")

    ckpt_path = os.path.join(out_dir, "model.pt")
    torch.save(
        {
            "state_dict": model.state_dict(),
            "config": asdict(config),
            "n_layers": data.n_layers,
            "grid_cells": data.n,
        },
        ckpt_path,
    )
    return ckpt_path


def load_checkpoint(path: str):
    payload = torch.load(path, map_location="cpu", weights_only=True)
    config = TrainerConfig(**payload["config"])
    model = build_model(payload["n_layers"], config)
    model.load_state_dict(payload["state_dict"])
    model.eval()
    return model, config, payload


def predict(checkpoint_path: str, dataset_path: str, out_path: str,
            batch_size: int = 8) -> int:
    """Run a checkpoint over a scenario file and write a prediction file.

    Outputs are denormalized back to dBm through the inverse affine map.
    Returns the number of predictions written.
    """
    model, config, payload = load_checkpoint(checkpoint_path)
    data = read_scenarios(dataset_path)
    if data.n_layers != payload["n_layers"]:
        raise ValueError(
            f"dataset has {data.n_layers} layers, checkpoint expects "
            f"{payload['n_layers']}"
        )
    inputs, _ = assemble_tensors(data, config)

    cubes = []
    with torch.no_grad():
        for start in range(0, inputs.shape[0], batch_size):
            out = model(inputs[start:start + batch_size]).numpy()
            for record in out:
                dbm = denormalize(record, config.norm_lo_dbm, config.norm_hi_dbm)
                cubes.append(np.moveaxis(dbm, 0, 2).astype(np.float32))
    scene_ids = [s.scene_id for s in data.samples]
    return write_predictions(out_path, scene_ids, cubes)


def evaluate_rmse(checkpoint_path: str, dataset_path: str) -> dict:
    """Test RMSE in dB of a checkpoint: overall and target-layer figures."""
    model, config, payload = load_checkpoint(checkpoint_path)
    data = read_scenarios(dataset_path)
    inputs, _ = assemble_tensors(data, config)
    sq_all = 0.0
    sq_target = 0.0
    n_all = 0
    n_target = 0
    with torch.no_grad():
        for start in range(0, inputs.shape[0], 8):
            block = model(inputs[start:start + 8]).numpy()
            for offset, record in enumerate(block):
                sample = data.samples[start + offset]
                est = denormalize(record, config.norm_lo_dbm, config.norm_hi_dbm)
                est = np.moveaxis(est, 0, 2)
                err = (est - sample.truth.astype(np.float64)) ** 2
                sq_all += err.sum()
                n_all += err.size
                sq_target += err[:, :, data.target_index].sum()
                n_target += err[:, :, data.target_index].size
    return {
        "overall_rmse_db": float(np.sqrt(sq_all / n_all)),
        "target_rmse_db": float(np.sqrt(sq_target / n_target)),
    }
