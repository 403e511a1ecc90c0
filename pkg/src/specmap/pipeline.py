"""Scenario assembly and per-record reconstruction used by the CLI and demos."""

import numpy as np

from .config import ExperimentConfig
from .dataset import ScenarioRecord
from .grid import GridSpec
from .interpolate import SampleList, complete_target_layer, idw_reconstruct, knn_reconstruct
from .kriging import empirical_variogram, fit_variogram, kriging_reconstruct_stack
from .observation import build_incomplete_cube, build_semantics, place_receivers
from .propagation import compute_ground_truth
from .scene import generate_scene

METHODS = ("idw", "knn", "kriging")


def derive_seed(master_seed: int, *path: int) -> int:
    """Stable 64-bit sub-seed for one step of one scene of one run.

    Feeding (master seed, scene index, stage index) through a seed sequence
    gives independent streams that are reproducible regardless of generation
    order, so scenes can be built in parallel.
    """
    state = np.random.SeedSequence([master_seed, *path]).generate_state(1, np.uint64)
    return int(state[0])


def build_scenario(
    config: ExperimentConfig,
    density: float,
    scene_id: int,
    master_seed: int,
) -> ScenarioRecord:
    """Generate one complete experiment sample.

    Scene layout, receiver placement, shadowing and optional measurement
    noise each consume an independent derived stream, so the record is a
    pure function of (config, density, scene_id, master_seed).
    """
    scene_seed = derive_seed(master_seed, scene_id, 0)
    sampling_seed = derive_seed(master_seed, scene_id, 1)
    shadow_seed = derive_seed(master_seed, scene_id, 2)
    noise_seed = derive_seed(master_seed, scene_id, 3)

    scene = generate_scene(config.scene, scene_seed)
    truth = compute_ground_truth(scene, config.channel, seed=shadow_seed)
    plan = place_receivers(scene, density, sampling_seed)
    observed = build_incomplete_cube(
        truth, plan, scene.target_index,
        noise_sigma_db=config.noise_sigma_db, seed=noise_seed,
    )
    maps = build_semantics(scene, plan)
    return ScenarioRecord(
        scene_id=scene_id,
        density=density,
        seed=scene_seed,
        frequencies_mhz=scene.frequencies_mhz,
        target_index=scene.target_index,
        truth_cube=truth.astype(np.float32),
        observed_cube=observed.astype(np.float32),
        building_map=maps.city,
        receiver_map=maps.sampling,
    )


def reconstruct_record(
    record: ScenarioRecord,
    method: str,
    idw_power: float = 2.0,
    knn_k: int = 5,
    kriging_neighborhood: int = 32,
) -> np.ndarray:
    """Estimate the full cube of one record from its observed samples.

    Every sampled layer is interpolated onto the full grid with the chosen
    method; the never-observed target layer is then completed from the
    per-layer estimates by log-frequency regression. Distances are taken in
    cell units (the container stores no physical side length); all three
    estimators depend only on relative geometry, so results are unaffected.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
    n = record.n
    grid = GridSpec(side_meters=float(n), cells_per_side=n)

    sampled_layers = [k for k in range(len(record.frequencies_mhz))
                      if k != record.target_index]
    layer_samples = {
        k: SampleList.from_layer(
            record.observed_cube[:, :, k].astype(np.float64), record.receiver_map
        )
        for k in sampled_layers
    }

    estimates: dict[int, np.ndarray] = {}
    if method == "idw":
        for k in sampled_layers:
            estimates[k] = idw_reconstruct(layer_samples[k], grid, power=idw_power)
    elif method == "knn":
        for k in sampled_layers:
            estimates[k] = knn_reconstruct(layer_samples[k], grid, k=knn_k)
    else:
        # one receiver set observes every layer: share the neighbor geometry
        models = [
            fit_variogram(empirical_variogram(layer_samples[k], grid), grid)
            for k in sampled_layers
        ]
        stacked = kriging_reconstruct_stack(
            [layer_samples[k] for k in sampled_layers], grid, models,
            neighborhood=kriging_neighborhood,
        )
        estimates = dict(zip(sampled_layers, stacked))

    target = complete_target_layer(
        estimates, record.frequencies_mhz, record.target_index
    )
    cube = np.empty((n, n, len(record.frequencies_mhz)), dtype=np.float32)
    for k, layer in estimates.items():
        cube[:, :, k] = layer
    cube[:, :, record.target_index] = target
    return cube
