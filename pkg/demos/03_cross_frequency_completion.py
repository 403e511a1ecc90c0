"""Why the unobserved layer is recoverable at all: cross-frequency structure.

With broadband transmitters the per-cell spectrum follows a straight line
in 10*log10(f), so a per-cell regression over the sampled layers nails the
missing frequency. With per-transmitter frequency assignment the target
layer carries emitters nobody observed at any frequency, and the same
regression can only extrapolate the shared propagation trend.
"""

import numpy as np

from specmap import ExperimentConfig, SceneConfig, build_scenario, reconstruct_record, rmse
from specmap.propagation import PropagationParams

for label, scene_cfg, channel in (
    # broadband: keep every value above the clamp so the law is unbroken
    ("broadband transmitters", SceneConfig(broadband=True),
     PropagationParams(noise_floor_dbm=-500.0)),
    ("per-transmitter frequencies", SceneConfig(broadband=False),
     PropagationParams()),
):
    config = ExperimentConfig(scene=scene_cfg, channel=channel)
    errors = []
    for scene_id in range(5):
        record = build_scenario(config, density=1.0, scene_id=scene_id, master_seed=5)
        estimate = reconstruct_record(record, "idw").astype(np.float64)
        report = rmse(estimate, record.truth_cube.astype(np.float64),
                      mask_policy="exclude_buildings",
                      buildings=record.building_map)
        errors.append(report.per_layer_rmse_db[record.target_index])
    errors = np.array(errors)
    print(f"{label}: completed-layer RMSE over 5 scenes "
          f"(full sampling, free cells) = {errors.mean():.4f} dB "
          f"(min {errors.min():.2e}, max {errors.max():.2e})")

print("\nbroadband scenes complete the missing layer essentially exactly; "
      "mixed-frequency scenes show the well-posedness gap")
