"""Generate one urban scene and look at its multi-frequency power maps.

Walks through the first half of the pipeline: a randomized city layout on
the reference 64x64 / 256 m grid, transmitters dropped on free cells, and
the ground-truth received-power cube computed with the obstacle-aware
log-distance model. Each frequency layer is written out as a grayscale PGM.
"""

import os

import numpy as np

from specmap import (
    ExperimentConfig,
    compute_ground_truth,
    generate_scene,
    render_layer,
)

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

config = ExperimentConfig()
scene = generate_scene(config.scene, seed=20240901)

print(f"grid: {scene.grid.cells_per_side}x{scene.grid.cells_per_side} cells, "
      f"{scene.grid.interval:.0f} m interval")
print(f"buildings cover {scene.buildings.mean():.1%} of the area")
print(f"{len(scene.transmitters)} transmitter(s):")
for tx in scene.transmitters:
    band = "broadband" if tx.freq_index is None else f"{scene.frequencies_mhz[tx.freq_index]:.0f} MHz"
    print(f"  cell {tx.cell}, {tx.power_dbm:.1f} dBm, {band}")

cube = compute_ground_truth(scene, config.channel)
print(f"\nground-truth cube shape {cube.shape}, "
      f"range [{cube.min():.1f}, {cube.max():.1f}] dBm")

# the city map itself, then one image per frequency layer
city_img = render_layer(scene.buildings.astype(float), lo=0.0, hi=1.0)
with open(os.path.join(OUT, "city.pgm"), "wb") as fh:
    fh.write(city_img)
for k, freq in enumerate(scene.frequencies_mhz):
    with open(os.path.join(OUT, f"truth_{freq:.0f}mhz.pgm"), "wb") as fh:
        fh.write(render_layer(cube[:, :, k]))
    marker = "  <- unobserved target" if k == scene.target_index else ""
    print(f"  layer {k}: {freq:.0f} MHz, mean {cube[:, :, k].mean():.1f} dBm{marker}")

print(f"\nimages written to {OUT}/")
