"""The on-disk container: fixed little-endian layout, byte-for-byte stable.

Writes a small dataset and a prediction file, reads them back, checks
bit-exact equality, and reconciles the observed file sizes with the layout
arithmetic. The same two formats are the hand-off point to the neural
trainer, which reads and writes them independently.
"""

import os
import tempfile

import numpy as np

from specmap import (
    ExperimentConfig,
    PredictionRecord,
    build_scenario,
    dataset_file_size,
    read_dataset,
    read_predictions,
    reconstruct_record,
    write_dataset,
    write_predictions,
)
from specmap.dataset import prediction_file_size

config = ExperimentConfig()
records = [build_scenario(config, density=0.1, scene_id=i, master_seed=42)
           for i in range(3)]

with tempfile.TemporaryDirectory() as tmp:
    ds_path = os.path.join(tmp, "scenes.bin")
    write_dataset(records, ds_path)
    size = os.path.getsize(ds_path)
    expected = dataset_file_size(3, 64, 4)
    print(f"dataset: {size} bytes on disk, {expected} from the layout formula "
          f"({'match' if size == expected else 'MISMATCH'})")

    loaded = read_dataset(ds_path)
    print(f"round trip: {'bit-identical' if loaded == records else 'DIFFERS'}")

    preds = [PredictionRecord(r.scene_id, reconstruct_record(r, "knn"))
             for r in records]
    pred_path = os.path.join(tmp, "estimates.bin")
    write_predictions(preds, pred_path, 64, 4)
    psize = os.path.getsize(pred_path)
    print(f"predictions: {psize} bytes, {prediction_file_size(3, 64, 4)} expected")
    print(f"prediction round trip: "
          f"{'bit-identical' if read_predictions(pred_path) == preds else 'DIFFERS'}")

print("\nper-record payload: 20 bytes of metadata, two float32 cubes "
      "(layer-major), and the two binary maps; no padding anywhere")
