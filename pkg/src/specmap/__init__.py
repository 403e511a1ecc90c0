"""Synthetic urban radio scenes and multi-frequency spectrum map reconstruction.

The package covers the full desk-scale experiment loop:

* randomized urban scene generation on a regular grid (`scene`),
* obstacle-aware multi-transmitter ground-truth power maps (`propagation`),
* receiver placement, incomplete observation cubes and binary side maps
  (`observation`),
* classical reconstruction: IDW, KNN, ordinary kriging and cross-frequency
  completion of the unobserved layer (`interpolate`, `kriging`),
* RMSE evaluation and grayscale rendering (`metrics`, `render`),
* a bit-exact binary container for scenario and prediction files
  (`dataset`), and a command line front end (`cli`).
"""

from .grid import GridSpec, cell_center
from .scene import Scene, SceneConfig, Transmitter, SceneGenerationError, generate_scene
from .propagation import (
    PropagationParams,
    path_loss_db,
    count_wall_crossings,
    compute_ground_truth,
)
from .observation import (
    SamplingPlan,
    SemanticMaps,
    place_receivers,
    build_incomplete_cube,
    build_semantics,
    stack_semantics_3d,
)
from .interpolate import SampleList, idw_reconstruct, knn_reconstruct, complete_target_layer
from .kriging import (
    VariogramModel,
    empirical_variogram,
    fit_variogram,
    kriging_reconstruct,
    kriging_reconstruct_stack,
)
from .metrics import EvalReport, rmse, aggregate_rmse
from .render import render_layer
from .dataset import (
    ScenarioRecord,
    PredictionRecord,
    write_dataset,
    read_dataset,
    write_predictions,
    read_predictions,
    dataset_file_size,
    DatasetError,
    DatasetFormatError,
    DatasetTruncatedError,
    DatasetValidationError,
)
from .config import ExperimentConfig
from .pipeline import build_scenario, reconstruct_record, derive_seed

__version__ = "0.1.0"
