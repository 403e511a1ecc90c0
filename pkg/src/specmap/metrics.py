"""RMSE evaluation of reconstructed cubes against ground truth."""

from dataclasses import dataclass

import numpy as np

MASK_POLICIES = ("all_cells", "exclude_buildings")


@dataclass(frozen=True)
class EvalReport:
    """RMSE summary for one (estimate, truth) cube pair.

    ``per_layer_rmse_db[k]`` covers layer k alone; ``overall_rmse_db`` is
    the root of the cell-count-weighted mean squared error across all
    layers, so per-layer and overall figures are consistent under any mask.
    """

    per_layer_rmse_db: np.ndarray
    overall_rmse_db: float
    cells_per_layer: int
    mask_policy: str


def rmse(
    estimate: np.ndarray,
    truth: np.ndarray,
    mask_policy: str = "all_cells",
    buildings: np.ndarray | None = None,
) -> EvalReport:
    """Root-mean-square error in dB, per layer and overall.

    ``mask_policy`` selects which cells enter the sums: every cell, or all
    building-free cells (requires ``buildings``). Symmetric in its first two
    arguments and invariant to adding a common constant to both cubes.
    """
    estimate = np.asarray(estimate, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.float64)
    if estimate.shape != truth.shape:
        raise ValueError(f"shape mismatch: {estimate.shape} vs {truth.shape}")
    if estimate.ndim != 3:
        raise ValueError("cubes must have shape (N, N, layers)")
    if mask_policy not in MASK_POLICIES:
        raise ValueError(f"mask_policy must be one of {MASK_POLICIES}")

    if mask_policy == "exclude_buildings":
        if buildings is None:
            raise ValueError("exclude_buildings requires the building map")
        include = np.asarray(buildings) == 0
        if not include.any():
            raise ValueError("building map excludes every cell")
    else:
        include = np.ones(estimate.shape[:2], dtype=bool)

    sq = (estimate - truth) ** 2
    n_cells = int(include.sum())
    per_layer = np.sqrt(sq[include].sum(axis=0) / n_cells)
    overall = float(np.sqrt(sq[include].sum() / (n_cells * estimate.shape[2])))
    return EvalReport(
        per_layer_rmse_db=per_layer,
        overall_rmse_db=overall,
        cells_per_layer=n_cells,
        mask_policy=mask_policy,
    )


def aggregate_rmse(entries: "list[tuple[int, float]]") -> float:
    """Combine per-scene RMSEs into one figure.

    ``entries`` holds (cell_count, rmse) pairs; the aggregate is the root of
    the cell-count-weighted mean of squared RMSEs, i.e. the RMSE that a
    single pooled evaluation over all cells would produce.
    """
    if not entries:
        raise ValueError("nothing to aggregate")
    counts = np.array([e[0] for e in entries], dtype=np.float64)
    values = np.array([e[1] for e in entries], dtype=np.float64)
    return float(np.sqrt((counts * values**2).sum() / counts.sum()))
