"""Deterministic spatial interpolators and cross-frequency layer completion."""

from dataclasses import dataclass
from typing import Mapping

import numpy as np
from scipy.spatial.distance import cdist

from .grid import GridSpec


@dataclass(frozen=True)
class SampleList:
    """Point observations of one frequency layer.

    ``cells`` holds distinct grid indices, shape (n, 2); ``values`` the
    measured dBm values. Entries are kept sorted lexicographically by cell
    so distance ties resolve the same way everywhere.
    """

    cells: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        cells = np.array(self.cells, dtype=np.int64)
        values = np.array(self.values, dtype=np.float64)
        if cells.ndim != 2 or cells.shape[1] != 2:
            raise ValueError("cells must have shape (n, 2)")
        if values.shape != (len(cells),):
            raise ValueError("values must be one value per cell")
        if len(cells) == 0:
            raise ValueError("sample list is empty")
        if not np.isfinite(values).all():
            raise ValueError("sample values must be finite")
        order = np.lexsort((cells[:, 1], cells[:, 0]))
        cells = cells[order]
        values = values[order]
        if (np.diff(cells, axis=0) == 0).all(axis=1).any():
            raise ValueError("sample cells must be distinct")
        cells.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.values)

    def points(self, grid: GridSpec) -> np.ndarray:
        """Sample cell centers in meters, shape (n, 2)."""
        return (self.cells + 0.5) * grid.interval

    @classmethod
    def from_layer(cls, layer: np.ndarray, location_map: np.ndarray) -> "SampleList":
        """Extract samples of one observed layer at the marked receiver cells."""
        cells = np.argwhere(location_map == 1)
        return cls(cells=cells, values=layer[cells[:, 0], cells[:, 1]])


def idw_reconstruct(samples: SampleList, grid: GridSpec, power: float = 2.0) -> np.ndarray:
    """Inverse-distance-weighted interpolation onto the full grid.

    Parameters
    ----------
    samples : SampleList
        Observations of one layer; at least one.
    grid : GridSpec
        Geometry of the prediction grid.
    power : float
        Distance exponent; weights are ``d ** -power`` over all samples
        using cell-center distances.

    Returns
    -------
    np.ndarray
        (N, N) interpolated layer. Cells that coincide with a sample return
        the sample value exactly.
    """
    if power <= 0:
        raise ValueError("power must be positive")
    n = grid.cells_per_side
    pts = grid.center_coords()
    d = cdist(pts, samples.points(grid))
    out = np.empty(len(pts))
    exact = d.min(axis=1) == 0.0
    if exact.any():
        out[exact] = samples.values[d[exact].argmin(axis=1)]
    rest = ~exact
    if rest.any():
        w = d[rest] ** (-power)
        out[rest] = (w @ samples.values) / w.sum(axis=1)
    return out.reshape(n, n)


def knn_reconstruct(samples: SampleList, grid: GridSpec, k: int = 5) -> np.ndarray:
    """Mean of the k nearest samples for every cell.

    Parameters
    ----------
    samples : SampleList
        Observations of one layer.
    grid : GridSpec
        Geometry of the prediction grid.
    k : int
        Neighbor count, clamped to the sample count. Distance ties break
        toward the lexicographically smaller sample cell (samples are
        stored sorted and the distance sort is stable).

    Returns
    -------
    np.ndarray
        (N, N) interpolated layer.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    k = min(k, len(samples))
    n = grid.cells_per_side
    d = cdist(grid.center_coords(), samples.points(grid))
    nearest = np.argsort(d, axis=1, kind="stable")[:, :k]
    return samples.values[nearest].mean(axis=1).reshape(n, n)


def complete_target_layer(
    estimates: Mapping[int, np.ndarray],
    frequencies_mhz: "np.ndarray | list[float]",
    target_index: int,
) -> np.ndarray:
    """Infer the unobserved layer from per-cell log-frequency regression.

    Fits, per cell, an ordinary least squares line of value (dBm) against
    ``10*log10(f_MHz)`` across the reconstructed layers and evaluates it at
    the target frequency. Exact when every layer sees the same emitters with
    a pure ``20*log10(f)`` frequency dependence; an extrapolation heuristic
    otherwise.
    """
    keys = sorted(estimates.keys())
    if target_index in keys:
        raise ValueError("estimates must not include the target layer")
    if len(keys) < 2:
        raise ValueError("need at least two reconstructed layers")
    freqs = np.asarray(frequencies_mhz, dtype=np.float64)
    log_f = 10.0 * np.log10(freqs[keys])
    stack = np.stack([np.asarray(estimates[k], dtype=np.float64) for k in keys])
    shape = stack.shape[1:]
    y = stack.reshape(len(keys), -1)

    # Shared design matrix: solve the normal equations once for all cells.
    design = np.column_stack([np.ones_like(log_f), log_f])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    target_log_f = 10.0 * np.log10(freqs[target_index])
    completed = coef[0] + coef[1] * target_log_f
    return completed.reshape(shape)
