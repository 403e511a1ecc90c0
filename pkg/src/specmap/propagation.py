"""Ground-truth received-power maps from a scene.

Log-distance path loss with free-space reference at 1 m, per-cell wall
penetration loss capped at a configurable total, multi-transmitter power
superposition in the linear domain, and optional spatially correlated
log-normal shadowing.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import gaussian_filter

from .scene import Scene

# 20*log10(f_MHz) + 20*log10(d_m) - 27.55 is the free-space loss in dB;
# at the 1 m reference only the frequency term remains.
_FSPL_CONST_DB = 27.55


@dataclass(frozen=True)
class PropagationParams:
    """Channel model parameters.

    ``shadowing_sigma_db = 0`` disables shadowing entirely. The correlation
    length is expressed in cells and controls the low-pass smoothing of the
    shadowing field.
    """

    path_loss_exponent: float = 3.0
    wall_loss_per_cell_db: float = 2.0
    wall_loss_cap_db: float = 60.0
    reference_distance_m: float = 1.0
    noise_floor_dbm: float = -150.0
    shadowing_sigma_db: float = 0.0
    shadowing_correlation_cells: float = 8.0

    def __post_init__(self):
        if self.path_loss_exponent < 2.0:
            raise ValueError("path_loss_exponent must be >= 2 (free space)")
        if self.wall_loss_per_cell_db < 0 or self.wall_loss_cap_db < 0:
            raise ValueError("wall losses must be non-negative")
        if self.reference_distance_m <= 0:
            raise ValueError("reference_distance_m must be positive")
        if self.shadowing_sigma_db < 0:
            raise ValueError("shadowing_sigma_db must be non-negative")
        if self.shadowing_correlation_cells <= 0:
            raise ValueError("shadowing_correlation_cells must be positive")


def path_loss_db(
    freq_mhz: float,
    distance_m: float,
    walls_crossed: int,
    params: PropagationParams,
    min_distance_m: float = 0.0,
) -> float:
    """Total path loss in dB for one link.

    ``min_distance_m`` clamps the effective distance from below; callers
    evaluating at grid resolution pass half the cell interval to bound the
    loss inside the transmitter's own cell.
    """
    if freq_mhz <= 0:
        raise ValueError("frequency must be positive")
    if distance_m < 0:
        raise ValueError("distance must be non-negative")
    if walls_crossed < 0:
        raise ValueError("walls_crossed must be non-negative")
    d = max(distance_m, min_distance_m)
    if d <= 0:
        raise ValueError("effective distance is zero; supply min_distance_m")
    pl0 = 20.0 * math.log10(freq_mhz) - _FSPL_CONST_DB
    spread = 10.0 * params.path_loss_exponent * math.log10(d / params.reference_distance_m)
    walls = min(walls_crossed * params.wall_loss_per_cell_db, params.wall_loss_cap_db)
    return pl0 + spread + walls


def count_wall_crossings(buildings: np.ndarray, a: tuple[int, int], b: tuple[int, int]) -> int:
    """Occupied cells whose interior the center-to-center segment crosses.

    The segment runs between the centers of cells ``a`` and ``b``; the two
    endpoint cells are never counted. Traversal is exact: cell centers sit
    at half-integer coordinates, so every boundary crossing time is a ratio
    of integers and crossings can be ordered without floating point. When
    the segment passes exactly through a lattice corner the step is
    diagonal, skipping the two cells whose interiors are only touched.
    """
    if a == b:
        return 0
    ai, aj = int(a[0]), int(a[1])
    bi, bj = int(b[0]), int(b[1])
    di = bi - ai
    dj = bj - aj
    step_i = 1 if di > 0 else (-1 if di < 0 else 0)
    step_j = 1 if dj > 0 else (-1 if dj < 0 else 0)
    ni, nj = abs(di), abs(dj)
    # Crossing times: t = (m + 0.5)/ni along i, (n + 0.5)/nj along j.
    # Compare (2m+1)*nj vs (2n+1)*ni in exact integer arithmetic.
    i, j = ai, aj
    m = n = 0
    count = 0
    bld = buildings
    while m < ni or n < nj:
        if n >= nj:
            cmp = -1
        elif m >= ni:
            cmp = 1
        else:
            lhs = (2 * m + 1) * nj
            rhs = (2 * n + 1) * ni
            cmp = -1 if lhs < rhs else (1 if lhs > rhs else 0)
        if cmp < 0:
            i += step_i
            m += 1
        elif cmp > 0:
            j += step_j
            n += 1
        else:
            i += step_i
            j += step_j
            m += 1
            n += 1
        if (i, j) == (bi, bj):
            break
        if bld[i, j]:
            count += 1
    return count


def _wall_counts_from(buildings: np.ndarray, src: tuple[int, int]) -> np.ndarray:
    """Wall-crossing counts from one source cell to every cell of the grid."""
    n = buildings.shape[0]
    out = np.zeros((n, n), dtype=np.int32)
    if not buildings.any():
        return out
    for i in range(n):
        for j in range(n):
            out[i, j] = count_wall_crossings(buildings, src, (i, j))
    return out


def _shadow_field(rng: np.random.Generator, n: int, params: PropagationParams) -> np.ndarray:
    """Correlated shadowing field with standard deviation shadowing_sigma_db."""
    white = rng.standard_normal((n, n))
    smooth = gaussian_filter(white, sigma=params.shadowing_correlation_cells, mode="reflect")
    std = smooth.std()
    if std == 0:
        return np.zeros((n, n))
    return smooth * (params.shadowing_sigma_db / std)


def compute_ground_truth(
    scene: Scene, params: PropagationParams, seed: int = 0
) -> np.ndarray:
    """Received power in dBm for every cell and frequency layer.

    Returns an (N, N, K+1) array, layers in ascending frequency order.
    Per layer, each contributing transmitter's received power is converted
    to milliwatts, summed over transmitters, converted back to dBm, shadowed
    if enabled, and clamped at the noise floor. A transmitter contributes to
    a layer iff it is broadband or assigned to that layer's frequency;
    layers with no contributor stay at the noise floor.

    ``seed`` only matters when shadowing is enabled; the result is
    bit-identical for identical (scene, params, seed).
    """
    n = scene.grid.cells_per_side
    n_layers = scene.n_layers
    dd = scene.grid.interval
    min_d = dd / 2.0

    centers = (np.arange(n) + 0.5) * dd
    ci, cj = np.meshgrid(centers, centers, indexing="ij")

    linear_mw = np.zeros((n, n, n_layers))
    layer_has_source = np.zeros(n_layers, dtype=bool)
    pl0 = np.array([20.0 * math.log10(f) - _FSPL_CONST_DB for f in scene.frequencies_mhz])

    for tx in scene.transmitters:
        txi, txj = tx.cell
        tx_x, tx_y = (txi + 0.5) * dd, (txj + 0.5) * dd
        dist = np.hypot(ci - tx_x, cj - tx_y)
        np.maximum(dist, min_d, out=dist)
        spread = 10.0 * params.path_loss_exponent * np.log10(dist / params.reference_distance_m)
        walls = _wall_counts_from(scene.buildings, tx.cell)
        wall_db = np.minimum(walls * params.wall_loss_per_cell_db, params.wall_loss_cap_db)
        base = tx.power_dbm - spread - wall_db
        layers = range(n_layers) if tx.freq_index is None else (tx.freq_index,)
        for k in layers:
            linear_mw[:, :, k] += 10.0 ** ((base - pl0[k]) / 10.0)
            layer_has_source[k] = True

    cube = np.full((n, n, n_layers), params.noise_floor_dbm)
    hit = linear_mw > 0
    cube[hit] = 10.0 * np.log10(linear_mw[hit])

    if params.shadowing_sigma_db > 0:
        # One field per layer, drawn in layer order regardless of occupancy so
        # the fields only depend on (seed, layer); silent layers stay at the floor.
        rng = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
        for k in range(n_layers):
            shadow = _shadow_field(rng, n, params)
            if layer_has_source[k]:
                cube[:, :, k] += shadow

    np.maximum(cube, params.noise_floor_dbm, out=cube)
    return cube
