"""Receiver placement, incomplete observation cubes, and binary side maps."""

from dataclasses import dataclass

import numpy as np

from .scene import Scene


@dataclass(frozen=True)
class SamplingPlan:
    """Receiver deployment for one scene.

    ``receiver_cells`` holds distinct building-free cell indices, shape
    (n_receivers, 2), sorted lexicographically for reproducibility. The same
    receiver set observes every sampled frequency.
    """

    density: float
    receiver_cells: np.ndarray

    def __post_init__(self):
        cells = np.array(self.receiver_cells, dtype=np.int64)
        if cells.ndim != 2 or cells.shape[1] != 2 or len(cells) == 0:
            raise ValueError("receiver_cells must be a non-empty (n, 2) index array")
        order = np.lexsort((cells[:, 1], cells[:, 0]))
        cells = cells[order]
        if (np.diff(cells, axis=0) == 0).all(axis=1).any():
            raise ValueError("receiver cells must be distinct")
        cells.setflags(write=False)
        object.__setattr__(self, "receiver_cells", cells)

    def __len__(self) -> int:
        return len(self.receiver_cells)

    def location_map(self, n: int) -> np.ndarray:
        """Binary (n, n) map with 1 at receiver cells."""
        m = np.zeros((n, n), dtype=np.uint8)
        m[self.receiver_cells[:, 0], self.receiver_cells[:, 1]] = 1
        return m


@dataclass(frozen=True)
class SemanticMaps:
    """Binary side information: building occupancy and receiver locations."""

    city: np.ndarray      # (N, N) uint8, 1 = building
    sampling: np.ndarray  # (N, N) uint8, 1 = receiver present

    def __post_init__(self):
        city = np.array(self.city, dtype=np.uint8)
        sampling = np.array(self.sampling, dtype=np.uint8)
        if city.shape != sampling.shape or city.ndim != 2:
            raise ValueError("city and sampling maps must share a 2-D shape")
        for name, arr in (("city", city), ("sampling", sampling)):
            if not np.isin(arr, (0, 1)).all():
                raise ValueError(f"{name} map must be strictly binary")
            arr.setflags(write=False)
        object.__setattr__(self, "city", city)
        object.__setattr__(self, "sampling", sampling)


def place_receivers(scene: Scene, density: float, seed: int) -> SamplingPlan:
    """Sample receiver cells uniformly without replacement among free cells.

    The receiver count is ``density * n_free`` rounded half-up. Deterministic
    for a fixed seed.

    Raises
    ------
    ValueError
        If density is outside (0, 1] or rounds to zero receivers.
    """
    if not (0.0 < density <= 1.0):
        raise ValueError("density must lie in (0, 1]")
    free = scene.free_cells()
    count = int(np.floor(density * len(free) + 0.5))
    if count == 0:
        raise ValueError(
            f"density {density} yields zero receivers on {len(free)} free cells"
        )
    rng = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
    chosen = rng.choice(len(free), size=count, replace=False)
    return SamplingPlan(density=density, receiver_cells=free[chosen])


def build_incomplete_cube(
    truth: np.ndarray,
    plan: SamplingPlan,
    target_index: int,
    noise_sigma_db: float = 0.0,
    seed: int = 0,
) -> np.ndarray:
    """Observed cube: truth at receiver cells on sampled layers, zero elsewhere.

    The target layer is identically zero (nobody measures it); on every
    other layer the receiver cells copy the ground truth and all remaining
    cells hold the zero sentinel. ``noise_sigma_db`` optionally perturbs the
    copied values with i.i.d. Gaussian dB noise (off by default, matching
    noiseless receivers).
    """
    n, _, n_layers = truth.shape
    if not (0 <= target_index < n_layers):
        raise ValueError("target_index out of range")
    observed = np.zeros_like(truth)
    rows = plan.receiver_cells[:, 0]
    cols = plan.receiver_cells[:, 1]
    for k in range(n_layers):
        if k == target_index:
            continue
        observed[rows, cols, k] = truth[rows, cols, k]
    if noise_sigma_db > 0:
        rng = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
        for k in range(n_layers):
            if k == target_index:
                continue
            observed[rows, cols, k] += rng.normal(0.0, noise_sigma_db, size=len(rows))
    return observed


def build_semantics(scene: Scene, plan: SamplingPlan) -> SemanticMaps:
    """Binary city and receiver-location maps for one scene."""
    n = scene.grid.cells_per_side
    return SemanticMaps(city=scene.buildings, sampling=plan.location_map(n))


def stack_semantics_3d(maps: SemanticMaps, n_layers: int) -> tuple[np.ndarray, np.ndarray]:
    """Replicate both binary maps along a trailing frequency axis.

    Returns two (N, N, n_layers) binary arrays whose every layer copies the
    city map and the sampling map respectively.
    """
    if n_layers < 1:
        raise ValueError("n_layers must be at least 1")
    city = np.repeat(maps.city[:, :, None], n_layers, axis=2)
    sampling = np.repeat(maps.sampling[:, :, None], n_layers, axis=2)
    return city, sampling
